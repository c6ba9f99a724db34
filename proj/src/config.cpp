#include "ewd/config.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ewd/errors.hpp"

namespace ewd {
namespace {

struct ConfigLine {
    int no = 0;
    std::string key;
    std::vector<std::string> args;
    std::string rest;  // everything after the key, untrimmed between tokens
};

std::string strip_comment(const std::string& raw) {
    const std::size_t pos = raw.find('#');
    return pos == std::string::npos ? raw : raw.substr(0, pos);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream ss(s);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

double parse_num(const std::string& tok, int line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ParseError("expected a number, got '" + tok + "'", line, 1);
    }
}

long parse_long(const std::string& tok, int line) {
    try {
        std::size_t used = 0;
        const long v = std::stol(tok, &used);
        if (used != tok.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ParseError("expected an integer, got '" + tok + "'", line, 1);
    }
}

std::vector<Predictor> parse_predictor_list(const std::string& rest, int line) {
    std::vector<Predictor> out;
    std::string piece;
    std::stringstream ss(rest);
    while (std::getline(ss, piece, '|')) {
        // trim
        std::size_t b = piece.find_first_not_of(" \t");
        std::size_t e = piece.find_last_not_of(" \t");
        if (b == std::string::npos) throw ParseError("empty predictor", line, 1);
        try {
            out.push_back(parse_predictor(piece.substr(b, e - b + 1)));
        } catch (const ParseError& pe) {
            throw ParseError(pe.what(), line, pe.column);
        }
    }
    if (out.empty()) throw ParseError("empty predictor list", line, 1);
    return out;
}

std::vector<std::vector<double>> cartesian(const std::vector<std::vector<double>>& levels) {
    std::vector<std::vector<double>> out{{}};
    for (const auto& axis : levels) {
        std::vector<std::vector<double>> next;
        next.reserve(out.size() * axis.size());
        for (const auto& prefix : out) {
            for (double v : axis) {
                auto row = prefix;
                row.push_back(v);
                next.push_back(std::move(row));
            }
        }
        out = std::move(next);
    }
    return out;
}

std::vector<std::vector<double>> read_combo_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open combos file: " + path);
    std::vector<std::vector<double>> combos;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string cleaned = strip_comment(line);
        for (char& ch : cleaned)
            if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
        const std::vector<std::string> toks = split_ws(cleaned);
        if (toks.empty()) continue;
        std::vector<double> row;
        for (const auto& t : toks) row.push_back(parse_num(t, lineno));
        combos.push_back(std::move(row));
    }
    return combos;
}

}  // namespace

int default_grid_density(std::size_t k) {
    if (k <= 2) return 201;
    if (k == 3) return 41;
    return 11;
}

ExperimentConfig parse_config(const std::string& text, const std::string& base_dir) {
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    std::string section;

    std::vector<std::pair<double, double>> bounds;
    std::vector<std::vector<double>> discrete_levels;
    std::vector<std::vector<double>> combos;
    bool combos_grid = false;

    std::string model_type, link_name, family_name;
    int categories = 0;
    std::vector<Predictor> glm_predictors;
    std::vector<std::pair<int, std::vector<Predictor>>> category_blocks;
    std::vector<Predictor> shared_block;

    std::optional<std::string> sample_path;
    std::vector<PriorCoordinate> prior_coords;
    std::size_t mc_size = 10000;
    std::optional<std::uint64_t> seed;
    bool feasibility_filter = true;

    ExperimentConfig cfg;

    auto resolve = [&](const std::string& p) {
        const std::filesystem::path fp(p);
        if (fp.is_absolute() || base_dir.empty()) return p;
        return (std::filesystem::path(base_dir) / fp).string();
    };

    std::vector<std::vector<double>> inline_rows;
    bool in_inline = false;

    while (std::getline(in, raw)) {
        ++lineno;
        const std::string line = strip_comment(raw);
        const std::vector<std::string> toks = split_ws(line);
        if (toks.empty()) continue;

        if (in_inline) {
            if (toks[0] == "end") {
                in_inline = false;
                combos = inline_rows;
                continue;
            }
            std::vector<double> row;
            for (const auto& t : toks) row.push_back(parse_num(t, lineno));
            inline_rows.push_back(std::move(row));
            continue;
        }

        if (toks[0].front() == '[') {
            if (toks[0].back() != ']')
                throw ParseError("malformed section header", lineno, 1);
            section = toks[0].substr(1, toks[0].size() - 2);
            if (section != "region" && section != "model" && section != "ensemble" &&
                section != "algorithm" && section != "rounding" && section != "output")
                throw ParseError("unknown section [" + section + "]", lineno, 1);
            continue;
        }
        if (section.empty()) throw ParseError("key outside any [section]", lineno, 1);

        const std::string& key = toks[0];
        const std::vector<std::string> args(toks.begin() + 1, toks.end());
        const std::size_t key_pos = line.find(key);
        const std::string rest = line.substr(key_pos + key.size());

        if (section == "region") {
            if (key == "continuous") {
                if (args.size() != 2) throw ParseError("continuous needs: lower upper", lineno, 1);
                bounds.emplace_back(parse_num(args[0], lineno), parse_num(args[1], lineno));
            } else if (key == "discrete") {
                if (args.empty()) throw ParseError("discrete needs level values", lineno, 1);
                std::vector<double> lv;
                for (const auto& a : args) lv.push_back(parse_num(a, lineno));
                discrete_levels.push_back(std::move(lv));
            } else if (key == "combos") {
                if (args.empty()) throw ParseError("combos needs: grid|inline|csv", lineno, 1);
                if (args[0] == "grid") {
                    combos_grid = true;
                } else if (args[0] == "inline") {
                    in_inline = true;
                    inline_rows.clear();
                } else if (args[0] == "csv") {
                    if (args.size() != 2) throw ParseError("combos csv needs a path", lineno, 1);
                    combos = read_combo_csv(resolve(args[1]));
                } else {
                    throw ParseError("combos mode must be grid, inline, or csv", lineno, 1);
                }
            } else {
                throw ParseError("unknown region key '" + key + "'", lineno, 1);
            }
        } else if (section == "model") {
            if (key == "type") {
                model_type = args.at(0);
            } else if (key == "link") {
                link_name = args.at(0);
            } else if (key == "predictors") {
                glm_predictors = parse_predictor_list(rest, lineno);
            } else if (key == "family") {
                family_name = args.at(0);
            } else if (key == "categories") {
                categories = static_cast<int>(parse_long(args.at(0), lineno));
            } else if (key == "hc") {
                shared_block = parse_predictor_list(rest, lineno);
            } else if (key.size() >= 2 && key[0] == 'h' &&
                       std::isdigit(static_cast<unsigned char>(key[1]))) {
                const int j = std::atoi(key.c_str() + 1);
                if (j < 1) throw ParseError("category blocks are h1, h2, ...", lineno, 1);
                category_blocks.emplace_back(j, parse_predictor_list(rest, lineno));
            } else {
                throw ParseError("unknown model key '" + key + "'", lineno, 1);
            }
        } else if (section == "ensemble") {
            if (key == "sample") {
                if (args.size() != 2 || args[0] != "csv")
                    throw ParseError("sample needs: csv PATH", lineno, 1);
                sample_path = resolve(args[1]);
            } else if (key == "prior") {
                if (args.size() != 3) throw ParseError("prior needs: kind a b", lineno, 1);
                PriorCoordinate pc;
                if (args[0] == "uniform")
                    pc.kind = PriorCoordinate::Kind::Uniform;
                else if (args[0] == "normal")
                    pc.kind = PriorCoordinate::Kind::Normal;
                else
                    throw ParseError("prior kind must be uniform or normal", lineno, 1);
                pc.a = parse_num(args[1], lineno);
                pc.b = parse_num(args[2], lineno);
                prior_coords.push_back(pc);
            } else if (key == "mc_size") {
                mc_size = static_cast<std::size_t>(parse_long(args.at(0), lineno));
            } else if (key == "seed") {
                seed = static_cast<std::uint64_t>(parse_long(args.at(0), lineno));
            } else if (key == "feasibility_filter") {
                feasibility_filter = args.at(0) == "on" || args.at(0) == "true";
            } else {
                throw ParseError("unknown ensemble key '" + key + "'", lineno, 1);
            }
        } else if (section == "algorithm") {
            if (key == "delta")
                cfg.algorithm.delta = parse_num(args.at(0), lineno);
            else if (key == "eps")
                cfg.algorithm.eps = cfg.algorithm.stop_slack = parse_num(args.at(0), lineno);
            else if (key == "stop_slack")
                cfg.algorithm.stop_slack = parse_num(args.at(0), lineno);
            else if (key == "multistart")
                cfg.algorithm.multistart = static_cast<int>(parse_long(args.at(0), lineno));
            else if (key == "max_outer_iter")
                cfg.algorithm.max_outer_iter = static_cast<int>(parse_long(args.at(0), lineno));
            else if (key == "lbfgs_max_iter")
                cfg.algorithm.lbfgs_max_iter = static_cast<int>(parse_long(args.at(0), lineno));
            else if (key == "lbfgs_grad_tol")
                cfg.algorithm.lbfgs_grad_tol = parse_num(args.at(0), lineno);
            else if (key == "verify_grid_density")
                cfg.verify_grid_density = static_cast<int>(parse_long(args.at(0), lineno));
            else
                throw ParseError("unknown algorithm key '" + key + "'", lineno, 1);
        } else if (section == "rounding") {
            cfg.has_rounding = true;
            if (key == "delta_r")
                cfg.rounding.delta_r = parse_num(args.at(0), lineno);
            else if (key == "grid") {
                cfg.rounding.grid_levels.clear();
                for (const auto& a : args) cfg.rounding.grid_levels.push_back(parse_num(a, lineno));
            } else if (key == "n")
                cfg.rounding.n = parse_long(args.at(0), lineno);
            else
                throw ParseError("unknown rounding key '" + key + "'", lineno, 1);
        } else if (section == "output") {
            if (key == "dir")
                cfg.output_dir = resolve(args.at(0));
            else
                throw ParseError("unknown output key '" + key + "'", lineno, 1);
        }
    }
    if (in_inline) throw ParseError("combos inline block not closed with 'end'", lineno, 1);

    // ---- assemble region ----
    if (combos_grid) {
        if (discrete_levels.empty())
            throw ValidationError("combos grid needs at least one 'discrete' line");
        combos = cartesian(discrete_levels);
    }
    cfg.region = DesignRegion(bounds, combos);
    const std::size_t d = cfg.region.d();

    // ---- assemble model ----
    auto link_of = [&](const std::string& name) {
        if (name == "logit" || name.empty()) return Link::Logit;
        if (name == "probit") return Link::Probit;
        if (name == "cloglog") return Link::Cloglog;
        if (name == "loglog") return Link::Loglog;
        if (name == "identity") return Link::Identity;
        throw ValidationError("unknown link '" + name + "'");
    };
    auto check_factors = [&](const std::vector<Predictor>& hs) {
        for (const auto& h : hs)
            if (h.max_factor_index() >= static_cast<int>(d))
                throw ValidationError("predictor references x" +
                                      std::to_string(h.max_factor_index() + 1) +
                                      " but the region has only " + std::to_string(d) +
                                      " factors");
    };
    if (model_type == "glm") {
        GlmSpec g;
        g.link = link_of(link_name);
        if (glm_predictors.empty()) throw ValidationError("glm model needs a predictors line");
        check_factors(glm_predictors);
        g.predictors = std::move(glm_predictors);
        cfg.model = std::move(g);
    } else if (model_type == "mlm") {
        MlmSpec m;
        if (family_name == "baseline")
            m.family = MlmFamily::Baseline;
        else if (family_name == "cumulative")
            m.family = MlmFamily::Cumulative;
        else if (family_name == "adjacent")
            m.family = MlmFamily::Adjacent;
        else if (family_name == "continuation")
            m.family = MlmFamily::Continuation;
        else
            throw ValidationError("mlm model needs family baseline|cumulative|adjacent|continuation");
        if (categories < 3) throw ValidationError("mlm needs categories >= 3");
        m.J = categories;
        m.category_predictors.resize(static_cast<std::size_t>(categories - 1));
        for (auto& [j, block] : category_blocks) {
            if (j > categories - 1)
                throw ValidationError("category block h" + std::to_string(j) + " exceeds J-1");
            check_factors(block);
            m.category_predictors[static_cast<std::size_t>(j - 1)] = std::move(block);
        }
        for (const auto& block : m.category_predictors)
            if (block.empty())
                throw ValidationError("every category block h1..h(J-1) must be specified");
        check_factors(shared_block);
        m.shared_predictors = std::move(shared_block);
        cfg.model = std::move(m);
    } else {
        throw ValidationError("model type must be glm or mlm");
    }
    const std::size_t p = model_dim(cfg.model);

    // ---- assemble ensemble ----
    if (sample_path && !prior_coords.empty())
        throw ValidationError("give either a sample or a prior, not both");
    if (sample_path) {
        cfg.ensemble = ParameterEnsemble::from_samples(read_theta_csv(*sample_path));
    } else if (!prior_coords.empty()) {
        if (prior_coords.size() != p)
            throw ValidationError("prior has " + std::to_string(prior_coords.size()) +
                                  " coordinates, model has p = " + std::to_string(p));
        if (!seed) throw ValidationError("a seed is required when a prior is used");
        PriorSpec ps;
        ps.coords = std::move(prior_coords);
        ps.mc_size = mc_size;
        ps.seed = *seed;
        ps.feasibility_filter = feasibility_filter;
        cfg.ensemble = ParameterEnsemble::from_prior(std::move(ps));
    } else {
        throw ValidationError("ensemble section needs a sample or a prior");
    }
    if (seed) cfg.algorithm.seed = *seed;

    // broadcast a single rounding grid level over all continuous factors
    if (cfg.has_rounding && cfg.rounding.grid_levels.size() == 1 && cfg.region.k() > 1)
        cfg.rounding.grid_levels.assign(cfg.region.k(), cfg.rounding.grid_levels[0]);

    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string dir = std::filesystem::path(path).parent_path().string();
    return parse_config(ss.str(), dir);
}

}  // namespace ewd
