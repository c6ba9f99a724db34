// Batch front end: design / round / verify / efficiency subcommands over a
// single experiment config file.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "ewd/config.hpp"
#include "ewd/errors.hpp"
#include "ewd/evaluate.hpp"
#include "ewd/expectation.hpp"
#include "ewd/forlion.hpp"
#include "ewd/io.hpp"
#include "ewd/parallel.hpp"
#include "ewd/rounding.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitVerifyFail = 3;

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    long seed_override = -1;
    int threads = 0;
    int grid_density = 0;
};

ewd::ExperimentConfig load(const CommonFlags& flags) {
    ewd::ExperimentConfig cfg = ewd::load_config(flags.config_path);
    if (flags.seed_override >= 0) {
        cfg.algorithm.seed = static_cast<std::uint64_t>(flags.seed_override);
        if (cfg.ensemble.is_prior()) {
            ewd::PriorSpec ps = *cfg.ensemble.prior();
            ps.seed = static_cast<std::uint64_t>(flags.seed_override);
            cfg.ensemble = ewd::ParameterEnsemble::from_prior(std::move(ps));
        }
    }
    cfg.algorithm.threads = flags.threads > 0 ? flags.threads : ewd::default_threads();
    if (!flags.out_dir.empty()) cfg.output_dir = flags.out_dir;
    if (flags.grid_density > 0) cfg.verify_grid_density = flags.grid_density;
    if (cfg.verify_grid_density == 0)
        cfg.verify_grid_density = ewd::default_grid_density(cfg.region.k());
    return cfg;
}

std::string out_path(const ewd::ExperimentConfig& cfg, const std::string& name) {
    return (std::filesystem::path(cfg.output_dir) / name).string();
}

int cmd_design(const CommonFlags& flags) {
    const ewd::ExperimentConfig cfg = load(flags);
    const ewd::ExpectationContext ctx(cfg.model, cfg.region, cfg.ensemble);

    ewd::ForLionResult result;
    try {
        result = ewd::forlion_run(ctx, cfg.algorithm);
    } catch (const ewd::MaxIterExceeded& e) {
        ewd::write_design_csv(out_path(cfg, "design.csv"), e.best.design);
        ewd::atomic_write_text(out_path(cfg, "forlion_log.ndjson"),
                               ewd::format_forlion_log(e.best.log));
        std::fprintf(stderr, "error: %s (best design written)\n", e.what());
        return kExitNumerical;
    }

    ewd::write_design_csv(out_path(cfg, "design.csv"), result.design);
    ewd::atomic_write_text(out_path(cfg, "forlion_log.ndjson"),
                           ewd::format_forlion_log(result.log));

    const ewd::VerifyReport verify =
        ewd::verify_design(ctx, result.design, cfg.verify_grid_density,
                           2.0 * cfg.algorithm.stop_slack, cfg.algorithm.threads,
                           cfg.algorithm.seed);
    std::printf("design: m=%zu objective=%.10g d_max=%.10g verify=%s\n", result.design.size(),
                result.objective, verify.d_max, verify.pass ? "pass" : "FAIL");
    return verify.pass ? kExitOk : kExitVerifyFail;
}

int cmd_round(const CommonFlags& flags, const std::string& design_file, long n,
              std::vector<double> grid) {
    ewd::ExperimentConfig cfg = load(flags);
    if (n > 0) cfg.rounding.n = n;
    if (!grid.empty()) cfg.rounding.grid_levels = grid;
    if (cfg.rounding.grid_levels.size() == 1 && cfg.region.k() > 1)
        cfg.rounding.grid_levels.assign(cfg.region.k(), cfg.rounding.grid_levels[0]);
    if (cfg.rounding.n <= 0)
        throw ewd::ValidationError("round: n must be given via --n or the [rounding] section");

    const ewd::ExpectationContext ctx(cfg.model, cfg.region, cfg.ensemble);
    const ewd::ApproximateDesign xi = ewd::read_design_csv(design_file, cfg.region.d());
    const ewd::RoundingReport report = ewd::round_design(ctx, xi, cfg.rounding);

    ewd::write_design_csv(out_path(cfg, "exact_design.csv"), report.design);
    std::printf("round: m=%zu n=%ld relative_efficiency=%.6f nonsingular=%s\n",
                report.design.size(), report.design.n, report.relative_efficiency,
                report.info_nonsingular ? "yes" : "no");
    return kExitOk;
}

int cmd_verify(const CommonFlags& flags, const std::string& design_file) {
    const ewd::ExperimentConfig cfg = load(flags);
    const ewd::ExpectationContext ctx(cfg.model, cfg.region, cfg.ensemble);
    const ewd::ApproximateDesign xi = ewd::read_design_csv(design_file, cfg.region.d());

    const ewd::VerifyReport report =
        ewd::verify_design(ctx, xi, cfg.verify_grid_density, 2.0 * cfg.algorithm.stop_slack,
                           cfg.algorithm.threads, cfg.algorithm.seed);

    std::string text = "d_max," + std::to_string(report.d_max) + "\n";
    text += "bound," + std::to_string(report.bound) + "\n";
    text += "pass," + std::string(report.pass ? "1" : "0") + "\nargmax";
    for (double c : report.argmax.coords) text += "," + std::to_string(c);
    text += "\n";
    ewd::atomic_write_text(out_path(cfg, "verify.csv"), text);

    std::printf("verify: d_max=%.10g bound=%.10g %s\n", report.d_max, report.bound,
                report.pass ? "pass" : "FAIL");
    return report.pass ? kExitOk : kExitVerifyFail;
}

int cmd_efficiency(const CommonFlags& flags, const std::vector<std::string>& design_files,
                   const std::string& thetas_file, const std::string& reference) {
    const ewd::ExperimentConfig cfg = load(flags);
    std::vector<ewd::ApproximateDesign> designs;
    for (const auto& f : design_files)
        designs.push_back(ewd::read_design_csv(f, cfg.region.d()));
    const std::vector<ewd::ParamVector> thetas = ewd::read_theta_csv(thetas_file);

    ewd::RobustnessOptions opt;
    opt.threads = flags.threads > 0 ? flags.threads : ewd::default_threads();
    opt.local_cfg = cfg.algorithm;
    if (reference != "local") opt.reference = static_cast<std::size_t>(std::stoul(reference));

    const std::vector<ewd::EfficiencyReport> reports =
        ewd::robustness_study(cfg.model, cfg.region, designs, thetas, opt);

    std::string summary = "design,min,q1,median,q3,max,mean\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                      design_files[i].c_str(), reports[i].min, reports[i].q1, reports[i].median,
                      reports[i].q3, reports[i].max, reports[i].mean);
        summary += buf;
    }
    ewd::atomic_write_text(out_path(cfg, "efficiency_summary.csv"), summary);

    std::string per_theta = "theta_index";
    for (const auto& f : design_files) per_theta += "," + f;
    per_theta += "\n";
    for (std::size_t t = 0; t < thetas.size(); ++t) {
        per_theta += std::to_string(t);
        for (const auto& rep : reports) {
            char buf[32];
            std::snprintf(buf, sizeof buf, ",%.8f", rep.efficiencies[t]);
            per_theta += buf;
        }
        per_theta += "\n";
    }
    ewd::atomic_write_text(out_path(cfg, "efficiency_per_theta.csv"), per_theta);

    // frequency-polygon bins of the raw objective values, for plotting
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const ewd::FrequencyPolygon fp = ewd::frequency_polygon(reports[i].raw_objectives, 30);
        std::string bins = "bin_lo,bin_hi,count\n";
        for (std::size_t b = 0; b < fp.counts.size(); ++b) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "%.8g,%.8g,%ld\n", fp.edges[b], fp.edges[b + 1],
                          fp.counts[b]);
            bins += buf;
        }
        ewd::atomic_write_text(out_path(cfg, "objective_bins_" + std::to_string(i) + ".csv"),
                               bins);
    }
    std::printf("efficiency: %zu designs x %zu thetas written to %s\n", designs.size(),
                thetas.size(), cfg.output_dir.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"EW D-optimal designs for mixed-factor experiments"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string design_file, thetas_file, reference = "local";
    std::vector<std::string> design_files;
    long n = 0;
    std::vector<double> grid;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", flags.config_path, "experiment config file")->required();
        sub->add_option("--seed", flags.seed_override, "override the config seed");
        sub->add_option("--threads", flags.threads, "worker threads (default: all cores)");
        sub->add_option("--out", flags.out_dir, "output directory (default from config)");
        sub->add_option("--grid-density", flags.grid_density,
                        "verification grid points per continuous axis");
    };

    CLI::App* design = app.add_subcommand("design", "compute an EW D-optimal approximate design");
    add_common(design);

    CLI::App* round = app.add_subcommand("round", "convert an approximate design to an exact one");
    add_common(round);
    round->add_option("--design", design_file, "approximate design CSV")->required();
    round->add_option("--n", n, "total experimental units");
    round->add_option("--grid", grid, "grid levels L_1..L_k (one value broadcasts)");

    CLI::App* verify = app.add_subcommand("verify", "equivalence-theorem audit of a design");
    add_common(verify);
    verify->add_option("--design", design_file, "design CSV to audit")->required();

    CLI::App* efficiency = app.add_subcommand("efficiency", "relative-efficiency study");
    add_common(efficiency);
    efficiency->add_option("--designs", design_files, "design CSVs to compare")->required();
    efficiency->add_option("--thetas", thetas_file, "parameter sample CSV")->required();
    efficiency->add_option("--reference", reference,
                           "reference design index, or 'local' for per-theta locally optimal");

    CLI11_PARSE(app, argc, argv);

    try {
        if (design->parsed()) return cmd_design(flags);
        if (round->parsed()) return cmd_round(flags, design_file, n, grid);
        if (verify->parsed()) return cmd_verify(flags, design_file);
        if (efficiency->parsed()) return cmd_efficiency(flags, design_files, thetas_file, reference);
    } catch (const ewd::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const ewd::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const ewd::DimensionMismatch& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    }
    return kExitValidation;
}
