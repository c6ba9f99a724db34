#include "ewd/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ewd/errors.hpp"

namespace ewd {
namespace {

std::string fmt(double v, const char* spec = "%.10g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string header(std::size_t d, const char* last) {
    std::string h;
    for (std::size_t j = 1; j <= d; ++j) h += "x" + std::to_string(j) + ",";
    h += last;
    h += "\n";
    return h;
}

}  // namespace

void atomic_write_text(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot write file: " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw ValidationError("short write: " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string format_design_csv(const ApproximateDesign& xi) {
    std::string out = header(xi.points.empty() ? 0 : xi.points.front().dim(), "weight");
    for (std::size_t i = 0; i < xi.size(); ++i) {
        for (double c : xi.points[i].coords) out += fmt(c) + ",";
        out += fmt(xi.weights[i], "%.17g") + "\n";
    }
    return out;
}

std::string format_design_csv(const ExactDesign& xi) {
    std::string out = header(xi.points.empty() ? 0 : xi.points.front().dim(), "count");
    for (std::size_t i = 0; i < xi.size(); ++i) {
        for (double c : xi.points[i].coords) out += fmt(c) + ",";
        out += std::to_string(xi.counts[i]) + "\n";
    }
    return out;
}

void write_design_csv(const std::string& path, const ApproximateDesign& xi) {
    atomic_write_text(path, format_design_csv(xi));
}

void write_design_csv(const std::string& path, const ExactDesign& xi) {
    atomic_write_text(path, format_design_csv(xi));
}

ApproximateDesign read_design_csv(const std::string& path, std::size_t expected_dim) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open design file: " + path);
    ApproximateDesign xi;
    std::string line;
    int lineno = 0;
    bool exact = false;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!saw_header) {
            saw_header = true;
            const std::string& last = cells.empty() ? line : cells.back();
            if (last.find("count") != std::string::npos) {
                exact = true;
                continue;
            }
            if (last.find("weight") != std::string::npos) continue;
            // fall through: headerless numeric file, treat as weights
        }
        if (cells.size() != expected_dim + 1)
            throw ParseError("design row has " + std::to_string(cells.size()) +
                                 " fields, expected " + std::to_string(expected_dim + 1),
                             lineno, 1);
        DesignPoint x;
        x.coords.resize(expected_dim);
        double wv = 0.0;
        for (std::size_t j = 0; j <= expected_dim; ++j) {
            try {
                std::size_t used = 0;
                const double v = std::stod(cells[j], &used);
                while (used < cells[j].size() &&
                       std::isspace(static_cast<unsigned char>(cells[j][used])))
                    ++used;
                if (used != cells[j].size()) throw std::invalid_argument("trailing");
                if (j < expected_dim)
                    x.coords[j] = v;
                else
                    wv = v;
            } catch (const std::exception&) {
                throw ParseError("non-numeric design value '" + cells[j] + "'", lineno,
                                 static_cast<int>(j) + 1);
            }
        }
        if (!(wv > 0.0)) throw ParseError("weights/counts must be positive", lineno, 1);
        xi.points.push_back(std::move(x));
        xi.weights.push_back(wv);
    }
    if (xi.points.empty()) throw ValidationError("design file has no rows: " + path);
    double sum = 0.0;
    for (double w : xi.weights) sum += w;
    if (!exact && std::fabs(sum - 1.0) > 0.02)
        throw ValidationError("design weights sum to " + std::to_string(sum) +
                              ", expected 1 (is this an exact design?)");
    for (double& w : xi.weights) w /= sum;
    return xi;
}

std::string format_forlion_log(const std::vector<IterationRecord>& records) {
    std::string out;
    for (const IterationRecord& r : records) {
        out += "{\"iteration\":" + std::to_string(r.iteration) + ",\"m\":" + std::to_string(r.m) +
               ",\"objective\":" + fmt(r.objective, "%.17g") + ",\"d_max\":" +
               fmt(r.d_max, "%.17g") + ",\"wall_ms\":" + fmt(r.wall_ms, "%.3f") + "}\n";
    }
    return out;
}

}  // namespace ewd
