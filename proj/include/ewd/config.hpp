#pragma once

#include <optional>
#include <string>

#include "ewd/expectation.hpp"
#include "ewd/forlion.hpp"
#include "ewd/model.hpp"
#include "ewd/region.hpp"
#include "ewd/rounding.hpp"

namespace ewd {

// One experiment: region, model, parameter ensemble, algorithm settings, and
// output locations, parsed from a sectioned key-value text file. Relative
// paths inside the file resolve against the file's directory.
struct ExperimentConfig {
    DesignRegion region{{}, {{0.0}}};  // replaced by the parser
    ModelSpec model;
    ParameterEnsemble ensemble;
    ForLionConfig algorithm;
    RoundingConfig rounding;        // grid empty unless [rounding] present
    std::string output_dir = "out";
    int verify_grid_density = 0;    // 0 = choose from k
    bool has_rounding = false;
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text, const std::string& base_dir);

// 201 points per axis through k = 2, coarser beyond to keep tensor grids
// tractable.
int default_grid_density(std::size_t k);

}  // namespace ewd
