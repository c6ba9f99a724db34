#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ewd {

// Experimental setting: the first k coordinates are continuous, the trailing
// d-k ones hold one level combination from the region's finite set.
struct DesignPoint {
    std::vector<double> coords;

    std::size_t dim() const { return coords.size(); }
    bool operator==(const DesignPoint& rhs) const = default;
};

// Design region: a box for the k continuous factors crossed with a finite
// set of level combinations for the remaining factors.
class DesignRegion {
public:
    DesignRegion(std::vector<std::pair<double, double>> continuous_bounds,
                 std::vector<std::vector<double>> discrete_combos);

    std::size_t k() const { return bounds_.size(); }
    std::size_t d() const { return bounds_.size() + combo_len_; }
    std::size_t num_combos() const { return combos_.size(); }

    const std::vector<std::pair<double, double>>& continuous_bounds() const { return bounds_; }
    double lower(std::size_t j) const { return bounds_[j].first; }
    double upper(std::size_t j) const { return bounds_[j].second; }

    const std::vector<std::vector<double>>& discrete_combos() const { return combos_; }
    const std::vector<double>& combo(std::size_t i) const { return combos_[i]; }

    DesignPoint make_point(std::span<const double> continuous, std::size_t combo_index) const;

    bool contains(const DesignPoint& x, double tol = 1e-9) const;

    // Index of the combo equal to the discrete part of x, or -1.
    int combo_index_of(const DesignPoint& x) const;

private:
    std::vector<std::pair<double, double>> bounds_;
    std::vector<std::vector<double>> combos_;  // always non-empty; {()} when k == d
    std::size_t combo_len_ = 0;
};

struct ApproximateDesign {
    std::vector<DesignPoint> points;
    std::vector<double> weights;

    std::size_t size() const { return points.size(); }
};

struct ExactDesign {
    std::vector<DesignPoint> points;
    std::vector<long> counts;
    long n = 0;

    std::size_t size() const { return points.size(); }
};

// Throws ValidationError when the basic design invariants fail.
void validate(const ApproximateDesign& xi, double weight_tol = 1e-12);
void validate(const ExactDesign& xi);

enum class DistanceMode {
    ForLion,   // Euclidean over all d coordinates
    Rounding,  // +infinity unless the discrete parts are identical
};

// Distance between two settings of the same region; `k` is the number of
// leading continuous coordinates.
double distance(const DesignPoint& a, const DesignPoint& b, std::size_t k, DistanceMode mode);

}  // namespace ewd
