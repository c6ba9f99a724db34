#include "ewd/region.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ewd/errors.hpp"

namespace ewd {

DesignRegion::DesignRegion(std::vector<std::pair<double, double>> continuous_bounds,
                           std::vector<std::vector<double>> discrete_combos)
    : bounds_(std::move(continuous_bounds)), combos_(std::move(discrete_combos)) {
    for (const auto& [a, b] : bounds_) {
        if (!(a < b)) throw ValidationError("continuous bound requires a < b");
        if (!std::isfinite(a) || !std::isfinite(b))
            throw ValidationError("continuous bounds must be finite");
    }
    if (combos_.empty()) combos_.push_back({});  // all-continuous region
    combo_len_ = combos_.front().size();
    for (const auto& c : combos_) {
        if (c.size() != combo_len_)
            throw ValidationError("all discrete combos must have the same length");
    }
    if (bounds_.empty() && combo_len_ == 0)
        throw ValidationError("region must have at least one factor");
}

DesignPoint DesignRegion::make_point(std::span<const double> continuous,
                                     std::size_t combo_index) const {
    if (continuous.size() != k()) throw DimensionMismatch("make_point: wrong continuous length");
    DesignPoint x;
    x.coords.assign(continuous.begin(), continuous.end());
    const auto& c = combos_.at(combo_index);
    x.coords.insert(x.coords.end(), c.begin(), c.end());
    return x;
}

bool DesignRegion::contains(const DesignPoint& x, double tol) const {
    if (x.dim() != d()) return false;
    for (std::size_t j = 0; j < k(); ++j) {
        if (x.coords[j] < bounds_[j].first - tol || x.coords[j] > bounds_[j].second + tol)
            return false;
    }
    return combo_index_of(x) >= 0;
}

int DesignRegion::combo_index_of(const DesignPoint& x) const {
    if (x.dim() != d()) return -1;
    for (std::size_t i = 0; i < combos_.size(); ++i) {
        bool match = true;
        for (std::size_t j = 0; j < combo_len_; ++j) {
            if (x.coords[k() + j] != combos_[i][j]) {
                match = false;
                break;
            }
        }
        if (match) return static_cast<int>(i);
    }
    return -1;
}

void validate(const ApproximateDesign& xi, double weight_tol) {
    if (xi.points.size() != xi.weights.size())
        throw ValidationError("approximate design: points/weights length mismatch");
    if (xi.points.empty()) throw ValidationError("approximate design: empty");
    double sum = 0.0;
    for (double w : xi.weights) {
        if (!(w >= 0.0)) throw ValidationError("approximate design: negative weight");
        sum += w;
    }
    if (std::fabs(sum - 1.0) > weight_tol)
        throw ValidationError("approximate design: weights sum to " + std::to_string(sum));
    const std::size_t d = xi.points.front().dim();
    for (const auto& p : xi.points)
        if (p.dim() != d) throw ValidationError("approximate design: inconsistent dimensions");
}

void validate(const ExactDesign& xi) {
    if (xi.points.size() != xi.counts.size())
        throw ValidationError("exact design: points/counts length mismatch");
    long total = 0;
    for (long c : xi.counts) {
        if (c < 1) throw ValidationError("exact design: counts must be >= 1");
        total += c;
    }
    if (total != xi.n) throw ValidationError("exact design: counts do not sum to n");
}

double distance(const DesignPoint& a, const DesignPoint& b, std::size_t k, DistanceMode mode) {
    if (a.dim() != b.dim()) throw DimensionMismatch("distance: dimension mismatch");
    if (mode == DistanceMode::Rounding) {
        for (std::size_t j = k; j < a.dim(); ++j)
            if (a.coords[j] != b.coords[j]) return std::numeric_limits<double>::infinity();
    }
    double s = 0.0;
    for (std::size_t j = 0; j < a.dim(); ++j) {
        const double dj = a.coords[j] - b.coords[j];
        s += dj * dj;
    }
    return std::sqrt(s);
}

}  // namespace ewd
