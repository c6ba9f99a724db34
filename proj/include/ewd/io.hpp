#pragma once

#include <string>
#include <vector>

#include "ewd/forlion.hpp"
#include "ewd/region.hpp"

namespace ewd {

// All writers go through write-temp-then-rename so interrupted runs never
// leave truncated files behind.
void atomic_write_text(const std::string& path, const std::string& content);

// Fixed CSV schema: x1..xd then `weight` (approximate) or `count` (exact).
// Continuous coordinates carry 10 significant digits.
std::string format_design_csv(const ApproximateDesign& xi);
std::string format_design_csv(const ExactDesign& xi);

void write_design_csv(const std::string& path, const ApproximateDesign& xi);
void write_design_csv(const std::string& path, const ExactDesign& xi);

// Accepts both schemas; exact designs come back as normalized weights.
// Weight sums off by more than 2% raise; smaller deviations (printed,
// rounded tables) are renormalized.
ApproximateDesign read_design_csv(const std::string& path, std::size_t expected_dim);

std::string format_forlion_log(const std::vector<IterationRecord>& records);

}  // namespace ewd
