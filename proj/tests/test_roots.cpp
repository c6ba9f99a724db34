#include <doctest.h>

#include <cmath>

#include "ewd/rng.hpp"
#include "ewd/roots.hpp"
#include "oracles.hpp"

using namespace ewd;

namespace {

#ifdef EWD_HAVE_EIGEN
// Set comparison: the solver collapses repeated roots while the eigenvalue
// oracle reports them with multiplicity, so match both directions within
// tolerance instead of requiring equal counts.
void check_against_companion(const std::vector<double>& asc) {
    const std::vector<double> expected = oracles::roots_companion(asc);
    const std::vector<double> got = solve_poly_real(asc);
    auto covered = [](const std::vector<double>& all, double z) {
        for (double r : all)
            if (std::fabs(r - z) <= 1e-7 * (1.0 + std::fabs(z))) return true;
        return false;
    };
    for (double z : expected) CHECK(covered(got, z));
    for (double z : got) CHECK(covered(expected, z));
}
#endif

}  // namespace

TEST_CASE("factorable quadratic z^2 - 3z + 2") {
    const std::vector<double> roots = solve_quadratic(1.0, -3.0, 2.0);
    REQUIRE(roots.size() == 2);
    CHECK(roots[0] == doctest::Approx(1.0));
    CHECK(roots[1] == doctest::Approx(2.0));
}

TEST_CASE("quadratic with no real roots") {
    CHECK(solve_quadratic(1.0, 0.0, 1.0).empty());
    const std::vector<double> dbl = solve_quadratic(1.0, -2.0, 1.0);
    REQUIRE(dbl.size() == 1);
    CHECK(dbl[0] == doctest::Approx(1.0));
}

TEST_CASE("cubic z^3 - z hits the q^3 + r^2 < 0 branch") {
    const std::vector<double> roots = solve_cubic(1.0, 0.0, -1.0, 0.0);
    REQUIRE(roots.size() == 3);
    CHECK(roots[0] == doctest::Approx(-1.0));
    CHECK(roots[1] == doctest::Approx(0.0).scale(1.0));
    CHECK(roots[2] == doctest::Approx(1.0));
}

TEST_CASE("cubic single-real-root branch") {
    // z^3 + z + 1: one real root near -0.6823
    const std::vector<double> roots = solve_cubic(1.0, 0.0, 1.0, 1.0);
    REQUIRE(roots.size() == 1);
    CHECK(roots[0] == doctest::Approx(-0.682327803828019).epsilon(1e-10));
}

TEST_CASE("degenerate leading coefficients cascade") {
    const std::vector<double> lin = solve_cubic(0.0, 0.0, 2.0, -1.0);
    REQUIRE(lin.size() == 1);
    CHECK(lin[0] == doctest::Approx(0.5));

    const std::vector<double> quad = solve_quartic(0.0, 1.0, -3.0, 2.0, 0.0);
    // z^3 - 3z^2 + 2z = z(z-1)(z-2)
    REQUIRE(quad.size() == 3);
    CHECK(quad[0] == doctest::Approx(0.0).scale(1.0));
    CHECK(quad[1] == doctest::Approx(1.0));
    CHECK(quad[2] == doctest::Approx(2.0));
}

TEST_CASE("quartic with known factorization") {
    // (z^2 - 1)(z^2 - 4) = z^4 - 5 z^2 + 4
    const std::vector<double> roots = solve_quartic(1.0, 0.0, -5.0, 0.0, 4.0);
    REQUIRE(roots.size() == 4);
    CHECK(roots[0] == doctest::Approx(-2.0));
    CHECK(roots[1] == doctest::Approx(-1.0));
    CHECK(roots[2] == doctest::Approx(1.0));
    CHECK(roots[3] == doctest::Approx(2.0));
}

TEST_CASE("biquadratic z^4 - 1 (degenerate radicals)") {
    const std::vector<double> roots = solve_quartic(1.0, 0.0, 0.0, 0.0, -1.0);
    REQUIRE(roots.size() == 2);
    CHECK(roots[0] == doctest::Approx(-1.0));
    CHECK(roots[1] == doctest::Approx(1.0));
}

#ifdef EWD_HAVE_EIGEN
TEST_CASE("500 random polynomials per degree match the companion oracle") {
    Rng rng(303);
    for (int deg = 2; deg <= 4; ++deg) {
        for (int rep = 0; rep < 500; ++rep) {
            std::vector<double> asc(static_cast<std::size_t>(deg) + 1);
            for (double& c : asc) c = rng.uniform(-2.0, 2.0);
            if (std::fabs(asc.back()) < 0.05) asc.back() = std::copysign(0.05, asc.back());
            check_against_companion(asc);
        }
    }
}

TEST_CASE("random polynomials with integer coefficients (repeated-root prone)") {
    Rng rng(304);
    for (int deg = 2; deg <= 4; ++deg) {
        for (int rep = 0; rep < 100; ++rep) {
            std::vector<double> asc(static_cast<std::size_t>(deg) + 1);
            for (double& c : asc) c = static_cast<double>(static_cast<int>(rng.below(7)) - 3);
            if (asc.back() == 0.0) asc.back() = 1.0;
            check_against_companion(asc);
        }
    }
}
#endif
