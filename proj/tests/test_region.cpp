#include <doctest.h>

#include <cmath>
#include <limits>

#include "ewd/errors.hpp"
#include "ewd/region.hpp"

using namespace ewd;

TEST_CASE("region invariants") {
    CHECK_THROWS_AS(DesignRegion({{1.0, 1.0}}, {}), ValidationError);   // a < b required
    CHECK_THROWS_AS(DesignRegion({{2.0, 1.0}}, {}), ValidationError);
    CHECK_THROWS_AS(DesignRegion({{0.0, 1.0}}, {{1.0}, {1.0, 2.0}}), ValidationError);

    const DesignRegion all_cont({{-1.0, 1.0}, {0.0, 2.0}}, {});
    CHECK(all_cont.k() == 2);
    CHECK(all_cont.d() == 2);
    CHECK(all_cont.num_combos() == 1);  // singleton empty combo when k == d

    const DesignRegion mixed({{0.0, 160.0}}, {{-1.0, 1.0}, {1.0, 1.0}});
    CHECK(mixed.k() == 1);
    CHECK(mixed.d() == 3);
    CHECK(mixed.num_combos() == 2);
}

TEST_CASE("make_point and containment") {
    const DesignRegion region({{0.0, 10.0}}, {{-1.0}, {1.0}});
    const DesignPoint x = region.make_point(std::vector<double>{2.5}, 1);
    CHECK(x.coords == std::vector<double>{2.5, 1.0});
    CHECK(region.contains(x));
    CHECK(region.combo_index_of(x) == 1);

    DesignPoint outside = x;
    outside.coords[0] = 11.0;
    CHECK_FALSE(region.contains(outside));

    DesignPoint bad_combo = x;
    bad_combo.coords[1] = 0.5;
    CHECK(region.combo_index_of(bad_combo) == -1);
}

TEST_CASE("distance: identical points and pure continuous offset") {
    const DesignPoint a{{0.0, -1.0}};
    const DesignPoint b{{3.0, -1.0}};
    CHECK(distance(a, a, 1, DistanceMode::ForLion) == 0.0);
    CHECK(distance(a, b, 1, DistanceMode::ForLion) == doctest::Approx(3.0));
    CHECK(distance(a, b, 1, DistanceMode::Rounding) == doctest::Approx(3.0));
}

TEST_CASE("distance: differing combos are infinite in rounding mode only") {
    const DesignPoint a{{1.0, -1.0}};
    const DesignPoint b{{1.0, 1.0}};
    CHECK(distance(a, b, 1, DistanceMode::Rounding) ==
          std::numeric_limits<double>::infinity());
    CHECK(distance(a, b, 1, DistanceMode::ForLion) == doctest::Approx(2.0));
}

TEST_CASE("distance dimension mismatch") {
    const DesignPoint a{{1.0}};
    const DesignPoint b{{1.0, 2.0}};
    CHECK_THROWS_AS(distance(a, b, 1, DistanceMode::ForLion), DimensionMismatch);
}

TEST_CASE("approximate design validation") {
    ApproximateDesign xi;
    xi.points = {DesignPoint{{0.0}}, DesignPoint{{1.0}}};
    xi.weights = {0.25, 0.75};
    CHECK_NOTHROW(validate(xi));

    xi.weights = {0.25, 0.70};
    CHECK_THROWS_AS(validate(xi), ValidationError);

    xi.weights = {-0.1, 1.1};
    CHECK_THROWS_AS(validate(xi), ValidationError);
}

TEST_CASE("exact design validation") {
    ExactDesign xi;
    xi.points = {DesignPoint{{0.0}}, DesignPoint{{1.0}}};
    xi.counts = {30, 70};
    xi.n = 100;
    CHECK_NOTHROW(validate(xi));

    xi.counts = {30, 69};
    CHECK_THROWS_AS(validate(xi), ValidationError);

    xi.counts = {0, 100};
    CHECK_THROWS_AS(validate(xi), ValidationError);
}
