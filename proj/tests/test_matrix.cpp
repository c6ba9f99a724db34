#include <doctest.h>

#include <cmath>

#include "ewd/errors.hpp"
#include "ewd/matrix.hpp"
#include "ewd/rng.hpp"
#include "oracles.hpp"

using namespace ewd;

namespace {

Matrix random_spd(std::size_t n, Rng& rng) {
    Matrix a(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) a(r, c) = rng.uniform(-1.0, 1.0);
    Matrix s = a * a.transposed();
    for (std::size_t i = 0; i < n; ++i) s(i, i) += 0.5;  // well-conditioned
    return s;
}

}  // namespace

TEST_CASE("det on identity and diagonal") {
    CHECK(det(Matrix::identity(3)) == doctest::Approx(1.0));
    Matrix d(3, 3);
    d(0, 0) = 2.0;
    d(1, 1) = 3.0;
    d(2, 2) = 4.0;
    CHECK(det(d) == doctest::Approx(24.0));
}

TEST_CASE("det matches cofactor expansion on random SPD 5x5") {
    Rng rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        const Matrix m = random_spd(5, rng);
        const double expected = oracles::det_cofactor(m);
        CHECK(det(m) == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("det of rank-deficient matrix is zero") {
    Matrix m(3, 3);
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c) m(r, c) = static_cast<double>(r + 1);
    CHECK(det(m) == 0.0);
    CHECK(log_det(m) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("inverse basics") {
    const Matrix inv_id = inverse(Matrix::identity(4));
    for (std::size_t i = 0; i < 4; ++i) CHECK(inv_id(i, i) == doctest::Approx(1.0));

    Matrix d(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = 4.0;
    const Matrix di = inverse(d);
    CHECK(di(0, 0) == doctest::Approx(0.5));
    CHECK(di(1, 1) == doctest::Approx(0.25));
}

TEST_CASE("inverse multiply-back residual below 1e-8 on random 6x6") {
    Rng rng(22);
    for (int rep = 0; rep < 10; ++rep) {
        const Matrix m = random_spd(6, rng);
        const Matrix prod = m * inverse(m);
        double resid = 0.0;
        for (std::size_t r = 0; r < 6; ++r)
            for (std::size_t c = 0; c < 6; ++c)
                resid = std::max(resid, std::fabs(prod(r, c) - (r == c ? 1.0 : 0.0)));
        CHECK(resid < 1e-8);
    }
}

TEST_CASE("inverse of inverse returns the original") {
    Rng rng(33);
    const Matrix m = random_spd(5, rng);
    const Matrix back = inverse(inverse(m));
    for (std::size_t r = 0; r < 5; ++r)
        for (std::size_t c = 0; c < 5; ++c)
            CHECK(back(r, c) == doctest::Approx(m(r, c)).epsilon(1e-7));
}

TEST_CASE("inverse of singular matrix throws") {
    Matrix m(2, 2);
    m(0, 0) = 1.0;
    m(0, 1) = 2.0;
    m(1, 0) = 2.0;
    m(1, 1) = 4.0;
    CHECK_THROWS_AS(inverse(m), SingularMatrix);
}

TEST_CASE("det scaling property det(cM) = c^p det(M)") {
    Rng rng(44);
    for (int rep = 0; rep < 25; ++rep) {
        const std::size_t n = 2 + rep % 4;
        const Matrix m = random_spd(n, rng);
        const double c = rng.uniform(0.1, 3.0);
        const double lhs = det(m * c);
        const double rhs = std::pow(c, static_cast<double>(n)) * det(m);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
}

TEST_CASE("lu_solve solves random systems") {
    Rng rng(55);
    const Matrix m = random_spd(4, rng);
    std::vector<double> x{1.0, -2.0, 0.5, 3.0};
    const std::vector<double> b = m * std::span<const double>(x);
    const std::vector<double> got = lu_solve(lu_factor(m), b);
    for (std::size_t i = 0; i < 4; ++i) CHECK(got[i] == doctest::Approx(x[i]).epsilon(1e-10));
}

TEST_CASE("symmetric eigenvalues and PSD check") {
    Matrix d(3, 3);
    d(0, 0) = 1.0;
    d(1, 1) = 5.0;
    d(2, 2) = 2.0;
    const std::vector<double> ev = symmetric_eigenvalues(d);
    CHECK(ev[0] == doctest::Approx(1.0));
    CHECK(ev[1] == doctest::Approx(2.0));
    CHECK(ev[2] == doctest::Approx(5.0));

    Rng rng(66);
    const Matrix spd = random_spd(6, rng);
    CHECK(is_psd(spd));
    CHECK(is_symmetric(spd));

    Matrix neg = Matrix::identity(3);
    neg(2, 2) = -1.0;
    CHECK_FALSE(is_psd(neg));
}

TEST_CASE("non-square det is rejected") {
    Matrix m(2, 3);
    CHECK_THROWS_AS(det(m), DimensionMismatch);
}
