#include <catch_amalgamated.hpp>

#include <gaptooth/linalg.hpp>

#include <algorithm>
#include <numeric>
#include <random>

#include "test_support.hpp"

using namespace gaptooth;

namespace {

Matrix<Rational> random_rational(std::mt19937& rng, std::size_t n) {
    Matrix<Rational> a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = testing::small_rational(rng);
    return a;
}

/// Leibniz expansion over all permutations.
Rational leibniz_det(const Matrix<Rational>& a) {
    const std::size_t n = a.rows();
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), 0);
    Rational det = 0;
    do {
        int inversions = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (p[i] > p[j]) ++inversions;
        Rational term = inversions % 2 ? -1 : 1;
        for (std::size_t i = 0; i < n; ++i) term *= a(i, p[i]);
        det += term;
    } while (std::next_permutation(p.begin(), p.end()));
    return det;
}

}  // namespace

TEST_CASE("identity factorises to itself") {
    const auto f = lu_decomp(Matrix<Rational>::identity(5));
    CHECK(f.lu == Matrix<Rational>::identity(5));
    CHECK(f.parity == 1);
    CHECK(f.determinant() == 1);
    const auto fd = lu_decomp(Matrix<double>::identity(4));
    CHECK(fd.lu == Matrix<double>::identity(4));
}

TEST_CASE("a single row swap flips the parity") {
    Matrix<Rational> a{{0, 1}, {1, 0}};
    const auto f = lu_decomp(a);
    CHECK(f.parity == -1);
    CHECK(f.determinant() == -1);
    Matrix<double> d{{0.0, 2.0}, {3.0, 0.0}};
    CHECK(lu_decomp(d).determinant() == Catch::Approx(-6.0));
}

TEST_CASE("exact factorisation reconstructs PA = LU and solves exactly") {
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 10; ++trial) {
        const auto a = random_rational(rng, 20);
        const auto f = lu_decomp(a);
        CHECK(f.permutation() * a == f.lower() * f.upper());
        std::vector<Rational> b(20);
        for (auto& x : b) x = testing::small_rational(rng);
        const auto x = lu_backsub(f, b);
        CHECK(a.apply(x) == b);
    }
}

TEST_CASE("determinant matches the permutation expansion") {
    std::mt19937 rng(17);
    for (std::size_t n = 1; n <= 6; ++n)
        for (int trial = 0; trial < 5; ++trial) {
            const auto a = random_rational(rng, n);
            CHECK(lu_decomp(a).determinant() == leibniz_det(a));
        }
}

TEST_CASE("floating factorisation has small residuals") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        Matrix<double> a(50, 50);
        std::vector<double> b(50);
        for (std::size_t i = 0; i < 50; ++i) {
            b[i] = d(rng);
            for (std::size_t j = 0; j < 50; ++j) a(i, j) = d(rng);
        }
        const auto x = lu_backsub(lu_decomp(a), b);
        const auto ax = a.apply(x);
        double num = 0, den = 0;
        for (std::size_t i = 0; i < 50; ++i) {
            num = std::max(num, std::abs(ax[i] - b[i]));
            den = std::max(den, std::abs(b[i]));
        }
        CHECK(num / den <= 1e-10);
    }
}

TEST_CASE("singular systems are reported") {
    Matrix<Rational> a{{1, 2}, {2, 4}};
    CHECK_THROWS_AS(lu_decomp(a), SingularMatrixError);
    Matrix<double> z{{1.0, 2.0}, {0.0, 0.0}};
    CHECK_THROWS_AS(lu_decomp(z), SingularMatrixError);
    Matrix<double> s{{1.0, 2.0}, {2.0, 4.0}};
    CHECK_NOTHROW(lu_decomp(s));  // zero pivot replaced by a tiny number
    CHECK_THROWS_AS(lu_decomp(Matrix<Rational>(2, 3)), ConfigurationError);
}

TEST_CASE("back substitution works on polynomial right-hand sides") {
    const TruncationPolicy pol = TruncationPolicy::none();
    Matrix<Rational> a{{2, 1, 0}, {1, 3, 1}, {0, 1, 4}};
    const Poly g = Poly::symbol(pol, Symbol::gam());
    const Poly u = Poly::symbol(pol, Symbol::grid(0, 0));
    const std::vector<Poly> x{g + u, Rational(2) * u, g * u};
    std::vector<Poly> b(3, Poly(pol));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) b[i] += a(i, j) * x[j];
    CHECK(lu_backsub(lu_decomp(a), b) == x);
}

TEST_CASE("leading zeros of the right-hand side are skipped safely") {
    Matrix<Rational> a{{4, 1, 0, 0}, {1, 4, 1, 0}, {0, 1, 4, 1}, {0, 0, 1, 4}};
    const std::vector<Rational> b{0, 0, 0, 1};
    const auto x = lu_backsub(lu_decomp(a), b);
    CHECK(a.apply(x) == b);
}

TEST_CASE("independent rows of an overdetermined consistent system") {
    Matrix<Rational> a{{1, 0}, {2, 0}, {0, 1}, {1, 1}};
    const auto rows = independent_rows(a);
    CHECK(rows == std::vector<std::size_t>{0, 2});
    Matrix<Rational> zero(3, 2);
    CHECK(independent_rows(zero).empty());
}
