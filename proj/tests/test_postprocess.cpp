#include <catch_amalgamated.hpp>

#include <gaptooth/numeric.hpp>
#include <gaptooth/postprocess.hpp>

#include <random>

using namespace gaptooth;

namespace {

const TruncationPolicy kFree = TruncationPolicy::none();

Poly uu(int p, int q) { return Poly::symbol(kFree, Symbol::deriv(p, q)); }
Poly hp(int e) { return Poly::symbol(kFree, Symbol::h(), e); }

const StencilModel& model_n(int n) {
    static std::map<int, StencilModel> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        PatchSpec s;
        s.n = n;
        it = cache.emplace(n, construct(s).model).first;
    }
    return it->second;
}

}  // namespace

TEST_CASE("Taylor expansion of the five-point Laplacian") {
    const Poly lap = Poly::symbol(kFree, Symbol::gam()) * hp(-2) * bold_delta(2);
    const auto e = equivalent_pde(lap, Rational(1), 4);
    CHECK(e.linear_coefficient(2, 0) == Poly(kFree, Rational(1)));
    CHECK(e.linear_coefficient(0, 2) == Poly(kFree, Rational(1)));
    CHECK(e.remainder() == Rational(1, 12) * hp(2) * (uu(4, 0) + uu(0, 4)));
    CHECK(e.reaction_part().is_zero());
    CHECK_THROWS_AS(equivalent_pde(lap, Rational(1), 1), ConfigurationError);
}

TEST_CASE("Taylor series of a single shifted value") {
    const Poly p = Poly::symbol(kFree, Symbol::grid(1, -1));
    const auto e = equivalent_pde(p, std::nullopt, 2);
    const Poly expect = uu(0, 0) + hp(1) * (uu(1, 0) - uu(0, 1)) +
                        hp(2) * (Rational(1, 2) * uu(2, 0) - uu(1, 1) + Rational(1, 2) * uu(0, 2));
    CHECK(e.expr == expect);
}

TEST_CASE("equivalent PDE is linear in the model") {
    std::mt19937 rng(6);
    std::uniform_int_distribution<int> off(-2, 2);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Term> ta, tb;
        for (int k = 0; k < 3; ++k) {
            ta.push_back({Monomial(Symbol::grid(off(rng), off(rng))).mul(Symbol::grid(0, 0), 1), ratio(k + 1, 3)});
            tb.push_back({Monomial(Symbol::grid(off(rng), 0)), ratio(-k, 5)});
        }
        const Poly a = Poly::from_terms(kFree, ta), b = Poly::from_terms(kFree, tb);
        CHECK(equivalent_pde(a + b, std::nullopt, 4).expr ==
              equivalent_pde(a, std::nullopt, 4).expr + equivalent_pde(b, std::nullopt, 4).expr);
    }
}

TEST_CASE("constructed model is consistent with the reaction-diffusion equation") {
    const StencilModel& m = model_n(2);
    const auto e = equivalent_pde(m, Rational(1), default_pde_order(m));
    const Poly alf = Poly::symbol(kFree, Symbol::alf());
    CHECK(e.reaction_part() == alf * (uu(0, 0) - uu(0, 0).pow(3)));
    CHECK(e.linear_coefficient(2, 0) == Poly(kFree, Rational(1)));
    CHECK(e.linear_coefficient(0, 2) == Poly(kFree, Rational(1)));
    for (const auto& t : e.remainder().terms()) CHECK(t.mono.exponent(Symbol::h()) >= 2);
}

TEST_CASE("symbolic coupling keeps gamma in the coefficients") {
    const StencilModel& m = model_n(2);
    const auto e = equivalent_pde(m, std::nullopt, default_pde_order(m));
    const Poly c = e.linear_coefficient(2, 0);
    const auto by_gamma = c.coeff(Symbol::gam());
    REQUIRE(by_gamma.size() >= 2);
    CHECK(by_gamma[0].is_zero());
    CHECK(by_gamma[1] == Poly(kFree, Rational(1)));
    CHECK(c.substitute(Symbol::gam(), Rational(1)) == Poly(kFree, Rational(1)));
}

TEST_CASE("coefficient table rows") {
    const auto rows = coefficient_tables({model_n(2), model_n(3)});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].n == 2);
    CHECK(rows[0].gnon == Rational(1, 72));
    CHECK(rows[1].gnon == Rational(1, 60));
    // r = 1/2, n = 2: the gamma^2 and gamma^3 blocks in closed form
    CHECK(rows[0].g2nd == Rational(-1, 12) * (1 - Rational(1, 16)));
    CHECK(rows[0].g3rd == Rational(1, 90) * (1 - Rational(1, 16)) * (1 - Rational(1, 64)));
    const std::string csv = coefficient_csv(rows);
    CHECK(csv.rfind("n,g2nd,g3rd,gnon\n", 0) == 0);
    CHECK(csv.find("2,-5/64,21/2048,1/72\n") != std::string::npos);
}

TEST_CASE("absent table terms are reported as zero") {
    StencilModel m;
    m.n = 1;
    m.K = 2;
    m.terms.push_back({1, 0, Rational(1), -2, {{1, 0, 1}}});
    const auto row = coefficient_row(m);
    CHECK(row.g2nd == 0);
    CHECK(row.g3rd == 0);
    CHECK(row.gnon == 0);
}

TEST_CASE("Pade fit interpolates its data") {
    const std::vector<int> ns{2, 3, 4};
    const std::vector<Rational> cs{Rational(1, 72), Rational(1, 60), Rational(179, 10136)};
    const auto f = pade_fit(ns, cs);
    CHECK(f.b[0] == 1);
    CHECK(f.order == 1);
    for (std::size_t l = 0; l < ns.size(); ++l) CHECK(f.at_n(ns[l]) == 4 * cs[l]);
    CHECK(f.limit == f.a[0]);
    CHECK(f(Rational(0)) == f.limit);
}

TEST_CASE("Pade fit of constant data is the constant") {
    const auto f = pade_fit({2, 3, 5, 7, 11}, std::vector<Rational>(5, Rational(3, 7)));
    CHECK(f.limit == Rational(12, 7));
    for (int p = 1; p <= f.order; ++p) {
        CHECK(f.a[static_cast<std::size_t>(p)] == 0);
        CHECK(f.b[static_cast<std::size_t>(p)] == 0);
    }
}

TEST_CASE("Pade fit agrees with an independent elimination") {
    const std::vector<int> ns{2, 3, 4, 5, 6};
    const std::vector<Rational> cs{Rational(1, 72), Rational(1, 60), Rational(179, 10136), Rational(775, 42762),
                                   Rational(679909, 36998632)};
    const auto f = pade_fit(ns, cs);
    // unknown order a0..ao then b0..bo, solved by Gauss-Jordan
    const std::size_t o = 2, nv = 2 * o + 2;
    Matrix<Rational> m(nv, nv);
    std::vector<Rational> rhs(nv);
    m(0, o + 1) = 1;
    rhs[0] = 1;
    for (std::size_t l = 0; l < ns.size(); ++l) {
        Rational x(1, ns[l] * ns[l]), pw = 1;
        for (std::size_t p = 0; p <= o; ++p, pw *= x) {
            m(l + 1, p) = pw;
            m(l + 1, o + 1 + p) = -4 * cs[l] * pw;
        }
    }
    const auto sol = solve_exact_minimal(m, rhs);
    REQUIRE(sol);
    CHECK((*sol)[0] == f.limit);
    for (std::size_t p = 0; p <= o; ++p) {
        CHECK((*sol)[p] == f.a[p]);
        CHECK((*sol)[o + 1 + p] == f.b[p]);
    }
}

TEST_CASE("Pade fit input validation") {
    CHECK_THROWS_AS(pade_fit({2, 3}, {Rational(1), Rational(2)}), ConfigurationError);
    CHECK_THROWS_AS(pade_fit({2, 2, 3}, {Rational(1), Rational(1), Rational(2)}), ConfigurationError);
    CHECK_THROWS_AS(pade_fit({2, 3, 4}, {Rational(1), Rational(2)}), ConfigurationError);
    // 4 c_n = n^2 is 1/rn^2, which has no normalisable denominator
    CHECK_THROWS_AS(pade_fit({2, 3, 4}, {Rational(1), Rational(9, 4), Rational(4)}), SingularMatrixError);
}
