#include <catch_amalgamated.hpp>

#include <gaptooth/ratpoly.hpp>

#include "test_support.hpp"

using namespace gaptooth;
using testing::random_poly;

namespace {

const TruncationPolicy kFree = TruncationPolicy::none();

std::map<Symbol, Rational> random_point(std::mt19937& rng, const std::vector<Symbol>& syms) {
    std::map<Symbol, Rational> v;
    for (Symbol s : syms) {
        Rational q = testing::small_rational(rng);
        v[s] = q == 0 ? Rational(1, 3) : q;
    }
    return v;
}

const std::vector<Symbol> kSyms{Symbol::gam(), Symbol::alf(), Symbol::xi(), Symbol::yi(),
                                Symbol::grid(0, 0), Symbol::grid(1, 0), Symbol::grid(0, -1), Symbol::h()};

}  // namespace

TEST_CASE("parse_rational accepts p/q forms and rejects junk") {
    CHECK(parse_rational("1/2") == Rational(1, 2));
    CHECK(parse_rational("-3/6") == Rational(-1, 2));
    CHECK(parse_rational("7") == Rational(7));
    CHECK(parse_rational("+4/8") == Rational(1, 2));
    CHECK(to_string(parse_rational("10/4")) == "5/2");
    for (const char* bad : {"", "1/", "/2", "1/0", "a/b", "1.5", "1/-2", "1 /2", "--1"})
        CHECK_THROWS_AS(parse_rational(bad), ConfigurationError);
}

TEST_CASE("ring axioms hold on random polynomials") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        const Poly a = random_poly(rng, kFree), b = random_poly(rng, kFree), c = random_poly(rng, kFree);
        CHECK(a + b == b + a);
        CHECK(a * b == b * a);
        CHECK((a + b) + c == a + (b + c));
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * (b + c) == a * b + a * c);
        CHECK((a - a).is_zero());
        CHECK(a * Poly(kFree, Rational(1)) == a);
        CHECK((a * Poly(kFree)).is_zero());
    }
}

TEST_CASE("truncation commutes with arithmetic") {
    std::mt19937 rng(11);
    const TruncationPolicy cut{3, 2, false};
    for (int trial = 0; trial < 40; ++trial) {
        const Poly a = random_poly(rng, kFree), b = random_poly(rng, kFree);
        CHECK((a * b).with_policy(cut) == a.with_policy(cut) * b.with_policy(cut));
        CHECK((a + b).with_policy(cut) == a.with_policy(cut) + b.with_policy(cut));
    }
}

TEST_CASE("grade and truncation rules") {
    const TruncationPolicy pol{4, 2, false};
    const Poly gam = Poly::symbol(pol, Symbol::gam());
    const Poly alf = Poly::symbol(pol, Symbol::alf());
    CHECK(gam.pow(3).size() == 1);
    CHECK(gam.pow(4).is_zero());
    CHECK((alf * gam).size() == 1);
    CHECK((alf * alf).is_zero());
    CHECK((alf * gam * gam).is_zero());
    CHECK(pol.grade(Monomial(Symbol::alf()).mul(Symbol::gam(), 1)) == 3);

    SECTION("linearisation drops nonlinear and graded unknown terms") {
        const TruncationPolicy lin{4, 2, true};
        const Poly u = Poly::symbol(lin, Symbol::ud(1, 1));
        const Poly v = Poly::symbol(lin, Symbol::gd());
        const Poly g = Poly::symbol(lin, Symbol::gam());
        CHECK((u * v).is_zero());
        CHECK((u * u).is_zero());
        CHECK((g * u).is_zero());
        CHECK((u * Poly::symbol(lin, Symbol::grid(0, 0))).size() == 1);
    }

    SECTION("mixing policies is rejected") {
        CHECK_THROWS_AS(gam + Poly::symbol(kFree, Symbol::gam()), ConfigurationError);
    }
}

TEST_CASE("coeffs reconstructs the polynomial") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        const Poly p = random_poly(rng, kFree, 8);
        const auto parts = p.coeff(Symbol::xi());
        Poly back(kFree);
        for (std::size_t k = 0; k < parts.size(); ++k)
            back += parts[k] * Poly::symbol(kFree, Symbol::xi(), static_cast<int>(k));
        CHECK(back == p);
        for (const auto& c : parts) CHECK(c.symbols_of_kind(SymbolKind::Coord).empty());
    }
    SECTION("recursive order is first variable outer") {
        const Poly x = Poly::symbol(kFree, Symbol::xi()), y = Poly::symbol(kFree, Symbol::yi());
        const Poly p = Rational(2) * x * y + Rational(3) * y + Rational(5) * x;
        const auto cs = coeffs({p}, {Symbol::xi(), Symbol::yi()});
        REQUIRE(cs.size() == 4);
        CHECK(cs[0].is_zero());
        CHECK(cs[1] == Poly(kFree, Rational(3)));
        CHECK(cs[2] == Poly(kFree, Rational(5)));
        CHECK(cs[3] == Poly(kFree, Rational(2)));
    }
}

TEST_CASE("substitution agrees with evaluation at random points") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const Poly p = random_poly(rng, kFree, 6);
        const Poly q = random_poly(rng, kFree, 3);
        const auto pt = random_point(rng, kSyms);
        const Poly sub = p.substitute(Symbol::xi(), q);
        auto pt2 = pt;
        pt2[Symbol::xi()] = q.evaluate(pt);
        CHECK(sub.evaluate(pt) == p.evaluate(pt2));

        const Rational v = testing::small_rational(rng);
        auto pt3 = pt;
        pt3[Symbol::gam()] = v;
        CHECK(p.substitute(Symbol::gam(), v).evaluate(pt) == p.evaluate(pt3));
    }
}

TEST_CASE("evaluation is a ring homomorphism") {
    std::mt19937 rng(9);
    for (int trial = 0; trial < 30; ++trial) {
        const Poly a = random_poly(rng, kFree), b = random_poly(rng, kFree);
        const auto pt = random_point(rng, kSyms);
        CHECK((a * b).evaluate(pt) == a.evaluate(pt) * b.evaluate(pt));
        CHECK((a - b).evaluate(pt) == a.evaluate(pt) - b.evaluate(pt));
    }
    CHECK_THROWS(Poly::symbol(kFree, Symbol::nu()).evaluate({}));
}

TEST_CASE("coordinate derivatives carry inverse powers of h") {
    const Poly x = Poly::symbol(kFree, Symbol::xi());
    const Poly y = Poly::symbol(kFree, Symbol::yi());
    const Poly hm1 = Poly::symbol(kFree, Symbol::h(), -1);
    const Poly hm2 = Poly::symbol(kFree, Symbol::h(), -2);
    CHECK(diff_coord(x.pow(3), CoordName::xi, 2) == Rational(6) * x * hm2);
    CHECK(diff_coord(x * y, CoordName::yi, 1) == x * hm1);
    CHECK(diff_coord(x.pow(2), CoordName::yi, 1).is_zero());
    CHECK_THROWS_AS(diff_coord(x, CoordName::xi, 0), ConfigurationError);
}

TEST_CASE("shift and transpose act on grid offsets") {
    const Poly u = Poly::symbol(kFree, Symbol::grid(0, 0));
    const Poly e = Poly::symbol(kFree, Symbol::grid(1, -1));
    const Poly p = u * e + Rational(2) * Poly::symbol(kFree, Symbol::xi());
    CHECK(p.shifted(2, 1) == Poly::symbol(kFree, Symbol::grid(2, 1)) * Poly::symbol(kFree, Symbol::grid(3, 0)) +
                                 Rational(2) * Poly::symbol(kFree, Symbol::xi()));
    CHECK(p.transposed() == u * Poly::symbol(kFree, Symbol::grid(-1, 1)) + Rational(2) * Poly::symbol(kFree, Symbol::yi()));
    CHECK(p.transposed().transposed() == p);
}

TEST_CASE("time derivative follows the chain rule over grid values") {
    const Poly u0 = Poly::symbol(kFree, Symbol::grid(0, 0));
    const Poly u1 = Poly::symbol(kFree, Symbol::grid(1, 0));
    const Poly um = Poly::symbol(kFree, Symbol::grid(-1, 0));
    const Poly g = u1 - Rational(2) * u0 + um;  // discrete Laplacian in x
    const Poly p = u0 * u0;
    CHECK(time_derivative(p, g) == Rational(2) * u0 * g);
    CHECK(time_derivative(u1, g) == g.shifted(1, 0));
    CHECK(time_derivative(p, Poly(kFree)).is_zero());
}

TEST_CASE("rendering is canonical and independent of construction order") {
    const TruncationPolicy pol{4, 2, false};
    const Poly a = Poly::symbol(pol, Symbol::gam()) * Poly::symbol(pol, Symbol::grid(1, 0)) +
                   Poly::symbol(pol, Symbol::grid(0, 0));
    const Poly b = Poly::symbol(pol, Symbol::grid(0, 0)) +
                   Poly::symbol(pol, Symbol::grid(1, 0)) * Poly::symbol(pol, Symbol::gam());
    CHECK(a.to_string() == b.to_string());
    CHECK(Poly(pol).to_string() == "0");
}
