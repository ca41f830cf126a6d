#pragma once

// Model post-processing: equivalent PDE by multivariable Taylor expansion,
// coefficient tables of the centred-difference form, and rational (Pade)
// extrapolation of a coefficient in 1/n^2.

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "rational.hpp"
#include "ratpoly.hpp"
#include "stencil.hpp"

namespace gaptooth {

/// Sum of coefficient * (products of mixed derivatives uu(p,q)), coefficients
/// carrying h, alf and possibly gam.
struct EquivalentPDE {
    Poly expr;
    int order{2};

    /// Coefficient of the lone linear derivative uu(p,q) (terms with exactly that single derivative factor).
    Poly linear_coefficient(int p, int q) const {
        const Symbol d = Symbol::deriv(p, q);
        std::vector<Term> ts;
        for (const auto& t : expr.terms())
            if (t.mono.degree_of_kind(SymbolKind::Deriv) == 1 && t.mono.exponent(d) == 1)
                ts.push_back({t.mono.without(d), t.coef});
        return Poly::from_terms(expr.policy(), std::move(ts));
    }

    /// Terms involving U only (no derivative of order >= 1): the local reaction part.
    Poly reaction_part() const {
        std::vector<Term> ts;
        for (const auto& t : expr.terms()) {
            bool only_u = true;
            for (const auto& f : t.mono.factors())
                if (f.sym.kind == SymbolKind::Deriv && (f.sym.a != 0 || f.sym.b != 0)) only_u = false;
            if (only_u) ts.push_back(t);
        }
        return Poly::from_terms(expr.policy(), std::move(ts));
    }

    /// Everything except the reaction part and the lone uu(2,0), uu(0,2) terms.
    Poly remainder() const {
        Poly rest = expr - reaction_part();
        std::vector<Term> ts;
        for (const auto& t : rest.terms()) {
            const bool lone_second = t.mono.degree_of_kind(SymbolKind::Deriv) == 1 &&
                                     (t.mono.exponent(Symbol::deriv(2, 0)) == 1 || t.mono.exponent(Symbol::deriv(0, 2)) == 1);
            if (!lone_second) ts.push_back(t);
        }
        return Poly::from_terms(expr.policy(), std::move(ts));
    }
};

namespace detail {

inline Poly drop_h_above(const Poly& p, int o) {
    std::vector<Term> ts;
    for (const auto& t : p.terms())
        if (t.mono.exponent(Symbol::h()) <= o) ts.push_back(t);
    return Poly::from_terms(p.policy(), std::move(ts));
}

inline Rational factorial(int k) {
    Rational f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

}  // namespace detail

/// Replaces every U_{i+a,j+b} by its Taylor series sum_{p+q<=o} uu(p,q) (a h)^p (b h)^q / (p! q!)
/// and truncates at total h power o.  gamma_value substitutes gam when given.
inline EquivalentPDE equivalent_pde(const Poly& g, std::optional<Rational> gamma_value, int o) {
    if (o < 2) throw ConfigurationError("equivalent PDE order must be >= 2");
    const TruncationPolicy pol = TruncationPolicy::none();
    Poly src = g.with_policy(pol);
    if (gamma_value) src = src.substitute(Symbol::gam(), *gamma_value);

    std::map<std::pair<int, int>, Poly> cache;
    auto taylor = [&](int a, int b) -> const Poly& {
        auto key = std::make_pair(a, b);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        std::vector<Term> ts;
        for (int p = 0; p <= o; ++p)
            for (int q = 0; p + q <= o; ++q) {
                Rational c = rational_pow(Rational(a), p) * rational_pow(Rational(b), q);
                if ((p > 0 && a == 0) || (q > 0 && b == 0)) continue;
                c /= detail::factorial(p) * detail::factorial(q);
                Monomial m(Symbol::deriv(p, q));
                m.mul(Symbol::h(), p + q);
                ts.push_back({std::move(m), c});
            }
        return cache.emplace(key, Poly::from_terms(pol, std::move(ts))).first->second;
    };

    Poly out(pol);
    for (const auto& t : src.terms()) {
        Monomial rest;
        std::vector<std::pair<Symbol, int>> grid;
        for (const auto& f : t.mono.factors()) {
            if (f.sym.kind == SymbolKind::GridVal) {
                grid.emplace_back(f.sym, f.exp);
            } else {
                rest.mul(f.sym, f.exp);
            }
        }
        Poly term = Poly::monomial(pol, rest, t.coef);
        for (const auto& [s, e] : grid)
            for (int k = 0; k < e; ++k) term = detail::drop_h_above(term * taylor(s.a, s.b), o);
        out += term;
    }
    return {out, o};
}

inline EquivalentPDE equivalent_pde(const StencilModel& m, std::optional<Rational> gamma_value, int o) {
    return equivalent_pde(m.to_poly(), std::move(gamma_value), o);
}

/// Default Taylor order tied to the coupling truncation.
inline int default_pde_order(const StencilModel& m) { return 2 + 2 * m.K; }

// ---------------------------------------------------------------------------

struct CoefficientRow {
    int n{0};
    Rational g2nd;  ///< coefficient of delta_x^4 U in the gamma^2 block of H^2 g
    Rational g3rd;  ///< coefficient of delta_x^6 U in the gamma^3 block of H^2 g
    Rational gnon;  ///< overall factor of the alpha*gamma block (see below)
};

namespace detail {

/// Sum of coefficients of the terms equal to m up to a power of h.
inline Rational coefficient_modulo_h(const Poly& p, const Monomial& m) {
    Rational c = 0;
    for (const auto& t : p.terms())
        if (t.mono.without(Symbol::h()) == m) c += t.coef;
    return c;
}

}  // namespace detail

/// The alpha*gamma block of H^2 g takes the form
///   c { [3 (mu_x delta_x U)^2 + (delta_x^2 U)^2 / 4] (2 + delta_x^2) U + (delta_x^2 U)^2 U + y-analogue },
/// and gnon is the factor c, read from the U (mu_x delta_x U)^2 coefficient (which is 6c).
/// Powers of H are ignored when reading coefficients: each block carries a single power.
inline CoefficientRow coefficient_row(const StencilModel& m) {
    const DiffExpr d = to_difference_form(m);
    CoefficientRow row;
    row.n = m.n;
    row.g2nd = detail::coefficient_modulo_h(block(d, 2, 0), Monomial(Symbol::op(0, 2, 0, 0)));
    row.g3rd = detail::coefficient_modulo_h(block(d, 3, 0), Monomial(Symbol::op(0, 3, 0, 0)));
    Monomial nl(Symbol::op(0, 0, 0, 0));
    nl.mul(Symbol::op(1, 0, 0, 0), 2);
    row.gnon = detail::coefficient_modulo_h(block(d, 1, 1), nl) / 6;
    return row;
}

inline std::vector<CoefficientRow> coefficient_tables(const std::vector<StencilModel>& models) {
    std::vector<CoefficientRow> rows;
    rows.reserve(models.size());
    for (const auto& m : models) rows.push_back(coefficient_row(m));
    return rows;
}

inline std::string coefficient_csv(const std::vector<CoefficientRow>& rows) {
    std::ostringstream out;
    out << "n,g2nd,g3rd,gnon\n";
    for (const auto& r : rows)
        out << r.n << "," << to_string(r.g2nd) << "," << to_string(r.g3rd) << "," << to_string(r.gnon) << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------

/// Rational function in rn^2 = 1/n^2 through the points (1/n_l^2, 4 c_l).
struct PadeFit {
    std::vector<int> ns;
    std::vector<Rational> cs;
    int order{0};
    std::vector<Rational> a;  ///< numerator coefficients of rn^{2p}
    std::vector<Rational> b;  ///< denominator coefficients, b[0] = 1
    Rational limit;           ///< value at rn = 0, i.e. a[0]

    Rational operator()(const Rational& rn) const {
        const Rational x = rn * rn;
        Rational num = 0, den = 0, pw = 1;
        for (int p = 0; p <= order; ++p) {
            num += a[static_cast<std::size_t>(p)] * pw;
            den += b[static_cast<std::size_t>(p)] * pw;
            pw *= x;
        }
        if (den == 0) throw std::domain_error("Pade denominator vanishes");
        return num / den;
    }
    Rational at_n(int n) const { return (*this)(Rational(1, n)); }
};

inline PadeFit pade_fit(const std::vector<int>& ns, const std::vector<Rational>& cs) {
    if (ns.size() != cs.size()) throw ConfigurationError("pade_fit: ns and cs differ in length");
    if (ns.size() < 3 || ns.size() % 2 == 0) throw ConfigurationError("pade_fit needs an odd number (>= 3) of points");
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (ns[i] < 1) throw ConfigurationError("pade_fit: n must be positive");
        for (std::size_t j = 0; j < i; ++j)
            if (ns[i] == ns[j]) throw ConfigurationError("pade_fit: repeated n value");
    }
    const int o = static_cast<int>(ns.size() - 1) / 2;
    const std::size_t nv = static_cast<std::size_t>(2 * o + 2);  // unknowns a0 b0 a1 b1 ...
    Matrix<Rational> m(nv, nv);
    std::vector<Rational> rhs(nv, Rational(0));
    m(0, 1) = 1;
    rhs[0] = 1;
    for (std::size_t l = 0; l < ns.size(); ++l) {
        const Rational x = Rational(1, ns[l] * ns[l]);
        Rational pw = 1;
        for (int p = 0; p <= o; ++p) {
            m(l + 1, static_cast<std::size_t>(2 * p)) = -pw;
            m(l + 1, static_cast<std::size_t>(2 * p + 1)) = pw * cs[l] * 4;
            pw *= x;
        }
    }
    std::vector<Rational> sol;
    try {
        sol = lu_backsub(lu_decomp(m), rhs);
    } catch (const SingularMatrixError&) {
        // degenerate but consistent data (e.g. constant) take the lowest-degree fit
        auto low = solve_exact_minimal(m, rhs);
        if (!low) throw SingularMatrixError("pade_fit: fit system is singular (data not generic)");
        sol = std::move(*low);
    }
    PadeFit f;
    f.ns = ns;
    f.cs = cs;
    f.order = o;
    for (int p = 0; p <= o; ++p) {
        f.a.push_back(sol[static_cast<std::size_t>(2 * p)]);
        f.b.push_back(sol[static_cast<std::size_t>(2 * p + 1)]);
    }
    f.limit = f.a[0];
    return f;
}

}  // namespace gaptooth
