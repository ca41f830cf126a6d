#pragma once

// Analytic slow-manifold construction for overlapping elements (r = 1).
//
// The subgrid field is a polynomial in xi = (x - X_i)/h, yi = (y - Y_j)/h and
// the grid values.  Each pass solves for a multinomial correction
// v = sum cc(m,n) xi^m yi^n (m + n <= order) and an evolution correction gd
// by equating coefficients, until the reaction-diffusion residual and the
// four interelement coupling residuals vanish identically.

#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "rational.hpp"
#include "ratpoly.hpp"
#include "stencil.hpp"

namespace gaptooth {

struct ElementResiduals {
    Poly de, bcr, bcl, bct, bcb;

    bool all_zero() const { return de.is_zero() && bcr.is_zero() && bcl.is_zero() && bct.is_zero() && bcb.is_zero(); }
    std::vector<std::size_t> lengths() const { return {de.size(), bcr.size(), bcl.size(), bct.size(), bcb.size()}; }
    int min_grade() const {
        return std::min({de.min_grade(), bcr.min_grade(), bcl.min_grade(), bct.min_grade(), bcb.min_grade()});
    }
};

struct ElementState {
    Poly uij;
    Poly gij;
    int order{6};  ///< multinomial total degree
    int iterations{0};
    bool converged{false};
    std::vector<std::vector<std::size_t>> log;  ///< residual term counts per pass

    /// Piecewise-constant field, no evolution.
    static ElementState initial(int K = 3, int order = 6) {
        if (K < 2) throw ConfigurationError("truncation order K must be >= 2");
        if (order < 2) throw ConfigurationError("multinomial order must be >= 2");
        const TruncationPolicy pol{K, 1, false};
        ElementState s;
        s.uij = Poly::symbol(pol, Symbol::grid(0, 0));
        s.gij = Poly(pol);
        s.order = order;
        return s;
    }

    const TruncationPolicy& policy() const { return uij.policy(); }
};

inline ElementResiduals residuals(const ElementState& s) {
    const TruncationPolicy pol = s.policy();
    const Poly& u = s.uij;
    const Poly gam = Poly::symbol(pol, Symbol::gam());
    const Poly alf = Poly::symbol(pol, Symbol::alf());
    ElementResiduals r;
    const Poly low = u.below_grade(pol.order - pol.alf_weight);
    r.de = time_derivative(u, s.gij) - diff_coord(u, CoordName::xi, 2) - diff_coord(u, CoordName::yi, 2) -
           alf * (low - low * low * low);
    const Poly ux0 = u.substitute(Symbol::xi(), Rational(0));
    const Poly uy0 = u.substitute(Symbol::yi(), Rational(0));
    r.bcr = u.substitute(Symbol::xi(), Rational(1)) - ux0 - gam * (ux0.shifted(1, 0) - ux0);
    r.bcl = u.substitute(Symbol::xi(), Rational(-1)) - ux0 - gam * (ux0.shifted(-1, 0) - ux0);
    r.bct = u.substitute(Symbol::yi(), Rational(1)) - uy0 - gam * (uy0.shifted(0, 1) - uy0);
    r.bcb = u.substitute(Symbol::yi(), Rational(-1)) - uy0 - gam * (uy0.shifted(0, -1) - uy0);
    return r;
}

namespace detail {

/// Unknown ordering: gd first, then cc(m,n) in graded-lex order (total degree, then m descending).
inline std::vector<Symbol> element_unknowns(int order) {
    std::vector<Symbol> u{Symbol::gd()};
    for (int d = 0; d <= order; ++d)
        for (int m = d; m >= 0; --m) u.push_back(Symbol::cc(m, d - m));
    return u;
}

}  // namespace detail

/// One correction pass.  Returns false (state untouched) when the residuals already vanish.
inline bool iterate_once(ElementState& s) {
    const TruncationPolicy pol = s.policy();
    const auto res = residuals(s);
    s.log.push_back(res.lengths());
    if (res.all_zero()) return false;

    Poly vv(pol);
    for (int m = 0; m <= s.order; ++m)
        for (int n = 0; n + m <= s.order; ++n) {
            Monomial mono(Symbol::cc(m, n));
            mono.mul(Symbol::xi(), m).mul(Symbol::yi(), n);
            vv += Poly::monomial(pol, mono, 1);
        }
    // gd enters through G = h^2 gd so that, after scaling the field equation by
    // h^2, every matrix entry is a pure rational.
    const Poly big_g = Poly::symbol(pol, Symbol::gd());
    const Poly h2 = Poly::symbol(pol, Symbol::h(), 2);
    const Poly lap_v = diff_coord(vv, CoordName::xi, 2) + diff_coord(vv, CoordName::yi, 2);
    const Poly deq = h2 * (res.de - lap_v) + big_g;
    const Poly v0x = vv.substitute(Symbol::xi(), Rational(0));
    const Poly v0y = vv.substitute(Symbol::yi(), Rational(0));
    const Poly rbcr = res.bcr + vv.substitute(Symbol::xi(), Rational(1)) - v0x;
    const Poly lbcl = res.bcl + vv.substitute(Symbol::xi(), Rational(-1)) - v0x;
    const Poly tbct = res.bct + vv.substitute(Symbol::yi(), Rational(1)) - v0y;
    const Poly bbcb = res.bcb + vv.substitute(Symbol::yi(), Rational(-1)) - v0y;

    std::vector<Poly> eqns = coeffs({deq}, {Symbol::xi(), Symbol::yi()});
    eqns.push_back(Poly::symbol(pol, Symbol::cc(0, 0)));
    for (const auto& p : rbcr.coeff(Symbol::yi())) eqns.push_back(p);
    for (const auto& p : lbcl.coeff(Symbol::yi())) eqns.push_back(p);
    for (const auto& p : tbct.coeff(Symbol::xi())) eqns.push_back(p);
    for (const auto& p : bbcb.coeff(Symbol::xi())) eqns.push_back(p);

    const auto unknowns = detail::element_unknowns(s.order);
    Matrix<Rational> a(eqns.size(), unknowns.size());
    std::vector<Poly> rhs;
    rhs.reserve(eqns.size());
    for (std::size_t q = 0; q < eqns.size(); ++q) {
        for (std::size_t c = 0; c < unknowns.size(); ++c) {
            Poly coef = eqns[q].linear_coefficient(unknowns[c]);
            if (coef.is_zero()) continue;
            if (coef.size() != 1 || !coef.terms()[0].mono.is_one())
                throw ConstructionError("element system coefficient is not a pure number");
            a(q, c) = coef.terms()[0].coef;
        }
        rhs.push_back(-eqns[q].without_kind(SymbolKind::Unknown));
    }

    const auto rows = independent_rows(a);
    if (rows.size() < unknowns.size()) {
        std::ostringstream msg;
        msg << "element system singular at pass " << s.iterations + 1 << " (rank " << rows.size() << " of "
            << unknowns.size() << ", K=" << pol.order << ")";
        throw ConstructionError(msg.str());
    }
    Matrix<Rational> sq(unknowns.size(), unknowns.size());
    std::vector<Poly> b;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        for (std::size_t c = 0; c < unknowns.size(); ++c) sq(k, c) = a(rows[k], c);
        b.push_back(rhs[rows[k]]);
    }
    const auto x = lu_backsub(lu_decomp(sq), b);

    for (std::size_t q = 0; q < eqns.size(); ++q) {
        Poly check = -rhs[q];
        for (std::size_t c = 0; c < unknowns.size(); ++c)
            if (a(q, c) != 0) check.axpy(a(q, c), x[c]);
        if (!check.is_zero()) {
            std::ostringstream msg;
            msg << "element system inconsistent at pass " << s.iterations + 1 << " (K=" << pol.order
                << "): equation " << q + 1 << " leaves " << check;
            throw ConstructionError(msg.str());
        }
    }

    for (std::size_t c = 1; c < unknowns.size(); ++c) {
        const Symbol cc = unknowns[c];
        Monomial mono;
        mono.mul(Symbol::xi(), cc.a).mul(Symbol::yi(), cc.b);
        s.uij += x[c] * Poly::monomial(pol, mono, 1);
    }
    s.gij += x[0] * Poly::symbol(pol, Symbol::h(), -2);
    return true;
}

/// Repeats correction passes until all five residuals vanish (at most max_iters passes).
inline ElementState iterate(ElementState s, int max_iters = 10) {
    for (int it = 0; it < max_iters; ++it) {
        if (!iterate_once(s)) {
            s.converged = true;
            return s;
        }
        ++s.iterations;
    }
    s.converged = residuals(s).all_zero();
    if (s.converged) s.log.push_back(residuals(s).lengths());
    return s;
}

/// Weighted element average: integral over [-1,1] of (1 - |c|) p dc, applied termwise in c.
inline Poly weighted_integral(const Poly& p, Symbol c) {
    std::vector<Term> out;
    for (const auto& t : p.terms()) {
        int e = t.mono.exponent(c);
        if (e % 2 != 0) continue;
        out.push_back({t.mono.without(c), t.coef * ratio(2, (e + 1) * (e + 2))});
    }
    return Poly::from_terms(p.policy(), std::move(out));
}

/// Raises the truncation by one grade and adds the evolution correction from
/// the solvability condition.  Returns the correction that was added.
inline Poly solvability_order(ElementState& s) {
    if (!s.converged) throw ConstructionError("solvability correction needs a converged element state");
    TruncationPolicy next = s.policy();
    ++next.order;
    s.uij = s.uij.with_policy(next);
    s.gij = s.gij.with_policy(next);
    const auto r = residuals(s);
    const Poly inv_h2 = Poly::symbol(next, Symbol::h(), -2);
    Poly gd = weighted_integral(weighted_integral(r.de, Symbol::xi()), Symbol::yi());
    gd += weighted_integral(r.bcr + r.bcl, Symbol::yi()) * inv_h2;
    gd += weighted_integral(r.bct + r.bcb, Symbol::xi()) * inv_h2;
    s.gij -= gd;
    return -gd;
}

inline StencilModel to_model(const ElementState& s) { return StencilModel::from_poly(s.gij, 0, Rational(1)); }

}  // namespace gaptooth
