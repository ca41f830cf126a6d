#pragma once

// Semi-numeric construction of the macroscale model for gap-tooth patches.
//
// Each patch carries a (2n+1)x(2n+1) lattice whose values are polynomials in the
// macroscale grid values.  Patch edges are coupled to neighbouring grid values
// through classic Lagrange interpolation graded by the coupling gamma (or,
// for overlapping elements, through the interelement conditions).  The
// homological equation is linear in the corrections with a constant matrix, so
// it is factored once and every iteration is one back substitution.

#include <chrono>
#include <functional>
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

enum class Coupling {
    Automatic,     ///< interelement when r == 1, interpolation otherwise
    Interpolation, ///< patch edges from the Lagrange interpolant
    Interelement,  ///< u(X_{i+-1}) = gamma u_{i+-1,j} + (1 - gamma) u_{i,j}(X_i); needs r == 1
};

struct PatchSpec {
    int n{2};
    Rational r{1, 2};
    Rational nu{1};
    int K{4};
    int alf_weight{2};
    int max_iters{19};
    Coupling coupling{Coupling::Automatic};

    int ns() const { return 2 * n + 1; }
    int unknowns() const { return ns() * ns() + 1; }
    bool interelement() const {
        return coupling == Coupling::Interelement || (coupling == Coupling::Automatic && r == 1);
    }
    TruncationPolicy policy() const { return {K, alf_weight, true}; }
    /// dx^2 = (r h / n)^2 as a polynomial.
    Poly dx2() const {
        Monomial m(Symbol::h(), 2);
        return Poly::monomial(policy(), m, r * r / (n * n));
    }

    void validate() const {
        if (n < 1) throw ConfigurationError("patch half-width n must be >= 1");
        if (r <= 0 || r > 1) throw ConfigurationError("patch ratio r must lie in (0, 1]");
        if (K < 2) throw ConfigurationError("truncation order K must be >= 2");
        if (alf_weight < 1) throw ConfigurationError("alpha weight must be >= 1");
        if (max_iters < 1) throw ConfigurationError("max_iters must be >= 1");
        if (coupling == Coupling::Interelement && r != 1)
            throw ConfigurationError("interelement coupling requires r = 1");
    }
};

/// Lattice field uij(ii, jj), 1-based as in the lattice description, plus the evolution.
struct SubgridField {
    int ns{0};
    std::vector<Poly> u;  // row-major, (ii-1)*ns + (jj-1)
    Poly g;

    Poly& at(int ii, int jj) { return u[static_cast<std::size_t>((ii - 1) * ns + (jj - 1))]; }
    const Poly& at(int ii, int jj) const { return u[static_cast<std::size_t>((ii - 1) * ns + (jj - 1))]; }

    static SubgridField constant(const PatchSpec& spec) {
        SubgridField f;
        f.ns = spec.ns();
        f.u.assign(static_cast<std::size_t>(f.ns * f.ns), Poly::symbol(spec.policy(), Symbol::grid(0, 0)));
        f.g = Poly(spec.policy());
        return f;
    }
};

using InterpolationField = Poly;

namespace detail {

inline Poly mu_delta(const Poly& p, bool x) {
    return (p.shifted(x ? 1 : 0, x ? 0 : 1) - p.shifted(x ? -1 : 0, x ? 0 : -1)) / Rational(2);
}
inline Poly delta2(const Poly& p, bool x) {
    return p.shifted(x ? 1 : 0, x ? 0 : 1) - Rational(2) * p + p.shifted(x ? -1 : 0, x ? 0 : -1);
}

/// One direction of the graded Lagrange interpolant applied to uu.
inline Poly lagrange_direction(const Poly& uu, bool x) {
    const TruncationPolicy pol = uu.policy();
    const Symbol c = x ? Symbol::xi() : Symbol::yi();
    const Poly s = Poly::symbol(pol, c);
    const Poly gam = Poly::symbol(pol, Symbol::gam());
    const Poly one(pol, Rational(1));
    auto rep = [&](const Poly& p, int k) {
        Poly out = p;
        for (int i = 0; i < k; ++i) out = delta2(out, x);
        return out;
    };
    const Poly md = mu_delta(uu, x), dd = delta2(uu, x);
    const Poly s2m1 = s * s - one, s2m4 = s * s - Rational(4) * one, s2m9 = s * s - Rational(9) * one;
    Poly out = uu;
    out += gam * (md + dd * s / Rational(2)) * s;
    if (pol.order > 2) out += gam.pow(2) * rep(md + dd * s / Rational(4), 1) * s * s2m1 / Rational(6);
    if (pol.order > 3) out += gam.pow(3) * rep(md + dd * s / Rational(6), 2) * s * s2m1 * s2m4 / Rational(120);
    if (pol.order > 4)
        out += gam.pow(4) * rep(md + dd * s / Rational(8), 3) * s * s2m1 * s2m4 * s2m9 / Rational(5040);
    return out;
}

}  // namespace detail

/// Classic Lagrange interpolation from the surrounding grid values, first in x
/// (xi = (x - X_i)/H) and then in y, graded by gamma.  Coded through gamma^4.
inline InterpolationField build_interpolant(const PatchSpec& spec) {
    if (spec.K > 5) throw ConfigurationError("interpolant is coded to gamma^4: need K <= 5");
    const TruncationPolicy pol = spec.policy();
    Poly uu = Poly::symbol(pol, Symbol::grid(0, 0));
    uu = detail::lagrange_direction(uu, true);
    uu = detail::lagrange_direction(uu, false);
    return uu;
}

/// Residuals in the fixed order: four corners, the coupling conditions for
/// ll = 2..ns-1 (right, left, top, bottom), interior lattice equations
/// (ii outer, jj inner), then the amplitude condition.  Corner and amplitude
/// residuals are the unknowns themselves and vanish when no unknowns are present.
inline std::vector<Poly> assemble_residuals(const SubgridField& f, const InterpolationField& uu, const PatchSpec& spec) {
    const TruncationPolicy pol = spec.policy();
    const int n = spec.n, ns = spec.ns();
    std::vector<Poly> eq;
    eq.reserve(static_cast<std::size_t>(spec.unknowns()));
    auto unknown = [&](int ii, int jj) { return f.at(ii, jj).only_kind(SymbolKind::Unknown); };

    eq.push_back(unknown(1, 1));
    eq.push_back(unknown(1, ns));
    eq.push_back(unknown(ns, 1));
    eq.push_back(unknown(ns, ns));

    const Poly gam = Poly::symbol(pol, Symbol::gam());
    const Poly one(pol, Rational(1));
    if (spec.interelement()) {
        for (int ll = 2; ll <= ns - 1; ++ll) {
            const Poly& cx = f.at(n + 1, ll);
            const Poly& cy = f.at(ll, n + 1);
            eq.push_back(f.at(ns, ll) - (one - gam) * cx - gam * cx.shifted(1, 0));
            eq.push_back(f.at(1, ll) - (one - gam) * cx - gam * cx.shifted(-1, 0));
            eq.push_back(f.at(ll, ns) - (one - gam) * cy - gam * cy.shifted(0, 1));
            eq.push_back(f.at(ll, 1) - (one - gam) * cy - gam * cy.shifted(0, -1));
        }
    } else {
        auto at = [&](const Rational& xv, const Rational& yv) {
            return uu.substitute(Symbol::xi(), xv).substitute(Symbol::yi(), yv);
        };
        const Rational& r = spec.r;
        for (int ll = 2; ll <= ns - 1; ++ll) {
            const Rational xy = r * (ll - n - 1) / n;
            eq.push_back(f.at(ns, ll) - at(r, xy));
            eq.push_back(f.at(1, ll) - at(-r, xy));
            eq.push_back(f.at(ll, ns) - at(xy, r));
            eq.push_back(f.at(ll, 1) - at(xy, -r));
        }
    }

    const Poly dx2 = spec.dx2();
    const Poly alpha_dx2 = Poly::symbol(pol, Symbol::alf()) * dx2;
    const int cube_grade = pol.order - pol.alf_weight;  // u^3 only matters below this grade
    for (int ii = 2; ii <= ns - 1; ++ii)
        for (int jj = 2; jj <= ns - 1; ++jj) {
            const Poly& u = f.at(ii, jj);
            Poly e = -(time_derivative(u, f.g) * dx2);
            Poly lap = f.at(ii + 1, jj) + f.at(ii - 1, jj) + f.at(ii, jj + 1) + f.at(ii, jj - 1) - Rational(4) * u;
            e += spec.nu * lap;
            const Poly low = u.below_grade(cube_grade);
            e += alpha_dx2 * (low - low * low * low);
            eq.push_back(std::move(e));
        }

    eq.push_back(unknown(n + 1, n + 1));
    return eq;
}

/// Matrix of the homological equation: minus the coefficients of ud(ii,jj)
/// (row-major) and gd in every residual, evaluated with unknowns added to f.
inline Matrix<Rational> extract_jacobian(SubgridField f, const InterpolationField& uu, const PatchSpec& spec) {
    const TruncationPolicy pol = spec.policy();
    const int ns = spec.ns();
    for (int ii = 1; ii <= ns; ++ii)
        for (int jj = 1; jj <= ns; ++jj) f.at(ii, jj) += Poly::symbol(pol, Symbol::ud(ii, jj));
    Monomial gd_over_dx2(Symbol::gd());
    gd_over_dx2.mul(Symbol::h(), -2);
    f.g += Poly::monomial(pol, gd_over_dx2, Rational(spec.n * spec.n) / (spec.r * spec.r));
    const auto eqns = assemble_residuals(f, uu, spec);
    const auto nn = static_cast<std::size_t>(spec.unknowns());
    Matrix<Rational> lu(nn, nn);
    for (std::size_t q = 0; q < nn; ++q) {
        std::size_t col = 0;
        auto read = [&](Symbol s) {
            Poly c = eqns[q].linear_coefficient(s);
            if (c.size() > 1 || (c.size() == 1 && !c.terms()[0].mono.is_one()))
                throw ConstructionError("homological matrix entry is not a pure number in equation " + std::to_string(q + 1));
            lu(q, col++) = c.is_zero() ? Rational(0) : Rational(-c.terms()[0].coef);
        };
        for (int ii = 1; ii <= ns; ++ii)
            for (int jj = 1; jj <= ns; ++jj) read(Symbol::ud(ii, jj));
        read(Symbol::gd());
    }
    return lu;
}

struct IterationLog {
    int iteration{0};
    std::size_t nonzero_residuals{0};
    std::size_t residual_terms{0};
    double seconds{0.0};
};

struct NumericResult {
    StencilModel model;
    SubgridField field;
    InterpolationField interpolant;
    Matrix<Rational> jacobian;  // the (negated) homological matrix as factored
    int iterations{0};
    std::vector<IterationLog> log;
};

/// Iterates residual -> back substitution -> update until every residual is
/// exactly zero.  Throws ConstructionError after max_iters passes.
inline NumericResult construct(const PatchSpec& spec,
                               const std::function<void(const IterationLog&)>& on_iteration = {}) {
    spec.validate();
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    NumericResult res;
    res.interpolant = build_interpolant(spec);
    res.field = SubgridField::constant(spec);
    res.jacobian = extract_jacobian(res.field, res.interpolant, spec);
    const auto lu = lu_decomp(res.jacobian);

    const int ns = spec.ns();
    const Rational inv_dx2_coeff = Rational(spec.n * spec.n) / (spec.r * spec.r);
    const TruncationPolicy pol = spec.policy();
    for (int iter = 1; iter <= spec.max_iters; ++iter) {
        auto eqns = assemble_residuals(res.field, res.interpolant, spec);
        IterationLog entry{iter, 0, 0, 0.0};
        for (const auto& e : eqns) {
            if (!e.is_zero()) ++entry.nonzero_residuals;
            entry.residual_terms += e.size();
        }
        entry.seconds = std::chrono::duration<double>(clock::now() - start).count();
        res.log.push_back(entry);
        if (on_iteration) on_iteration(entry);
        if (entry.nonzero_residuals == 0) {
            res.iterations = iter;
            res.model = StencilModel::from_poly(res.field.g, spec.n, spec.r);
            return res;
        }
        lu_backsub_inplace(lu, eqns);
        Monomial inv_dx2(Symbol::h(), -2);
        res.field.g += eqns.back() * Poly::monomial(pol, inv_dx2, inv_dx2_coeff);
        std::size_t q = 0;
        for (int ii = 1; ii <= ns; ++ii)
            for (int jj = 1; jj <= ns; ++jj) res.field.at(ii, jj) += eqns[q++];
    }
    std::ostringstream msg;
    msg << "gap-tooth construction (n=" << spec.n << ", r=" << spec.r << ", K=" << spec.K
        << ") did not converge in " << spec.max_iters << " iterations; last residual: "
        << res.log.back().nonzero_residuals << " nonzero equations, " << res.log.back().residual_terms << " terms";
    throw ConstructionError(msg.str());
}

}  // namespace gaptooth
