#pragma once

// Macroscale stencil models dU_{i,j}/dt = g_{i,j} and the centred-difference
// operator algebra (mu delta, delta^2 in x and y) used to read them.

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"
#include "ratpoly.hpp"

namespace gaptooth {

struct GridFactor {
    int di{0};
    int dj{0};
    int exp{1};
    friend bool operator==(const GridFactor&, const GridFactor&) = default;
};

struct StencilTerm {
    int gam{0};
    int alf{0};
    Rational coeff;
    int hpow{0};
    std::vector<GridFactor> factors;
};

/// Constructed evolution dU/dt as a graded sum of products of shifted grid values.
struct StencilModel {
    int n{0};            ///< subgrid half-width (0 for the analytic element construction)
    Rational r{1};       ///< patch ratio
    int K{0};            ///< truncation order
    int alf_weight{1};   ///< smallness grade of alpha
    std::vector<StencilTerm> terms;

    /// Reads a polynomial in gam, alf, h and grid values.  Any other symbol is rejected.
    static StencilModel from_poly(const Poly& g, int n, Rational r) {
        StencilModel m;
        m.n = n;
        m.r = std::move(r);
        m.K = g.policy().order;
        m.alf_weight = g.policy().alf_weight;
        for (const auto& t : g.terms()) {
            StencilTerm st;
            st.coeff = t.coef;
            for (const auto& f : t.mono.factors()) {
                if (f.sym == Symbol::gam()) {
                    st.gam = f.exp;
                } else if (f.sym == Symbol::alf()) {
                    st.alf = f.exp;
                } else if (f.sym == Symbol::h()) {
                    st.hpow = f.exp;
                } else if (f.sym.kind == SymbolKind::GridVal) {
                    st.factors.push_back({f.sym.a, f.sym.b, f.exp});
                } else {
                    throw ConfigurationError("stencil model cannot hold symbol " + f.sym.name());
                }
            }
            m.terms.push_back(std::move(st));
        }
        return m;
    }

    TruncationPolicy policy() const { return {K, alf_weight, false}; }

    Poly to_poly() const { return to_poly(policy()); }
    Poly to_poly(TruncationPolicy policy) const {
        std::vector<Term> ts;
        for (const auto& st : terms) {
            Monomial m;
            m.mul(Symbol::gam(), st.gam).mul(Symbol::alf(), st.alf).mul(Symbol::h(), st.hpow);
            for (const auto& f : st.factors) m.mul(Symbol::grid(f.di, f.dj), f.exp);
            ts.push_back({std::move(m), st.coeff});
        }
        return Poly::from_terms(policy, std::move(ts));
    }

    /// Largest |offset| in either direction.
    int width() const {
        int w = 0;
        for (const auto& st : terms)
            for (const auto& f : st.factors) w = std::max({w, std::abs(f.di), std::abs(f.dj)});
        return w;
    }

    /// Highest power of gam present.
    int gamma_order() const {
        int g = 0;
        for (const auto& st : terms) g = std::max(g, st.gam);
        return g;
    }
};

// ---------------------------------------------------------------------------
// JSON model export

inline nlohmann::json to_json(const StencilModel& m) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& st : m.terms) {
        nlohmann::json fs = nlohmann::json::array();
        for (const auto& f : st.factors) fs.push_back({f.di, f.dj, f.exp});
        terms.push_back({{"gam", st.gam}, {"alf", st.alf}, {"hpow", st.hpow}, {"coeff", to_string(st.coeff)}, {"factors", fs}});
    }
    return {{"n", m.n}, {"r", to_string(m.r)}, {"K", m.K}, {"alf_weight", m.alf_weight}, {"terms", terms}};
}

inline StencilModel model_from_json(const nlohmann::json& j) {
    StencilModel m;
    try {
        m.n = j.at("n").get<int>();
        m.r = parse_rational(j.at("r").get<std::string>());
        m.K = j.at("K").get<int>();
        m.alf_weight = j.value("alf_weight", 1);
        for (const auto& t : j.at("terms")) {
            StencilTerm st;
            st.gam = t.at("gam").get<int>();
            st.alf = t.at("alf").get<int>();
            st.hpow = t.at("hpow").get<int>();
            st.coeff = parse_rational(t.at("coeff").get<std::string>());
            for (const auto& f : t.at("factors")) st.factors.push_back({f.at(0).get<int>(), f.at(1).get<int>(), f.at(2).get<int>()});
            m.terms.push_back(std::move(st));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigurationError(std::string("malformed model file: ") + e.what());
    }
    return m;
}

inline void save_model(const StencilModel& m, const std::string& path, const nlohmann::json& provenance = {}) {
    auto j = to_json(m);
    if (!provenance.is_null()) j["config"] = provenance;
    std::ofstream out(path);
    if (!out) throw ConfigurationError("cannot write " + path);
    out << j.dump(1) << "\n";
}

inline StencilModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigurationError("cannot read model file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigurationError("model file " + path + " is not JSON: " + e.what());
    }
    return model_from_json(j);
}

// ---------------------------------------------------------------------------
// One-dimensional centred-difference algebra.
//
// Every Laurent polynomial in the shift E has a unique expansion
//   sum_m p_m delta^{2m} + mu delta * sum_m q_m delta^{2m},
// with mu delta = (E - 1/E)/2 and delta^2 = E - 2 + 1/E, using (mu delta)^2 = delta^2 + delta^4/4.

struct DiffOp1D {
    std::vector<Rational> even;  ///< coefficients of delta^{2m}
    std::vector<Rational> odd;   ///< coefficients of mu delta delta^{2m}

    static DiffOp1D identity() { return {{Rational(1)}, {}}; }

    friend DiffOp1D operator*(const DiffOp1D& a, const DiffOp1D& b) {
        DiffOp1D c;
        auto acc = [](std::vector<Rational>& v, std::size_t k, const Rational& x) {
            if (v.size() <= k) v.resize(k + 1);
            v[k] += x;
        };
        for (std::size_t i = 0; i < a.even.size(); ++i) {
            for (std::size_t j = 0; j < b.even.size(); ++j) acc(c.even, i + j, a.even[i] * b.even[j]);
            for (std::size_t j = 0; j < b.odd.size(); ++j) acc(c.odd, i + j, a.even[i] * b.odd[j]);
        }
        for (std::size_t i = 0; i < a.odd.size(); ++i) {
            for (std::size_t j = 0; j < b.even.size(); ++j) acc(c.odd, i + j, a.odd[i] * b.even[j]);
            for (std::size_t j = 0; j < b.odd.size(); ++j) {
                Rational x = a.odd[i] * b.odd[j];
                acc(c.even, i + j + 1, x);
                acc(c.even, i + j + 2, x / 4);
            }
        }
        return c;
    }

    /// E^k via the shift rules E^{+-1} = 1 +- mu delta + delta^2/2.
    static DiffOp1D shift(int k) {
        DiffOp1D step{{Rational(1), Rational(1, 2)}, {Rational(k >= 0 ? 1 : -1)}};
        DiffOp1D out = identity();
        for (int s = 0; s < std::abs(k); ++s) out = out * step;
        return out;
    }
};

/// Laurent coefficients (offset -> weight) of (mu delta)^odd (delta^2)^even2.
inline std::map<int, Rational> difference_weights_1d(int odd, int even2) {
    std::map<int, Rational> w{{0, Rational(1)}};
    auto apply = [&w](const std::map<int, Rational>& kernel) {
        std::map<int, Rational> out;
        for (const auto& [a, x] : w)
            for (const auto& [b, y] : kernel) out[a + b] += x * y;
        std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
        w = std::move(out);
    };
    const std::map<int, Rational> md{{-1, Rational(-1, 2)}, {1, Rational(1, 2)}};
    const std::map<int, Rational> dd{{-1, Rational(1)}, {0, Rational(-2)}, {1, Rational(1)}};
    for (int k = 0; k < odd; ++k) apply(md);
    for (int k = 0; k < even2; ++k) apply(dd);
    return w;
}

/// Bold centred difference delta_x^k + delta_y^k applied to U_{i,j}, as grid values (k in {2,4,6}).
inline Poly bold_delta(int k, TruncationPolicy policy = TruncationPolicy::none()) {
    if (k != 2 && k != 4 && k != 6) throw ConfigurationError("bold_delta supports k = 2, 4, 6 only");
    Poly p(policy);
    for (const auto& [a, w] : difference_weights_1d(0, k / 2)) {
        p += Poly::monomial(policy, Monomial(Symbol::grid(a, 0)), w);
        p += Poly::monomial(policy, Monomial(Symbol::grid(0, a)), w);
    }
    return p;
}

/// Polynomial in Op symbols; see Symbol::op.  Canonical by construction: x before y,
/// mu delta before delta^2, and at most one mu delta per direction.
using DiffExpr = Poly;

namespace detail {

inline Poly expand_grid_value(int di, int dj, TruncationPolicy policy) {
    const DiffOp1D ex = DiffOp1D::shift(di), ey = DiffOp1D::shift(dj);
    std::vector<Term> ts;
    auto parts = [](const DiffOp1D& d) {
        std::vector<std::tuple<int, int, Rational>> v;  // (odd, even power, coefficient)
        for (std::size_t m = 0; m < d.even.size(); ++m)
            if (d.even[m] != 0) v.emplace_back(0, static_cast<int>(m), d.even[m]);
        for (std::size_t m = 0; m < d.odd.size(); ++m)
            if (d.odd[m] != 0) v.emplace_back(1, static_cast<int>(m), d.odd[m]);
        return v;
    };
    for (const auto& [ax, bx, cx] : parts(ex))
        for (const auto& [ay, by, cy] : parts(ey)) ts.push_back({Monomial(Symbol::op(ax, bx, ay, by)), cx * cy});
    return Poly::from_terms(policy, std::move(ts));
}

}  // namespace detail

/// Rewrites every shifted grid value through the shift rules; products are
/// multiplied out in the commutative algebra of applied operators.
inline DiffExpr to_difference_form(const Poly& g) {
    const TruncationPolicy pol = g.policy();
    std::map<std::pair<int, int>, Poly> cache;
    auto expansion = [&](int di, int dj) -> const Poly& {
        auto key = std::make_pair(di, dj);
        auto it = cache.find(key);
        if (it == cache.end()) it = cache.emplace(key, detail::expand_grid_value(di, dj, pol)).first;
        return it->second;
    };
    Poly out(pol);
    for (const auto& t : g.terms()) {
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
        for (const auto& [s, e] : grid) term = term * expansion(s.a, s.b).pow(e);
        out += term;
    }
    return out;
}

inline DiffExpr to_difference_form(const StencilModel& m) { return to_difference_form(m.to_poly()); }

/// Inverse of to_difference_form: expand each applied operator into shifted grid values.
inline Poly from_difference_form(const DiffExpr& d) {
    const TruncationPolicy pol = d.policy();
    std::map<Symbol, Poly> cache;
    auto expansion = [&](Symbol s) -> const Poly& {
        auto it = cache.find(s);
        if (it == cache.end()) {
            std::vector<Term> ts;
            for (const auto& [a, wx] : difference_weights_1d(s.op_ax(), s.op_bx()))
                for (const auto& [b, wy] : difference_weights_1d(s.op_ay(), s.op_by()))
                    ts.push_back({Monomial(Symbol::grid(a, b)), wx * wy});
            it = cache.emplace(s, Poly::from_terms(pol, std::move(ts))).first;
        }
        return it->second;
    };
    Poly out(pol);
    for (const auto& t : d.terms()) {
        Monomial rest;
        std::vector<std::pair<Symbol, int>> ops;
        for (const auto& f : t.mono.factors()) {
            if (f.sym.kind == SymbolKind::Op) {
                ops.emplace_back(f.sym, f.exp);
            } else {
                rest.mul(f.sym, f.exp);
            }
        }
        Poly term = Poly::monomial(pol, rest, t.coef);
        for (const auto& [s, e] : ops) term = term * expansion(s).pow(e);
        out += term;
    }
    return out;
}

/// Part of a polynomial with the given gam and alf exponents (those symbols removed).
inline Poly block(const Poly& p, int gam, int alf) {
    std::vector<Term> ts;
    for (const auto& t : p.terms())
        if (t.mono.exponent(Symbol::gam()) == gam && t.mono.exponent(Symbol::alf()) == alf)
            ts.push_back({t.mono.without(Symbol::gam()).without(Symbol::alf()), t.coef});
    return Poly::from_terms(TruncationPolicy::none(), std::move(ts));
}

// ---------------------------------------------------------------------------
// Numeric evaluation

/// Dense 2D array of doubles with an index offset, so a padded grid can be
/// addressed by its unpadded indices (valid range -pad .. n+pad-1).
class Field2D {
public:
    Field2D() = default;
    Field2D(int nx, int ny, int pad = 0, double fill = 0.0)
        : nx_(nx), ny_(ny), pad_(pad), data_(static_cast<std::size_t>((nx + 2 * pad) * (ny + 2 * pad)), fill) {}

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int pad() const { return pad_; }

    bool in_bounds(int i, int j) const { return i >= -pad_ && i < nx_ + pad_ && j >= -pad_ && j < ny_ + pad_; }

    double& operator()(int i, int j) { return data_[index(i, j)]; }
    double operator()(int i, int j) const { return data_[index(i, j)]; }

    double at(int i, int j) const {
        if (!in_bounds(i, j))
            throw IndexError("grid index (" + std::to_string(i) + "," + std::to_string(j) + ") outside padded field");
        return (*this)(i, j);
    }

    /// Interior values only, row-major.
    std::vector<double> interior() const {
        std::vector<double> v;
        v.reserve(static_cast<std::size_t>(nx_ * ny_));
        for (int i = 0; i < nx_; ++i)
            for (int j = 0; j < ny_; ++j) v.push_back((*this)(i, j));
        return v;
    }

private:
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>((i + pad_) * (ny_ + 2 * pad_) + (j + pad_));
    }
    int nx_{0}, ny_{0}, pad_{0};
    std::vector<double> data_;
};

/// A model with gamma, alpha, H folded into double coefficients.
class CompiledModel {
public:
    struct Entry {
        double coeff;
        std::vector<GridFactor> factors;
    };

    CompiledModel(const StencilModel& m, double gamma, double alpha, double H) {
        std::map<std::vector<std::tuple<int, int, int>>, double> merged;
        for (const auto& st : m.terms) {
            double c = st.coeff.get_d() * std::pow(gamma, st.gam) * std::pow(alpha, st.alf) * std::pow(H, st.hpow);
            std::vector<std::tuple<int, int, int>> key;
            for (const auto& f : st.factors) key.emplace_back(f.di, f.dj, f.exp);
            merged[key] += c;
        }
        for (const auto& [key, c] : merged) {
            if (c == 0.0) continue;
            Entry e{c, {}};
            for (const auto& [a, b, x] : key) e.factors.push_back({a, b, x});
            entries_.push_back(std::move(e));
        }
        width_ = m.width();
    }

    int width() const { return width_; }
    const std::vector<Entry>& entries() const { return entries_; }

    double operator()(const Field2D& u, int i, int j) const {
        double total = 0.0;
        for (const auto& e : entries_) {
            double v = e.coeff;
            for (const auto& f : e.factors) {
                const double x = u(i + f.di, j + f.dj);
                for (int k = 0; k < f.exp; ++k) v *= x;
            }
            total += v;
        }
        return total;
    }

    /// Bounds-checked variant.
    double checked(const Field2D& u, int i, int j) const {
        for (const auto& e : entries_)
            for (const auto& f : e.factors) (void)u.at(i + f.di, j + f.dj);
        return (*this)(u, i, j);
    }

private:
    std::vector<Entry> entries_;
    int width_{0};
};

/// dU_{i,j}/dt of the model at one node; offsets must lie inside the (padded) field.
inline double evaluate(const StencilModel& m, const Field2D& field, int i, int j, double gamma, double alpha, double H) {
    return CompiledModel(m, gamma, alpha, H).checked(field, i, j);
}

}  // namespace gaptooth
