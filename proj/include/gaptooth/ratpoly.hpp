#pragma once

// Exact-rational sparse multivariate polynomials with smallness-grade truncation.
//
// A Poly is a sorted list of (Monomial, Rational) terms.  Every Poly carries a
// TruncationPolicy; terms whose grade reaches the policy order are discarded as
// soon as they are formed, which keeps the asymptotic constructions finite.

#include <boost/container/small_vector.hpp>

#include <algorithm>
#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

namespace gaptooth {

enum class SymbolKind : std::uint8_t { Param, Coord, GridVal, Unknown, Op, Deriv };
enum class ParamName : std::uint8_t { gam, alf, h, nu };
enum class CoordName : std::uint8_t { xi, yi };
enum class UnknownTag : std::uint8_t { CC, UD, GD };

/// One indeterminate.  Ordering is by kind first, so parameters lead every monomial.
struct Symbol {
    SymbolKind kind{SymbolKind::Param};
    std::uint8_t tag{0};
    std::int16_t a{0};
    std::int16_t b{0};

    friend constexpr auto operator<=>(const Symbol&, const Symbol&) = default;

    static constexpr Symbol param(ParamName p) { return {SymbolKind::Param, static_cast<std::uint8_t>(p), 0, 0}; }
    static constexpr Symbol gam() { return param(ParamName::gam); }
    static constexpr Symbol alf() { return param(ParamName::alf); }
    static constexpr Symbol h() { return param(ParamName::h); }
    static constexpr Symbol nu() { return param(ParamName::nu); }
    static constexpr Symbol coord(CoordName c) { return {SymbolKind::Coord, static_cast<std::uint8_t>(c), 0, 0}; }
    static constexpr Symbol xi() { return coord(CoordName::xi); }
    static constexpr Symbol yi() { return coord(CoordName::yi); }
    /// Grid value U_{i+di, j+dj}.
    static constexpr Symbol grid(int di, int dj) {
        return {SymbolKind::GridVal, 0, static_cast<std::int16_t>(di), static_cast<std::int16_t>(dj)};
    }
    static constexpr Symbol cc(int m, int n) {
        return {SymbolKind::Unknown, static_cast<std::uint8_t>(UnknownTag::CC), static_cast<std::int16_t>(m),
                static_cast<std::int16_t>(n)};
    }
    static constexpr Symbol ud(int ii, int jj) {
        return {SymbolKind::Unknown, static_cast<std::uint8_t>(UnknownTag::UD), static_cast<std::int16_t>(ii),
                static_cast<std::int16_t>(jj)};
    }
    static constexpr Symbol gd() { return {SymbolKind::Unknown, static_cast<std::uint8_t>(UnknownTag::GD), 0, 0}; }
    /// Centred-difference operator (mu delta_x)^ax (delta_x^2)^bx (mu delta_y)^ay (delta_y^2)^by applied to U.
    static constexpr Symbol op(int ax, int bx, int ay, int by) {
        return {SymbolKind::Op, 0, static_cast<std::int16_t>(ax * 64 + bx), static_cast<std::int16_t>(ay * 64 + by)};
    }
    /// Mixed derivative d^{p+q}U / dx^p dy^q.
    static constexpr Symbol deriv(int p, int q) {
        return {SymbolKind::Deriv, 0, static_cast<std::int16_t>(p), static_cast<std::int16_t>(q)};
    }

    constexpr bool is(SymbolKind k) const { return kind == k; }
    constexpr int op_ax() const { return a / 64; }
    constexpr int op_bx() const { return a % 64; }
    constexpr int op_ay() const { return b / 64; }
    constexpr int op_by() const { return b % 64; }

    std::string name() const {
        auto offset = [](const char* base, int d) {
            std::string s = base;
            if (d > 0) s += "+" + std::to_string(d);
            if (d < 0) s += std::to_string(d);
            return s;
        };
        switch (kind) {
            case SymbolKind::Param: {
                static const char* names[] = {"gam", "alf", "h", "nu"};
                return names[tag];
            }
            case SymbolKind::Coord: return tag == 0 ? "xi" : "yi";
            case SymbolKind::GridVal: return "u(" + offset("i", a) + "," + offset("j", b) + ")";
            case SymbolKind::Unknown:
                switch (static_cast<UnknownTag>(tag)) {
                    case UnknownTag::CC: return "cc(" + std::to_string(a) + "," + std::to_string(b) + ")";
                    case UnknownTag::UD: return "ud(" + std::to_string(a) + "," + std::to_string(b) + ")";
                    case UnknownTag::GD: return "gd";
                }
                break;
            case SymbolKind::Op: {
                std::string s;
                auto put = [&](const char* o, int e) {
                    if (e == 0) return;
                    if (!s.empty()) s += ".";
                    s += o;
                    if (e > 1) s += "^" + std::to_string(e);
                };
                put("mdx", op_ax());
                put("ddx", op_bx());
                put("mdy", op_ay());
                put("ddy", op_by());
                return s.empty() ? "u" : "[" + s + "]u";
            }
            case SymbolKind::Deriv: return "uu(" + std::to_string(a) + "," + std::to_string(b) + ")";
        }
        return "?";
    }
};

struct Factor {
    Symbol sym;
    int exp{0};
    friend constexpr auto operator<=>(const Factor&, const Factor&) = default;
};

/// Product of symbols with nonzero integer exponents, sorted by symbol.
/// Exponents are positive except for the grid-spacing parameter h, which the
/// constructions carry with negative powers (e.g. 1/h^2).
class Monomial {
public:
    using Storage = boost::container::small_vector<Factor, 6>;

    Monomial() = default;
    explicit Monomial(Symbol s, int e = 1) {
        if (e != 0) f_.push_back({s, e});
    }

    const Storage& factors() const { return f_; }
    bool is_one() const { return f_.empty(); }

    int exponent(Symbol s) const {
        for (const auto& f : f_)
            if (f.sym == s) return f.exp;
        return 0;
    }

    bool has_kind(SymbolKind k) const {
        return std::any_of(f_.begin(), f_.end(), [k](const Factor& f) { return f.sym.kind == k; });
    }

    /// Total exponent over symbols of one kind.
    int degree_of_kind(SymbolKind k) const {
        int d = 0;
        for (const auto& f : f_)
            if (f.sym.kind == k) d += f.exp;
        return d;
    }

    Monomial& mul(Symbol s, int e) {
        if (e == 0) return *this;
        auto it = std::lower_bound(f_.begin(), f_.end(), s, [](const Factor& f, Symbol x) { return f.sym < x; });
        if (it != f_.end() && it->sym == s) {
            it->exp += e;
            if (it->exp == 0) f_.erase(it);
        } else {
            f_.insert(it, Factor{s, e});
        }
        return *this;
    }

    /// Returns this with symbol s removed entirely.
    Monomial without(Symbol s) const {
        Monomial m;
        for (const auto& f : f_)
            if (f.sym != s) m.f_.push_back(f);
        return m;
    }

    friend Monomial operator*(const Monomial& x, const Monomial& y) {
        Monomial m;
        m.f_.reserve(x.f_.size() + y.f_.size());
        auto i = x.f_.begin(), j = y.f_.begin();
        while (i != x.f_.end() && j != y.f_.end()) {
            if (i->sym < j->sym) {
                m.f_.push_back(*i++);
            } else if (j->sym < i->sym) {
                m.f_.push_back(*j++);
            } else {
                int e = i->exp + j->exp;
                if (e != 0) m.f_.push_back({i->sym, e});
                ++i;
                ++j;
            }
        }
        m.f_.insert(m.f_.end(), i, x.f_.end());
        m.f_.insert(m.f_.end(), j, y.f_.end());
        return m;
    }

    /// Shift every GridVal offset by (di, dj).  Preserves the factor order.
    Monomial shifted(int di, int dj) const {
        Monomial m = *this;
        for (auto& f : m.f_)
            if (f.sym.kind == SymbolKind::GridVal) {
                f.sym.a = static_cast<std::int16_t>(f.sym.a + di);
                f.sym.b = static_cast<std::int16_t>(f.sym.b + dj);
            }
        return m;
    }

    /// Exchange x and y roles: GridVal offsets, coordinates and operator symbols.
    Monomial transposed() const {
        Monomial m;
        for (auto f : f_) {
            switch (f.sym.kind) {
                case SymbolKind::GridVal:
                case SymbolKind::Deriv:
                case SymbolKind::Op: std::swap(f.sym.a, f.sym.b); break;
                case SymbolKind::Coord: f.sym.tag = static_cast<std::uint8_t>(1 - f.sym.tag); break;
                default: break;
            }
            m.mul(f.sym, f.exp);
        }
        return m;
    }

    friend bool operator==(const Monomial& x, const Monomial& y) { return x.f_ == y.f_; }
    friend bool operator<(const Monomial& x, const Monomial& y) {
        return std::lexicographical_compare(x.f_.begin(), x.f_.end(), y.f_.begin(), y.f_.end());
    }

    std::string to_string() const {
        if (f_.empty()) return "1";
        std::string s;
        for (const auto& f : f_) {
            if (!s.empty()) s += "*";
            s += f.sym.name();
            if (f.exp != 1) s += "^" + std::to_string(f.exp);
        }
        return s;
    }

private:
    Storage f_;
};

/// Smallness grading: grade = exp(gam) + alf_weight * exp(alf); terms with grade >= order vanish.
struct TruncationPolicy {
    int order{std::numeric_limits<int>::max() / 4};
    int alf_weight{1};
    bool linearise_unknowns{false};

    friend bool operator==(const TruncationPolicy&, const TruncationPolicy&) = default;

    static TruncationPolicy none() { return {}; }

    int grade(const Monomial& m) const {
        return m.exponent(Symbol::gam()) + alf_weight * m.exponent(Symbol::alf());
    }

    bool keeps(const Monomial& m) const { return keeps(m, grade(m)); }
    bool keeps(const Monomial& m, int g) const {
        if (g >= order) return false;
        if (linearise_unknowns) {
            int u = m.degree_of_kind(SymbolKind::Unknown);
            if (u > 1 || (u == 1 && g > 0)) return false;
        }
        return true;
    }
};

struct Term {
    Monomial mono;
    Rational coef;
};

class Poly {
public:
    Poly() = default;
    explicit Poly(TruncationPolicy policy) : policy_(policy) {}
    Poly(TruncationPolicy policy, const Rational& c) : policy_(policy) {
        if (c != 0) terms_.push_back({Monomial{}, c});
    }

    static Poly constant(TruncationPolicy policy, const Rational& c) { return Poly(policy, c); }
    static Poly symbol(TruncationPolicy policy, Symbol s, int exp = 1) {
        return monomial(policy, Monomial(s, exp), 1);
    }
    static Poly monomial(TruncationPolicy policy, Monomial m, const Rational& c) {
        Poly p(policy);
        if (c != 0 && policy.keeps(m)) p.terms_.push_back({std::move(m), c});
        return p;
    }
    /// Builds from unsorted terms; duplicates are combined.
    static Poly from_terms(TruncationPolicy policy, std::vector<Term> terms) {
        Poly p(policy);
        p.terms_ = std::move(terms);
        p.normalise();
        return p;
    }

    const TruncationPolicy& policy() const { return policy_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    /// Coefficient of an exact monomial.
    Rational coefficient(const Monomial& m) const {
        auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                                   [](const Term& t, const Monomial& x) { return t.mono < x; });
        if (it != terms_.end() && it->mono == m) return it->coef;
        return 0;
    }

    /// Same terms under another policy (re-truncated).
    Poly with_policy(TruncationPolicy policy) const {
        Poly p(policy);
        for (const auto& t : terms_)
            if (policy.keeps(t.mono)) p.terms_.push_back(t);
        return p;
    }

    Poly truncated() const { return with_policy(policy_); }

    /// Drops every term of grade >= max_grade while keeping the policy.
    Poly below_grade(int max_grade) const {
        Poly p(policy_);
        for (const auto& t : terms_)
            if (policy_.grade(t.mono) < max_grade) p.terms_.push_back(t);
        return p;
    }

    /// Terms of exactly this grade.
    Poly grade_part(int g) const {
        Poly p(policy_);
        for (const auto& t : terms_)
            if (policy_.grade(t.mono) == g) p.terms_.push_back(t);
        return p;
    }

    int min_grade() const {
        int g = std::numeric_limits<int>::max();
        for (const auto& t : terms_) g = std::min(g, policy_.grade(t.mono));
        return g;
    }

    Poly& operator+=(const Poly& o) { return axpy(Rational(1), o); }
    Poly& operator-=(const Poly& o) { return axpy(Rational(-1), o); }

    /// this += c * o, by sorted merge.
    Poly& axpy(const Rational& c, const Poly& o) {
        check(o);
        if (c == 0 || o.terms_.empty()) return *this;
        std::vector<Term> out;
        out.reserve(terms_.size() + o.terms_.size());
        auto i = terms_.begin();
        auto j = o.terms_.begin();
        while (i != terms_.end() || j != o.terms_.end()) {
            if (j == o.terms_.end() || (i != terms_.end() && i->mono < j->mono)) {
                out.push_back(std::move(*i++));
            } else if (i == terms_.end() || j->mono < i->mono) {
                out.push_back({j->mono, c * j->coef});
                ++j;
            } else {
                Rational s = i->coef + c * j->coef;
                if (s != 0) out.push_back({std::move(i->mono), std::move(s)});
                ++i;
                ++j;
            }
        }
        terms_ = std::move(out);
        return *this;
    }

    Poly& operator*=(const Rational& c) {
        if (c == 0) {
            terms_.clear();
        } else {
            for (auto& t : terms_) t.coef *= c;
        }
        return *this;
    }
    Poly& operator/=(const Rational& c) {
        if (c == 0) throw std::domain_error("Poly division by zero");
        for (auto& t : terms_) t.coef /= c;
        return *this;
    }

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator-(Poly a) {
        for (auto& t : a.terms_) t.coef = -t.coef;
        return a;
    }
    friend Poly operator*(Poly a, const Rational& c) { return a *= c; }
    friend Poly operator*(const Rational& c, Poly a) { return a *= c; }
    friend Poly operator/(Poly a, const Rational& c) { return a /= c; }

    friend Poly operator*(const Poly& a, const Poly& b) {
        a.check(b);
        const auto& pol = a.policy_;
        if (a.terms_.empty() || b.terms_.empty()) return Poly(pol);
        // index b by grade so hopeless pairs are skipped wholesale
        std::vector<std::pair<int, std::size_t>> bg(b.terms_.size());
        for (std::size_t k = 0; k < b.terms_.size(); ++k) bg[k] = {pol.grade(b.terms_[k].mono), k};
        std::sort(bg.begin(), bg.end());
        std::vector<Term> out;
        for (const auto& ta : a.terms_) {
            const int ga = pol.grade(ta.mono);
            for (const auto& [gb, k] : bg) {
                if (ga + gb >= pol.order) break;
                const auto& tb = b.terms_[k];
                Monomial m = ta.mono * tb.mono;
                if (!pol.keeps(m, ga + gb)) continue;
                out.push_back({std::move(m), ta.coef * tb.coef});
            }
        }
        return from_terms(pol, std::move(out));
    }
    Poly& operator*=(const Poly& o) { return *this = *this * o; }

    Poly pow(int e) const {
        if (e < 0) throw std::domain_error("negative power of a polynomial");
        Poly out(policy_, Rational(1));
        for (int k = 0; k < e; ++k) out = out * *this;
        return out;
    }

    /// Replace symbol s by the polynomial value; integer powers by repeated multiplication.
    Poly substitute(Symbol s, const Poly& value) const {
        check(value);
        std::vector<Poly> powers{Poly(policy_, Rational(1))};
        Poly rest(policy_);
        std::map<int, std::vector<Term>> by_power;
        for (const auto& t : terms_) {
            int e = t.mono.exponent(s);
            if (e == 0) {
                rest.terms_.push_back(t);
            } else {
                if (e < 0) throw std::domain_error("substitution into a negative power of " + s.name());
                by_power[e].push_back({t.mono.without(s), t.coef});
            }
        }
        Poly out = rest;
        for (auto& [e, ts] : by_power) {
            while (static_cast<int>(powers.size()) <= e) powers.push_back(powers.back() * value);
            out += from_terms(policy_, std::move(ts)) * powers[e];
        }
        return out;
    }

    Poly substitute(Symbol s, const Rational& value) const {
        std::vector<Term> out;
        out.reserve(terms_.size());
        for (const auto& t : terms_) {
            int e = t.mono.exponent(s);
            if (e == 0) {
                out.push_back(t);
            } else if (value != 0) {
                out.push_back({t.mono.without(s), t.coef * rational_pow(value, e)});
            } else if (e < 0) {
                throw std::domain_error("substituting zero into a negative power of " + s.name());
            }
        }
        return from_terms(policy_, std::move(out));
    }

    /// Index substitution i -> i+di, j -> j+dj on every grid value.
    Poly shifted(int di, int dj) const {
        Poly p(policy_);
        p.terms_.reserve(terms_.size());
        for (const auto& t : terms_) p.terms_.push_back({t.mono.shifted(di, dj), t.coef});
        return p;
    }

    /// Exchange the roles of x and y throughout.
    Poly transposed() const {
        std::vector<Term> out;
        out.reserve(terms_.size());
        for (const auto& t : terms_) out.push_back({t.mono.transposed(), t.coef});
        return from_terms(policy_, std::move(out));
    }

    /// Partial derivative with respect to symbol s (s must not carry negative powers).
    Poly derivative(Symbol s) const {
        std::vector<Term> out;
        for (const auto& t : terms_) {
            int e = t.mono.exponent(s);
            if (e == 0) continue;
            Monomial m = t.mono;
            m.mul(s, -1);
            out.push_back({std::move(m), t.coef * e});
        }
        return from_terms(policy_, std::move(out));
    }

    /// Coefficients of s^0, s^1, ..., s^deg (deg = highest power present; zero poly gives {0}).
    std::vector<Poly> coeff(Symbol s) const {
        int deg = 0;
        for (const auto& t : terms_) deg = std::max(deg, t.mono.exponent(s));
        std::vector<std::vector<Term>> parts(static_cast<std::size_t>(deg) + 1);
        for (const auto& t : terms_) {
            int e = t.mono.exponent(s);
            if (e < 0) throw std::domain_error("coeff: negative power of " + s.name());
            parts[static_cast<std::size_t>(e)].push_back({t.mono.without(s), t.coef});
        }
        std::vector<Poly> out;
        out.reserve(parts.size());
        for (auto& ts : parts) out.push_back(from_terms(policy_, std::move(ts)));
        return out;
    }

    /// Coefficient of the first power of s (terms linear in s, with s removed).
    Poly linear_coefficient(Symbol s) const {
        std::vector<Term> out;
        for (const auto& t : terms_)
            if (t.mono.exponent(s) == 1) out.push_back({t.mono.without(s), t.coef});
        return from_terms(policy_, std::move(out));
    }

    /// Drop every term containing a symbol of the given kind (e.g. set all unknowns to zero).
    Poly without_kind(SymbolKind k) const {
        Poly p(policy_);
        for (const auto& t : terms_)
            if (!t.mono.has_kind(k)) p.terms_.push_back(t);
        return p;
    }

    /// Terms containing at least one symbol of the given kind.
    Poly only_kind(SymbolKind k) const {
        Poly p(policy_);
        for (const auto& t : terms_)
            if (t.mono.has_kind(k)) p.terms_.push_back(t);
        return p;
    }

    bool contains(SymbolKind k) const {
        return std::any_of(terms_.begin(), terms_.end(), [k](const Term& t) { return t.mono.has_kind(k); });
    }

    /// Every distinct symbol of kind k present.
    std::vector<Symbol> symbols_of_kind(SymbolKind k) const {
        std::set<Symbol> s;
        for (const auto& t : terms_)
            for (const auto& f : t.mono.factors())
                if (f.sym.kind == k) s.insert(f.sym);
        return {s.begin(), s.end()};
    }

    /// Exact evaluation of all symbols that appear; missing symbols are an error.
    Rational evaluate(const std::map<Symbol, Rational>& values) const {
        Rational total = 0;
        for (const auto& t : terms_) {
            Rational v = t.coef;
            for (const auto& f : t.mono.factors()) {
                auto it = values.find(f.sym);
                if (it == values.end()) throw std::out_of_range("evaluate: no value for " + f.sym.name());
                v *= rational_pow(it->second, f.exp);
            }
            total += v;
        }
        return total;
    }

    friend bool operator==(const Poly& a, const Poly& b) {
        if (a.terms_.size() != b.terms_.size()) return false;
        for (std::size_t k = 0; k < a.terms_.size(); ++k)
            if (!(a.terms_[k].mono == b.terms_[k].mono) || a.terms_[k].coef != b.terms_[k].coef) return false;
        return true;
    }

    /// Canonical rendering: terms ordered by grade, then grid-value offsets, then
    /// coordinate exponents, then the remaining factors.
    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::vector<const Term*> order;
        for (const auto& t : terms_) order.push_back(&t);
        auto key = [this](const Term* t) {
            std::vector<std::pair<int, int>> grid;
            std::vector<int> coord(2, 0);
            for (const auto& f : t->mono.factors()) {
                if (f.sym.kind == SymbolKind::GridVal)
                    for (int e = 0; e < f.exp; ++e) grid.emplace_back(f.sym.a, f.sym.b);
                if (f.sym.kind == SymbolKind::Coord) coord[f.sym.tag] = f.exp;
            }
            return std::make_tuple(policy_.grade(t->mono), grid, coord);
        };
        std::stable_sort(order.begin(), order.end(), [&](const Term* x, const Term* y) {
            auto kx = key(x), ky = key(y);
            if (kx != ky) return kx < ky;
            return x->mono < y->mono;
        });
        std::string s;
        for (const Term* t : order) {
            const bool neg = t->coef < 0;
            Rational mag = neg ? Rational(-t->coef) : t->coef;
            s += s.empty() ? (neg ? "-" : "") : (neg ? " - " : " + ");
            if (t->mono.is_one()) {
                s += gaptooth::to_string(mag);
            } else {
                if (mag != 1) s += gaptooth::to_string(mag) + "*";
                s += t->mono.to_string();
            }
        }
        return s;
    }

    friend std::ostream& operator<<(std::ostream& os, const Poly& p) { return os << p.to_string(); }

private:
    void check(const Poly& o) const {
        if (!(policy_ == o.policy_)) throw ConfigurationError("polynomial truncation policies differ");
    }

    void normalise() {
        std::sort(terms_.begin(), terms_.end(), [](const Term& x, const Term& y) { return x.mono < y.mono; });
        std::vector<Term> out;
        out.reserve(terms_.size());
        for (auto& t : terms_) {
            if (!out.empty() && out.back().mono == t.mono) {
                out.back().coef += t.coef;
            } else {
                if (!out.empty() && out.back().coef == 0) out.pop_back();
                if (!policy_.keeps(t.mono)) continue;
                out.push_back(std::move(t));
            }
        }
        if (!out.empty() && out.back().coef == 0) out.pop_back();
        terms_ = std::move(out);
    }

    TruncationPolicy policy_{};
    std::vector<Term> terms_;
};

/// Recursive coefficient extraction: expands each expression in the powers of
/// the first variable, then the next, concatenating in order.
inline std::vector<Poly> coeffs(std::vector<Poly> exps, const std::vector<Symbol>& vars) {
    for (Symbol v : vars) {
        std::vector<Poly> next;
        for (const auto& e : exps) {
            auto cs = e.coeff(v);
            next.insert(next.end(), std::make_move_iterator(cs.begin()), std::make_move_iterator(cs.end()));
        }
        exps = std::move(next);
    }
    return exps;
}

/// Physical derivative d^times/dx^times (or y) of a field written in
/// xi = (x - X)/h, yi = (y - Y)/h: each differentiation contributes 1/h.
inline Poly diff_coord(const Poly& p, CoordName c, int times) {
    if (times < 1) throw ConfigurationError("diff_coord needs times >= 1");
    const Symbol s = Symbol::coord(c);
    Poly out = p;
    for (int k = 0; k < times; ++k) {
        out = out.derivative(s);
        std::vector<Term> scaled;
        scaled.reserve(out.terms().size());
        for (const auto& t : out.terms()) {
            Monomial m = t.mono;
            m.mul(Symbol::h(), -1);
            scaled.push_back({std::move(m), t.coef});
        }
        out = Poly::from_terms(out.policy(), std::move(scaled));
    }
    return out;
}

/// Time derivative of a field written in grid values, given dU_{i,j}/dt = g:
/// each U_{i+a,j+b} contributes dp/dU_{i+a,j+b} times g shifted by (a, b).
/// Parts of p whose grade cannot survive multiplication by g are skipped.
inline Poly time_derivative(const Poly& p, const Poly& g) {
    Poly out(p.policy());
    if (g.is_zero()) return out;
    const Poly src = p.below_grade(p.policy().order - g.min_grade());
    for (Symbol s : src.symbols_of_kind(SymbolKind::GridVal)) out += src.derivative(s) * g.shifted(s.a, s.b);
    return out;
}

}  // namespace gaptooth
