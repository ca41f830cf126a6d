#pragma once

// Time integration: macroscale stencil models, a fine-grid reference solver for
// u_t = nu Lap u + alpha (u - u^3), and a dynamic gap-tooth microsimulator whose
// patch edges are refreshed from the Lagrange interpolant of patch centres.
// All steppers are fixed-step classical RK4.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "numeric.hpp"
#include "rational.hpp"
#include "ratpoly.hpp"
#include "stencil.hpp"

namespace gaptooth {

enum class Boundary { Periodic, OddEven };

inline Boundary parse_boundary(const std::string& s) {
    if (s == "periodic") return Boundary::Periodic;
    if (s == "odd-even" || s == "oddeven") return Boundary::OddEven;
    throw ConfigurationError("unknown boundary '" + s + "' (expected periodic or odd-even)");
}

inline std::string to_string(Boundary b) { return b == Boundary::Periodic ? "periodic" : "odd-even"; }

/// Node coordinate of index i on a grid of spacing H.  Odd-even grids are
/// cell-centred so that the reflections sit on x = 0 and x = L.
inline double node_coordinate(int i, double H, Boundary b) { return (b == Boundary::Periodic ? i : i + 0.5) * H; }

/// Fills the ghost cells of f.  Periodic wraps; odd-even reflects with a sign
/// change in x (sine) and without in y (cosine).
inline void apply_padding(Field2D& f, Boundary b) {
    const int nx = f.nx(), ny = f.ny(), w = f.pad();
    if (w > nx || w > ny) throw ConfigurationError("padding wider than the grid");
    auto src_x = [&](int i, double& sign) {
        if (i >= 0 && i < nx) return i;
        if (b == Boundary::Periodic) return ((i % nx) + nx) % nx;
        sign = -sign;
        return i < 0 ? -1 - i : 2 * nx - 1 - i;
    };
    auto src_y = [&](int j) {
        if (j >= 0 && j < ny) return j;
        if (b == Boundary::Periodic) return ((j % ny) + ny) % ny;
        return j < 0 ? -1 - j : 2 * ny - 1 - j;
    };
    for (int i = -w; i < nx + w; ++i)
        for (int j = -w; j < ny + w; ++j) {
            if (i >= 0 && i < nx && j >= 0 && j < ny) continue;
            double sign = 1.0;
            const int si = src_x(i, sign);
            f(i, j) = sign * f(si, src_y(j));
        }
}

namespace detail {

inline void check_finite(const std::vector<double>& y, long step, const char* what) {
    for (double v : y)
        if (!std::isfinite(v) || std::abs(v) > 1e100)
            throw DivergenceError(std::string(what) + " diverged at step " + std::to_string(step));
}

/// One classical RK4 step of y' = f(y).
inline void rk4(std::vector<double>& y, double dt,
                const std::function<void(const std::vector<double>&, std::vector<double>&)>& f) {
    const std::size_t n = y.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    f(y, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
    f(tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
    f(tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * k3[i];
    f(tmp, k4);
    for (std::size_t i = 0; i < n; ++i) y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

inline void load_interior(Field2D& f, const std::vector<double>& y) {
    std::size_t k = 0;
    for (int i = 0; i < f.nx(); ++i)
        for (int j = 0; j < f.ny(); ++j) f(i, j) = y[k++];
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Macroscale grid

struct MacroGrid {
    int N{0};
    double H{0.0};
    Boundary boundary{Boundary::Periodic};
    Field2D u;
    long steps{0};

    MacroGrid() = default;
    MacroGrid(int n, double h, Boundary b, int width) : N(n), H(h), boundary(b), u(n, n, std::max(width, 1)) {
        if (n < 1) throw ConfigurationError("macro grid needs N >= 1");
        if (!(h > 0)) throw ConfigurationError("macro spacing H must be positive");
    }

    void pad() { apply_padding(u, boundary); }
};

/// Stability advice for the leading five-point term.
inline std::optional<std::string> stability_warning(double dt, double spacing, double nu = 1.0) {
    if (dt > spacing * spacing / (8.0 * nu))
        return "time step " + std::to_string(dt) + " exceeds the advisory bound H^2/8 = " +
               std::to_string(spacing * spacing / (8.0 * nu));
    return std::nullopt;
}

inline void step_macro(MacroGrid& g, const CompiledModel& m, double dt) {
    if (!(dt > 0)) throw ConfigurationError("time step must be positive");
    if (m.width() > g.u.pad()) throw ConfigurationError("model stencil is wider than the grid padding");
    std::vector<double> y = g.u.interior();
    Field2D work = g.u;
    detail::rk4(y, dt, [&](const std::vector<double>& s, std::vector<double>& out) {
        detail::load_interior(work, s);
        apply_padding(work, g.boundary);
        std::size_t k = 0;
        for (int i = 0; i < g.N; ++i)
            for (int j = 0; j < g.N; ++j) out[k++] = m(work, i, j);
    });
    ++g.steps;
    detail::check_finite(y, g.steps, "macroscale model");
    detail::load_interior(g.u, y);
    g.pad();
}

inline void step_macro(MacroGrid& g, const StencilModel& m, double alpha, double gamma, double dt) {
    step_macro(g, CompiledModel(m, gamma, alpha, g.H), dt);
}

// ---------------------------------------------------------------------------
// Fine-grid reference

struct FineGrid {
    int M{0};
    double h{0.0};
    Boundary boundary{Boundary::Periodic};
    double nu{1.0};
    Field2D u;
    long steps{0};

    FineGrid() = default;
    FineGrid(int m, double spacing, Boundary b, double diffusivity = 1.0)
        : M(m), h(spacing), boundary(b), nu(diffusivity), u(m, m, 1) {
        if (m < 3) throw ConfigurationError("fine grid needs M >= 3");
        if (!(spacing > 0)) throw ConfigurationError("fine spacing must be positive");
    }

    void pad() { apply_padding(u, boundary); }
};

inline void step_fine(FineGrid& f, double alpha, double dt) {
    if (!(dt > 0)) throw ConfigurationError("time step must be positive");
    std::vector<double> y = f.u.interior();
    Field2D work = f.u;
    const double c = f.nu / (f.h * f.h);
    detail::rk4(y, dt, [&](const std::vector<double>& s, std::vector<double>& out) {
        detail::load_interior(work, s);
        apply_padding(work, f.boundary);
        std::size_t k = 0;
        for (int i = 0; i < f.M; ++i)
            for (int j = 0; j < f.M; ++j) {
                const double v = work(i, j);
                const double lap = work(i + 1, j) + work(i - 1, j) + work(i, j + 1) + work(i, j - 1) - 4.0 * v;
                out[k++] = c * lap + alpha * (v - v * v * v);
            }
    });
    ++f.steps;
    detail::check_finite(y, f.steps, "fine grid");
    detail::load_interior(f.u, y);
    f.pad();
}

// ---------------------------------------------------------------------------
// Gap-tooth microsimulator

struct GapToothState {
    int N{0};
    int ns{0};
    double H{0.0};
    Boundary boundary{Boundary::Periodic};
    std::vector<double> u;  ///< patch (i,j) lattice (ii,jj), 1-based lattice indices
    long steps{0};

    GapToothState() = default;
    GapToothState(int n_patches, int lattice, double h, Boundary b)
        : N(n_patches), ns(lattice), H(h), boundary(b),
          u(static_cast<std::size_t>(n_patches * n_patches * lattice * lattice), 0.0) {}

    std::size_t index(int i, int j, int ii, int jj) const {
        return static_cast<std::size_t>(((i * N + j) * ns + (ii - 1)) * ns + (jj - 1));
    }
    double& at(int i, int j, int ii, int jj) { return u[index(i, j, ii, jj)]; }
    double at(int i, int j, int ii, int jj) const { return u[index(i, j, ii, jj)]; }

    double centre(int i, int j) const { return at(i, j, (ns + 1) / 2, (ns + 1) / 2); }

    Field2D centres(int pad = 0) const {
        Field2D f(N, N, pad);
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) f(i, j) = centre(i, j);
        if (pad > 0) apply_padding(f, boundary);
        return f;
    }

    /// Mean over the patch lattice, edges included.
    Field2D patch_means() const {
        Field2D f(N, N);
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                double s = 0.0;
                for (int ii = 1; ii <= ns; ++ii)
                    for (int jj = 1; jj <= ns; ++jj) s += at(i, j, ii, jj);
                f(i, j) = s / (ns * ns);
            }
        return f;
    }
};

class GapToothScheme {
public:
    struct EdgeRule {
        int ii, jj;
        CompiledModel weights;
    };

    /// Edge weights come from the symbolic interpolant of spec (truncated at spec.K)
    /// evaluated at the numeric gamma and the edge coordinates.
    GapToothScheme(PatchSpec spec, int N, double H, Boundary b, double gamma, double alpha)
        : spec_(std::move(spec)), N_(N), H_(H), boundary_(b), gamma_(gamma), alpha_(alpha) {
        spec_.validate();
        if (N < 1) throw ConfigurationError("gap-tooth scheme needs N >= 1");
        if (!(H > 0)) throw ConfigurationError("macro spacing H must be positive");
        if (gamma < 0 || gamma > 1) throw ConfigurationError("coupling gamma must lie in [0, 1]");
        const Poly uu = build_interpolant(spec_);
        const int n = spec_.n, ns = spec_.ns();
        const Rational& r = spec_.r;
        auto rule = [&](int ii, int jj, const Rational& xv, const Rational& yv) {
            Poly p = uu.substitute(Symbol::xi(), xv).substitute(Symbol::yi(), yv);
            const auto m = StencilModel::from_poly(p, spec_.n, spec_.r);
            rules_.push_back({ii, jj, CompiledModel(m, gamma_, 0.0, 1.0)});
            width_ = std::max(width_, rules_.back().weights.width());
        };
        for (int ll = 2; ll <= ns - 1; ++ll) {
            const Rational xy = r * (ll - n - 1) / n;
            rule(ns, ll, r, xy);
            rule(1, ll, -r, xy);
            rule(ll, ns, xy, r);
            rule(ll, 1, xy, -r);
        }
        rule(1, 1, -r, -r);
        rule(1, ns, -r, r);
        rule(ns, 1, r, -r);
        rule(ns, ns, r, r);
        width_ = std::max(width_, 1);
        if (width_ > N && boundary_ == Boundary::OddEven)
            throw ConfigurationError("interpolation stencil wider than the patch array");
    }

    const PatchSpec& spec() const { return spec_; }
    double dx() const { return spec_.r.get_d() * H_ / spec_.n; }
    int width() const { return width_; }
    const std::vector<EdgeRule>& rules() const { return rules_; }

    GapToothState empty_state() const { return GapToothState(N_, spec_.ns(), H_, boundary_); }

    /// Sets edges and corners of every patch from the current centre values.
    void couple(GapToothState& s) const {
        const Field2D c = s.centres(width_);
        for (int i = 0; i < N_; ++i)
            for (int j = 0; j < N_; ++j)
                for (const auto& r : rules_) s.at(i, j, r.ii, r.jj) = r.weights(c, i, j);
    }

    /// Patches filled with their centre value, then coupled.
    GapToothState from_centres(const Field2D& U) const {
        GapToothState s = empty_state();
        const int ns = spec_.ns();
        for (int i = 0; i < N_; ++i)
            for (int j = 0; j < N_; ++j)
                for (int ii = 1; ii <= ns; ++ii)
                    for (int jj = 1; jj <= ns; ++jj) s.at(i, j, ii, jj) = U(i, j);
        couple(s);
        return s;
    }

    /// Lattice values sampled from a continuous field u(x, y), then coupled.
    GapToothState from_function(const std::function<double(double, double)>& f) const {
        GapToothState s = empty_state();
        const int n = spec_.n, ns = spec_.ns();
        const double d = dx();
        for (int i = 0; i < N_; ++i)
            for (int j = 0; j < N_; ++j) {
                const double X = node_coordinate(i, H_, boundary_), Y = node_coordinate(j, H_, boundary_);
                for (int ii = 1; ii <= ns; ++ii)
                    for (int jj = 1; jj <= ns; ++jj) s.at(i, j, ii, jj) = f(X + (ii - n - 1) * d, Y + (jj - n - 1) * d);
            }
        couple(s);
        return s;
    }

    /// Lattice values from a constructed subgrid field (the approximate slow manifold) at grid values U.
    GapToothState from_manifold(const SubgridField& field, const Field2D& U) const {
        if (field.ns != spec_.ns()) throw ConfigurationError("subgrid field lattice does not match the scheme");
        GapToothState s = empty_state();
        const int ns = spec_.ns();
        std::vector<CompiledModel> forms;
        int w = 1;
        for (const auto& p : field.u) {
            forms.emplace_back(StencilModel::from_poly(p, spec_.n, spec_.r), gamma_, alpha_, H_);
            w = std::max(w, forms.back().width());
        }
        Field2D padded(N_, N_, w);
        for (int i = 0; i < N_; ++i)
            for (int j = 0; j < N_; ++j) padded(i, j) = U(i, j);
        apply_padding(padded, boundary_);
        for (int i = 0; i < N_; ++i)
            for (int j = 0; j < N_; ++j)
                for (int ii = 1; ii <= ns; ++ii)
                    for (int jj = 1; jj <= ns; ++jj)
                        s.at(i, j, ii, jj) = forms[static_cast<std::size_t>((ii - 1) * ns + (jj - 1))](padded, i, j);
        couple(s);
        return s;
    }

    void step(GapToothState& s, double dt) const {
        if (!(dt > 0)) throw ConfigurationError("time step must be positive");
        const int ns = spec_.ns();
        const double c = spec_.nu.get_d() / (dx() * dx());
        GapToothState work = s;
        detail::rk4(s.u, dt, [&](const std::vector<double>& y, std::vector<double>& out) {
            work.u = y;
            couple(work);
            std::fill(out.begin(), out.end(), 0.0);
            for (int i = 0; i < N_; ++i)
                for (int j = 0; j < N_; ++j)
                    for (int ii = 2; ii <= ns - 1; ++ii)
                        for (int jj = 2; jj <= ns - 1; ++jj) {
                            const double v = work.at(i, j, ii, jj);
                            const double lap = work.at(i, j, ii + 1, jj) + work.at(i, j, ii - 1, jj) +
                                               work.at(i, j, ii, jj + 1) + work.at(i, j, ii, jj - 1) - 4.0 * v;
                            out[work.index(i, j, ii, jj)] = c * lap + alpha_ * (v - v * v * v);
                        }
        });
        ++s.steps;
        detail::check_finite(s.u, s.steps, "gap-tooth simulation");
        couple(s);
    }

private:
    PatchSpec spec_;
    int N_;
    double H_;
    Boundary boundary_;
    double gamma_, alpha_;
    std::vector<EdgeRule> rules_;
    int width_{0};
};

// ---------------------------------------------------------------------------
// Initial data, trajectories and error metrics

/// Smooth field of at most the given amplitude: a few low Fourier modes with
/// pseudo-random weights (sine in x, cosine in y for odd-even grids).
struct SmoothProfile {
    double amplitude{0.1};
    double L{2.0 * std::numbers::pi};
    Boundary boundary{Boundary::Periodic};
    unsigned seed{1};
    int modes{2};

    double operator()(double x, double y) const {
        if (weights_.empty()) init();
        double s = 0.0;
        std::size_t k = 0;
        for (int kx = 1; kx <= modes; ++kx)
            for (int ky = 0; ky <= modes; ++ky) {
                const double wx = weights_[k++], wy = weights_[k++];
                if (boundary == Boundary::Periodic) {
                    const double ax = 2.0 * std::numbers::pi * kx / L, ay = 2.0 * std::numbers::pi * ky / L;
                    s += wx * std::sin(ax * x + ay * y) + wy * std::cos(ax * x - ay * y);
                } else {
                    const double ax = std::numbers::pi * kx / L, ay = std::numbers::pi * ky / L;
                    s += (wx + wy) * std::sin(ax * x) * std::cos(ay * y);
                }
            }
        return amplitude * s / norm_;
    }

private:
    void init() const {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> d(-1.0, 1.0);
        norm_ = 0.0;
        for (int k = 0; k < modes * (modes + 1); ++k) {
            const double a = d(rng), b = d(rng);
            weights_.push_back(a);
            weights_.push_back(b);
            norm_ += boundary == Boundary::Periodic ? std::abs(a) + std::abs(b) : std::abs(a + b);
        }
        if (norm_ == 0.0) norm_ = 1.0;
    }
    mutable std::vector<double> weights_;
    mutable double norm_{1.0};
};

struct Snapshot {
    double t{0.0};
    std::vector<double> values;  ///< N x N, row-major in (i, j)
};

struct Trajectory {
    int N{0};
    std::vector<Snapshot> snapshots;

    void record(double t, const Field2D& f) {
        if (N == 0) N = f.nx();
        if (f.nx() != N || f.ny() != N) throw ConfigurationError("snapshot shape differs from trajectory");
        snapshots.push_back({t, f.interior()});
    }
};

enum class Restriction { Centre, PatchMean };

inline Restriction parse_restriction(const std::string& s) {
    if (s == "centre" || s == "center") return Restriction::Centre;
    if (s == "patch-mean" || s == "mean") return Restriction::PatchMean;
    throw ConfigurationError("unknown restriction '" + s + "' (expected centre or patch-mean)");
}

/// Restricts a fine grid to N macroscale nodes: the value at the node, or the
/// mean over the fine points within r H of it (nodes must coincide with fine points).
inline Field2D restrict_fine(const FineGrid& f, int N, Restriction how, double r = 0.5) {
    if (N < 1 || f.M % N != 0) throw ConfigurationError("fine grid size must be a multiple of N");
    const int ratio = f.M / N;
    if (f.boundary == Boundary::OddEven && ratio % 2 == 0)
        throw ConfigurationError("odd-even restriction needs an odd ratio M/N so nodes coincide");
    const int off = f.boundary == Boundary::OddEven ? ratio / 2 : 0;
    const int half = static_cast<int>(std::floor(r * ratio + 1e-9));
    Field2D padded(f.M, f.M, std::max(half, 1));
    for (int i = 0; i < f.M; ++i)
        for (int j = 0; j < f.M; ++j) padded(i, j) = f.u(i, j);
    apply_padding(padded, f.boundary);
    Field2D out(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            const int fi = i * ratio + off, fj = j * ratio + off;
            if (how == Restriction::Centre) {
                out(i, j) = padded(fi, fj);
                continue;
            }
            double s = 0.0;
            for (int a = -half; a <= half; ++a)
                for (int b = -half; b <= half; ++b) s += padded(fi + a, fj + b);
            out(i, j) = s / ((2 * half + 1) * (2 * half + 1));
        }
    return out;
}

struct ErrorReport {
    std::vector<double> times;
    std::vector<double> linf;
    std::vector<double> l2;  ///< root-mean-square over nodes
    double max_linf() const { return linf.empty() ? 0.0 : *std::max_element(linf.begin(), linf.end()); }
};

inline ErrorReport compare(const Trajectory& a, const Trajectory& b) {
    if (a.N != b.N) throw ConfigurationError("compare: grid sizes differ");
    if (a.snapshots.size() != b.snapshots.size()) throw ConfigurationError("compare: snapshot counts differ");
    ErrorReport rep;
    for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
        const auto& sa = a.snapshots[k];
        const auto& sb = b.snapshots[k];
        if (std::abs(sa.t - sb.t) > 1e-9 * std::max(1.0, std::abs(sa.t)))
            throw ConfigurationError("compare: output times differ");
        if (sa.values.size() != sb.values.size()) throw ConfigurationError("compare: snapshot shapes differ");
        double mx = 0.0, sq = 0.0;
        for (std::size_t q = 0; q < sa.values.size(); ++q) {
            const double d = std::abs(sa.values[q] - sb.values[q]);
            mx = std::max(mx, d);
            sq += d * d;
        }
        rep.times.push_back(sa.t);
        rep.linf.push_back(mx);
        rep.l2.push_back(sa.values.empty() ? 0.0 : std::sqrt(sq / static_cast<double>(sa.values.size())));
    }
    return rep;
}

/// Observed orders log(e_k / e_{k+1}) / log(H_k / H_{k+1}) for consecutive sweep entries.
inline std::vector<double> convergence_orders(const std::vector<double>& H, const std::vector<double>& err) {
    if (H.size() != err.size()) throw ConfigurationError("convergence_orders: length mismatch");
    std::vector<double> p;
    for (std::size_t k = 0; k + 1 < H.size(); ++k) p.push_back(std::log(err[k] / err[k + 1]) / std::log(H[k] / H[k + 1]));
    return p;
}

/// Writes "t,i,j,U" rows.  Header lines start with '#'.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& tr, const std::string& header = {}) {
    if (!header.empty()) {
        std::size_t start = 0;
        while (start <= header.size()) {
            const auto end = header.find('\n', start);
            out << "# " << header.substr(start, end == std::string::npos ? std::string::npos : end - start) << "\n";
            if (end == std::string::npos) break;
            start = end + 1;
        }
    }
    out << "t,i,j,U\n";
    char buf[64];
    for (const auto& s : tr.snapshots)
        for (int i = 0; i < tr.N; ++i)
            for (int j = 0; j < tr.N; ++j) {
                std::snprintf(buf, sizeof buf, "%.17g", s.values[static_cast<std::size_t>(i * tr.N + j)]);
                out << s.t << "," << i << "," << j << "," << buf << "\n";
            }
}

// ---------------------------------------------------------------------------
// Drivers

struct RunOptions {
    double t_end{1.0};
    double dt{0.0};       ///< 0 chooses a default from the stability advice
    int outputs{1};       ///< number of equally spaced snapshots after t = 0
    std::vector<std::string>* warnings{nullptr};
};

namespace detail {

inline int steps_for(double t_end, double dt_max, int outputs) {
    int steps = static_cast<int>(std::ceil(t_end / dt_max - 1e-12));
    steps = std::max(steps, outputs);
    steps = ((steps + outputs - 1) / outputs) * outputs;
    return steps;
}

inline void warn(const RunOptions& o, std::optional<std::string> w) {
    if (w && o.warnings) o.warnings->push_back(*w);
}

}  // namespace detail

inline Trajectory simulate_macro(MacroGrid g, const CompiledModel& m, const RunOptions& o) {
    if (o.outputs < 1 || !(o.t_end > 0)) throw ConfigurationError("need t_end > 0 and outputs >= 1");
    const double dt_max = o.dt > 0 ? o.dt : g.H * g.H / 16.0;
    detail::warn(o, stability_warning(dt_max, g.H));
    const int steps = detail::steps_for(o.t_end, dt_max, o.outputs);
    const double dt = o.t_end / steps;
    Trajectory tr;
    g.pad();
    tr.record(0.0, g.u);
    for (int k = 1; k <= steps; ++k) {
        step_macro(g, m, dt);
        if (k % (steps / o.outputs) == 0) tr.record(k * dt, g.u);
    }
    return tr;
}

/// Fine-grid run restricted to N nodes at every output.
inline Trajectory simulate_fine(FineGrid f, double alpha, int N, Restriction how, double r, const RunOptions& o) {
    if (o.outputs < 1 || !(o.t_end > 0)) throw ConfigurationError("need t_end > 0 and outputs >= 1");
    const double dt_max = o.dt > 0 ? o.dt : f.h * f.h / (5.0 * f.nu);
    detail::warn(o, stability_warning(dt_max, f.h, f.nu));
    const int steps = detail::steps_for(o.t_end, dt_max, o.outputs);
    const double dt = o.t_end / steps;
    Trajectory tr;
    f.pad();
    tr.record(0.0, restrict_fine(f, N, how, r));
    for (int k = 1; k <= steps; ++k) {
        step_fine(f, alpha, dt);
        if (k % (steps / o.outputs) == 0) tr.record(k * dt, restrict_fine(f, N, how, r));
    }
    return tr;
}

inline Trajectory simulate_gaptooth(const GapToothScheme& scheme, GapToothState s, Restriction how, const RunOptions& o) {
    if (o.outputs < 1 || !(o.t_end > 0)) throw ConfigurationError("need t_end > 0 and outputs >= 1");
    const double d = scheme.dx();
    const double nu = scheme.spec().nu.get_d();
    const double dt_max = o.dt > 0 ? o.dt : d * d / (5.0 * nu);
    detail::warn(o, stability_warning(dt_max, d, nu));
    const int steps = detail::steps_for(o.t_end, dt_max, o.outputs);
    const double dt = o.t_end / steps;
    auto view = [&](const GapToothState& st) { return how == Restriction::Centre ? st.centres() : st.patch_means(); };
    Trajectory tr;
    tr.record(0.0, view(s));
    for (int k = 1; k <= steps; ++k) {
        scheme.step(s, dt);
        if (k % (steps / o.outputs) == 0) tr.record(k * dt, view(s));
    }
    return tr;
}

/// Richardson combination (4 fine - coarse) / 3 of two second-order trajectories on a common node set.
inline Trajectory richardson(const Trajectory& coarse, const Trajectory& fine) {
    if (coarse.N != fine.N || coarse.snapshots.size() != fine.snapshots.size())
        throw ConfigurationError("richardson: trajectories do not match");
    Trajectory out = fine;
    for (std::size_t k = 0; k < out.snapshots.size(); ++k)
        for (std::size_t q = 0; q < out.snapshots[k].values.size(); ++q)
            out.snapshots[k].values[q] = (4.0 * fine.snapshots[k].values[q] - coarse.snapshots[k].values[q]) / 3.0;
    return out;
}

/// Samples a continuous field at the nodes of an N x N grid.
inline Field2D sample(const std::function<double(double, double)>& f, int N, double H, Boundary b, int pad = 0) {
    Field2D out(N, N, pad);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) out(i, j) = f(node_coordinate(i, H, b), node_coordinate(j, H, b));
    if (pad > 0) apply_padding(out, b);
    return out;
}

}  // namespace gaptooth
