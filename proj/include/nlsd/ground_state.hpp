#pragma once

#include <algorithm>

#include "nlsd/energy.hpp"

namespace nlsd {

struct SolverOptions {
    double tau = 0.1;                  // descent step; halved on energy increase
    std::size_t max_iterations = 100000;
    double residual_tol = 1e-8;
    bool validate_assumptions = true;
    bool record_energy_history = false;
    double collapse_cells = 4.0;       // rms density width below this many cells aborts
    double min_tau = 1e-13;
    RField initial;                    // optional; unit-width Gaussian when empty
};

/// Radial minimizer of J(u) = int |grad u|^2/2 + W(u) on the sphere ||u|| = sigma,
/// solving -lap U + W'(U) = 2 omega U.
struct GroundState {
    Grid grid;
    RField u;
    double omega = 0.0;
    double m = 0.0;        // J(U)
    double sigma = 0.0;
    double residual = 0.0; // ||-lap U + W'(U) - 2 omega U|| / ||U||
    std::size_t iterations = 0;
    std::vector<double> energy_history;

    explicit GroundState(Grid g) : grid(std::move(g)) {}
};

namespace detail {

inline double dw_odd(const Nonlinearity& W, double s) {
    return s >= 0.0 ? W.dw(s) : -W.dw(-s);
}

inline double energy_h1(const SpectralPlan& plan, const RField& u, const Nonlinearity& W) {
    double nl = 0.0;
    for (double s : u) nl += W.w(std::abs(s));
    return 0.5 * plan.gradient_energy(u) + nl * plan.grid().cell_volume();
}

inline Point density_barycenter(const Grid& grid, const RField& u) {
    Point q(static_cast<std::size_t>(grid.dim()), 0.0);
    double mass = 0.0, x[8];
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double w = u[i] * u[i];
        mass += w;
        grid.point_at(i, x);
        for (int a = 0; a < grid.dim(); ++a) q[static_cast<std::size_t>(a)] += x[a] * w;
    }
    for (auto& c : q) c /= mass;
    return q;
}

inline double density_rms_width(const Grid& grid, const RField& u) {
    const Point q = density_barycenter(grid, u);
    double mass = 0.0, m2 = 0.0, x[8];
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double w = u[i] * u[i];
        mass += w;
        grid.point_at(i, x);
        for (int a = 0; a < grid.dim(); ++a) {
            const double d = x[a] - q[static_cast<std::size_t>(a)];
            m2 += d * d * w;
        }
    }
    return std::sqrt(m2 / mass);
}

}  // namespace detail

/// omega = <U, -lap U + W'(U)> / (2 ||U||^2); total in U, meaningful near
/// stationary points.
inline double lagrange_multiplier(const SpectralPlan& plan, const RField& u, const Nonlinearity& W) {
    const double grad2 = plan.gradient_energy(u);
    double uwp = 0.0, mass = 0.0;
    for (double s : u) {
        uwp += s * detail::dw_odd(W, s);
        mass += s * s;
    }
    const double w = plan.grid().cell_volume();
    return (grad2 + uwp * w) / (2.0 * mass * w);
}

/// Relative L2 defect of the static equation with the spectral Laplacian.
inline double stationarity_residual(const SpectralPlan& plan, const RField& u, const Nonlinearity& W,
                                    double omega) {
    RField lap = plan.laplacian_real(u);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double r = -lap[i] + detail::dw_odd(W, u[i]) - 2.0 * omega * u[i];
        num += r * r;
        den += u[i] * u[i];
    }
    return std::sqrt(num / den);
}

/// Same defect with a 4th-order finite-difference Laplacian; used as an
/// independent cross-check of the spectral residual.
inline double stationarity_residual_fd4(const Grid& grid, const RField& u, const Nonlinearity& W,
                                        double omega) {
    RField lap(u.size(), 0.0);
    std::size_t idx[8], id2[8];
    auto flatten = [&grid](const std::size_t* id) {
        std::size_t flat = 0;
        for (int a = 0; a < grid.dim(); ++a) flat = flat * grid.axis_points(a) + id[a];
        return flat;
    };
    for (std::size_t i = 0; i < u.size(); ++i) {
        grid.unflatten(i, idx);
        for (int a = 0; a < grid.dim(); ++a) {
            const std::size_t n = grid.axis_points(a);
            const double dx2 = grid.spacing(a) * grid.spacing(a);
            for (int c = 0; c < grid.dim(); ++c) id2[c] = idx[c];
            auto at = [&](long off) {
                id2[a] = static_cast<std::size_t>(
                    (static_cast<long>(idx[a]) + off + 2 * static_cast<long>(n)) % static_cast<long>(n));
                return u[flatten(id2)];
            };
            lap[i] += (-at(-2) + 16.0 * at(-1) - 30.0 * u[i] + 16.0 * at(1) - at(2)) / (12.0 * dx2);
        }
    }
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double r = -lap[i] + detail::dw_odd(W, u[i]) - 2.0 * omega * u[i];
        num += r * r;
        den += u[i] * u[i];
    }
    return std::sqrt(num / den);
}

/// Largest relative mismatch of u under the grid reflections (per-axis flips
/// about the origin, plus the transposition when the grid is square).
inline double radial_asymmetry(const Grid& grid, const RField& u) {
    const double norm = l2_norm(grid, u);
    double worst = 0.0;
    std::size_t idx[8], id2[8];
    auto flatten = [&grid](const std::size_t* id) {
        std::size_t flat = 0;
        for (int a = 0; a < grid.dim(); ++a) flat = flat * grid.axis_points(a) + id[a];
        return flat;
    };
    for (int flip_axis = 0; flip_axis < grid.dim(); ++flip_axis) {
        double s = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            grid.unflatten(i, idx);
            for (int a = 0; a < grid.dim(); ++a) id2[a] = idx[a];
            const std::size_t n = grid.axis_points(flip_axis);
            id2[flip_axis] = idx[flip_axis] == 0 ? 0 : n - idx[flip_axis];
            const double d = u[i] - u[flatten(id2)];
            s += d * d;
        }
        worst = std::max(worst, std::sqrt(s * grid.cell_volume()) / norm);
    }
    if (grid.dim() == 2 && grid.axis_points(0) == grid.axis_points(1) &&
        grid.extent(0) == grid.extent(1)) {
        double s = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            grid.unflatten(i, idx);
            id2[0] = idx[1];
            id2[1] = idx[0];
            const double d = u[i] - u[flatten(id2)];
            s += d * d;
        }
        worst = std::max(worst, std::sqrt(s * grid.cell_volume()) / norm);
    }
    return worst;
}

/// Normalized gradient flow: semi-implicit in the Laplacian, explicit in the
/// nonlinearity and the multiplier shift, projection back to the sphere after
/// every step. The multiplier shift makes stationary states exact fixed
/// points, so the residual can be driven to tolerance.
inline GroundState minimize_on_sphere(const Nonlinearity& W, double sigma, const Grid& grid,
                                      const SolverOptions& opts = {}) {
    if (opts.validate_assumptions) {
        auto rep = validate_nonlinearity(W, grid.dim());
        if (!rep.all_pass())
            throw Error(ErrorClass::AssumptionViolation, "nonlinearity probe failed: " + rep.first_failure());
    }
    if (!(sigma > 0.0)) throw Error(ErrorClass::ConfigError, "sigma must be positive");

    SpectralPlan plan(grid);
    const std::size_t total = grid.total_points();
    const double cellw = grid.cell_volume();

    // unit-width Gaussian projected to the sphere unless an iterate is given
    RField u;
    if (!opts.initial.empty()) {
        if (opts.initial.size() != total)
            throw Error(ErrorClass::ConfigError, "initial iterate does not match the grid");
        u = opts.initial;
    } else {
        u.resize(total);
        double x[8];
        for (std::size_t i = 0; i < total; ++i) {
            grid.point_at(i, x);
            double r2 = 0.0;
            for (int a = 0; a < grid.dim(); ++a) r2 += x[a] * x[a];
            u[i] = std::exp(-0.5 * r2);
        }
    }
    {
        const double scale = sigma / l2_norm(grid, u);
        for (double& s : u) s *= scale;
    }

    GroundState gs(grid);
    gs.sigma = sigma;

    double tau = opts.tau;
    double j_old = detail::energy_h1(plan, u, W);
    if (opts.record_energy_history) gs.energy_history.push_back(j_old);

    CField spec, lap_spec, rhs_spec;
    RField wp(total), rhs(total);
    const auto& ksq = plan.ksq();

    std::size_t iter = 0;
    for (; iter < opts.max_iterations; ++iter) {
        plan.forward(to_complex(u), spec);

        // <u, -lap u> and W'(u) shared by the multiplier and the step
        double grad2 = 0.0;
        for (std::size_t i = 0; i < total; ++i) grad2 += ksq[i] * std::norm(spec[i]);
        grad2 *= cellw / static_cast<double>(total);
        double uwp = 0.0;
        for (std::size_t i = 0; i < total; ++i) {
            wp[i] = detail::dw_odd(W, u[i]);
            uwp += u[i] * wp[i];
        }
        uwp *= cellw;
        const double omega_u = (grad2 + uwp) / (2.0 * sigma * sigma);

        // residual of the current iterate
        lap_spec = spec;
        for (std::size_t i = 0; i < total; ++i) lap_spec[i] *= -ksq[i];
        CField lap = plan.inverse(lap_spec);
        double rnum = 0.0;
        for (std::size_t i = 0; i < total; ++i) {
            const double r = -lap[i].real() + wp[i] - 2.0 * omega_u * u[i];
            rnum += r * r;
        }
        const double residual = std::sqrt(rnum * cellw) / sigma;
        if (residual <= opts.residual_tol) break;

        if (iter % 16 == 0) {
            const double width = detail::density_rms_width(grid, u);
            if (width < opts.collapse_cells * grid.min_spacing())
                throw Error(ErrorClass::CollapseDetected,
                            "iterate width " + std::to_string(width) + " fell below " +
                                std::to_string(opts.collapse_cells) + " cells");
        }

        // step with automatic halving until the energy does not increase
        while (true) {
            for (std::size_t i = 0; i < total; ++i) rhs[i] = u[i] - tau * (wp[i] - 2.0 * omega_u * u[i]);
            plan.forward(to_complex(rhs), rhs_spec);
            for (std::size_t i = 0; i < total; ++i) rhs_spec[i] /= 1.0 + tau * ksq[i];
            CField unew_c = plan.inverse(rhs_spec);
            RField unew(total);
            double nrm = 0.0;
            for (std::size_t i = 0; i < total; ++i) {
                unew[i] = unew_c[i].real();
                nrm += unew[i] * unew[i];
            }
            nrm = std::sqrt(nrm * cellw);
            const double scale = sigma / nrm;
            for (double& s : unew) s *= scale;

            const double j_new = detail::energy_h1(plan, unew, W);
            if (j_new <= j_old + 1e-12 * (1.0 + std::abs(j_old))) {
                u = std::move(unew);
                j_old = j_new;
                if (opts.record_energy_history) gs.energy_history.push_back(j_new);
                break;
            }
            tau *= 0.5;
            if (tau < opts.min_tau)
                throw Error(ErrorClass::NoConvergence, "step size underflow during energy backtracking");
        }
    }

    if (iter >= opts.max_iterations) {
        const double omega_u = lagrange_multiplier(plan, u, W);
        throw Error(ErrorClass::NoConvergence,
                    "max iterations reached with residual " +
                        std::to_string(stationarity_residual(plan, u, W, omega_u)));
    }

    // translation gauge: put the density barycenter at the origin. Skip
    // sub-cell offsets: a centered periodic profile already reads a spurious
    // barycenter of that size from the unpaired -L/2 edge row, and chasing it
    // would shift a genuinely centered solution.
    {
        Point q = detail::density_barycenter(grid, u);
        bool move = false;
        for (int a = 0; a < grid.dim(); ++a)
            if (std::abs(q[static_cast<std::size_t>(a)]) > 0.25 * grid.spacing(a)) move = true;
        if (move) {
            Point shift(q.size());
            for (std::size_t a = 0; a < q.size(); ++a) shift[a] = -q[a];
            u = plan.translate_real(u, shift);
            const double scale = sigma / l2_norm(grid, u);
            for (double& s : u) s *= scale;
        }
    }

    gs.u = std::move(u);
    gs.iterations = iter;
    gs.omega = lagrange_multiplier(plan, gs.u, W);
    gs.m = detail::energy_h1(plan, gs.u, W);
    gs.residual = stationarity_residual(plan, gs.u, W, gs.omega);
    return gs;
}

struct StraussReport {
    bool applicable = false;
    bool pass = false;
    double max_envelope = 0.0;
    std::string note;
};

/// Envelope check U(x) |x|^{(N-1)/2} on |x| in [1, 0.8 L/2]: bounded, and
/// non-increasing over the outer half of the range. Needs N >= 2.
inline StraussReport check_strauss_decay(const GroundState& gs) {
    StraussReport rep;
    const Grid& grid = gs.grid;
    if (grid.dim() < 2) {
        rep.applicable = false;
        rep.note = "skipped: decay envelope needs N >= 2";
        return rep;
    }
    rep.applicable = true;

    double half = 0.5 * grid.extent(0);
    for (int a = 1; a < grid.dim(); ++a) half = std::min(half, 0.5 * grid.extent(a));
    const double r_lo = 1.0, r_hi = 0.8 * half;
    const double bin_w = 2.0 * grid.min_spacing();
    const std::size_t nbins = static_cast<std::size_t>((r_hi - r_lo) / bin_w) + 1;
    std::vector<double> env(nbins, -1.0);

    const double expo = 0.5 * (grid.dim() - 1);
    double x[8];
    for (std::size_t i = 0; i < gs.u.size(); ++i) {
        grid.point_at(i, x);
        double r2 = 0.0;
        for (int a = 0; a < grid.dim(); ++a) r2 += x[a] * x[a];
        const double r = std::sqrt(r2);
        if (r < r_lo || r > r_hi) continue;
        const std::size_t b = std::min(nbins - 1, static_cast<std::size_t>((r - r_lo) / bin_w));
        env[b] = std::max(env[b], std::abs(gs.u[i]) * std::pow(r, expo));
    }

    double max_env = 0.0;
    for (double e : env) max_env = std::max(max_env, e);
    rep.max_envelope = max_env;

    bool monotone = true;
    const std::size_t b_mid = nbins / 2;
    double prev = -1.0;
    for (std::size_t b = b_mid; b < nbins; ++b) {
        if (env[b] < 0.0) continue;  // empty bin
        if (prev >= 0.0 && env[b] > prev + 1e-9 * max_env) {
            monotone = false;
            break;
        }
        prev = env[b];
    }
    rep.pass = std::isfinite(max_env) && monotone;
    if (!rep.pass) rep.note = "envelope grows on the outer half of the range";
    return rep;
}

}  // namespace nlsd
