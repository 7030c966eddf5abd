#pragma once

#include "nlsd/energy.hpp"
#include "nlsd/initial_data.hpp"

namespace nlsd {

/// One sampled row of a run: barycenter data, energies, concentration and
/// the boundary/spectral guards. Serializes to one CSV line.
struct TrajectoryRecord {
    double t = 0.0;
    Point q, qdot, qddot, H, q_hat;
    double charge = 0.0;
    double E = 0.0;  // E_h = J + G
    double J = 0.0;
    double G = 0.0;
    double conc_fraction = 0.0;
    double boundary_mass = 0.0;
    double spectral_tail = 0.0;
    double potential_moment = 0.0;  // int V |psi|^2
};

/// Charge-weighted mean position in box coordinates. Callers keep the
/// boundary-mass monitor below threshold so the periodic ambiguity is moot.
inline Point barycenter(const Grid& grid, const CField& values) {
    Point q(static_cast<std::size_t>(grid.dim()), 0.0);
    double mass = 0.0, x[8];
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double w = std::norm(values[i]);
        mass += w;
        grid.point_at(i, x);
        for (int a = 0; a < grid.dim(); ++a) q[static_cast<std::size_t>(a)] += x[a] * w;
    }
    if (!(mass > 0.0)) throw Error(ErrorClass::ConfigError, "barycenter of a zero field");
    for (auto& c : q) c /= mass;
    return q;
}

/// dq/dt = Im( h int conj(psi) grad psi ) / ||psi||^2, evaluated in spectrum.
inline Point barycenter_velocity(const SpectralPlan& plan, const WaveField& psi, double h) {
    const Grid& grid = plan.grid();
    CField spec = plan.forward(psi.values);
    Point vel(static_cast<std::size_t>(grid.dim()), 0.0);
    double mass = 0.0;
    std::size_t idx[8];
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const double w = std::norm(spec[i]);
        mass += w;
        grid.unflatten(i, idx);
        for (int a = 0; a < grid.dim(); ++a)
            vel[static_cast<std::size_t>(a)] += grid.wavenumber(a, idx[static_cast<std::size_t>(a)]) * w;
    }
    for (auto& c : vel) c *= h / mass;
    return vel;
}

/// Ehrenfest force: -int grad V |psi|^2 / ||psi||^2 with the analytic gradient.
inline Point ehrenfest_acceleration(const Grid& grid, const CField& values, const Potential& V) {
    Point acc(static_cast<std::size_t>(grid.dim()), 0.0);
    double mass = 0.0, x[8], g[8];
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double w = std::norm(values[i]);
        mass += w;
        grid.point_at(i, x);
        V.grad(x, grid.dim(), g);
        for (int a = 0; a < grid.dim(); ++a) acc[static_cast<std::size_t>(a)] -= g[a] * w;
    }
    for (auto& c : acc) c /= mass;
    return acc;
}

/// Discrete integration by parts: int V d_a(|psi|^2) versus
/// -int d_a(V) |psi|^2 with both derivatives spectral. Returns the largest
/// relative gap across axes; exact to roundoff on the periodic grid.
inline double ehrenfest_ibp_relative_gap(const SpectralPlan& plan, const CField& values,
                                         const RField& v_samples) {
    const Grid& grid = plan.grid();
    RField rho(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) rho[i] = std::norm(values[i]);
    auto grad_rho = plan.gradient_real(rho);
    auto grad_v = plan.gradient_real(v_samples);
    double worst = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
        double lhs = 0.0, rhs = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < rho.size(); ++i) {
            lhs += v_samples[i] * grad_rho[static_cast<std::size_t>(a)][i];
            rhs -= grad_v[static_cast<std::size_t>(a)][i] * rho[i];
            scale += std::abs(v_samples[i] * grad_rho[static_cast<std::size_t>(a)][i]);
        }
        if (scale == 0.0) continue;
        worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
    return worst;
}

namespace detail {

/// Ball indicator kernel in spectrum. Built on index displacements (origin at
/// index 0) so the circular convolution evaluates ball masses in place.
inline CField ball_indicator_spectrum(const SpectralPlan& plan, double radius) {
    const Grid& grid = plan.grid();
    CField chi(grid.total_points());
    std::size_t idx[8];
    for (std::size_t i = 0; i < chi.size(); ++i) {
        grid.unflatten(i, idx);
        double d2 = 0.0;
        for (int a = 0; a < grid.dim(); ++a) {
            const std::size_t n = grid.axis_points(a);
            const std::size_t j = idx[static_cast<std::size_t>(a)];
            const double disp = (j <= n / 2 ? static_cast<double>(j)
                                            : static_cast<double>(j) - static_cast<double>(n)) *
                                grid.spacing(a);
            d2 += disp * disp;
        }
        chi[i] = d2 <= radius * radius ? 1.0 : 0.0;
    }
    return plan.forward(chi);
}

inline CField ball_mass_map(const SpectralPlan& plan, const CField& values, const CField& chi_hat) {
    CField rho_hat = [&] {
        RField rho(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) rho[i] = std::norm(values[i]);
        return plan.forward(to_complex(rho));
    }();
    for (std::size_t i = 0; i < rho_hat.size(); ++i) rho_hat[i] *= chi_hat[i];
    return plan.inverse(rho_hat);
}

}  // namespace detail

/// Grid point maximizing the charge inside the ball of the given radius;
/// ties broken by smallest |q|, then by index. Phase- and scale-invariant.
inline Point concentration_point(const SpectralPlan& plan, const CField& values, double radius,
                                 const CField* chi_hat_cached = nullptr) {
    if (!(radius > 0.0)) throw Error(ErrorClass::ConfigError, "concentration radius must be positive");
    const Grid& grid = plan.grid();
    CField chi_hat = chi_hat_cached ? *chi_hat_cached : detail::ball_indicator_spectrum(plan, radius);
    CField mass = detail::ball_mass_map(plan, values, chi_hat);

    std::size_t best = 0;
    double best_val = -1.0, best_r2 = 0.0;
    double x[8];
    for (std::size_t i = 0; i < mass.size(); ++i) {
        const double val = mass[i].real();
        grid.point_at(i, x);
        double r2 = 0.0;
        for (int a = 0; a < grid.dim(); ++a) r2 += x[a] * x[a];
        if (val > best_val || (val == best_val && r2 < best_r2)) {
            best = i;
            best_val = val;
            best_r2 = r2;
        }
    }
    Point q(static_cast<std::size_t>(grid.dim()));
    grid.point_at(best, x);
    for (int a = 0; a < grid.dim(); ++a) q[static_cast<std::size_t>(a)] = x[a];
    return q;
}

/// Charge fraction outside the minimum-image ball B(q_hat, radius).
inline double concentration_fraction(const Grid& grid, const CField& values, const Point& q_hat,
                                     double radius) {
    if (!(radius > 0.0)) throw Error(ErrorClass::ConfigError, "concentration radius must be positive");
    double inside = 0.0, total = 0.0, x[8];
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double w = std::norm(values[i]);
        total += w;
        grid.point_at(i, x);
        if (grid.periodic_dist_sq(x, q_hat.data()) <= radius * radius) inside += w;
    }
    return (total - inside) / total;
}

/// Smallest radius (to half a cell) whose best ball holds all but eps of the
/// charge; bisection replaces the non-constructive existence argument.
inline double calibrate_concentration_radius(const SpectralPlan& plan, const CField& values, double eps) {
    const Grid& grid = plan.grid();
    double r_lo = grid.min_spacing();
    double r_hi = 0.0;
    for (int a = 0; a < grid.dim(); ++a) r_hi += 0.25 * grid.extent(a) * grid.extent(a);
    r_hi = std::sqrt(r_hi);
    auto frac_at = [&](double r) {
        Point q = concentration_point(plan, values, r);
        return concentration_fraction(grid, values, q, r);
    };
    if (frac_at(r_hi) > eps)
        throw Error(ErrorClass::NoConvergence, "no radius reaches the target concentration fraction");
    while (r_hi - r_lo > 0.5 * grid.min_spacing()) {
        const double mid = 0.5 * (r_lo + r_hi);
        if (frac_at(mid) <= eps)
            r_hi = mid;
        else
            r_lo = mid;
    }
    return r_hi;
}

/// H = qddot + grad V(q), with the two-term attribution: the gradient gap
/// between the concentration point and the barycenter, and the mismatch of
/// the density-averaged force against the force at the concentration point.
struct ResidualH {
    Point H;
    Point grad_mismatch;            // grad V(q_hat) - grad V(q)
    Point averaged_force_mismatch;  // int [grad V(x) - grad V(q_hat)] rho / int rho
};

inline ResidualH residual_H(const Grid& grid, const CField& values, const Potential& V, const Point& q,
                            const Point& qddot, const Point& q_hat) {
    ResidualH out;
    const Point gq = V.gradient(q);
    const Point gqh = V.gradient(q_hat);
    out.H.resize(q.size());
    out.grad_mismatch.resize(q.size());
    out.averaged_force_mismatch.resize(q.size());
    Point avg(q.size(), 0.0);
    double mass = 0.0, x[8], g[8];
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double w = std::norm(values[i]);
        mass += w;
        grid.point_at(i, x);
        V.grad(x, grid.dim(), g);
        for (std::size_t a = 0; a < q.size(); ++a) avg[a] += g[a] * w;
    }
    for (std::size_t a = 0; a < q.size(); ++a) {
        avg[a] /= mass;
        out.H[a] = qddot[a] + gq[a];
        out.grad_mismatch[a] = gqh[a] - gq[a];
        out.averaged_force_mismatch[a] = avg[a] - gqh[a];
    }
    return out;
}

/// Everything a record needs, cached per run: the plan, sampled potential and
/// gradient, and the ball indicator spectrum for the calibrated radius.
struct DiagnosticsContext {
    const SpectralPlan& plan;
    ModelParams params;
    Nonlinearity W;
    Potential V;
    RField v_samples;
    double conc_radius;
    CField chi_hat;

    DiagnosticsContext(const SpectralPlan& plan_, ModelParams params_, Nonlinearity w_, Potential v_,
                       double conc_radius_)
        : plan(plan_),
          params(params_),
          W(std::move(w_)),
          V(std::move(v_)),
          v_samples(V.sample(plan.grid())),
          conc_radius(conc_radius_),
          chi_hat(detail::ball_indicator_spectrum(plan, conc_radius_)) {}
};

inline TrajectoryRecord make_record(const DiagnosticsContext& ctx, const WaveField& psi) {
    const Grid& grid = psi.grid;
    TrajectoryRecord rec;
    rec.t = psi.time;
    rec.charge = charge(psi);
    rec.q = barycenter(grid, psi.values);
    rec.qdot = barycenter_velocity(ctx.plan, psi, ctx.params.h);
    rec.qddot = ehrenfest_acceleration(grid, psi.values, ctx.V);
    rec.q_hat = concentration_point(ctx.plan, psi.values, ctx.conc_radius, &ctx.chi_hat);
    rec.conc_fraction = concentration_fraction(grid, psi.values, rec.q_hat, ctx.conc_radius);
    rec.H = residual_H(grid, psi.values, ctx.V, rec.q, rec.qddot, rec.q_hat).H;
    rec.J = internal_energy(ctx.plan, modulus(psi.values), ctx.params, ctx.W);
    rec.G = dynamical_energy(ctx.plan, psi, ctx.params, ctx.v_samples);
    rec.E = rec.J + rec.G;
    rec.boundary_mass = boundary_mass_fraction(grid, psi.values);
    rec.spectral_tail = ctx.plan.spectral_tail_fraction(psi.values);
    double pot = 0.0;
    for (std::size_t i = 0; i < psi.values.size(); ++i)
        pot += ctx.v_samples[i] * std::norm(psi.values[i]);
    rec.potential_moment = pot * grid.cell_volume();
    return rec;
}

/// Running maxima of the boundedness quantities: the potential moment in both
/// normalizations (the lemma display uses h^{N beta - 2 alpha}, its proof
/// h^{N beta - 2 gamma}), the barycenter radius, and the distance between
/// barycenter and concentration point. A quantity whose max over the second
/// half of the horizon exceeds twice its max over the first half is flagged
/// as growing.
struct LemmaMonitorReport {
    double max_moment_alpha_norm = 0.0;
    double max_moment_gamma_norm = 0.0;
    double max_barycenter_radius = 0.0;
    double max_separation = 0.0;
    bool moment_growing = false;
    bool barycenter_growing = false;
    bool separation_growing = false;
};

inline LemmaMonitorReport lemma_monitors(const std::vector<TrajectoryRecord>& records,
                                         const ModelParams& p) {
    LemmaMonitorReport rep;
    if (records.empty()) return rep;
    const double na = std::pow(p.h, p.dim * p.beta() - 2.0 * p.alpha);
    const double ng = std::pow(p.h, p.dim * p.beta() - 2.0 * p.gamma);

    auto radius = [](const Point& q) {
        double r2 = 0.0;
        for (double c : q) r2 += c * c;
        return std::sqrt(r2);
    };
    auto separation = [&](const TrajectoryRecord& r) {
        double s2 = 0.0;
        for (std::size_t a = 0; a < r.q.size(); ++a) s2 += (r.q[a] - r.q_hat[a]) * (r.q[a] - r.q_hat[a]);
        return std::sqrt(s2);
    };

    const std::size_t half = records.size() / 2;
    double m1 = 0.0, m2 = 0.0, b1 = 0.0, b2 = 0.0, s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const bool late = i >= half;
        const double mom = records[i].potential_moment;
        const double br = radius(records[i].q);
        const double sp = separation(records[i]);
        rep.max_moment_alpha_norm = std::max(rep.max_moment_alpha_norm, mom / na);
        rep.max_moment_gamma_norm = std::max(rep.max_moment_gamma_norm, mom / ng);
        rep.max_barycenter_radius = std::max(rep.max_barycenter_radius, br);
        rep.max_separation = std::max(rep.max_separation, sp);
        (late ? m2 : m1) = std::max(late ? m2 : m1, mom);
        (late ? b2 : b1) = std::max(late ? b2 : b1, br);
        (late ? s2 : s1) = std::max(late ? s2 : s1, sp);
    }
    // "doubling" with a 10% slack so exact linear growth still fires
    const double factor = 1.8, floor = 1e-12;
    rep.moment_growing = m2 > factor * m1 + floor;
    rep.barycenter_growing = b2 > factor * b1 + floor;
    rep.separation_growing = s2 > factor * s1 + floor;
    return rep;
}

}  // namespace nlsd
