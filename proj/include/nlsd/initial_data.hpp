#pragma once

#include "nlsd/ground_state.hpp"

namespace nlsd {

inline double h1_norm(const SpectralPlan& plan, const RField& w) {
    return std::sqrt(charge(plan.grid(), w) + plan.gradient_energy(w));
}

/// Smooth radial bump used as the perturbation shape: a Gaussian shell at
/// |x| = radius. Analytic, so it adds no spectral tail on any working grid,
/// and away from the soliton core so the mass renormalization against U
/// cannot absorb it.
inline RField bump_shape(const Grid& grid, double radius, double width = 1.0) {
    RField s(grid.total_points(), 0.0);
    double x[8];
    for (std::size_t i = 0; i < s.size(); ++i) {
        grid.point_at(i, x);
        double r2 = 0.0;
        for (int a = 0; a < grid.dim(); ++a) r2 += x[a] * x[a];
        const double d = (std::sqrt(r2) - radius) / width;
        s[i] = std::exp(-0.5 * d * d);
    }
    return s;
}

struct PerturbationRecipe {
    double amplitude_fraction = 0.0;  // of the bound K h^{alpha-gamma}
    double radius = 3.0;              // shell center
    double width = 1.0;
};

/// Initial-datum description: position, boost, perturbation recipe and the
/// admissibility constant K.
struct InitialDatumSpec {
    Point q0;
    Point v;
    ModelParams params;
    double K = 1.0;
    PerturbationRecipe perturbation;
    double boundary_margin = 0.2;  // q0 must stay this fraction of L from the box edge
};

/// Builds w0 with ||U + w0|| = sigma exactly (global rescale of U + w_raw),
/// ||w0||_H1 <= K h^{alpha-gamma}, and the potential moment of w0 within the
/// same bound on the run potential.
inline RField make_perturbation(const SpectralPlan& ref_plan, const GroundState& gs,
                                const ModelParams& p, double K, const PerturbationRecipe& recipe,
                                const RField& v_samples_ref) {
    const Grid& grid = ref_plan.grid();
    if (recipe.amplitude_fraction == 0.0) return RField(grid.total_points(), 0.0);
    if (recipe.amplitude_fraction < 0.0)
        throw Error(ErrorClass::ConfigError, "perturbation amplitude fraction must be >= 0");

    const double bound = K * std::pow(p.h, p.alpha - p.gamma);
    RField shape = bump_shape(grid, recipe.radius, recipe.width);
    {
        const double s = 1.0 / h1_norm(ref_plan, shape);
        for (double& w : shape) w *= s;
    }

    RField combined(grid.total_points());
    for (std::size_t i = 0; i < combined.size(); ++i)
        combined[i] = gs.u[i] + recipe.amplitude_fraction * bound * shape[i];
    const double scale = gs.sigma / l2_norm(grid, combined);
    RField w0(combined.size());
    for (std::size_t i = 0; i < w0.size(); ++i) w0[i] = scale * combined[i] - gs.u[i];

    const double h1 = h1_norm(ref_plan, w0);
    if (h1 > bound * (1.0 + 1e-9)) {
        std::ostringstream os;
        os << "||w0||_H1 = " << h1 << " exceeds K h^(alpha-gamma) = " << bound
           << "; shrink the amplitude";
        throw Error(ErrorClass::BoundUnachievable, os.str());
    }
    double pot = 0.0;
    for (std::size_t i = 0; i < w0.size(); ++i) pot += v_samples_ref[i] * w0[i] * w0[i];
    pot *= grid.cell_volume();
    if (pot > bound * (1.0 + 1e-9)) {
        std::ostringstream os;
        os << "int V w0^2 = " << pot << " exceeds K h^(alpha-gamma) = " << bound
           << "; shrink the amplitude";
        throw Error(ErrorClass::BoundUnachievable, os.str());
    }
    return w0;
}

namespace detail {

inline void require_datum_resolved(const Grid& run, const InitialDatumSpec& spec) {
    require_core_resolved(run, spec.params);
    double vnorm = 0.0;
    for (double c : spec.v) vnorm += c * c;
    vnorm = std::sqrt(vnorm);
    if (vnorm > 0.0) {
        const double wavelength = 2.0 * std::numbers::pi * spec.params.h / vnorm;
        if (wavelength < 8.0 * run.max_spacing()) {
            std::ostringstream os;
            os << "phase wavelength 2 pi h / |v| = " << wavelength
               << " needs >= 8 cells (dx = " << run.max_spacing() << ")";
            throw Error(ErrorClass::PhaseUnderResolved, os.str());
        }
    }
    for (int a = 0; a < run.dim(); ++a) {
        const double margin = 0.5 * run.extent(a) - std::abs(spec.q0[static_cast<std::size_t>(a)]);
        if (margin < spec.boundary_margin * run.extent(a)) {
            std::ostringstream os;
            os << "q0 axis " << a << " is " << margin << " from the box edge, needs "
               << spec.boundary_margin * run.extent(a);
            throw Error(ErrorClass::TooCloseToBoundary, os.str());
        }
    }
}

/// h^{-gamma} profile((x - center)/h^beta) e^{i (v.x + phase0)/h} on the run grid.
inline WaveField scaled_boosted_field(const SpectralPlan& ref_plan, const RField& profile,
                                      const Grid& run, const ModelParams& p, const Point& center,
                                      const Point& v, double phase0) {
    const double scale = std::pow(p.h, p.beta());
    const double amp = std::pow(p.h, -p.gamma);

    RField core;
    bool centered = true;
    for (double c : center)
        if (c != 0.0) centered = false;
    if (scale == 1.0 && centered && ref_plan.grid() == run)
        core = profile;
    else
        core = fourier_dilated_eval_real(ref_plan, profile, run, center, scale);

    WaveField psi(run);
    double x[8];
    for (std::size_t i = 0; i < psi.values.size(); ++i) {
        run.point_at(i, x);
        double ph = phase0;
        for (int a = 0; a < run.dim(); ++a) ph += v[static_cast<std::size_t>(a)] * x[a];
        ph /= p.h;
        psi.values[i] = amp * core[i] * Cplx{std::cos(ph), std::sin(ph)};
    }
    return psi;
}

}  // namespace detail

/// psi(0,x) = h^{-gamma} (U + w0)((x - q0)/h^beta) e^{i v.x / h}.
inline WaveField build_initial_datum(const InitialDatumSpec& spec, const GroundState& gs,
                                     const SpectralPlan& ref_plan, const RField& w0,
                                     const Grid& run_grid) {
    detail::require_datum_resolved(run_grid, spec);
    RField profile(gs.u.size());
    for (std::size_t i = 0; i < profile.size(); ++i) profile[i] = gs.u[i] + w0[i];
    return detail::scaled_boosted_field(ref_plan, profile, run_grid, spec.params, spec.q0, spec.v, 0.0);
}

/// The travelling-soliton solution of the free problem:
/// psi(t,x) = h^{-gamma} U((x - q0 - v t)/h^beta) e^{i(v.x - E t)/h},
/// E = |v|^2/2 + omega / h^{alpha-gamma}.
inline WaveField exact_free_soliton(const InitialDatumSpec& spec, const GroundState& gs,
                                    const SpectralPlan& ref_plan, double t, const Grid& run_grid) {
    detail::require_datum_resolved(run_grid, spec);
    const ModelParams& p = spec.params;
    double v2 = 0.0;
    for (double c : spec.v) v2 += c * c;
    const double energy = 0.5 * v2 + gs.omega / std::pow(p.h, p.alpha - p.gamma);
    Point center = spec.q0;
    for (std::size_t a = 0; a < center.size(); ++a) center[a] += spec.v[a] * t;
    WaveField psi = detail::scaled_boosted_field(ref_plan, gs.u, run_grid, p, center, spec.v, -energy * t);
    psi.time = t;
    return psi;
}

struct AdmissibilityItem {
    std::string name;
    bool pass = true;
    double measured = 0.0;
    double bound = 0.0;
    std::string note;
};

struct AdmissibilityReport {
    std::vector<AdmissibilityItem> items;
    std::string note;

    bool all_pass() const {
        for (const auto& it : items)
            if (!it.pass) return false;
        return true;
    }
    const AdmissibilityItem* find(const std::string& name) const {
        for (const auto& it : items)
            if (it.name == name) return &it;
        return nullptr;
    }
};

/// Checks membership of the admissible set: mass equality, the H1 smallness
/// of w0, the phase-gradient bound and the potential moment. The moment is
/// bounded by K h^{N beta - 2 alpha} as the set definition states; the
/// introduction instead bounds int V w0^2 by K h^{alpha-gamma}, so both are
/// reported and the exponent mismatch is surfaced as a note, not resolved.
inline AdmissibilityReport validate_admissibility(const WaveField& psi0, const InitialDatumSpec& spec,
                                                  const GroundState& gs, const SpectralPlan& ref_plan,
                                                  const RField& w0, const Potential& V) {
    const ModelParams& p = spec.params;
    AdmissibilityReport rep;
    rep.note =
        "potential moment bounded with exponent N beta - 2 alpha (set definition); "
        "the introduction states K h^(alpha-gamma) for int V w0^2 - both are reported";

    {
        RField comb(gs.u.size());
        for (std::size_t i = 0; i < comb.size(); ++i) comb[i] = gs.u[i] + w0[i];
        const double mass = l2_norm(ref_plan.grid(), comb);
        AdmissibilityItem it{"mass_equality", true, mass, gs.sigma, "||U + w0|| = sigma"};
        it.pass = std::abs(mass - gs.sigma) <= 1e-10 * gs.sigma;
        rep.items.push_back(it);
    }
    {
        const double h1 = h1_norm(ref_plan, w0);
        const double bound = spec.K * std::pow(p.h, p.alpha - p.gamma);
        AdmissibilityItem it{"h1_bound", h1 <= bound * (1.0 + 1e-12), h1, bound,
                             "||w0||_H1 < K h^(alpha-gamma)"};
        rep.items.push_back(it);
    }
    {
        double vnorm = 0.0;
        for (double c : spec.v) vnorm += c * c;
        vnorm = std::sqrt(vnorm);
        AdmissibilityItem it{"phase_gradient", vnorm <= spec.K, vnorm, spec.K,
                             "|grad S| = |v| <= K for the plane phase"};
        rep.items.push_back(it);
    }
    {
        const Grid& run = psi0.grid;
        RField vs(run.total_points());
        double x[8];
        double moment = 0.0;
        for (std::size_t i = 0; i < vs.size(); ++i) {
            run.point_at(i, x);
            moment += V.v(x, run.dim()) * std::norm(psi0.values[i]);
        }
        moment *= run.cell_volume();
        const double bound = spec.K * std::pow(p.h, p.dim * p.beta() - 2.0 * p.alpha);
        AdmissibilityItem it{"potential_moment", moment <= bound, moment, bound,
                             "int V |psi0|^2 <= K h^(N beta - 2 alpha)"};
        rep.items.push_back(it);
    }
    {
        const Grid& ref = ref_plan.grid();
        RField vs(ref.total_points());
        double x[8];
        double moment = 0.0;
        for (std::size_t i = 0; i < w0.size(); ++i) {
            ref.point_at(i, x);
            moment += V.v(x, ref.dim()) * w0[i] * w0[i];
        }
        moment *= ref.cell_volume();
        const double bound = spec.K * std::pow(p.h, p.alpha - p.gamma);
        AdmissibilityItem it{"perturbation_moment", moment <= bound, moment, bound,
                             "int V w0^2 < K h^(alpha-gamma), the introduction's normalization"};
        rep.items.push_back(it);
    }
    return rep;
}

}  // namespace nlsd
