#pragma once

#include <functional>
#include <memory>

#include "nlsd/diagnostics.hpp"

namespace nlsd {

struct MonitorThresholds {
    double charge_drift = 1e-8;
    double energy_drift = 1e-4;
    double boundary_mass = 1e-6;
    double spectral_tail = 1e-8;
    double blowup_factor = 10.0;
};

/// Strang-split integrator state for i h psi_t = -(h^2/2) lap psi
/// + (1/(2 h^alpha)) W'(h^gamma |psi|) psi/|psi| + V psi. The potential plus
/// nonlinear flow only rotates phase, so both substeps are exact.
struct PropagatorState {
    WaveField psi;
    ModelParams params;
    Nonlinearity W;
    double dt = 0.0;
    std::shared_ptr<const SpectralPlan> plan;
    RField v_samples;
    MonitorThresholds thresholds;
    std::size_t step_index = 0;

    // monitor baselines from the initial state
    double charge0 = 0.0;
    double energy0 = 0.0;
    double energy_scale0 = 1.0;
    double modmax0 = 0.0;

    CField kin_phase;  // cached exp(-i h |k|^2 dt / 2)
};

namespace detail {

inline void cache_kinetic_phase(PropagatorState& st) {
    const auto& ksq = st.plan->ksq();
    st.kin_phase.resize(ksq.size());
    for (std::size_t i = 0; i < ksq.size(); ++i) {
        const double ph = -0.5 * st.params.h * ksq[i] * st.dt;
        st.kin_phase[i] = Cplx{std::cos(ph), std::sin(ph)};
    }
}

/// Pointwise phase rotation exp(-i tau [V + (1/(2 h^alpha)) W'(h^gamma s)/s] / h);
/// the nonlinear rate at s = 0 is 0 since W''(0) = 0.
inline void apply_phase_flow(PropagatorState& st, double tau) {
    const double h = st.params.h;
    const double hg = std::pow(h, st.params.gamma);
    const double nl_pref = 0.5 * std::pow(h, st.params.gamma - st.params.alpha);
    for (std::size_t i = 0; i < st.psi.values.size(); ++i) {
        const double s = std::abs(st.psi.values[i]);
        const double rate = st.v_samples[i] + nl_pref * st.W.phase_rate(hg * s);
        const double ph = -tau * rate / h;
        st.psi.values[i] *= Cplx{std::cos(ph), std::sin(ph)};
    }
}

}  // namespace detail

/// Default step rule: the largest phase increment per substep stays below
/// half a radian, both for the potential-plus-nonlinear rate and for the
/// fastest kinetic mode. Deliberately conservative; override in the config.
inline double default_time_step(const SpectralPlan& plan, const WaveField& psi, const ModelParams& p,
                                const Nonlinearity& W, const RField& v_samples) {
    const double hg = std::pow(p.h, p.gamma);
    const double nl_pref = 0.5 * std::pow(p.h, p.gamma - p.alpha);
    double rate_max = 0.0;
    for (std::size_t i = 0; i < psi.values.size(); ++i) {
        const double s = std::abs(psi.values[i]);
        rate_max = std::max(rate_max, std::abs(v_samples[i] + nl_pref * W.phase_rate(hg * s)));
    }
    double ksq_max = 0.0;
    for (double k2 : plan.ksq()) ksq_max = std::max(ksq_max, k2);
    const double dt_pot = rate_max > 0.0 ? 0.5 * p.h / rate_max : std::numeric_limits<double>::infinity();
    const double dt_kin = ksq_max > 0.0 ? 1.0 / (p.h * ksq_max) : std::numeric_limits<double>::infinity();
    return std::min(dt_pot, dt_kin);
}

inline PropagatorState make_propagator(WaveField psi, const ModelParams& params, Nonlinearity W,
                                       const Potential& V, double dt,
                                       const MonitorThresholds& thresholds = {}) {
    if (dt == 0.0 || !std::isfinite(dt))
        throw Error(ErrorClass::ConfigError, "propagator needs a nonzero finite dt");
    PropagatorState st{WaveField(psi.grid), params, std::move(W), dt, nullptr, {}, thresholds};
    st.psi = std::move(psi);
    st.plan = std::make_shared<SpectralPlan>(st.psi.grid);
    st.v_samples = V.sample(st.psi.grid);
    detail::cache_kinetic_phase(st);

    st.charge0 = charge(st.psi);
    st.energy0 = total_energy(*st.plan, st.psi, st.params, st.W, st.v_samples);
    // scale for relative drift; the signed energy can sit near zero
    double abs_energy = 0.5 * params.h * params.h * st.plan->gradient_energy(st.psi.values);
    for (std::size_t i = 0; i < st.psi.values.size(); ++i) {
        const double s = std::abs(st.psi.values[i]);
        abs_energy += (std::abs(scaled_w(st.W, params, s)) + std::abs(st.v_samples[i]) * s * s) *
                      st.psi.grid.cell_volume();
    }
    st.energy_scale0 = std::max({std::abs(st.energy0), abs_energy, 1e-30});
    st.modmax0 = max_abs(st.psi.values);
    return st;
}

/// One Strang step: half phase flow, exact kinetic flow, half phase flow.
inline void step_strang(PropagatorState& st) {
    detail::apply_phase_flow(st, 0.5 * st.dt);
    CField spec = st.plan->forward(st.psi.values);
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= st.kin_phase[i];
    st.plan->inverse(spec, st.psi.values);
    detail::apply_phase_flow(st, 0.5 * st.dt);
    st.psi.time += st.dt;
    ++st.step_index;
}

using RecordSink = std::function<void(const TrajectoryRecord&)>;

namespace detail {

inline void check_monitors(const PropagatorState& st, const TrajectoryRecord& rec) {
    const auto fail = [&](ErrorClass cls, const std::string& what, double value, double bound) {
        std::ostringstream os;
        os << what << " = " << value << " exceeds " << bound << " at step " << st.step_index
           << " (t = " << rec.t << ")";
        throw Error(cls, os.str());
    };
    const double cd = std::abs(rec.charge - st.charge0) / st.charge0;
    if (cd > st.thresholds.charge_drift)
        fail(ErrorClass::ChargeDrift, "relative charge drift", cd, st.thresholds.charge_drift);
    const double ed = std::abs(rec.E - st.energy0) / st.energy_scale0;
    if (ed > st.thresholds.energy_drift)
        fail(ErrorClass::EnergyDrift, "relative energy drift", ed, st.thresholds.energy_drift);
    if (rec.boundary_mass > st.thresholds.boundary_mass)
        fail(ErrorClass::BoundaryMassExceeded, "boundary shell charge fraction", rec.boundary_mass,
             st.thresholds.boundary_mass);
    if (rec.spectral_tail > st.thresholds.spectral_tail)
        fail(ErrorClass::SpectralTailExceeded, "top-octave spectral fraction", rec.spectral_tail,
             st.thresholds.spectral_tail);
}

}  // namespace detail

/// Advances ceil(T/dt) steps, pushing a diagnostic record to the sink every
/// sample_stride steps (and at the start and end). Monitor violations throw,
/// naming the monitor and the step index.
inline void evolve(PropagatorState& st, double T, std::size_t sample_stride,
                   const DiagnosticsContext& diag, const RecordSink& sink) {
    if (!(T > 0.0)) throw Error(ErrorClass::ConfigError, "evolve needs T > 0");
    if (sample_stride == 0) sample_stride = 1;
    const auto nsteps =
        static_cast<std::size_t>(std::ceil(T / std::abs(st.dt) * (1.0 - 1e-12)));

    {
        TrajectoryRecord rec = make_record(diag, st.psi);
        detail::check_monitors(st, rec);
        sink(rec);
    }
    for (std::size_t k = 1; k <= nsteps; ++k) {
        step_strang(st);
        if (k % sample_stride == 0 || k == nsteps) {
            TrajectoryRecord rec = make_record(diag, st.psi);
            if (max_abs(st.psi.values) > st.thresholds.blowup_factor * st.modmax0)
                throw Error(ErrorClass::BlowUpDetected,
                            "modulus grew past " + std::to_string(st.thresholds.blowup_factor) +
                                "x the initial maximum at step " + std::to_string(st.step_index));
            detail::check_monitors(st, rec);
            sink(rec);
        }
    }
}

}  // namespace nlsd
