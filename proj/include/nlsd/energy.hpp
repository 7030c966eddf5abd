#pragma once

#include "nlsd/model.hpp"
#include "nlsd/spectral.hpp"

namespace nlsd {

/// W_h(s) = h^{-(alpha+gamma)} W(h^gamma s), the scaled nonlinear energy density.
inline double scaled_w(const Nonlinearity& W, const ModelParams& p, double s) {
    return std::pow(p.h, -(p.alpha + p.gamma)) * W.w(std::pow(p.h, p.gamma) * s);
}

/// Internal (binding) energy J_h(u) = int (h^2/2)|grad u|^2 + W_h(u).
inline double internal_energy(const SpectralPlan& plan, const RField& u, const ModelParams& p,
                              const Nonlinearity& W) {
    const double kin = 0.5 * p.h * p.h * plan.gradient_energy(u);
    double nl = 0.0;
    for (double s : u) nl += scaled_w(W, p, std::abs(s));
    return kin + nl * plan.grid().cell_volume();
}

/// Dynamical energy G = int [ |grad S|^2/2 + V ] |psi|^2, computed without
/// phase unwrapping: the phase kinetic term is the total gradient energy
/// minus the amplitude gradient energy.
inline double dynamical_energy(const SpectralPlan& plan, const WaveField& psi, const ModelParams& p,
                               const RField& v_samples) {
    const RField amp = modulus(psi.values);
    const double kin =
        0.5 * p.h * p.h * (plan.gradient_energy(psi.values) - plan.gradient_energy(amp));
    double pot = 0.0;
    for (std::size_t i = 0; i < amp.size(); ++i) pot += v_samples[i] * amp[i] * amp[i];
    return kin + pot * plan.grid().cell_volume();
}

/// E_h = J_h(|psi|) + G; the identity with the direct form below is exact by
/// construction.
inline double total_energy(const SpectralPlan& plan, const WaveField& psi, const ModelParams& p,
                           const Nonlinearity& W, const RField& v_samples) {
    return internal_energy(plan, modulus(psi.values), p, W) + dynamical_energy(plan, psi, p, v_samples);
}

/// Direct evaluation int (h^2/2)|grad psi|^2 + W_h(|psi|) + V |psi|^2.
inline double total_energy_direct(const SpectralPlan& plan, const WaveField& psi, const ModelParams& p,
                                  const Nonlinearity& W, const RField& v_samples) {
    const double kin = 0.5 * p.h * p.h * plan.gradient_energy(psi.values);
    double rest = 0.0;
    for (std::size_t i = 0; i < psi.values.size(); ++i) {
        const double s = std::abs(psi.values[i]);
        rest += scaled_w(W, p, s) + v_samples[i] * s * s;
    }
    return kin + rest * plan.grid().cell_volume();
}

/// Gate shared by every profile rescaling: the h^beta core must span at
/// least 8 cells of the target grid.
inline void require_core_resolved(const Grid& grid, const ModelParams& p) {
    const double core = std::pow(p.h, p.beta());
    if (core < 8.0 * grid.min_spacing()) {
        std::ostringstream os;
        os << "rescaled core width h^beta = " << core << " spans fewer than 8 cells (dx = "
           << grid.min_spacing() << ")";
        throw Error(ErrorClass::UnderResolved, os.str());
    }
}

/// u(x) = h^{-gamma} v(x / h^beta) on the destination grid.
inline RField rescale_profile(const SpectralPlan& src_plan, const RField& v, const Grid& dst,
                              const ModelParams& p) {
    require_core_resolved(dst, p);
    const double scale = std::pow(p.h, p.beta());
    const double amp = std::pow(p.h, -p.gamma);
    if (scale == 1.0 && src_plan.grid() == dst) {
        RField u = v;
        for (double& s : u) s *= amp;
        return u;
    }
    Point shift(static_cast<std::size_t>(dst.dim()), 0.0);
    RField u = fourier_dilated_eval_real(src_plan, v, dst, shift, scale);
    for (double& s : u) s *= amp;
    return u;
}

}  // namespace nlsd
