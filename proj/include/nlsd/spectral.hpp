#pragma once

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <vector>

#include "nlsd/field.hpp"

namespace nlsd {

// FFTW plan creation is not thread safe; execution with distinct arrays is.
inline std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

/// Cached transform pair plus the wavenumber lattice of one grid.
/// Immutable and shareable across threads; forward is unnormalized, the
/// inverse carries the 1/n factor. Physical quantities use dx^N weights so
/// the convention stays internal.
class SpectralPlan {
public:
    explicit SpectralPlan(Grid grid) : grid_(std::move(grid)) {
        const int dim = grid_.dim();
        std::vector<int> n(static_cast<std::size_t>(dim));
        for (int a = 0; a < dim; ++a) n[static_cast<std::size_t>(a)] = static_cast<int>(grid_.axis_points(a));
        scratch_in_.resize(grid_.total_points());
        scratch_out_.resize(grid_.total_points());
        {
            std::lock_guard<std::mutex> lock(fftw_plan_mutex());
            const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
            fwd_ = fftw_plan_dft(dim, n.data(), reinterpret_cast<fftw_complex*>(scratch_in_.data()),
                                 reinterpret_cast<fftw_complex*>(scratch_out_.data()), FFTW_FORWARD, flags);
            bwd_ = fftw_plan_dft(dim, n.data(), reinterpret_cast<fftw_complex*>(scratch_in_.data()),
                                 reinterpret_cast<fftw_complex*>(scratch_out_.data()), FFTW_BACKWARD, flags);
        }
        ksq_.resize(grid_.total_points());
        std::size_t idx[8];
        for (std::size_t i = 0; i < ksq_.size(); ++i) {
            grid_.unflatten(i, idx);
            double s = 0.0;
            for (int a = 0; a < dim; ++a) {
                const double k = grid_.wavenumber(a, idx[a]);
                s += k * k;
            }
            ksq_[i] = s;
        }
    }

    ~SpectralPlan() {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
    }

    SpectralPlan(const SpectralPlan&) = delete;
    SpectralPlan& operator=(const SpectralPlan&) = delete;

    const Grid& grid() const { return grid_; }
    const std::vector<double>& ksq() const { return ksq_; }

    void forward(const CField& in, CField& out) const {
        out.resize(in.size());
        fftw_execute_dft(fwd_, reinterpret_cast<fftw_complex*>(const_cast<Cplx*>(in.data())),
                         reinterpret_cast<fftw_complex*>(out.data()));
    }

    void inverse(const CField& in, CField& out) const {
        out.resize(in.size());
        fftw_execute_dft(bwd_, reinterpret_cast<fftw_complex*>(const_cast<Cplx*>(in.data())),
                         reinterpret_cast<fftw_complex*>(out.data()));
        const double scale = 1.0 / static_cast<double>(grid_.total_points());
        for (auto& z : out) z *= scale;
    }

    CField forward(const CField& in) const {
        CField out;
        forward(in, out);
        return out;
    }

    CField inverse(const CField& in) const {
        CField out;
        inverse(in, out);
        return out;
    }

    /// Spectral partial derivative along one axis.
    CField gradient_component(const CField& f, int axis) const {
        CField spec = forward(f);
        std::size_t idx[8];
        for (std::size_t i = 0; i < spec.size(); ++i) {
            grid_.unflatten(i, idx);
            const double k = grid_.wavenumber(axis, idx[static_cast<std::size_t>(axis)]);
            spec[i] *= Cplx{0.0, k};
        }
        return inverse(spec);
    }

    std::vector<CField> gradient(const CField& f) const {
        std::vector<CField> g;
        g.reserve(static_cast<std::size_t>(grid_.dim()));
        CField spec = forward(f);
        std::size_t idx[8];
        for (int a = 0; a < grid_.dim(); ++a) {
            CField comp(spec.size());
            for (std::size_t i = 0; i < spec.size(); ++i) {
                grid_.unflatten(i, idx);
                const double k = grid_.wavenumber(a, idx[static_cast<std::size_t>(a)]);
                comp[i] = spec[i] * Cplx{0.0, k};
            }
            g.push_back(inverse(comp));
        }
        return g;
    }

    std::vector<RField> gradient_real(const RField& f) const {
        auto g = gradient(to_complex(f));
        std::vector<RField> out;
        out.reserve(g.size());
        for (auto& c : g) {
            RField r(c.size());
            for (std::size_t i = 0; i < c.size(); ++i) r[i] = c[i].real();
            out.push_back(std::move(r));
        }
        return out;
    }

    /// Laplacian as divergence of the spectral gradient (same masked lattice),
    /// so discrete integration by parts is exact.
    CField laplacian(const CField& f) const {
        CField spec = forward(f);
        for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= -ksq_[i];
        return inverse(spec);
    }

    RField laplacian_real(const RField& f) const {
        CField lap = laplacian(to_complex(f));
        RField out(lap.size());
        for (std::size_t i = 0; i < lap.size(); ++i) out[i] = lap[i].real();
        return out;
    }

    /// Integral of |grad f|^2 dx^N evaluated in spectrum (Parseval).
    double gradient_energy(const CField& f) const {
        CField spec = forward(f);
        double s = 0.0;
        for (std::size_t i = 0; i < spec.size(); ++i) s += ksq_[i] * std::norm(spec[i]);
        return s * grid_.cell_volume() / static_cast<double>(grid_.total_points());
    }

    double gradient_energy(const RField& f) const { return gradient_energy(to_complex(f)); }

    /// Exact flow of i h dpsi/dt = -(h^2/2) lap psi over time dt.
    void apply_kinetic(WaveField& psi, double dt, double h) const {
        CField spec = forward(psi.values);
        for (std::size_t i = 0; i < spec.size(); ++i) {
            const double phase = -0.5 * h * ksq_[i] * dt;
            spec[i] *= Cplx{std::cos(phase), std::sin(phase)};
        }
        inverse(spec, psi.values);
        psi.time += dt;
    }

    /// Translate a field by `shift` via the Fourier phase e^{-i k shift}.
    CField translate(const CField& f, const Point& shift) const {
        CField spec = forward(f);
        std::size_t idx[8];
        for (std::size_t i = 0; i < spec.size(); ++i) {
            grid_.unflatten(i, idx);
            double phase = 0.0;
            for (int a = 0; a < grid_.dim(); ++a)
                phase -= grid_.wavenumber(a, idx[static_cast<std::size_t>(a)]) * shift[static_cast<std::size_t>(a)];
            spec[i] *= Cplx{std::cos(phase), std::sin(phase)};
        }
        return inverse(spec);
    }

    RField translate_real(const RField& f, const Point& shift) const {
        CField t = translate(to_complex(f), shift);
        RField out(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) out[i] = t[i].real();
        return out;
    }

    /// Fraction of Fourier mass in the top octave (any axis index |m| >= n/4).
    double spectral_tail_fraction(const CField& f) const {
        CField spec = forward(f);
        std::size_t idx[8];
        double tail = 0.0, total = 0.0;
        for (std::size_t i = 0; i < spec.size(); ++i) {
            const double w = std::norm(spec[i]);
            total += w;
            grid_.unflatten(i, idx);
            for (int a = 0; a < grid_.dim(); ++a) {
                const std::size_t n = grid_.axis_points(a);
                const std::size_t j = idx[static_cast<std::size_t>(a)];
                const std::size_t m = j <= n / 2 ? j : n - j;
                if (4 * m >= n) {
                    tail += w;
                    break;
                }
            }
        }
        return total > 0.0 ? tail / total : 0.0;
    }

private:
    Grid grid_;
    fftw_plan fwd_;
    fftw_plan bwd_;
    std::vector<double> ksq_;
    // plan-creation scratch only; execution uses caller arrays
    mutable CField scratch_in_, scratch_out_;
};

/// Evaluate the periodic Fourier interpolant of `src` at the points
/// (x - shift)/scale of the destination grid. Spectrally accurate for
/// profiles that decay inside the source box; the tensor structure keeps the
/// cost at one dense axis-matrix per dimension.
inline CField fourier_dilated_eval(const SpectralPlan& src_plan, const CField& src, const Grid& dst,
                                   const Point& shift, double scale) {
    const Grid& sg = src_plan.grid();
    if (sg.dim() != dst.dim())
        throw Error(ErrorClass::ConfigError, "dilated eval needs matching dimensions");
    const int dim = sg.dim();

    CField buf = src_plan.forward(src);
    const double norm = 1.0 / static_cast<double>(sg.total_points());
    for (auto& z : buf) z *= norm;

    std::vector<std::size_t> shape(static_cast<std::size_t>(dim));
    for (int a = 0; a < dim; ++a) shape[static_cast<std::size_t>(a)] = sg.axis_points(a);

    for (int a = 0; a < dim; ++a) {
        const std::size_t sn = sg.axis_points(a);
        const std::size_t dn = dst.axis_points(a);
        // E[j][m] = exp(i k_m ((x_j - shift)/scale + L_src/2)); the L/2 term
        // accounts for the DFT origin sitting at the box corner
        CField E(dn * sn);
        const bool even = (sn % 2 == 0);
        for (std::size_t j = 0; j < dn; ++j) {
            const double y_raw = (dst.coord(a, j) - shift[static_cast<std::size_t>(a)]) / scale;
            if (y_raw < -0.5 * sg.extent(a) || y_raw >= 0.5 * sg.extent(a)) {
                // outside the source box the profile is taken as zero rather
                // than periodically extended
                for (std::size_t m = 0; m < sn; ++m) E[j * sn + m] = Cplx{0.0, 0.0};
                continue;
            }
            const double y = y_raw + 0.5 * sg.extent(a);
            for (std::size_t m = 0; m < sn; ++m) {
                if (even && m == sn / 2) {
                    E[j * sn + m] = Cplx{0.0, 0.0};  // drop the asymmetric Nyquist mode
                    continue;
                }
                const long ms = m <= sn / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(sn);
                const double k = 2.0 * std::numbers::pi * static_cast<double>(ms) / sg.extent(a);
                E[j * sn + m] = Cplx{std::cos(k * y), std::sin(k * y)};
            }
        }

        std::size_t outer = 1, trail = 1;
        for (int b = 0; b < a; ++b) outer *= shape[static_cast<std::size_t>(b)];
        for (int b = a + 1; b < dim; ++b) trail *= shape[static_cast<std::size_t>(b)];

        CField next(outer * dn * trail, Cplx{0.0, 0.0});
        for (std::size_t o = 0; o < outer; ++o)
            for (std::size_t j = 0; j < dn; ++j) {
                Cplx* dstrow = next.data() + (o * dn + j) * trail;
                const Cplx* erow = E.data() + j * sn;
                for (std::size_t m = 0; m < sn; ++m) {
                    const Cplx e = erow[m];
                    const Cplx* srcrow = buf.data() + (o * sn + m) * trail;
                    for (std::size_t tr = 0; tr < trail; ++tr) dstrow[tr] += e * srcrow[tr];
                }
            }
        buf = std::move(next);
        shape[static_cast<std::size_t>(a)] = dn;
    }
    return buf;
}

inline RField fourier_dilated_eval_real(const SpectralPlan& src_plan, const RField& src, const Grid& dst,
                                        const Point& shift, double scale) {
    CField c = fourier_dilated_eval(src_plan, to_complex(src), dst, shift, scale);
    RField out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
    return out;
}

}  // namespace nlsd
