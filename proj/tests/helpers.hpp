#pragma once

#include <cmath>
#include <random>

#include "nlsd/energy.hpp"
#include "nlsd/spectral.hpp"

namespace nlsd::test {

inline RField sech_profile(const Grid& grid, double amplitude = 1.0, double width = 1.0,
                           const Point& center = {}) {
    RField u(grid.total_points());
    double x[8];
    for (std::size_t i = 0; i < u.size(); ++i) {
        grid.point_at(i, x);
        double r2 = 0.0;
        for (int a = 0; a < grid.dim(); ++a) {
            const double c = center.empty() ? 0.0 : center[static_cast<std::size_t>(a)];
            r2 += (x[a] - c) * (x[a] - c);
        }
        u[i] = amplitude / std::cosh(std::sqrt(r2) / width);
    }
    return u;
}

inline RField gaussian_profile(const Grid& grid, double amplitude = 1.0, double width = 1.0,
                               const Point& center = {}) {
    RField u(grid.total_points());
    double x[8];
    for (std::size_t i = 0; i < u.size(); ++i) {
        grid.point_at(i, x);
        double r2 = 0.0;
        for (int a = 0; a < grid.dim(); ++a) {
            const double c = center.empty() ? 0.0 : center[static_cast<std::size_t>(a)];
            r2 += (x[a] - c) * (x[a] - c);
        }
        u[i] = amplitude * std::exp(-0.5 * r2 / (width * width));
    }
    return u;
}

/// Band-limited random real field: Gaussian spectrum on modes |m| <= n/8.
inline RField random_smooth_real(const SpectralPlan& plan, unsigned seed) {
    const Grid& g = plan.grid();
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    CField spec(g.total_points(), Cplx{0.0, 0.0});
    std::size_t idx[8];
    for (std::size_t i = 0; i < spec.size(); ++i) {
        g.unflatten(i, idx);
        bool keep = true;
        for (int a = 0; a < g.dim(); ++a) {
            const std::size_t n = g.axis_points(a);
            const std::size_t j = idx[static_cast<std::size_t>(a)];
            const std::size_t m = j <= n / 2 ? j : n - j;
            if (m > n / 8) keep = false;
        }
        if (keep) spec[i] = Cplx{gauss(rng), gauss(rng)};
    }
    CField f = plan.inverse(spec);
    RField out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i].real();
    return out;
}

inline CField random_smooth_complex(const SpectralPlan& plan, unsigned seed) {
    RField re = random_smooth_real(plan, seed);
    RField im = random_smooth_real(plan, seed + 1);
    CField out(re.size());
    for (std::size_t i = 0; i < re.size(); ++i) out[i] = Cplx{re[i], im[i]};
    return out;
}

/// Fourth-order centered difference along one axis, periodic wrap.
inline RField fd4_derivative(const Grid& grid, const RField& f, int axis) {
    RField out(f.size());
    const double dx = grid.spacing(axis);
    std::size_t idx[8];
    auto flatten = [&grid](const std::size_t* id) {
        std::size_t flat = 0;
        for (int a = 0; a < grid.dim(); ++a) flat = flat * grid.axis_points(a) + id[a];
        return flat;
    };
    for (std::size_t i = 0; i < f.size(); ++i) {
        grid.unflatten(i, idx);
        const std::size_t n = grid.axis_points(axis);
        std::size_t id2[8];
        for (int a = 0; a < grid.dim(); ++a) id2[a] = idx[a];
        auto at = [&](long off) {
            id2[axis] = static_cast<std::size_t>((static_cast<long>(idx[axis]) + off % static_cast<long>(n) +
                                                  static_cast<long>(n)) %
                                                 static_cast<long>(n));
            return f[flatten(id2)];
        };
        out[i] = (8.0 * (at(1) - at(-1)) - (at(2) - at(-2))) / (12.0 * dx);
    }
    return out;
}

inline double linf_diff(const RField& a, const RField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double linf_diff(const CField& a, const CField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double l2_diff(const Grid& g, const CField& a, const CField& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
    return std::sqrt(s * g.cell_volume());
}

inline double l2_diff(const Grid& g, const RField& a, const RField& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s * g.cell_volume());
}

}  // namespace nlsd::test
