#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "nlsd/grid.hpp"

namespace nlsd {

using Cplx = std::complex<double>;
using CField = std::vector<Cplx>;
using RField = std::vector<double>;

/// Complex wavefunction sampled on a periodic grid. Values are the only
/// mutable part; a field is owned by one simulation at a time.
struct WaveField {
    Grid grid;
    CField values;
    double time = 0.0;

    WaveField(Grid g, CField v, double t = 0.0) : grid(std::move(g)), values(std::move(v)), time(t) {
        if (values.size() != grid.total_points())
            throw Error(ErrorClass::ConfigError, "field size does not match grid");
    }
    explicit WaveField(Grid g) : grid(std::move(g)), values(grid.total_points(), Cplx{0.0, 0.0}) {}
};

inline double charge(const Grid& grid, const CField& v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return s * grid.cell_volume();
}

inline double charge(const Grid& grid, const RField& v) {
    double s = 0.0;
    for (double u : v) s += u * u;
    return s * grid.cell_volume();
}

inline double charge(const WaveField& psi) { return charge(psi.grid, psi.values); }

inline double l2_norm(const Grid& grid, const RField& v) { return std::sqrt(charge(grid, v)); }
inline double l2_norm(const Grid& grid, const CField& v) { return std::sqrt(charge(grid, v)); }

inline RField modulus(const CField& v) {
    RField u(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) u[i] = std::abs(v[i]);
    return u;
}

inline CField to_complex(const RField& v) {
    CField u(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) u[i] = Cplx{v[i], 0.0};
    return u;
}

inline double max_abs(const CField& v) {
    double m = 0.0;
    for (const auto& z : v) m = std::max(m, std::abs(z));
    return m;
}

inline double max_abs(const RField& v) {
    double m = 0.0;
    for (double u : v) m = std::max(m, std::abs(u));
    return m;
}

/// Charge fraction in the outer shell where any coordinate is beyond 90% of
/// its half-extent; guards against the periodic images becoming visible.
inline double boundary_mass_fraction(const Grid& grid, const CField& v) {
    const std::size_t n = grid.total_points();
    std::size_t idx[8];
    double shell = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = std::norm(v[i]);
        total += w;
        grid.unflatten(i, idx);
        for (int a = 0; a < grid.dim(); ++a) {
            if (std::abs(grid.coord(a, idx[a])) > 0.45 * grid.extent(a)) {
                shell += w;
                break;
            }
        }
    }
    return total > 0.0 ? shell / total : 0.0;
}

}  // namespace nlsd
