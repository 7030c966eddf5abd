#pragma once

#include <cstddef>
#include <numbers>
#include <vector>

#include "nlsd/errors.hpp"

namespace nlsd {

using Point = std::vector<double>;

/// Uniform periodic box [-L/2, L/2)^N with its discrete Fourier lattice.
/// Extents and point counts are immutable after construction.
class Grid {
public:
    Grid(std::vector<double> extents, std::vector<std::size_t> points)
        : extents_(std::move(extents)), points_(std::move(points)) {
        if (extents_.empty() || extents_.size() != points_.size())
            throw Error(ErrorClass::ConfigError, "grid needs matching per-axis extents and point counts");
        coords_.resize(dim());
        waves_.resize(dim());
        for (int a = 0; a < dim(); ++a) {
            if (extents_[a] <= 0 || points_[a] < 2)
                throw Error(ErrorClass::ConfigError, "grid axis needs extent > 0 and >= 2 points");
            const std::size_t n = points_[a];
            const double L = extents_[a];
            const double dx = L / static_cast<double>(n);
            coords_[a].resize(n);
            waves_[a].resize(n);
            for (std::size_t j = 0; j < n; ++j) {
                coords_[a][j] = -0.5 * L + dx * static_cast<double>(j);
                // standard DFT ordering; the Nyquist mode is zeroed so spectral
                // derivatives of real fields stay real
                const long m = (j <= n / 2 - (n % 2 == 0 ? 1 : 0)) ? static_cast<long>(j)
                                                                   : static_cast<long>(j) - static_cast<long>(n);
                const bool nyquist = (n % 2 == 0) && (j == n / 2);
                waves_[a][j] = nyquist ? 0.0 : 2.0 * std::numbers::pi * static_cast<double>(m) / L;
            }
        }
    }

    static Grid cubic(int dim, double extent, std::size_t n) {
        return Grid(std::vector<double>(static_cast<std::size_t>(dim), extent),
                    std::vector<std::size_t>(static_cast<std::size_t>(dim), n));
    }

    int dim() const { return static_cast<int>(extents_.size()); }

    double extent(int axis) const { return extents_[static_cast<std::size_t>(axis)]; }
    std::size_t axis_points(int axis) const { return points_[static_cast<std::size_t>(axis)]; }
    double spacing(int axis) const {
        return extents_[static_cast<std::size_t>(axis)] / static_cast<double>(points_[static_cast<std::size_t>(axis)]);
    }

    double min_spacing() const {
        double m = spacing(0);
        for (int a = 1; a < dim(); ++a) m = std::min(m, spacing(a));
        return m;
    }
    double max_spacing() const {
        double m = spacing(0);
        for (int a = 1; a < dim(); ++a) m = std::max(m, spacing(a));
        return m;
    }

    std::size_t total_points() const {
        std::size_t n = 1;
        for (auto p : points_) n *= p;
        return n;
    }

    /// Quadrature weight dx^N of one cell.
    double cell_volume() const {
        double w = 1.0;
        for (int a = 0; a < dim(); ++a) w *= spacing(a);
        return w;
    }

    double coord(int axis, std::size_t j) const { return coords_[static_cast<std::size_t>(axis)][j]; }
    double wavenumber(int axis, std::size_t j) const { return waves_[static_cast<std::size_t>(axis)][j]; }
    const std::vector<double>& coords(int axis) const { return coords_[static_cast<std::size_t>(axis)]; }
    const std::vector<double>& wavenumbers(int axis) const { return waves_[static_cast<std::size_t>(axis)]; }

    /// Row-major decomposition of a flat index into per-axis indices.
    void unflatten(std::size_t flat, std::size_t* idx) const {
        for (int a = dim() - 1; a >= 0; --a) {
            const std::size_t n = points_[static_cast<std::size_t>(a)];
            idx[a] = flat % n;
            flat /= n;
        }
    }

    void point_at(std::size_t flat, double* x) const {
        std::size_t idx[8];
        unflatten(flat, idx);
        for (int a = 0; a < dim(); ++a) x[a] = coord(a, idx[a]);
    }

    /// Minimum-image distance squared between two box points.
    double periodic_dist_sq(const double* x, const double* y) const {
        double d2 = 0.0;
        for (int a = 0; a < dim(); ++a) {
            double d = std::abs(x[a] - y[a]);
            const double L = extent(a);
            if (d > 0.5 * L) d = L - d;
            d2 += d * d;
        }
        return d2;
    }

    bool operator==(const Grid& o) const { return extents_ == o.extents_ && points_ == o.points_; }
    bool operator!=(const Grid& o) const { return !(*this == o); }

private:
    std::vector<double> extents_;
    std::vector<std::size_t> points_;
    std::vector<std::vector<double>> coords_;
    std::vector<std::vector<double>> waves_;
};

}  // namespace nlsd
