#pragma once

#include <limits>
#include <numeric>

#include "nlsd/model.hpp"

namespace nlsd {

/// Sampled solution of qdd = -grad V(q) with its mechanical energy.
struct NewtonTrajectory {
    std::vector<double> t;
    std::vector<Point> q;
    std::vector<Point> p;
    std::vector<double> energy;  // |p|^2/2 + V(q)
};

namespace detail {

inline double mech_energy(const Potential& V, const Point& q, const Point& p) {
    double e = 0.5 * std::inner_product(p.begin(), p.end(), p.begin(), 0.0);
    return e + V.v(q.data(), static_cast<int>(q.size()));
}

inline void accel(const Potential& V, const Point& q, Point& a) {
    V.grad(q.data(), static_cast<int>(q.size()), a.data());
    for (auto& c : a) c = -c;
}

}  // namespace detail

/// Classical RK4 (or velocity Verlet when symplectic is set) with fixed dt.
/// EscapeDetected fires when |q| leaves the given radius, where a comparison
/// against a boxed run would stop being meaningful.
inline NewtonTrajectory integrate_newton(const Potential& V, Point q0, Point v, double T, double dt,
                                         double escape_radius = std::numeric_limits<double>::infinity(),
                                         std::size_t record_stride = 1, bool symplectic = false) {
    if (!(dt > 0.0) || !(T > 0.0)) throw Error(ErrorClass::ConfigError, "newton needs dt > 0 and T > 0");
    if (record_stride == 0) record_stride = 1;
    const auto nsteps = static_cast<std::size_t>(std::ceil(T / dt * (1.0 - 1e-12)));
    const std::size_t n = q0.size();

    NewtonTrajectory out;
    Point q = std::move(q0), p = std::move(v);
    Point a(n), k1q(n), k1p(n), k2q(n), k2p(n), k3q(n), k3p(n), k4q(n), k4p(n), tmp(n);

    auto record = [&](double t) {
        out.t.push_back(t);
        out.q.push_back(q);
        out.p.push_back(p);
        out.energy.push_back(detail::mech_energy(V, q, p));
    };
    auto check_escape = [&](double t) {
        double r2 = 0.0;
        for (double c : q) r2 += c * c;
        if (r2 > escape_radius * escape_radius) {
            std::ostringstream os;
            os << "|q| = " << std::sqrt(r2) << " left the comparison region at t = " << t;
            throw Error(ErrorClass::EscapeDetected, os.str());
        }
    };

    record(0.0);
    detail::accel(V, q, a);
    for (std::size_t k = 1; k <= nsteps; ++k) {
        if (symplectic) {
            // velocity Verlet
            for (std::size_t i = 0; i < n; ++i) p[i] += 0.5 * dt * a[i];
            for (std::size_t i = 0; i < n; ++i) q[i] += dt * p[i];
            detail::accel(V, q, a);
            for (std::size_t i = 0; i < n; ++i) p[i] += 0.5 * dt * a[i];
        } else {
            k1q = p;
            detail::accel(V, q, k1p);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = q[i] + 0.5 * dt * k1q[i];
            for (std::size_t i = 0; i < n; ++i) k2q[i] = p[i] + 0.5 * dt * k1p[i];
            detail::accel(V, tmp, k2p);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = q[i] + 0.5 * dt * k2q[i];
            for (std::size_t i = 0; i < n; ++i) k3q[i] = p[i] + 0.5 * dt * k2p[i];
            detail::accel(V, tmp, k3p);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = q[i] + dt * k3q[i];
            for (std::size_t i = 0; i < n; ++i) k4q[i] = p[i] + dt * k3p[i];
            detail::accel(V, tmp, k4p);
            for (std::size_t i = 0; i < n; ++i) {
                q[i] += dt / 6.0 * (k1q[i] + 2.0 * k2q[i] + 2.0 * k3q[i] + k4q[i]);
                p[i] += dt / 6.0 * (k1p[i] + 2.0 * k2p[i] + 2.0 * k3p[i] + k4p[i]);
            }
            detail::accel(V, q, a);
        }
        check_escape(static_cast<double>(k) * dt);
        if (k % record_stride == 0 || k == nsteps) record(static_cast<double>(k) * dt);
    }
    return out;
}

namespace detail {

/// Catmull-Rom interpolation of a uniformly sampled trajectory component.
inline double cubic_interp(const std::vector<double>& t, const std::vector<Point>& q, std::size_t axis,
                           double s) {
    const double t0 = t.front();
    const double dt = t.size() > 1 ? t[1] - t[0] : 1.0;
    const auto n = static_cast<long>(t.size());
    double u = (s - t0) / dt;
    long k = static_cast<long>(std::floor(u));
    k = std::max(0L, std::min(k, n - 2));
    u -= static_cast<double>(k);
    auto at = [&](long i) { return q[static_cast<std::size_t>(std::max(0L, std::min(i, n - 1)))][axis]; };
    const double p0 = at(k - 1), p1 = at(k), p2 = at(k + 1), p3 = at(k + 2);
    if (u < 1e-12) return p1;  // snap to nodes so identical streams compare exactly
    if (u > 1.0 - 1e-12) return p2;
    return 0.5 * ((2.0 * p1) + (-p0 + p2) * u + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * u * u +
                  (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * u * u * u);
}

}  // namespace detail

/// sup over the measured samples of |q_newton(t) - q(t)|; the reference is
/// resampled by cubic interpolation when the strides differ.
inline double trajectory_distance(const NewtonTrajectory& newton, const std::vector<double>& times,
                                  const std::vector<Point>& q_measured) {
    if (newton.t.empty() || times.empty())
        throw Error(ErrorClass::TimeMismatch, "empty trajectory");
    const double dtn = newton.t.size() > 1 ? newton.t[1] - newton.t[0] : 0.0;
    const double horizon_tol = std::max(dtn, 1e-9) * (1.0 + 1e-9);
    if (times.front() < newton.t.front() - horizon_tol || times.back() > newton.t.back() + horizon_tol) {
        std::ostringstream os;
        os << "measured horizon [" << times.front() << ", " << times.back()
           << "] is not covered by the reference [" << newton.t.front() << ", " << newton.t.back() << "]";
        throw Error(ErrorClass::TimeMismatch, os.str());
    }

    double sup = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        double d2 = 0.0;
        for (std::size_t a = 0; a < q_measured[i].size(); ++a) {
            const double qa = detail::cubic_interp(newton.t, newton.q, a, times[i]);
            const double d = qa - q_measured[i][a];
            d2 += d * d;
        }
        sup = std::max(sup, std::sqrt(d2));
    }
    return sup;
}

}  // namespace nlsd
