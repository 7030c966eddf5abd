#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nlsd/field.hpp"

namespace nlsd {

/// beta = 1 + (alpha - gamma)/2; the exponent tying the soliton width to the
/// scaling of the nonlinearity.
inline double derive_beta(double alpha, double gamma) { return 1.0 + 0.5 * (alpha - gamma); }

/// Scaling exponents governing a run. beta is always recomputed from
/// alpha and gamma, never stored.
struct ModelParams {
    double h = 1.0;
    double alpha = 0.0;
    double gamma = 0.0;
    double sigma = 1.0;
    int dim = 1;

    double beta() const { return derive_beta(alpha, gamma); }
    bool semiclassical_regime() const { return alpha > gamma; }

    /// ||u_h||^2 = h^charge_exponent * ||v||^2 under the profile rescaling.
    double charge_exponent() const { return dim * beta() - 2.0 * gamma; }
    /// J_h(u_h) = h^internal_energy_exponent * J_1(v).
    double internal_energy_exponent() const { return dim * beta() - alpha - gamma; }

    void validate() const {
        if (!(h > 0.0)) throw Error(ErrorClass::ConfigError, "h must be positive");
        if (!(sigma > 0.0)) throw Error(ErrorClass::ConfigError, "sigma must be positive");
        if (dim < 1) throw Error(ErrorClass::ConfigError, "dimension must be >= 1");
    }
};

/// Nonlinear term W evaluated on s = |psi|, with the metadata the
/// admissibility checks need. The growth constants of (W1) are carried but
/// never validated numerically.
struct Nonlinearity {
    std::string name;
    std::function<double(double)> w;    // W(s)
    std::function<double(double)> dw;   // W'(s)
    std::function<double(double)> ddw;  // W''(s)
    double growth_q = 0.0;
    double growth_p = 0.0;
    double nu = 0.0;         // lower-bound exponent, needs 2 < nu < 2 + 4/N
    double witness_s0 = 1.0; // point with W(s0) < 0

    /// W'(s)/s with the removable singularity at s = 0 filled by 0
    /// (W''(0) = 0 makes that the limit).
    double phase_rate(double s) const {
        if (s < 1e-300) return 0.0;
        return dw(s) / s;
    }
};

/// Focusing power nonlinearity W(s) = -s^p / p.
inline Nonlinearity focusing_power(double p) {
    Nonlinearity W;
    W.name = "focusing_power(p=" + std::to_string(p) + ")";
    W.w = [p](double s) { return -std::pow(s, p) / p; };
    W.dw = [p](double s) { return -std::pow(s, p - 1.0); };
    W.ddw = [p](double s) { return -(p - 1.0) * std::pow(s, p - 2.0); };
    W.growth_q = p;
    W.growth_p = p;
    W.nu = p;
    W.witness_s0 = 1.0;
    return W;
}

/// Negative control: quadratic admixture so W''(0) != 0.
inline Nonlinearity broken_w0_nonlinearity() {
    Nonlinearity W = focusing_power(4.0);
    W.name = "broken_w0";
    W.w = [](double s) { return -0.25 * s * s * s * s + 0.1 * s * s; };
    W.dw = [](double s) { return -s * s * s + 0.2 * s; };
    W.ddw = [](double s) { return -3.0 * s * s + 0.2; };
    return W;
}

/// External potential with analytic gradient and the radii/exponents used by
/// the growth probes.
struct Potential {
    std::string name;
    std::function<double(const double*, int)> v;
    std::function<void(const double*, int, double*)> grad;
    double R1 = 1.0;  // probes apply for |x| > R1
    double a = 1.5;   // V >= |x|^a beyond R1
    double b = 0.9;   // |grad V| <= V^b beyond R1

    double operator()(const Point& x) const { return v(x.data(), static_cast<int>(x.size())); }
    Point gradient(const Point& x) const {
        Point g(x.size());
        grad(x.data(), static_cast<int>(x.size()), g.data());
        return g;
    }

    RField sample(const Grid& grid) const {
        RField out(grid.total_points());
        double x[8];
        for (std::size_t i = 0; i < out.size(); ++i) {
            grid.point_at(i, x);
            out[i] = v(x, grid.dim());
        }
        return out;
    }
};

inline Potential zero_potential() {
    Potential V;
    V.name = "zero";
    V.v = [](const double*, int) { return 0.0; };
    V.grad = [](const double*, int n, double* g) {
        for (int a = 0; a < n; ++a) g[a] = 0.0;
    };
    V.R1 = 1.0;
    V.a = 1.5;
    V.b = 0.9;
    return V;
}

/// V(x) = kappa |x|^2 / 2.
inline Potential harmonic_potential(double kappa = 1.0) {
    Potential V;
    V.name = "harmonic";
    V.v = [kappa](const double* x, int n) {
        double r2 = 0.0;
        for (int a = 0; a < n; ++a) r2 += x[a] * x[a];
        return 0.5 * kappa * r2;
    };
    V.grad = [kappa](const double* x, int n, double* g) {
        for (int a = 0; a < n; ++a) g[a] = kappa * x[a];
    };
    V.R1 = 4.0;
    V.a = 1.5;
    V.b = 0.9;
    return V;
}

/// V(x) = c4 |x|^4 + c2 |x|^2; anharmonic once |x| > sqrt(c2/c4).
inline Potential quartic_potential(double c4 = 0.05, double c2 = 1.0) {
    Potential V;
    V.name = "quartic";
    V.v = [c4, c2](const double* x, int n) {
        double r2 = 0.0;
        for (int a = 0; a < n; ++a) r2 += x[a] * x[a];
        return c4 * r2 * r2 + c2 * r2;
    };
    V.grad = [c4, c2](const double* x, int n, double* g) {
        double r2 = 0.0;
        for (int a = 0; a < n; ++a) r2 += x[a] * x[a];
        for (int a = 0; a < n; ++a) g[a] = (4.0 * c4 * r2 + 2.0 * c2) * x[a];
    };
    V.R1 = 3.0;
    V.a = 2.0;
    V.b = 0.95;
    return V;
}

struct AssumptionItem {
    std::string name;
    bool pass = true;
    std::string detail;
};

struct AssumptionReport {
    std::vector<AssumptionItem> items;

    bool all_pass() const {
        for (const auto& it : items)
            if (!it.pass) return false;
        return true;
    }
    const AssumptionItem* find(const std::string& name) const {
        for (const auto& it : items)
            if (it.name == name) return &it;
        return nullptr;
    }
    std::string first_failure() const {
        for (const auto& it : items)
            if (!it.pass) return it.name + " " + it.detail;
        return {};
    }
};

/// (W0)-(W3) probes. Exact-zero conditions use tolerance 1e-12.
inline AssumptionReport validate_nonlinearity(const Nonlinearity& W, int dim) {
    AssumptionReport rep;
    const double tol = 1e-12;

    {
        AssumptionItem it{"(W0)", true, ""};
        const double w0 = std::abs(W.w(0.0)), dw0 = std::abs(W.dw(0.0)), ddw0 = std::abs(W.ddw(0.0));
        if (w0 > tol || dw0 > tol || ddw0 > tol) {
            it.pass = false;
            std::ostringstream os;
            os << "W,W',W'' at 0 = " << w0 << "," << dw0 << "," << ddw0;
            it.detail = os.str();
        }
        rep.items.push_back(it);
    }
    rep.items.push_back({"(W1)", true, "growth exponents stored as metadata only, unvalidated"});
    {
        AssumptionItem it{"(W2)", true, ""};
        const double limit = 2.0 + 4.0 / static_cast<double>(dim);
        if (!(W.nu > 2.0 && W.nu < limit)) {
            it.pass = false;
            std::ostringstream os;
            os << "nu = " << W.nu << " outside (2, " << limit << ") for N = " << dim;
            it.detail = os.str();
        }
        rep.items.push_back(it);
    }
    {
        AssumptionItem it{"(W3)", true, ""};
        if (!(W.w(W.witness_s0) < 0.0)) {
            it.pass = false;
            std::ostringstream os;
            os << "W(s0) = " << W.w(W.witness_s0) << " at witness s0 = " << W.witness_s0;
            it.detail = os.str();
        }
        rep.items.push_back(it);
    }
    return rep;
}

/// (V0)-(V2) sampled on the grid plus a finite-difference probe of the
/// analytic gradient at deterministic random points. The growth conditions
/// are about large |x|, so they are only checked where the box has samples
/// beyond R1.
inline AssumptionReport validate_potential(const Potential& V, const Grid& grid) {
    AssumptionReport rep;

    const std::size_t total = grid.total_points();
    const std::size_t stride = std::max<std::size_t>(1, total / 65536);
    double x[8], g[8];

    {
        AssumptionItem v0{"(V0)", true, ""};
        for (std::size_t i = 0; i < total; i += stride) {
            grid.point_at(i, x);
            const double val = V.v(x, grid.dim());
            if (val < 0.0) {
                std::ostringstream os;
                os << "V = " << val << " < 0 at sampled point";
                v0 = {"(V0)", false, os.str()};
                break;
            }
        }
        rep.items.push_back(v0);
    }

    AssumptionItem v1{"(V1)", true, ""};
    AssumptionItem v2{"(V2)", true, ""};
    std::size_t outer_samples = 0;
    for (std::size_t i = 0; i < total; i += stride) {
        grid.point_at(i, x);
        double r2 = 0.0;
        for (int a = 0; a < grid.dim(); ++a) r2 += x[a] * x[a];
        const double r = std::sqrt(r2);
        if (r <= V.R1) continue;
        ++outer_samples;
        const double val = V.v(x, grid.dim());
        V.grad(x, grid.dim(), g);
        double gn = 0.0;
        for (int a = 0; a < grid.dim(); ++a) gn += g[a] * g[a];
        gn = std::sqrt(gn);
        if (v1.pass && gn > std::pow(val, V.b) * (1.0 + 1e-12)) {
            std::ostringstream os;
            os << "|grad V| = " << gn << " > V^b = " << std::pow(val, V.b) << " at |x| = " << r;
            v1 = {"(V1)", false, os.str()};
        }
        if (v2.pass && val < std::pow(r, V.a) * (1.0 - 1e-12)) {
            std::ostringstream os;
            os << "V = " << val << " < |x|^a = " << std::pow(r, V.a) << " at |x| = " << r;
            v2 = {"(V2)", false, os.str()};
        }
    }
    if (outer_samples == 0) {
        v1.detail = v2.detail = "no grid samples beyond R1; growth probes vacuous";
    }
    rep.items.push_back(v1);
    rep.items.push_back(v2);

    {
        // centered finite differences vs the analytic gradient, fixed seed
        AssumptionItem fd{"(grad)", true, ""};
        std::mt19937 rng(12345);
        const double step = 1e-3;
        double xp[8], xm[8];
        for (int probe = 0; probe < 32 && fd.pass; ++probe) {
            for (int a = 0; a < grid.dim(); ++a) {
                std::uniform_real_distribution<double> u(-0.4 * grid.extent(a), 0.4 * grid.extent(a));
                x[a] = u(rng);
            }
            V.grad(x, grid.dim(), g);
            for (int a = 0; a < grid.dim(); ++a) {
                for (int c = 0; c < grid.dim(); ++c) xp[c] = xm[c] = x[c];
                xp[a] += step;
                xm[a] -= step;
                const double fdval = (V.v(xp, grid.dim()) - V.v(xm, grid.dim())) / (2.0 * step);
                if (std::abs(fdval - g[a]) > 1e-5 * (1.0 + std::abs(g[a]))) {
                    std::ostringstream os;
                    os << "axis " << a << ": analytic " << g[a] << " vs centered difference " << fdval;
                    fd = {"(grad)", false, os.str()};
                    break;
                }
            }
        }
        rep.items.push_back(fd);
    }
    return rep;
}

}  // namespace nlsd
