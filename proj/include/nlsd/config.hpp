#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "nlsd/initial_data.hpp"
#include "nlsd/propagator.hpp"

namespace nlsd {

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += fmt_double(v[i]);
    }
    return out;
}

inline std::string fmt_list(const std::vector<std::size_t>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(v[i]);
    }
    return out;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Declarative description of one experiment: grids, model exponents, the
/// nonlinearity and potential presets, initial data, time stepping, outputs
/// and every monitor threshold. Unknown keys are parse errors.
struct ExperimentConfig {
    // [grid]
    int dim = 1;
    std::vector<double> extent{40.0};
    std::vector<std::size_t> points{2048};
    // [ground_state]
    std::vector<double> gs_extent;        // empty: same as grid
    std::vector<std::size_t> gs_points;   // empty: same as grid
    double gs_tau = 0.1;
    std::size_t gs_max_iterations = 100000;
    double gs_residual_tol = 1e-8;
    // [model]
    double alpha = 1.0;
    double gamma = 0.0;
    double sigma = 2.0;
    std::vector<double> h_values{0.4, 0.2, 0.1};
    // [nonlinearity]
    std::string w_preset = "focusing_power";
    double w_power = 4.0;
    // [potential]
    std::string v_preset = "harmonic";
    double v_kappa = 1.0;
    double v_c4 = 0.05;
    double v_c2 = 1.0;
    bool probe_assumptions = true;
    // [initial_data]
    std::vector<double> q0{1.0};
    std::vector<double> velocity{0.0};
    double perturbation_amplitude = 0.0;
    double perturbation_radius = 3.0;
    double perturbation_width = 1.0;
    double K = 1.0;
    double boundary_margin = 0.2;
    // [time]
    double T = 10.0;
    double dt = 0.0;  // 0: half-radian rule
    std::size_t sample_stride = 10;
    // [newton]
    double newton_dt = 0.0;  // 0: the sampling interval
    bool newton_symplectic = false;
    // [output]
    std::string directory = "out";
    bool write_trajectory = true;
    bool write_newton = true;
    // [tolerances]
    double charge_drift = 1e-8;
    double energy_drift = 1e-4;
    double boundary_mass = 1e-6;
    double spectral_tail = 1e-8;
    double blowup_factor = 10.0;
    double conc_epsilon = 1e-2;
    double decay_slack = 0.05;
    double residual_floor = 1e-6;

    bool operator==(const ExperimentConfig&) const = default;

    Grid run_grid() const {
        auto e = extent;
        auto n = points;
        if (static_cast<int>(e.size()) == 1 && dim > 1) e.assign(static_cast<std::size_t>(dim), e[0]);
        if (static_cast<int>(n.size()) == 1 && dim > 1) n.assign(static_cast<std::size_t>(dim), n[0]);
        return Grid(e, n);
    }

    Grid reference_grid() const {
        auto e = gs_extent.empty() ? extent : gs_extent;
        auto n = gs_points.empty() ? points : gs_points;
        if (static_cast<int>(e.size()) == 1 && dim > 1) e.assign(static_cast<std::size_t>(dim), e[0]);
        if (static_cast<int>(n.size()) == 1 && dim > 1) n.assign(static_cast<std::size_t>(dim), n[0]);
        return Grid(e, n);
    }

    ModelParams params_for(double h) const {
        return ModelParams{h, alpha, gamma, sigma, dim};
    }

    Nonlinearity nonlinearity() const {
        if (w_preset == "focusing_power") return focusing_power(w_power);
        if (w_preset == "broken_w0") return broken_w0_nonlinearity();
        throw Error(ErrorClass::ConfigError, "unknown nonlinearity preset '" + w_preset + "'");
    }

    Potential potential() const {
        if (v_preset == "zero") return zero_potential();
        if (v_preset == "harmonic") return harmonic_potential(v_kappa);
        if (v_preset == "quartic") return quartic_potential(v_c4, v_c2);
        throw Error(ErrorClass::ConfigError, "unknown potential preset '" + v_preset + "'");
    }

    InitialDatumSpec datum_spec(double h) const {
        Point q = q0, v = velocity;
        if (static_cast<int>(q.size()) == 1 && dim > 1) q.assign(static_cast<std::size_t>(dim), q[0]);
        if (static_cast<int>(v.size()) == 1 && dim > 1) v.assign(static_cast<std::size_t>(dim), v[0]);
        return InitialDatumSpec{q,
                                v,
                                params_for(h),
                                K,
                                {perturbation_amplitude, perturbation_radius, perturbation_width},
                                boundary_margin};
    }

    MonitorThresholds thresholds() const {
        return MonitorThresholds{charge_drift, energy_drift, boundary_mass, spectral_tail, blowup_factor};
    }

    void validate() const {
        if (dim < 1 || dim > 3) throw Error(ErrorClass::ConfigError, "dim must be 1, 2 or 3");
        if (h_values.empty()) throw Error(ErrorClass::ConfigError, "h_values must not be empty");
        for (double h : h_values)
            if (!(h > 0.0)) throw Error(ErrorClass::ConfigError, "h values must be positive");
        for (std::size_t i = 1; i < h_values.size(); ++i)
            if (!(h_values[i] < h_values[i - 1]))
                throw Error(ErrorClass::ConfigError, "h values must be strictly decreasing");
        if (!(sigma > 0.0)) throw Error(ErrorClass::ConfigError, "sigma must be positive");
        if (!(T > 0.0)) throw Error(ErrorClass::ConfigError, "T must be positive");
        if (sample_stride == 0) throw Error(ErrorClass::ConfigError, "sample_stride must be >= 1");
        (void)run_grid();
        (void)reference_grid();
        (void)nonlinearity();
        (void)potential();
    }
};

namespace detail {

struct ConfigBinder {
    ExperimentConfig& c;

    template <typename F>
    void with_key(const std::string& section, const std::string& key, const std::string& value, F&& set) {
        (void)section;
        (void)key;
        set(value);
    }

    static double to_double(const std::string& s) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (trim(s.substr(pos)).empty()) return v;
        } catch (...) {
        }
        throw Error(ErrorClass::ConfigError, "bad number '" + s + "'");
    }

    static std::size_t to_size(const std::string& s) {
        try {
            std::size_t pos = 0;
            const long long v = std::stoll(s, &pos);
            if (trim(s.substr(pos)).empty() && v >= 0) return static_cast<std::size_t>(v);
        } catch (...) {
        }
        throw Error(ErrorClass::ConfigError, "bad integer '" + s + "'");
    }

    static bool to_bool(const std::string& s) {
        if (s == "true" || s == "1" || s == "yes") return true;
        if (s == "false" || s == "0" || s == "no") return false;
        throw Error(ErrorClass::ConfigError, "bad boolean '" + s + "'");
    }

    static std::vector<double> to_dlist(const std::string& s) {
        std::vector<double> out;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item)));
        if (out.empty()) throw Error(ErrorClass::ConfigError, "empty list");
        return out;
    }

    static std::vector<std::size_t> to_slist(const std::string& s) {
        std::vector<std::size_t> out;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(to_size(trim(item)));
        if (out.empty()) throw Error(ErrorClass::ConfigError, "empty list");
        return out;
    }

    bool assign(const std::string& sec, const std::string& key, const std::string& val) {
        auto is = [&](const char* s, const char* k) { return sec == s && key == k; };
        if (is("grid", "dim")) c.dim = static_cast<int>(to_size(val));
        else if (is("grid", "extent")) c.extent = to_dlist(val);
        else if (is("grid", "points")) c.points = to_slist(val);
        else if (is("ground_state", "extent")) c.gs_extent = to_dlist(val);
        else if (is("ground_state", "points")) c.gs_points = to_slist(val);
        else if (is("ground_state", "tau")) c.gs_tau = to_double(val);
        else if (is("ground_state", "max_iterations")) c.gs_max_iterations = to_size(val);
        else if (is("ground_state", "residual_tol")) c.gs_residual_tol = to_double(val);
        else if (is("model", "alpha")) c.alpha = to_double(val);
        else if (is("model", "gamma")) c.gamma = to_double(val);
        else if (is("model", "sigma")) c.sigma = to_double(val);
        else if (is("model", "h_values")) c.h_values = to_dlist(val);
        else if (is("nonlinearity", "preset")) c.w_preset = val;
        else if (is("nonlinearity", "power")) c.w_power = to_double(val);
        else if (is("potential", "preset")) c.v_preset = val;
        else if (is("potential", "kappa")) c.v_kappa = to_double(val);
        else if (is("potential", "c4")) c.v_c4 = to_double(val);
        else if (is("potential", "c2")) c.v_c2 = to_double(val);
        else if (is("potential", "probe_assumptions")) c.probe_assumptions = to_bool(val);
        else if (is("initial_data", "q0")) c.q0 = to_dlist(val);
        else if (is("initial_data", "velocity")) c.velocity = to_dlist(val);
        else if (is("initial_data", "perturbation_amplitude")) c.perturbation_amplitude = to_double(val);
        else if (is("initial_data", "perturbation_radius")) c.perturbation_radius = to_double(val);
        else if (is("initial_data", "perturbation_width")) c.perturbation_width = to_double(val);
        else if (is("initial_data", "K")) c.K = to_double(val);
        else if (is("initial_data", "boundary_margin")) c.boundary_margin = to_double(val);
        else if (is("time", "T")) c.T = to_double(val);
        else if (is("time", "dt")) c.dt = to_double(val);
        else if (is("time", "sample_stride")) c.sample_stride = to_size(val);
        else if (is("newton", "dt")) c.newton_dt = to_double(val);
        else if (is("newton", "symplectic")) c.newton_symplectic = to_bool(val);
        else if (is("output", "directory")) c.directory = val;
        else if (is("output", "write_trajectory")) c.write_trajectory = to_bool(val);
        else if (is("output", "write_newton")) c.write_newton = to_bool(val);
        else if (is("tolerances", "charge_drift")) c.charge_drift = to_double(val);
        else if (is("tolerances", "energy_drift")) c.energy_drift = to_double(val);
        else if (is("tolerances", "boundary_mass")) c.boundary_mass = to_double(val);
        else if (is("tolerances", "spectral_tail")) c.spectral_tail = to_double(val);
        else if (is("tolerances", "blowup_factor")) c.blowup_factor = to_double(val);
        else if (is("tolerances", "conc_epsilon")) c.conc_epsilon = to_double(val);
        else if (is("tolerances", "decay_slack")) c.decay_slack = to_double(val);
        else if (is("tolerances", "residual_floor")) c.residual_floor = to_double(val);
        else return false;
        return true;
    }
};

}  // namespace detail

inline ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig c;
    detail::ConfigBinder binder{c};
    std::istringstream in(text);
    std::string line, section;
    std::size_t lineno = 0;
    static const std::vector<std::string> known_sections{
        "grid",         "ground_state", "model",  "nonlinearity", "potential",
        "initial_data", "time",         "newton", "output",       "tolerances"};
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw Error(ErrorClass::ConfigError, "line " + std::to_string(lineno) + ": bad section header");
            section = detail::trim(line.substr(1, line.size() - 2));
            bool known = false;
            for (const auto& s : known_sections) known |= (s == section);
            if (!known)
                throw Error(ErrorClass::ConfigError,
                            "line " + std::to_string(lineno) + ": unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorClass::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (section.empty())
            throw Error(ErrorClass::ConfigError, "line " + std::to_string(lineno) + ": key outside a section");
        if (!binder.assign(section, key, val))
            throw Error(ErrorClass::ConfigError, "line " + std::to_string(lineno) + ": unknown key '" + key +
                                                     "' in section [" + section + "]");
    }
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorClass::IoError, "cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

inline std::string serialize_config(const ExperimentConfig& c) {
    using detail::fmt_double;
    using detail::fmt_list;
    std::ostringstream os;
    os << "[grid]\n";
    os << "dim = " << c.dim << "\n";
    os << "extent = " << fmt_list(c.extent) << "\n";
    os << "points = " << fmt_list(c.points) << "\n";
    os << "\n[ground_state]\n";
    if (!c.gs_extent.empty()) os << "extent = " << fmt_list(c.gs_extent) << "\n";
    if (!c.gs_points.empty()) os << "points = " << fmt_list(c.gs_points) << "\n";
    os << "tau = " << fmt_double(c.gs_tau) << "\n";
    os << "max_iterations = " << c.gs_max_iterations << "\n";
    os << "residual_tol = " << fmt_double(c.gs_residual_tol) << "\n";
    os << "\n[model]\n";
    os << "alpha = " << fmt_double(c.alpha) << "\n";
    os << "gamma = " << fmt_double(c.gamma) << "\n";
    os << "sigma = " << fmt_double(c.sigma) << "\n";
    os << "h_values = " << fmt_list(c.h_values) << "\n";
    os << "\n[nonlinearity]\n";
    os << "preset = " << c.w_preset << "\n";
    os << "power = " << fmt_double(c.w_power) << "\n";
    os << "\n[potential]\n";
    os << "preset = " << c.v_preset << "\n";
    os << "kappa = " << fmt_double(c.v_kappa) << "\n";
    os << "c4 = " << fmt_double(c.v_c4) << "\n";
    os << "c2 = " << fmt_double(c.v_c2) << "\n";
    os << "probe_assumptions = " << (c.probe_assumptions ? "true" : "false") << "\n";
    os << "\n[initial_data]\n";
    os << "q0 = " << fmt_list(c.q0) << "\n";
    os << "velocity = " << fmt_list(c.velocity) << "\n";
    os << "perturbation_amplitude = " << fmt_double(c.perturbation_amplitude) << "\n";
    os << "perturbation_radius = " << fmt_double(c.perturbation_radius) << "\n";
    os << "perturbation_width = " << fmt_double(c.perturbation_width) << "\n";
    os << "K = " << fmt_double(c.K) << "\n";
    os << "boundary_margin = " << fmt_double(c.boundary_margin) << "\n";
    os << "\n[time]\n";
    os << "T = " << fmt_double(c.T) << "\n";
    os << "dt = " << fmt_double(c.dt) << "\n";
    os << "sample_stride = " << c.sample_stride << "\n";
    os << "\n[newton]\n";
    os << "dt = " << fmt_double(c.newton_dt) << "\n";
    os << "symplectic = " << (c.newton_symplectic ? "true" : "false") << "\n";
    os << "\n[output]\n";
    os << "directory = " << c.directory << "\n";
    os << "write_trajectory = " << (c.write_trajectory ? "true" : "false") << "\n";
    os << "write_newton = " << (c.write_newton ? "true" : "false") << "\n";
    os << "\n[tolerances]\n";
    os << "charge_drift = " << fmt_double(c.charge_drift) << "\n";
    os << "energy_drift = " << fmt_double(c.energy_drift) << "\n";
    os << "boundary_mass = " << fmt_double(c.boundary_mass) << "\n";
    os << "spectral_tail = " << fmt_double(c.spectral_tail) << "\n";
    os << "blowup_factor = " << fmt_double(c.blowup_factor) << "\n";
    os << "conc_epsilon = " << fmt_double(c.conc_epsilon) << "\n";
    os << "decay_slack = " << fmt_double(c.decay_slack) << "\n";
    os << "residual_floor = " << fmt_double(c.residual_floor) << "\n";
    return os.str();
}

}  // namespace nlsd
