#pragma once

#include <fstream>

#include "nlsd/config.hpp"
#include "nlsd/diagnostics.hpp"
#include "nlsd/newton.hpp"

namespace nlsd {

inline constexpr const char* kTrajectorySchema = "nlsd-trajectory-v1";
inline constexpr const char* kNewtonSchema = "nlsd-newton-v1";
inline constexpr const char* kSummarySchema = "nlsd-summary-v1";

/// Fixed column order: t, q, qdot, qddot, H, charge, E, J, G, q_hat,
/// conc_fraction, boundary_mass, potential moments (raw and both
/// normalizations), spectral_tail. Doubles print with 17 significant digits
/// so a read-back is bit identical.
inline void write_trajectory_header(std::ostream& os, int dim) {
    os << "# " << kTrajectorySchema << "\n";
    auto vec = [&](const char* base) {
        std::string out;
        for (int a = 0; a < dim; ++a) {
            out += base;
            out += "_";
            out += std::to_string(a);
            out += ",";
        }
        return out;
    };
    os << "t," << vec("q") << vec("qdot") << vec("qddot") << vec("H") << "charge,E,J,G," << vec("qhat")
       << "conc_fraction,boundary_mass,potential_moment,moment_alpha_norm,moment_gamma_norm,"
          "spectral_tail\n";
}

inline void write_trajectory_row(std::ostream& os, const TrajectoryRecord& r, const ModelParams& p) {
    using detail::fmt_double;
    auto vec = [&](const Point& v) {
        std::string out;
        for (double c : v) {
            out += fmt_double(c);
            out += ",";
        }
        return out;
    };
    const double na = std::pow(p.h, p.dim * p.beta() - 2.0 * p.alpha);
    const double ng = std::pow(p.h, p.dim * p.beta() - 2.0 * p.gamma);
    os << fmt_double(r.t) << "," << vec(r.q) << vec(r.qdot) << vec(r.qddot) << vec(r.H)
       << fmt_double(r.charge) << "," << fmt_double(r.E) << "," << fmt_double(r.J) << ","
       << fmt_double(r.G) << "," << vec(r.q_hat) << fmt_double(r.conc_fraction) << ","
       << fmt_double(r.boundary_mass) << "," << fmt_double(r.potential_moment) << ","
       << fmt_double(r.potential_moment / na) << "," << fmt_double(r.potential_moment / ng) << ","
       << fmt_double(r.spectral_tail) << "\n";
}

inline std::vector<TrajectoryRecord> read_trajectory(const std::string& path, int dim) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorClass::IoError, "cannot open '" + path + "'");
    std::string line;
    if (!std::getline(is, line) || line.find(kTrajectorySchema) == std::string::npos)
        throw Error(ErrorClass::IoError, "'" + path + "' lacks the trajectory schema marker");
    std::getline(is, line);  // column names
    std::vector<TrajectoryRecord> out;
    const auto d = static_cast<std::size_t>(dim);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> cells;
        std::stringstream ss(line);
        std::string item;
        while (std::getline(ss, item, ',')) cells.push_back(detail::ConfigBinder::to_double(item));
        const std::size_t expect = 1 + 5 * d + 4 + 6;
        if (cells.size() != expect)
            throw Error(ErrorClass::IoError, "'" + path + "' row has " + std::to_string(cells.size()) +
                                                 " cells, expected " + std::to_string(expect));
        TrajectoryRecord r;
        std::size_t k = 0;
        r.t = cells[k++];
        auto take = [&](Point& v) {
            v.assign(cells.begin() + static_cast<long>(k), cells.begin() + static_cast<long>(k + d));
            k += d;
        };
        take(r.q);
        take(r.qdot);
        take(r.qddot);
        take(r.H);
        r.charge = cells[k++];
        r.E = cells[k++];
        r.J = cells[k++];
        r.G = cells[k++];
        take(r.q_hat);
        r.conc_fraction = cells[k++];
        r.boundary_mass = cells[k++];
        r.potential_moment = cells[k++];
        k += 2;  // normalized moments are derived
        r.spectral_tail = cells[k++];
        out.push_back(std::move(r));
    }
    return out;
}

inline void write_newton_csv(std::ostream& os, const NewtonTrajectory& traj) {
    using detail::fmt_double;
    const std::size_t d = traj.q.empty() ? 0 : traj.q.front().size();
    os << "# " << kNewtonSchema << "\n";
    os << "t,";
    for (std::size_t a = 0; a < d; ++a) os << "newton_q_" << a << ",";
    for (std::size_t a = 0; a < d; ++a) os << "newton_p_" << a << ",";
    os << "newton_energy\n";
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        os << fmt_double(traj.t[i]) << ",";
        for (std::size_t a = 0; a < d; ++a) os << fmt_double(traj.q[i][a]) << ",";
        for (std::size_t a = 0; a < d; ++a) os << fmt_double(traj.p[i][a]) << ",";
        os << fmt_double(traj.energy[i]) << "\n";
    }
}

inline NewtonTrajectory read_newton_csv(const std::string& path, int dim) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorClass::IoError, "cannot open '" + path + "'");
    std::string line;
    if (!std::getline(is, line) || line.find(kNewtonSchema) == std::string::npos)
        throw Error(ErrorClass::IoError, "'" + path + "' lacks the newton schema marker");
    std::getline(is, line);
    NewtonTrajectory out;
    const auto d = static_cast<std::size_t>(dim);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> cells;
        std::stringstream ss(line);
        std::string item;
        while (std::getline(ss, item, ',')) cells.push_back(detail::ConfigBinder::to_double(item));
        if (cells.size() != 2 + 2 * d)
            throw Error(ErrorClass::IoError, "'" + path + "' newton row size mismatch");
        out.t.push_back(cells[0]);
        out.q.emplace_back(cells.begin() + 1, cells.begin() + 1 + static_cast<long>(d));
        out.p.emplace_back(cells.begin() + 1 + static_cast<long>(d),
                           cells.begin() + 1 + 2 * static_cast<long>(d));
        out.energy.push_back(cells.back());
    }
    return out;
}

inline void write_summary(std::ostream& os, const std::vector<std::pair<std::string, std::string>>& rows) {
    os << "# " << kSummarySchema << "\n";
    os << "key,value\n";
    for (const auto& [k, v] : rows) os << k << "," << v << "\n";
}

inline std::map<std::string, std::string> read_summary(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorClass::IoError, "cannot open '" + path + "'");
    std::string line;
    if (!std::getline(is, line) || line.find(kSummarySchema) == std::string::npos)
        throw Error(ErrorClass::IoError, "'" + path + "' lacks the summary schema marker");
    std::getline(is, line);
    std::map<std::string, std::string> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) continue;
        out[line.substr(0, comma)] = line.substr(comma + 1);
    }
    return out;
}

}  // namespace nlsd
