#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <thread>

#include "nlsd/csv.hpp"
#include "nlsd/field_io.hpp"

namespace nlsd {

inline std::string h_tag(double h) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", h);
    return buf;
}

/// Load the persisted ground state when it matches the config, solve and
/// persist otherwise. The solve is deterministic, so repeated calls produce
/// identical files.
inline GroundState obtain_ground_state(const ExperimentConfig& cfg, bool force_solve = false) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.directory);
    const std::string path = (fs::path(cfg.directory) / "ground_state.fld").string();
    const Grid ref = cfg.reference_grid();
    if (!force_solve && fs::exists(path)) {
        GroundState gs = load_ground_state(path);
        if (gs.grid == ref && gs.sigma == cfg.sigma) return gs;
    }
    SolverOptions opts;
    opts.tau = cfg.gs_tau;
    opts.max_iterations = cfg.gs_max_iterations;
    opts.residual_tol = cfg.gs_residual_tol;
    GroundState gs = minimize_on_sphere(cfg.nonlinearity(), cfg.sigma, ref, opts);
    save_ground_state(path, gs);
    return gs;
}

struct RunResult {
    double h = 0.0;
    bool valid = false;
    std::string failure_class;
    std::string failure_message;
    double sup_H = 0.0;
    double sup_newton_dist = 0.0;
    double max_charge_drift = 0.0;
    double max_energy_drift = 0.0;
    double max_boundary_mass = 0.0;
    double max_spectral_tail = 0.0;
    double max_conc_fraction = 0.0;
    double conc_radius = 0.0;
    double dt_used = 0.0;
    std::size_t steps = 0;
    double runtime_sec = 0.0;
    std::vector<TrajectoryRecord> records;
    AdmissibilityReport admissibility;
};

namespace detail {

inline double norm2(const Point& v) {
    double s = 0.0;
    for (double c : v) s += c * c;
    return std::sqrt(s);
}

inline void accumulate_maxima(RunResult& r) {
    if (r.records.empty()) return;
    const double c0 = r.records.front().charge;
    const double e0 = r.records.front().E;
    double escale = std::max(std::abs(e0), 1e-30);
    for (const auto& rec : r.records) {
        r.sup_H = std::max(r.sup_H, norm2(rec.H));
        r.max_charge_drift = std::max(r.max_charge_drift, std::abs(rec.charge - c0) / c0);
        r.max_energy_drift = std::max(r.max_energy_drift, std::abs(rec.E - e0) / escale);
        r.max_boundary_mass = std::max(r.max_boundary_mass, rec.boundary_mass);
        r.max_spectral_tail = std::max(r.max_spectral_tail, rec.spectral_tail);
        r.max_conc_fraction = std::max(r.max_conc_fraction, rec.conc_fraction);
    }
}

inline void write_run_summary(const std::string& path, const RunResult& r, const ExperimentConfig& cfg) {
    using detail::fmt_double;
    std::vector<std::pair<std::string, std::string>> rows;
    rows.emplace_back("h", fmt_double(r.h));
    rows.emplace_back("valid", r.valid ? "true" : "false");
    if (!r.failure_class.empty()) {
        rows.emplace_back("failure_class", r.failure_class);
        rows.emplace_back("failure_message", r.failure_message);
    }
    rows.emplace_back("dt", fmt_double(r.dt_used));
    rows.emplace_back("steps", std::to_string(r.steps));
    rows.emplace_back("sample_stride", std::to_string(cfg.sample_stride));
    rows.emplace_back("conc_radius", fmt_double(r.conc_radius));
    rows.emplace_back("sup_H", fmt_double(r.sup_H));
    rows.emplace_back("sup_newton_dist", fmt_double(r.sup_newton_dist));
    rows.emplace_back("max_charge_drift", fmt_double(r.max_charge_drift));
    rows.emplace_back("max_energy_drift", fmt_double(r.max_energy_drift));
    rows.emplace_back("max_boundary_mass", fmt_double(r.max_boundary_mass));
    rows.emplace_back("max_spectral_tail", fmt_double(r.max_spectral_tail));
    rows.emplace_back("max_conc_fraction", fmt_double(r.max_conc_fraction));
    rows.emplace_back("runtime_sec", fmt_double(r.runtime_sec));
    for (const auto& item : r.admissibility.items) {
        rows.emplace_back("admissible." + item.name, item.pass ? "true" : "false");
        rows.emplace_back("admissible." + item.name + ".measured", fmt_double(item.measured));
        rows.emplace_back("admissible." + item.name + ".bound", fmt_double(item.bound));
    }
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw Error(ErrorClass::IoError, "cannot write '" + path + "'");
    write_summary(os, rows);
}

}  // namespace detail

/// One full run at a given h: datum construction, admissibility report,
/// propagation with monitors, the matching Newton reference, persisted
/// trajectory/newton/summary files plus a resume checkpoint. Monitor
/// failures propagate after the checkpoint is written.
inline RunResult run_experiment(const ExperimentConfig& cfg, double h, const GroundState& gs,
                                const SpectralPlan& ref_plan, const std::string& resume_path = {}) {
    namespace fs = std::filesystem;
    const auto t_start = std::chrono::steady_clock::now();
    fs::create_directories(cfg.directory);

    RunResult result;
    result.h = h;
    const ModelParams p = cfg.params_for(h);
    p.validate();
    const Nonlinearity W = cfg.nonlinearity();
    const Potential V = cfg.potential();
    const Grid run = cfg.run_grid();

    if (cfg.probe_assumptions) {
        auto wrep = validate_nonlinearity(W, cfg.dim);
        if (!wrep.all_pass())
            throw Error(ErrorClass::AssumptionViolation, "nonlinearity probe failed: " + wrep.first_failure());
        auto vrep = validate_potential(V, run);
        if (!vrep.all_pass())
            throw Error(ErrorClass::AssumptionViolation, "potential probe failed: " + vrep.first_failure());
    }

    const InitialDatumSpec spec = cfg.datum_spec(h);
    const RField vs_ref = V.sample(ref_plan.grid());
    const RField w0 = make_perturbation(ref_plan, gs, p, spec.K, spec.perturbation, vs_ref);

    WaveField psi0 = build_initial_datum(spec, gs, ref_plan, w0, run);
    result.admissibility = validate_admissibility(psi0, spec, gs, ref_plan, w0, V);

    double t0 = 0.0;
    if (!resume_path.empty()) {
        WaveField resumed = load_checkpoint(resume_path);
        if (resumed.grid != run)
            throw Error(ErrorClass::ConfigError, "checkpoint grid does not match the config");
        t0 = resumed.time;
        psi0 = std::move(resumed);
        if (t0 >= cfg.T) throw Error(ErrorClass::ConfigError, "checkpoint already reached the horizon");
    }

    auto plan = std::make_shared<const SpectralPlan>(run);
    const RField vs_run = V.sample(run);
    const double dt = cfg.dt > 0.0 ? cfg.dt : default_time_step(*plan, psi0, p, W, vs_run);
    result.dt_used = dt;

    result.conc_radius = calibrate_concentration_radius(*plan, psi0.values, cfg.conc_epsilon);
    DiagnosticsContext ctx(*plan, p, W, V, result.conc_radius);

    PropagatorState st{WaveField(run), p, W, dt, plan, {}, cfg.thresholds()};
    st.psi = std::move(psi0);
    st.v_samples = vs_run;
    detail::cache_kinetic_phase(st);
    st.charge0 = charge(st.psi);
    st.energy0 = total_energy(*plan, st.psi, p, W, vs_run);
    st.energy_scale0 = std::max(std::abs(st.energy0), 1e-30);
    st.modmax0 = max_abs(st.psi.values);

    const std::string tag = h_tag(h);
    const std::string traj_path = (fs::path(cfg.directory) / ("trajectory_h" + tag + ".csv")).string();
    const std::string newton_path = (fs::path(cfg.directory) / ("newton_h" + tag + ".csv")).string();
    const std::string summary_path = (fs::path(cfg.directory) / ("summary_h" + tag + ".csv")).string();
    const std::string checkpoint_path = (fs::path(cfg.directory) / ("checkpoint_h" + tag + ".fld")).string();

    std::ofstream traj;
    if (cfg.write_trajectory) {
        traj.open(traj_path, resume_path.empty() ? std::ios::trunc : std::ios::app);
        if (!traj) throw Error(ErrorClass::IoError, "cannot write '" + traj_path + "'");
        if (resume_path.empty()) write_trajectory_header(traj, cfg.dim);
    }

    const double horizon = cfg.T - t0;
    try {
        evolve(st, horizon, cfg.sample_stride, ctx, [&](const TrajectoryRecord& rec) {
            result.records.push_back(rec);
            if (cfg.write_trajectory) write_trajectory_row(traj, rec, p);
        });
    } catch (const Error&) {
        save_checkpoint(checkpoint_path, st.psi);  // resumable state at the failure step
        throw;
    }
    result.steps = st.step_index;
    save_checkpoint(checkpoint_path, st.psi);

    // matching Newton reference on the same horizon
    {
        const InitialDatumSpec& s = spec;
        double escape = 0.45 * run.extent(0);
        for (int a = 1; a < run.dim(); ++a) escape = std::min(escape, 0.45 * run.extent(a));
        const double sample_dt = dt * static_cast<double>(cfg.sample_stride);
        const double ndt = cfg.newton_dt > 0.0 ? cfg.newton_dt : sample_dt;
        NewtonTrajectory newton =
            integrate_newton(V, s.q0, s.v, cfg.T, ndt, escape, 1, cfg.newton_symplectic);
        if (cfg.write_newton) {
            std::ofstream os(newton_path, std::ios::trunc);
            if (!os) throw Error(ErrorClass::IoError, "cannot write '" + newton_path + "'");
            write_newton_csv(os, newton);
        }
        std::vector<double> times;
        std::vector<Point> qs;
        for (const auto& rec : result.records) {
            times.push_back(rec.t);
            qs.push_back(rec.q);
        }
        result.sup_newton_dist = trajectory_distance(newton, times, qs);
    }

    detail::accumulate_maxima(result);
    result.valid = true;
    result.runtime_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    detail::write_run_summary(summary_path, result, cfg);
    return result;
}

struct SweepVerdicts {
    bool h_decay_ok = false;
    bool dist_decay_ok = false;
    bool at_floor = false;  // every sup_H below the discretization floor
};

struct SweepReport {
    std::vector<RunResult> runs;
    SweepVerdicts verdicts;
    std::size_t valid_runs = 0;
};

namespace detail {

inline void write_sweep_files(const ExperimentConfig& cfg, const SweepReport& report) {
    namespace fs = std::filesystem;
    using detail::fmt_double;
    {
        std::ofstream os(fs::path(cfg.directory) / "report.csv", std::ios::trunc);
        os << "# nlsd-sweep-v1\n";
        os << "h,valid,failure,sup_H,sup_newton_dist,max_charge_drift,max_energy_drift,"
              "max_boundary_mass,max_spectral_tail,max_conc_fraction,conc_radius,dt,steps,"
              "runtime_sec\n";
        for (const auto& r : report.runs) {
            os << fmt_double(r.h) << "," << (r.valid ? "true" : "false") << "," << r.failure_class << ","
               << fmt_double(r.sup_H) << "," << fmt_double(r.sup_newton_dist) << ","
               << fmt_double(r.max_charge_drift) << "," << fmt_double(r.max_energy_drift) << ","
               << fmt_double(r.max_boundary_mass) << "," << fmt_double(r.max_spectral_tail) << ","
               << fmt_double(r.max_conc_fraction) << "," << fmt_double(r.conc_radius) << ","
               << fmt_double(r.dt_used) << "," << std::to_string(r.steps) << ","
               << fmt_double(r.runtime_sec) << "\n";
        }
    }
    {
        std::vector<std::pair<std::string, std::string>> rows;
        rows.emplace_back("h_decay_ok", report.verdicts.h_decay_ok ? "true" : "false");
        rows.emplace_back("dist_decay_ok", report.verdicts.dist_decay_ok ? "true" : "false");
        rows.emplace_back("at_floor", report.verdicts.at_floor ? "true" : "false");
        rows.emplace_back("valid_runs", std::to_string(report.valid_runs));
        std::ofstream os(fs::path(cfg.directory) / "sweep_summary.csv", std::ios::trunc);
        write_summary(os, rows);
    }
}

}  // namespace detail

/// Runs every h concurrently, assembles the per-h table and the decay
/// verdicts: sup_t |H_h| and sup_t |q - q_newton| must fall along the sweep
/// (strict comparison with the configured noise slack). Runs killed by a
/// monitor are marked invalid and excluded from the verdict.
inline SweepReport run_sweep(const ExperimentConfig& cfg, std::size_t threads = 0) {
    cfg.validate();
    if (cfg.h_values.size() < 3)
        throw Error(ErrorClass::InsufficientPoints, "a sweep needs at least 3 h values");

    GroundState gs = obtain_ground_state(cfg);
    SpectralPlan ref_plan(gs.grid);

    SweepReport report;
    report.runs.resize(cfg.h_values.size());
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<std::size_t>(threads, cfg.h_values.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cfg.h_values.size()) return;
            const double h = cfg.h_values[i];
            try {
                report.runs[i] = run_experiment(cfg, h, gs, ref_plan);
            } catch (const Error& e) {
                report.runs[i].h = h;
                report.runs[i].valid = false;
                report.runs[i].failure_class = to_string(e.error_class());
                report.runs[i].failure_message = e.what();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::vector<const RunResult*> valid;
    for (const auto& r : report.runs)
        if (r.valid) valid.push_back(&r);
    report.valid_runs = valid.size();
    if (valid.size() < 3)
        throw Error(ErrorClass::InsufficientPoints,
                    "only " + std::to_string(valid.size()) + " valid runs; need at least 3");

    auto decays = [&](auto get) {
        for (std::size_t i = 1; i < valid.size(); ++i)
            if (!(get(*valid[i]) < get(*valid[i - 1]) * (1.0 + cfg.decay_slack))) return false;
        return true;
    };
    report.verdicts.at_floor = true;
    for (const auto* r : valid) report.verdicts.at_floor &= r->sup_H <= cfg.residual_floor;
    report.verdicts.h_decay_ok =
        report.verdicts.at_floor || decays([](const RunResult& r) { return r.sup_H; });
    report.verdicts.dist_decay_ok = decays([](const RunResult& r) { return r.sup_newton_dist; });

    detail::write_sweep_files(cfg, report);
    return report;
}

/// Recomputes the Newton distances from the persisted CSV files alone;
/// deterministic round-trip of what run_experiment reported.
inline std::vector<std::pair<double, double>> compare_from_csv(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    std::vector<std::pair<double, double>> out;
    for (double h : cfg.h_values) {
        const std::string tag = h_tag(h);
        const std::string traj_path = (fs::path(cfg.directory) / ("trajectory_h" + tag + ".csv")).string();
        const std::string newton_path = (fs::path(cfg.directory) / ("newton_h" + tag + ".csv")).string();
        if (!fs::exists(traj_path) || !fs::exists(newton_path)) continue;
        auto records = read_trajectory(traj_path, cfg.dim);
        auto newton = read_newton_csv(newton_path, cfg.dim);
        std::vector<double> times;
        std::vector<Point> qs;
        for (const auto& rec : records) {
            times.push_back(rec.t);
            qs.push_back(rec.q);
        }
        out.emplace_back(h, trajectory_distance(newton, times, qs));
    }
    return out;
}

}  // namespace nlsd
