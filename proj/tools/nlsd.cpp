#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "nlsd/experiment.hpp"

using namespace nlsd;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::string resume_path;
    double h_override = 0.0;
    std::size_t threads = 0;
};

ExperimentConfig load(const CommonOpts& opts) {
    ExperimentConfig cfg = load_config(opts.config_path);
    if (!opts.out_dir.empty()) cfg.directory = opts.out_dir;
    cfg.validate();
    return cfg;
}

void print_run(const RunResult& r) {
    std::printf("h = %-10g sup|H| = %-12.5g sup|q-q_N| = %-12.5g charge drift = %-10.3g energy drift = %-10.3g\n",
                r.h, r.sup_H, r.sup_newton_dist, r.max_charge_drift, r.max_energy_drift);
    std::printf("  boundary mass = %-10.3g spectral tail = %-10.3g conc fraction = %-10.3g (radius %g)\n",
                r.max_boundary_mass, r.max_spectral_tail, r.max_conc_fraction, r.conc_radius);
    std::printf("  dt = %g, %zu steps, %.2f s\n", r.dt_used, r.steps, r.runtime_sec);
}

int cmd_ground_state(const CommonOpts& opts) {
    ExperimentConfig cfg = load(opts);
    GroundState gs = obtain_ground_state(cfg, /*force_solve=*/true);
    std::printf("ground state: omega = %.12g, m = %.12g, residual = %.3g, %zu iterations\n", gs.omega,
                gs.m, gs.residual, gs.iterations);
    std::printf("saved to %s/ground_state.fld\n", cfg.directory.c_str());
    return 0;
}

int cmd_validate(const CommonOpts& opts) {
    ExperimentConfig cfg = load(opts);
    bool ok = true;
    std::string first_fail;

    auto show = [&](const AssumptionReport& rep) {
        for (const auto& item : rep.items) {
            std::printf("  [%s] %s%s%s\n", item.pass ? "ok" : "FAIL", item.name.c_str(),
                        item.detail.empty() ? "" : ": ", item.detail.c_str());
            if (!item.pass && first_fail.empty()) first_fail = item.name + " " + item.detail;
            ok &= item.pass;
        }
    };

    std::printf("nonlinearity probes (%s):\n", cfg.nonlinearity().name.c_str());
    show(validate_nonlinearity(cfg.nonlinearity(), cfg.dim));
    std::printf("potential probes (%s):\n", cfg.potential().name.c_str());
    show(validate_potential(cfg.potential(), cfg.run_grid()));

    std::printf("resolution gates:\n");
    for (double h : cfg.h_values) {
        try {
            detail::require_datum_resolved(cfg.run_grid(), cfg.datum_spec(h));
            std::printf("  [ok] h = %g\n", h);
        } catch (const Error& e) {
            std::printf("  [FAIL] h = %g: %s\n", h, e.what());
            if (first_fail.empty()) first_fail = e.what();
            ok = false;
        }
    }
    if (!ok) throw Error(ErrorClass::AssumptionViolation, first_fail);
    std::printf("all probes passed\n");
    return 0;
}

int cmd_evolve(const CommonOpts& opts) {
    ExperimentConfig cfg = load(opts);
    const double h = opts.h_override > 0.0 ? opts.h_override : cfg.h_values.front();
    GroundState gs = obtain_ground_state(cfg);
    SpectralPlan ref_plan(gs.grid);
    RunResult r = run_experiment(cfg, h, gs, ref_plan, opts.resume_path);
    print_run(r);
    return 0;
}

int cmd_sweep(const CommonOpts& opts) {
    ExperimentConfig cfg = load(opts);
    SweepReport report = run_sweep(cfg, opts.threads);
    for (const auto& r : report.runs) {
        if (r.valid) {
            print_run(r);
        } else {
            std::printf("h = %-10g INVALID (%s): %s\n", r.h, r.failure_class.c_str(),
                        r.failure_message.c_str());
        }
    }
    std::printf("sup|H_h| decay: %s%s\n", report.verdicts.h_decay_ok ? "yes" : "NO",
                report.verdicts.at_floor ? " (at discretization floor)" : "");
    std::printf("sup|q - q_newton| decay: %s\n", report.verdicts.dist_decay_ok ? "yes" : "NO");
    return 0;
}

int cmd_compare(const CommonOpts& opts) {
    ExperimentConfig cfg = load(opts);
    auto rows = compare_from_csv(cfg);
    if (rows.empty()) throw Error(ErrorClass::IoError, "no persisted runs found in " + cfg.directory);
    for (const auto& [h, dist] : rows) {
        std::printf("h = %-10g sup|q - q_newton| = %.17g", h, dist);
        const auto summary_path =
            (std::filesystem::path(cfg.directory) / ("summary_h" + h_tag(h) + ".csv")).string();
        if (std::filesystem::exists(summary_path)) {
            auto summary = read_summary(summary_path);
            const auto it = summary.find("sup_newton_dist");
            if (it != summary.end()) {
                const double stored = detail::ConfigBinder::to_double(it->second);
                std::printf("  (stored %.17g, %s)", stored, stored == dist ? "identical" : "DIFFERS");
            }
        }
        std::printf("\n");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semiclassical soliton dynamics toolkit for the nonlinear Schrodinger equation"};
    app.require_subcommand(1);

    CommonOpts opts;
    auto add_common = [&](CLI::App* sub, bool with_h = false, bool with_resume = false) {
        sub->set_help_flag("--help", "print help");
        sub->add_option("--config", opts.config_path, "experiment config file")->required();
        sub->add_option("--out", opts.out_dir, "output directory override");
        sub->add_option("--threads", opts.threads, "worker thread count (0: hardware)");
        if (with_h) sub->add_option("--h", opts.h_override, "h value override");
        if (with_resume) sub->add_option("--resume", opts.resume_path, "checkpoint file to resume from");
    };

    auto* gs = app.add_subcommand("ground-state", "solve and persist the ground state profile");
    add_common(gs);
    auto* evolve = app.add_subcommand("evolve", "run a single propagation");
    add_common(evolve, true, true);
    auto* sweep = app.add_subcommand("sweep", "run the h sweep and the decay report");
    add_common(sweep);
    auto* validate = app.add_subcommand("validate", "config and assumption probes only");
    add_common(validate);
    auto* compare = app.add_subcommand("compare", "recompute Newton distances from persisted CSVs");
    add_common(compare);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gs->parsed()) return cmd_ground_state(opts);
        if (evolve->parsed()) return cmd_evolve(opts);
        if (sweep->parsed()) return cmd_sweep(opts);
        if (validate->parsed()) return cmd_validate(opts);
        if (compare->parsed()) return cmd_compare(opts);
    } catch (const Error& e) {
        std::fprintf(stderr, "NLSD-ERROR class=%s message=\"%s\"\n", to_string(e.error_class()), e.what());
        return exit_code(e.error_class());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "NLSD-ERROR class=Unexpected message=\"%s\"\n", e.what());
        return 1;
    }
    return 0;
}
