#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "rd/config.hpp"
#include "rd/driver.hpp"
#include "rd/equations.hpp"
#include "rd/errors.hpp"
#include "rd/flow.hpp"
#include "rd/io.hpp"
#include "rd/pdhg.hpp"
#include "rd/precond.hpp"
#include "rd/system.hpp"
#include "rd/theory.hpp"
#include "rd/threads.hpp"

namespace fs = std::filesystem;
using namespace rd;

namespace {

// Exit codes: 1 generic, 2 unknown equation, 3 unknown solver, 4 malformed
// number, 5 unwritable output directory, 6 unknown key/flag, 7 solve failure.
enum ExitCode {
    exit_ok = 0,
    exit_generic = 1,
    exit_equation = 2,
    exit_solver = 3,
    exit_number = 4,
    exit_outdir = 5,
    exit_key = 6,
    exit_solve = 7,
};

struct RawFlags {
    std::string config;
    std::string equation, eps0, mu, nx, ht, nt, windows, solver;
    std::string tau_u, tau_p, omega, eps, tol, max_iter;
    bool adaptive = false;
    std::string ht_cap, fast_iters, out, jobs, snapshot_times;
    std::string sweep_ht, sweep_nt, sweep_nx;
};

void add_common_flags(CLI::App* sub, RawFlags& f) {
    sub->add_option("--config", f.config, "flat key=value config file; flags override it");
    sub->add_option("--equation", f.equation,
                    "allen_cahn | cahn_hilliard | var_coeff | sixth_order");
    sub->add_option("--eps0", f.eps0, "interface width (negative: model default)");
    sub->add_option("--mu", f.mu, "mobility contrast for var_coeff");
    sub->add_option("--nx", f.nx, "grid points per dimension");
    sub->add_option("--ht", f.ht, "time step");
    sub->add_option("--nt", f.nt, "time slices per window");
    sub->add_option("--windows", f.windows, "number of windows to march");
    sub->add_option("--solver", f.solver, "pdhg | imex | fixed_point | nl_sor | newton");
    sub->add_option("--tau-u", f.tau_u, "primal step size");
    sub->add_option("--tau-p", f.tau_p, "dual step size");
    sub->add_option("--omega", f.omega, "dual extrapolation weight");
    sub->add_option("--eps", f.eps, "dual damping");
    sub->add_option("--tol", f.tol, "convergence tolerance");
    sub->add_option("--max-iter", f.max_iter, "iteration cap per window");
    sub->add_flag("--adaptive", f.adaptive, "adaptive time stepping (pdhg only)");
    sub->add_option("--ht-cap", f.ht_cap, "adaptive step ceiling (default 8*ht)");
    sub->add_option("--fast-iters", f.fast_iters, "adaptive growth threshold");
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--jobs", f.jobs, "parallel runs for sweep");
    sub->add_option("--snapshot-times", f.snapshot_times, "comma-separated times");
    sub->add_option("--sweep-ht", f.sweep_ht, "comma-separated h_t axis");
    sub->add_option("--sweep-nt", f.sweep_nt, "comma-separated n_t axis");
    sub->add_option("--sweep-nx", f.sweep_nx, "comma-separated n_x axis");
}

// Flags override the config file, so the file loads first.
RunConfig merge_config(const CLI::App* sub, const RawFlags& f) {
    RunConfig cfg;
    if (sub->count("--config")) load_config_file(cfg, f.config);
    auto take = [&](const char* flag, const char* key, const std::string& value) {
        if (sub->count(flag)) apply_key(cfg, key, value);
    };
    take("--equation", "equation", f.equation);
    take("--eps0", "eps0", f.eps0);
    take("--mu", "mu", f.mu);
    take("--nx", "nx", f.nx);
    take("--ht", "ht", f.ht);
    take("--nt", "nt", f.nt);
    take("--windows", "windows", f.windows);
    take("--solver", "solver", f.solver);
    take("--tau-u", "tau_u", f.tau_u);
    take("--tau-p", "tau_p", f.tau_p);
    take("--omega", "omega", f.omega);
    take("--eps", "eps", f.eps);
    take("--tol", "tol", f.tol);
    take("--max-iter", "max_iter", f.max_iter);
    if (sub->count("--adaptive")) apply_key(cfg, "adaptive", "1");
    take("--ht-cap", "ht_cap", f.ht_cap);
    take("--fast-iters", "fast_iters", f.fast_iters);
    take("--out", "out", f.out);
    take("--jobs", "jobs", f.jobs);
    take("--snapshot-times", "snapshot_times", f.snapshot_times);
    take("--sweep-ht", "sweep_ht", f.sweep_ht);
    take("--sweep-nt", "sweep_nt", f.sweep_nt);
    take("--sweep-nx", "sweep_nx", f.sweep_nx);
    validate_config(cfg);
    return cfg;
}

void write_text(const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + path.string());
    out << body;
    if (!out) throw io_error("write failed: " + path.string());
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int run_solve(const RunConfig& cfg, const fs::path& out) {
    const RDModel model = model_from(cfg);
    const Field u0 = initial_field(model.kind, model.grid);
    const MarchPlan plan = plan_from(cfg);
    const MarchResult res = march(model, u0, plan, cfg.params);

    write_windows_csv((out / "windows.csv").string(), res.stats);
    write_rdf1((out / "final.rdf1").string(), res.final_u, res.final_time);
    write_pgm((out / "final.pgm").string(), res.final_u);
    for (std::size_t s = 0; s < res.snapshots.size(); ++s) {
        char name[32];
        std::snprintf(name, sizeof name, "snapshot_%03zu", s);
        write_rdf1((out / (std::string(name) + ".rdf1")).string(), res.snapshots[s].u,
                   res.snapshots[s].time);
        write_pgm((out / (std::string(name) + ".pgm")).string(), res.snapshots[s].u);
    }

    int total_iters = 0;
    for (const auto& w : res.stats) total_iters += w.iterations;
    std::cout << "windows = " << res.stats.size() << "\n"
              << "iterations = " << total_iters << "\n"
              << "final_time = " << format_g17(res.final_time) << "\n"
              << "energy = " << format_g17(free_energy(model, res.final_u)) << "\n"
              << "completed = " << (res.completed ? 1 : 0) << "\n";
    if (!res.completed) {
        std::cerr << "rdsolve: march aborted after " << res.stats.size()
                  << " window attempt(s)\n";
        return exit_solve;
    }
    return exit_ok;
}

int run_flow(const RunConfig& cfg, const fs::path& out) {
    const RDModel model = model_from(cfg);
    const Field u0 = initial_field(model.kind, model.grid);
    const WindowProblem prob = make_window(model, u0, cfg.nt, cfg.ht);
    const Precond pc = build_precond(model, cfg.nt, cfg.ht);
    const TheoryReport rep = theory_report(model, cfg.ht, cfg.nt);

    FlowParams fp;
    if (rep.theta < 1.0) {
        const auto pair = special_params(rep.kappa);
        fp.gamma = pair.gamma;
        fp.epsilon = pair.epsilon;
    } else {
        std::cout << "theta = " << format_g17(rep.theta)
                  << " >= 1; falling back to gamma = epsilon = 1\n";
    }
    fp.mu = 1.0;
    const double sig2 = rep.sigma_hi * rep.sigma_hi;
    fp.dt = 0.9 * 0.2 / (fp.gamma * sig2 + fp.epsilon);
    fp.t_end = 20.0;
    if (!flow_dt_stable(fp, rep.sigma_hi)) throw error("internal: unstable flow step");

    const PdhgState init = warm_start(prob);
    const FlowResult res = integrate_flow(prob, pc, fp, init.u, init.q);
    write_trajectory_csv((out / "trajectory.csv").string(), res.trajectory);

    std::cout << "gamma = " << format_g17(fp.gamma) << "\n"
              << "epsilon = " << format_g17(fp.epsilon) << "\n"
              << "dt = " << format_g17(fp.dt) << "\n"
              << "fitted_rate = " << format_g17(fit_decay_rate(res.trajectory)) << "\n"
              << "rate_bound = " << format_g17(rep.flow_rate_bound) << "\n"
              << "diverged = " << (res.diverged ? 1 : 0) << "\n";
    return res.diverged ? exit_solve : exit_ok;
}

int run_theory(const RunConfig& cfg, const fs::path&) {
    const RDModel model = model_from(cfg);
    const TheoryReport rep = theory_report(model, cfg.ht, cfg.nt);
    std::cout << "zeta = " << format_g17(rep.zeta) << "\n"
              << "theta = " << format_g17(rep.theta) << "\n"
              << "theta_tilde = " << format_g17(rep.theta_tilde) << "\n"
              << "sigma_lo = " << format_g17(rep.sigma_lo) << "\n"
              << "sigma_hi = " << format_g17(rep.sigma_hi) << "\n"
              << "kappa = " << format_g17(rep.kappa) << "\n"
              << "flow_rate_bound = " << format_g17(rep.flow_rate_bound) << "\n"
              << "ht_max_existence = " << format_g17(rep.ht_max_existence) << "\n"
              << "surrogate = " << (rep.surrogate ? 1 : 0) << "\n";

    const double theta = std::isfinite(rep.theta_tilde) ? rep.theta_tilde : rep.theta;
    const double theta_star = std::sqrt(2.0) - 1.0;
    if (theta < theta_star) {
        const DiscreteParams d = discrete_hyperparams(theta, 0.5);
        std::cout << "tau_p = " << format_g17(d.tau_p) << "\n"
                  << "tau_u = " << format_g17(d.tau_u) << "\n"
                  << "omega = " << format_g17(d.omega) << "\n"
                  << "epsilon = " << format_g17(d.epsilon) << "\n"
                  << "phi = " << format_g17(d.phi) << "\n"
                  << "contraction = " << format_g17(contraction_factor(d.phi)) << "\n";
    } else {
        std::cout << "# theta exceeds sqrt(2)-1; no discrete rate guarantee\n";
    }
    return exit_ok;
}

struct SweepRow {
    int run = 0, nx = 0, nt = 0;
    double ht = 0.0, rbar = 0.0;
    int iterations = 0;
    bool converged = false;
};

int run_sweep(const RunConfig& cfg, const fs::path& out) {
    const std::vector<int> nxs = cfg.sweep_nx.empty() ? std::vector<int>{cfg.nx} : cfg.sweep_nx;
    const std::vector<int> nts = cfg.sweep_nt.empty() ? std::vector<int>{cfg.nt} : cfg.sweep_nt;
    const std::vector<double> hts =
        cfg.sweep_ht.empty() ? std::vector<double>{cfg.ht} : cfg.sweep_ht;

    std::vector<SweepRow> rows;
    for (int nx : nxs)
        for (int nt : nts)
            for (double ht : hts)
                rows.push_back({static_cast<int>(rows.size()), nx, nt, ht, 0.0, 0, false});

    // one window from the initial data per combination
    auto run_one = [&](SweepRow& row) {
        RunConfig local = cfg;
        local.nx = row.nx;
        local.nt = row.nt;
        local.ht = row.ht;
        char name[32];
        std::snprintf(name, sizeof name, "run_%03d", row.run);
        const fs::path dir = out / name;
        fs::create_directories(dir);
        write_text(dir / "config.cfg", echo_config(local));

        const RDModel model = model_from(local);
        const WindowProblem prob =
            make_window(model, initial_field(model.kind, model.grid), row.nt, row.ht);
        const Precond pc = build_precond(model, row.nt, row.ht);
        const auto [U, st] = solve_window(prob, pc, local.params);
        row.rbar = average_rate(st.residual_history);
        row.iterations = st.iterations;
        row.converged = st.converged;
        write_stats_csv((dir / "stats.csv").string(), st);
    };

    const int jobs = std::max(1, std::min({cfg.jobs, thread_cap(),
                                           static_cast<int>(rows.size())}));
    if (jobs == 1) {
        for (auto& row : rows) run_one(row);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t)
            pool.emplace_back([&] {
                for (std::size_t k = next++; k < rows.size(); k = next++) run_one(rows[k]);
            });
        for (auto& th : pool) th.join();
    }

    std::ofstream csv(out / "sweep.csv");
    if (!csv) throw io_error("cannot open for writing: " + (out / "sweep.csv").string());
    csv << "run,nx,nt,ht,rbar,iterations,converged\n";
    for (const auto& r : rows)
        csv << r.run << ',' << r.nx << ',' << r.nt << ',' << format_g17(r.ht) << ','
            << format_g17(r.rbar) << ',' << r.iterations << ',' << (r.converged ? 1 : 0)
            << '\n';
    std::cout << "runs = " << rows.size() << "\n";
    return exit_ok;
}

int run_compare(const RunConfig& cfg, const fs::path& out) {
    const RDModel model = model_from(cfg);
    const Field u0 = initial_field(model.kind, model.grid);

    std::vector<double> boundaries;
    for (int w = 1; w <= cfg.windows; ++w) boundaries.push_back(w * cfg.nt * cfg.ht);

    MarchPlan main_plan = plan_from(cfg);
    main_plan.snapshot_times = boundaries;

    // fine-step semi-implicit reference on the same horizon
    MarchPlan ref_plan;
    ref_plan.solver = SolverKind::imex;
    ref_plan.ht = cfg.ht / 10.0;
    ref_plan.nt = 1;
    ref_plan.windows = cfg.windows * cfg.nt * 10;
    ref_plan.snapshot_times = boundaries;

    const MarchResult main_res = march(model, u0, main_plan, cfg.params);
    const MarchResult ref_res = march(model, u0, ref_plan, cfg.params);

    std::ofstream csv(out / "compare.csv");
    if (!csv) throw io_error("cannot open for writing: " + (out / "compare.csv").string());
    csv << "time,l1,front_main,front_ref\n";
    const std::size_t n = std::min(main_res.snapshots.size(), ref_res.snapshots.size());
    for (std::size_t k = 0; k < n; ++k) {
        const auto& a = main_res.snapshots[k];
        const auto& b = ref_res.snapshots[k];
        const Diagnostics d = diagnostics(a.u, b.u, model.grid);
        const auto fb = front_radius(b.u, model.grid);
        csv << format_g17(a.time) << ',' << format_g17(d.l1_discrepancy) << ',';
        if (d.front_radius) csv << format_g17(*d.front_radius);
        csv << ',';
        if (fb) csv << format_g17(*fb);
        csv << '\n';
    }

    auto totals = [](const MarchResult& r) {
        double wall = 0.0;
        long iters = 0;
        int conv = 0;
        for (const auto& w : r.stats) {
            wall += w.wall_time;
            iters += w.iterations;
            conv += w.converged ? 1 : 0;
        }
        return std::tuple<double, long, int>{wall, iters, conv};
    };
    const auto [wall_a, it_a, conv_a] = totals(main_res);
    const auto [wall_b, it_b, conv_b] = totals(ref_res);

    std::ofstream tcsv(out / "timing.csv");
    if (!tcsv) throw io_error("cannot open for writing: " + (out / "timing.csv").string());
    tcsv << "solver,h_t,wall_time,iterations,converged_windows\n";
    tcsv << cfg.solver << ',' << format_g17(cfg.ht) << ',' << format_g17(wall_a) << ','
         << it_a << ',' << conv_a << '\n';
    tcsv << "imex," << format_g17(ref_plan.ht) << ',' << format_g17(wall_b) << ',' << it_b
         << ',' << conv_b << '\n';

    std::cout << "rows = " << n << "\n";
    if (!main_res.completed || !ref_res.completed) {
        std::cerr << "rdsolve: compare march did not complete\n";
        return exit_solve;
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"time-implicit reaction-diffusion solver"};
    app.require_subcommand(1);
    RawFlags flags;
    const char* names[] = {"solve", "flow", "theory", "sweep", "compare"};
    const char* descs[] = {"march the scheme and export stats/snapshots",
                           "integrate the continuous solver flow",
                           "print spectral bounds and hyperparameters",
                           "Cartesian parameter sweep",
                           "solver vs fine-step reference"};
    for (int k = 0; k < 5; ++k) add_common_flags(app.add_subcommand(names[k], descs[k]), flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ExtrasError& e) {
        std::cerr << "rdsolve: unknown flag: " << e.what() << "\n";
        return exit_key;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? exit_generic : exit_ok;
    }
    CLI::App* sub = app.get_subcommands().front();

    thread_cap(); // applies the RD_PDHG_THREADS limit process-wide

    RunConfig cfg;
    try {
        cfg = merge_config(sub, flags);
    } catch (const unknown_key_error& e) {
        std::cerr << "rdsolve: " << e.what() << "\n";
        return exit_key;
    } catch (const bad_value_error& e) {
        std::cerr << "rdsolve: " << e.what() << "\n";
        return exit_number;
    } catch (const error& e) {
        std::cerr << "rdsolve: " << e.what() << "\n";
        return exit_generic;
    }

    try {
        parse_model_kind(cfg.equation);
    } catch (const domain_error& e) {
        std::cerr << "rdsolve: equation: " << e.what() << "\n";
        return exit_equation;
    }
    try {
        parse_solver_kind(cfg.solver);
    } catch (const domain_error& e) {
        std::cerr << "rdsolve: solver: " << e.what() << "\n";
        return exit_solver;
    }

    const fs::path out(cfg.out);
    const std::string command = sub->get_name();
    try {
        std::error_code ec;
        fs::create_directories(out, ec);
        if (ec) throw io_error("cannot create '" + cfg.out + "': " + ec.message());
        // manifest goes out before any solver starts
        write_text(out / "manifest.json", manifest_json(cfg, command));
        write_text(out / "config.cfg", echo_config(cfg));
    } catch (const io_error& e) {
        std::cerr << "rdsolve: out: " << e.what() << "\n";
        return exit_outdir;
    }

    int rc = exit_generic;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        if (command == "solve")
            rc = run_solve(cfg, out);
        else if (command == "flow")
            rc = run_flow(cfg, out);
        else if (command == "theory")
            rc = run_theory(cfg, out);
        else if (command == "sweep")
            rc = run_sweep(cfg, out);
        else
            rc = run_compare(cfg, out);
    } catch (const solve_error& e) {
        std::cerr << "rdsolve: solve failed: " << e.what() << "\n";
        rc = exit_solve;
    } catch (const error& e) {
        std::cerr << "rdsolve: " << e.what() << "\n";
        rc = exit_generic;
    } catch (const std::exception& e) {
        std::cerr << "rdsolve: " << e.what() << "\n";
        rc = exit_generic;
    }
    write_text(out / "manifest.json", manifest_json(cfg, command, seconds_since(t0)));
    return rc;
}
