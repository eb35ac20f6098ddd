#include "rd/driver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <variant>

#include "rd/baselines.hpp"
#include "rd/precond.hpp"
#include "rd/system.hpp"

namespace rd {

namespace {

constexpr double ht_underflow = 1e-12;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Keeps, for each requested time, the nearest completed slice seen so far.
class SnapshotTracker {
public:
    explicit SnapshotTracker(const std::vector<double>& times) {
        snaps_.reserve(times.size());
        for (double t : times) snaps_.push_back({t, 0.0, Field{}});
        dist_.assign(times.size(), std::numeric_limits<double>::infinity());
    }

    void offer(double t, const Field& u) {
        for (std::size_t k = 0; k < snaps_.size(); ++k) {
            const double d = std::abs(t - snaps_[k].requested);
            if (d < dist_[k]) {
                dist_[k] = d;
                snaps_[k].time = t;
                snaps_[k].u = u;
            }
        }
    }

    std::vector<Snapshot> take() { return std::move(snaps_); }

private:
    std::vector<Snapshot> snaps_;
    std::vector<double> dist_;
};

struct StepOut {
    Field u;
    int iterations = 0;
};

StepOut advance_step(const RDModel& model, const Field& u, double ht, SolverKind kind,
                     const PdhgParams& params) {
    switch (kind) {
    case SolverKind::imex:
        return {imex_step(model, u, ht), 1};
    case SolverKind::fixed_point: {
        int it = 0;
        Field next = fixed_point_solve(model, u, ht, params.tol, params.max_iter, &it);
        return {std::move(next), it};
    }
    case SolverKind::nl_sor: {
        int sweeps = 0;
        Field next = nonlinear_sor_solve(model, u, ht, params.omega, params.tol, &sweeps);
        return {std::move(next), sweeps};
    }
    case SolverKind::newton: {
        std::vector<double> hist;
        Field next = newton_solve(model, u, ht, {}, params.tol, &hist);
        return {std::move(next), static_cast<int>(hist.size()) - 1};
    }
    default:
        throw domain_error("advance_step does not handle pdhg");
    }
}

void validate_plan(const MarchPlan& plan) {
    if (plan.windows < 1 || plan.nt < 1 || plan.ht <= 0.0)
        throw domain_error("march requires positive windows, nt, ht");
    if (plan.adaptive && plan.adaptive->ht_cap < plan.ht)
        throw domain_error("adaptive ht_cap must be at least the initial ht");
    if (plan.adaptive && plan.adaptive->fast_iter_threshold < 1)
        throw domain_error("adaptive fast_iter_threshold must be positive");
}

} // namespace

SolverKind parse_solver_kind(const std::string& name) {
    if (name == "pdhg") return SolverKind::pdhg;
    if (name == "imex") return SolverKind::imex;
    if (name == "fixed_point") return SolverKind::fixed_point;
    if (name == "nl_sor") return SolverKind::nl_sor;
    if (name == "newton") return SolverKind::newton;
    throw domain_error("unknown solver: " + name);
}

std::string solver_kind_name(SolverKind kind) {
    switch (kind) {
    case SolverKind::pdhg: return "pdhg";
    case SolverKind::imex: return "imex";
    case SolverKind::fixed_point: return "fixed_point";
    case SolverKind::nl_sor: return "nl_sor";
    case SolverKind::newton: return "newton";
    }
    throw domain_error("unknown solver kind");
}

MarchResult march(const RDModel& model, const Field& u0, const MarchPlan& plan,
                  const PdhgParams& params) {
    validate_plan(plan);
    if (plan.adaptive) {
        const double t_end = plan.windows * plan.nt * plan.ht;
        if (plan.solver != SolverKind::pdhg)
            throw domain_error("adaptive marching is driven by pdhg window solves");
        return adaptive_march(model, u0, plan.ht, plan.adaptive->ht_cap,
                              plan.adaptive->fast_iter_threshold, t_end, params, plan.nt);
    }

    MarchResult res;
    SnapshotTracker tracker(plan.snapshot_times);
    tracker.offer(0.0, u0);

    Field u = u0;
    double t = 0.0;
    bool ok_all = true;

    const bool use_pdhg = plan.solver == SolverKind::pdhg;
    Precond pc;
    if (use_pdhg) pc = build_precond(model, plan.nt, plan.ht);

    for (int w = 0; w < plan.windows; ++w) {
        WindowStat stat;
        stat.window = w;
        stat.ht = plan.ht;
        bool ok = true;

        if (use_pdhg) {
            const WindowProblem prob = make_window(model, u, plan.nt, plan.ht);
            auto [U, st] = solve_window(prob, pc, params);
            stat.iterations = st.iterations;
            stat.wall_time = st.wall_time;
            ok = st.converged && !st.diverged;
            if (ok) {
                for (int s = 0; s < plan.nt; ++s)
                    tracker.offer(t + (s + 1) * plan.ht, U.blocks[s]);
                u = U.blocks[plan.nt - 1];
                t += plan.nt * plan.ht;
            }
        } else {
            const auto t0 = std::chrono::steady_clock::now();
            std::vector<Field> slices;
            Field cur = u;
            int iters = 0;
            try {
                for (int s = 0; s < plan.nt; ++s) {
                    StepOut out = advance_step(model, cur, plan.ht, plan.solver, params);
                    cur = std::move(out.u);
                    iters += out.iterations;
                    slices.push_back(cur);
                }
            } catch (const solve_error&) {
                ok = false; // the failed window's slices are discarded
            }
            stat.iterations = iters;
            stat.wall_time = seconds_since(t0);
            if (ok) {
                for (int s = 0; s < plan.nt; ++s)
                    tracker.offer(t + (s + 1) * plan.ht, slices[s]);
                u = std::move(cur);
                t += plan.nt * plan.ht;
            }
        }

        stat.converged = ok;
        stat.energy = free_energy(model, u);
        res.stats.push_back(stat);
        if (!ok) {
            ok_all = false;
            break;
        }
        res.ht_schedule.push_back(plan.ht);
    }

    res.snapshots = tracker.take();
    res.final_u = std::move(u);
    res.final_time = t;
    res.completed = ok_all;
    return res;
}

AdaptiveDecision adaptive_decision(bool converged, int iterations, const AdaptiveRules& rules,
                                   double ht) {
    if (!converged) return {false, 0.5 * ht};
    if (iterations < rules.fast_iter_threshold) return {true, std::min(1.1 * ht, rules.ht_cap)};
    return {true, ht};
}

MarchResult adaptive_march_core(const RDModel& model, const Field& u0, double ht0,
                                const AdaptiveRules& rules, double t_end, int nt,
                                const WindowSolver& solve,
                                const std::vector<double>& snapshot_times) {
    if (ht0 <= 0.0 || t_end <= 0.0 || nt < 1)
        throw domain_error("adaptive march requires positive ht0, t_end, nt");
    if (rules.ht_cap < ht0) throw domain_error("adaptive ht_cap must be at least the initial ht");
    if (rules.fast_iter_threshold < 1)
        throw domain_error("adaptive fast_iter_threshold must be positive");

    MarchResult res;
    SnapshotTracker tracker(snapshot_times);
    tracker.offer(0.0, u0);

    Field u = u0;
    double t = 0.0;
    double ht = ht0;
    int window = 0;
    bool ok_all = true;

    while (t < t_end * (1.0 - 1e-12)) {
        const auto t0 = std::chrono::steady_clock::now();
        WindowOutcome out = solve(u, nt, ht);
        const double wall = seconds_since(t0);

        const AdaptiveDecision dec = adaptive_decision(out.converged, out.iterations, rules, ht);
        WindowStat stat;
        stat.window = window++;
        stat.ht = ht;
        stat.iterations = out.iterations;
        stat.converged = out.converged;
        stat.wall_time = wall;
        stat.energy = free_energy(model, dec.accept ? out.u_final : u);
        res.stats.push_back(stat);

        if (dec.accept) {
            u = std::move(out.u_final);
            t += nt * ht;
            res.ht_schedule.push_back(ht);
            tracker.offer(t, u);
            ht = dec.next_ht;
        } else {
            ht = dec.next_ht;
            if (ht < ht_underflow) {
                ok_all = false;
                break;
            }
        }
    }

    res.snapshots = tracker.take();
    res.final_u = std::move(u);
    res.final_time = t;
    res.completed = ok_all;
    return res;
}

MarchResult adaptive_march(const RDModel& model, const Field& u0, double ht0, double ht_cap,
                           int fast_iter_threshold, double t_end, const PdhgParams& params,
                           int nt) {
    const AdaptiveRules rules{ht_cap, fast_iter_threshold};
    const WindowSolver solver = [&model, &params](const Field& v0, int nt_, double ht_) {
        const WindowProblem prob = make_window(model, v0, nt_, ht_);
        const Precond pc = build_precond(model, nt_, ht_);
        auto [U, st] = solve_window(prob, pc, params);
        return WindowOutcome{st.converged && !st.diverged, st.iterations,
                             std::move(U.blocks[nt_ - 1])};
    };
    return adaptive_march_core(model, u0, ht0, rules, t_end, nt, solver);
}

double free_energy(const RDModel& model, const Field& u) {
    const int n = u.nx;
    const double hx = model.grid.hx();
    const MobilityStencil* mob = std::get_if<MobilityStencil>(&model.l_op);
    const auto& w = model.reaction.w;

    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const int ie = (i + 1) % n;
        for (int j = 0; j < n; ++j) {
            const int jn = (j + 1) % n;
            const double du_e = (u(ie, j) - u(i, j)) / hx;
            const double du_n = (u(i, jn) - u(i, j)) / hx;
            const std::size_t idx = static_cast<std::size_t>(i) * n + j;
            const double se = mob ? mob->sx[idx] : 1.0;
            const double sn = mob ? mob->sy[idx] : 1.0;
            acc += 0.5 * model.a * (se * du_e * du_e + sn * du_n * du_n) +
                   model.b * w(u(i, j));
        }
    }
    return acc * hx * hx;
}

std::optional<double> front_radius(const Field& u, const Grid2D& grid) {
    const int n = u.nx;
    if (n < 2) return std::nullopt;
    const int ic = n / 2, jc = n / 2;
    const double hx = grid.hx();
    const int dirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

    double sum = 0.0;
    int found = 0;
    for (const auto& d : dirs) {
        double prev = u(ic, jc);
        for (int s = 1; s <= n / 2; ++s) {
            const int i = ((ic + s * d[0]) % n + n) % n;
            const int j = ((jc + s * d[1]) % n + n) % n;
            const double cur = u(i, j);
            if (cur == 0.0) {
                sum += s * hx;
                ++found;
                break;
            }
            if (prev * cur < 0.0) {
                const double frac = prev / (prev - cur);
                sum += (s - 1 + frac) * hx;
                ++found;
                break;
            }
            prev = cur;
        }
    }
    if (found == 0) return std::nullopt;
    return sum / found;
}

double l1_discrepancy(const Field& a, const Field& b, const Grid2D& grid) {
    check_same_shape(a, b);
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) acc += std::abs(a.v[k] - b.v[k]);
    return acc * grid.hx() * grid.hx();
}

Diagnostics diagnostics(const Field& u, const Field& u_ref, const Grid2D& grid) {
    return {front_radius(u, grid), l1_discrepancy(u, u_ref, grid)};
}

} // namespace rd
