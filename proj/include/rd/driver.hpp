#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rd/equations.hpp"
#include "rd/pdhg.hpp"

namespace rd {

enum class SolverKind { pdhg, imex, fixed_point, nl_sor, newton };

SolverKind parse_solver_kind(const std::string& name); // throws domain_error on unknown name
std::string solver_kind_name(SolverKind kind);

// Step-size controller: grow by 10% (capped) after a fast window, keep after a
// slow one, halve and retry after a failed one.
struct AdaptiveRules {
    double ht_cap = 0.0;
    int fast_iter_threshold = 200;
};

// Classical solvers read params.tol as the absolute per-step residual,
// params.max_iter as their iteration cap, and nl_sor reads params.omega as its
// relaxation factor; pdhg takes params verbatim.  When adaptive is set, march
// runs the adaptive controller until t_end = windows * nt * ht.
struct MarchPlan {
    int windows = 1;
    int nt = 1;
    double ht = 0.0;
    SolverKind solver = SolverKind::pdhg;
    std::optional<AdaptiveRules> adaptive;
    std::vector<double> snapshot_times; // nearest completed slice is kept, no interpolation
};

struct WindowStat {
    int window = 0;
    double ht = 0.0;
    int iterations = 0;
    bool converged = false;
    double wall_time = 0.0;
    double energy = 0.0;
};

struct Snapshot {
    double requested = 0.0; // time asked for in the plan
    double time = 0.0;      // time of the slice actually stored
    Field u;
};

struct MarchResult {
    std::vector<Snapshot> snapshots;  // one per requested time, plan order
    std::vector<WindowStat> stats;    // every attempt, including rejected adaptive windows
    std::vector<double> ht_schedule;  // accepted window steps, in order
    Field final_u;
    double final_time = 0.0;
    bool completed = false; // false when a window failed (or ht underflowed)
};

// Sequential windows, chaining each window's final slice into the next.  A
// failed window aborts with the partial results preserved.
MarchResult march(const RDModel& model, const Field& u0, const MarchPlan& plan,
                  const PdhgParams& params = {});

// What the controller saw for one window attempt.
struct WindowOutcome {
    bool converged = false;
    int iterations = 0;
    Field u_final;
};

struct AdaptiveDecision {
    bool accept = false;
    double next_ht = 0.0;
};

AdaptiveDecision adaptive_decision(bool converged, int iterations, const AdaptiveRules& rules,
                                   double ht);

using WindowSolver = std::function<WindowOutcome(const Field& u0, int nt, double ht)>;

// Adaptive loop against an arbitrary window solver (stubbed in tests).
// Marches until the accumulated time reaches t_end; rejected windows are
// discarded and re-solved at the halved step; ht underflow below 1e-12 stops
// with completed = false.
MarchResult adaptive_march_core(const RDModel& model, const Field& u0, double ht0,
                                const AdaptiveRules& rules, double t_end, int nt,
                                const WindowSolver& solve,
                                const std::vector<double>& snapshot_times = {});

MarchResult adaptive_march(const RDModel& model, const Field& u0, double ht0, double ht_cap,
                           int fast_iter_threshold, double t_end, const PdhgParams& params,
                           int nt = 1);

// sum_ij [ a/2 (sigma_e |D_e u|^2 + sigma_n |D_n u|^2) + b W(u) ] hx^2 with
// periodic difference quotients D; sigma is the variable mobility at the faces
// when the model carries one and 1 otherwise.  This is the functional the
// implicit scheme dissipates: a/2 <u, Lu> hx^2 + b sum W(u) hx^2.
double free_energy(const RDModel& model, const Field& u);

// Mean distance from the domain center to the zero crossing along the four
// axis rays, located by linear interpolation; absent when no ray crosses.
std::optional<double> front_radius(const Field& u, const Grid2D& grid);

double l1_discrepancy(const Field& a, const Field& b, const Grid2D& grid);

struct Diagnostics {
    std::optional<double> front_radius;
    double l1_discrepancy = 0.0;
};

Diagnostics diagnostics(const Field& u, const Field& u_ref, const Grid2D& grid);

} // namespace rd
