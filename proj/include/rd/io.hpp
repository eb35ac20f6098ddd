#pragma once

#include <string>
#include <vector>

#include "rd/driver.hpp"
#include "rd/errors.hpp"
#include "rd/field.hpp"
#include "rd/flow.hpp"
#include "rd/pdhg.hpp"

namespace rd {

struct io_error : error {
    using error::error;
};

// Shortest decimal string that round-trips a double ("%.17g").
std::string format_g17(double v);

// Binary snapshot format: magic bytes "RDF1", then little-endian u32 n_x,
// u32 n_x, f64 simulation time, then n_x^2 little-endian f64 values in
// row-major order.
struct Rdf1Snapshot {
    Field u;
    double time = 0.0;
};

void write_rdf1(const std::string& path, const Field& u, double time);
Rdf1Snapshot read_rdf1(const std::string& path);

// 8-bit binary PGM; values are mapped linearly from [-1, 1] to [0, 255] and
// clamped outside that range.
void write_pgm(const std::string& path, const Field& u);

// CSV files carry a header row, '.' as the decimal separator, and 17
// significant digits for floating-point columns.

// Columns: iter,res_inf,fhat_l2,rate.  rate on row k is the decimal decay
// -log10(fhat_k / fhat_{k-1}); row 0 reports 0.
void write_stats_csv(const std::string& path, const SolveStats& stats);

// Columns: t,fhat_l2,lyapunov.
void write_trajectory_csv(const std::string& path, const std::vector<FlowSample>& traj);

// Columns: window,h_t,iterations,converged,wall_time,energy.
void write_windows_csv(const std::string& path, const std::vector<WindowStat>& stats);

// Mean decimal decay rate r_k = -log10(fhat_{k+1}/fhat_k) over the realized
// iterations, capped at the first `cap`.  Truncates at the first non-positive
// sample; 0 when fewer than two usable samples exist.
double average_rate(const std::vector<ResSample>& history, int cap = 500);

} // namespace rd
