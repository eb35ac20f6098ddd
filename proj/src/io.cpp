#include "rd/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

static_assert(std::endian::native == std::endian::little,
              "binary snapshot writer assumes a little-endian host");

namespace rd {

namespace {

std::ofstream open_out(const std::string& path, std::ios::openmode mode) {
    std::ofstream f(path, mode);
    if (!f) throw io_error("cannot open for writing: " + path);
    return f;
}

void put_u32(std::ofstream& f, std::uint32_t v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_f64(std::ofstream& f, double v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof v);
}

} // namespace

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_rdf1(const std::string& path, const Field& u, double time) {
    auto f = open_out(path, std::ios::binary);
    f.write("RDF1", 4);
    put_u32(f, static_cast<std::uint32_t>(u.nx));
    put_u32(f, static_cast<std::uint32_t>(u.nx));
    put_f64(f, time);
    f.write(reinterpret_cast<const char*>(u.v.data()),
            static_cast<std::streamsize>(u.v.size() * sizeof(double)));
    if (!f) throw io_error("write failed: " + path);
}

Rdf1Snapshot read_rdf1(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open for reading: " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, "RDF1", 4) != 0)
        throw io_error("bad magic, not an RDF1 file: " + path);
    std::uint32_t nx = 0, ny = 0;
    f.read(reinterpret_cast<char*>(&nx), sizeof nx);
    f.read(reinterpret_cast<char*>(&ny), sizeof ny);
    if (!f || nx == 0 || nx != ny || nx > (1u << 16))
        throw io_error("bad grid dimensions in " + path);
    Rdf1Snapshot snap;
    f.read(reinterpret_cast<char*>(&snap.time), sizeof snap.time);
    snap.u = Field(static_cast<int>(nx));
    f.read(reinterpret_cast<char*>(snap.u.v.data()),
           static_cast<std::streamsize>(snap.u.v.size() * sizeof(double)));
    if (!f || f.gcount() != static_cast<std::streamsize>(snap.u.v.size() * sizeof(double)))
        throw io_error("truncated RDF1 file: " + path);
    return snap;
}

void write_pgm(const std::string& path, const Field& u) {
    auto f = open_out(path, std::ios::binary);
    f << "P5\n" << u.nx << " " << u.nx << "\n255\n";
    std::vector<unsigned char> row(static_cast<std::size_t>(u.nx));
    for (int i = 0; i < u.nx; ++i) {
        for (int j = 0; j < u.nx; ++j) {
            const double t = (u(i, j) + 1.0) * 0.5 * 255.0;
            const long q = std::lround(t);
            row[static_cast<std::size_t>(j)] =
                static_cast<unsigned char>(q < 0 ? 0 : (q > 255 ? 255 : q));
        }
        f.write(reinterpret_cast<const char*>(row.data()), u.nx);
    }
    if (!f) throw io_error("write failed: " + path);
}

void write_stats_csv(const std::string& path, const SolveStats& stats) {
    auto f = open_out(path, std::ios::out);
    f << "iter,res_inf,fhat_l2,rate\n";
    for (std::size_t k = 0; k < stats.residual_history.size(); ++k) {
        const auto& s = stats.residual_history[k];
        double rate = 0.0;
        if (k > 0) {
            const double prev = stats.residual_history[k - 1].fhat_l2;
            if (prev > 0.0 && s.fhat_l2 > 0.0) rate = -std::log10(s.fhat_l2 / prev);
        }
        f << k << ',' << format_g17(s.res_inf) << ',' << format_g17(s.fhat_l2) << ','
          << format_g17(rate) << '\n';
    }
    if (!f) throw io_error("write failed: " + path);
}

void write_trajectory_csv(const std::string& path, const std::vector<FlowSample>& traj) {
    auto f = open_out(path, std::ios::out);
    f << "t,fhat_l2,lyapunov\n";
    for (const auto& s : traj)
        f << format_g17(s.t) << ',' << format_g17(s.fhat_l2) << ','
          << format_g17(s.lyapunov) << '\n';
    if (!f) throw io_error("write failed: " + path);
}

void write_windows_csv(const std::string& path, const std::vector<WindowStat>& stats) {
    auto f = open_out(path, std::ios::out);
    f << "window,h_t,iterations,converged,wall_time,energy\n";
    for (const auto& w : stats)
        f << w.window << ',' << format_g17(w.ht) << ',' << w.iterations << ','
          << (w.converged ? 1 : 0) << ',' << format_g17(w.wall_time) << ','
          << format_g17(w.energy) << '\n';
    if (!f) throw io_error("write failed: " + path);
}

double average_rate(const std::vector<ResSample>& history, int cap) {
    std::size_t k_max = history.size() > 0 ? history.size() - 1 : 0;
    if (cap > 0 && static_cast<std::size_t>(cap) < k_max) k_max = static_cast<std::size_t>(cap);
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < k_max; ++k) {
        const double a = history[k].fhat_l2;
        const double b = history[k + 1].fhat_l2;
        if (a <= 0.0 || b <= 0.0) break;
        sum += -std::log10(b / a);
        ++n;
    }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

} // namespace rd
