#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "rd/kernels.hpp"
#include "rd/threads.hpp"

// Times the OpenMP kernels against the serial reference implementations and
// prints one table row per (op, size).  The checksum column guards against
// the optimizer discarding the work.

namespace {

using clock_type = std::chrono::steady_clock;

double time_loop(const std::function<void()>& body, int reps) {
    body(); // warm up
    const auto t0 = clock_type::now();
    for (int r = 0; r < reps; ++r) body();
    return std::chrono::duration<double>(clock_type::now() - t0).count() /
           static_cast<double>(reps);
}

std::vector<double> random_vec(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

void row(const char* op, std::size_t n, double serial, double parallel, double check) {
    std::printf("%-16s %10zu %12.3f %12.3f %8.2fx   %.6g\n", op, n, serial * 1e6,
                parallel * 1e6, serial / parallel, check);
}

} // namespace

int main(int argc, char** argv) {
    int reps = 40;
    if (argc > 1) reps = std::max(1, std::atoi(argv[1]));
    std::printf("threads = %d, reps = %d\n", rd::thread_cap(), reps);
    std::printf("%-16s %10s %12s %12s %9s   %s\n", "op", "n", "serial_us", "omp_us",
                "speedup", "checksum");

    namespace k = rd::kernels;
    for (int nx : {64, 256, 1024}) {
        const std::size_t n = static_cast<std::size_t>(nx) * nx;
        const auto x = random_vec(n, 11);
        const auto y0 = random_vec(n, 23);
        const auto sx = random_vec(n, 37);
        const auto sy = random_vec(n, 41);
        std::vector<double> out(n), work(n);
        const double hx = 1.0 / nx;

        work = y0;
        const double ts_add = time_loop([&] { k::ref::add_scaled(work.data(), x.data(), 1e-9, n); }, reps);
        work = y0;
        const double tp_add = time_loop([&] { k::add_scaled(work.data(), x.data(), 1e-9, n); }, reps);
        row("add_scaled", n, ts_add, tp_add, work[n / 2]);

        const double ts_lin = time_loop(
            [&] { k::ref::lincomb(out.data(), 0.3, x.data(), 0.7, y0.data(), n); }, reps);
        const double tp_lin =
            time_loop([&] { k::lincomb(out.data(), 0.3, x.data(), 0.7, y0.data(), n); }, reps);
        row("lincomb", n, ts_lin, tp_lin, out[n / 2]);

        auto cube = [](double v) { return v * v * v - v; };
        const double ts_map =
            time_loop([&] { k::ref::map(out.data(), x.data(), n, cube); }, reps);
        const double tp_map = time_loop([&] { k::map(out.data(), x.data(), n, cube); }, reps);
        row("map(f)", n, ts_map, tp_map, out[n / 2]);

        const double ts_mob = time_loop(
            [&] { k::ref::mobility_apply(out.data(), x.data(), sx.data(), sy.data(), nx, hx); },
            reps);
        const double tp_mob = time_loop(
            [&] { k::mobility_apply(out.data(), x.data(), sx.data(), sy.data(), nx, hx); },
            reps);
        row("mobility_apply", n, ts_mob, tp_mob, out[n / 2]);

        work = y0;
        const double ts_scale =
            time_loop([&] { k::ref::scale(work.data(), 1.0000001, n); }, reps);
        work = y0;
        const double tp_scale =
            time_loop([&] { k::scale(work.data(), 1.0000001, n); }, reps);
        row("scale", n, ts_scale, tp_scale, work[n / 2]);
    }
    return 0;
}
