// Serial reference vs OpenMP for the batch kernels.
//   bench_kernels [threads] [repeats]

#include "coolwalk/experiments.hpp"
#include "coolwalk/ratefn.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

using namespace coolwalk;

namespace {

double best_of(int repeats, const std::function<void()>& fn)
{
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

void row(const char* name, int repeats, const std::function<void(Exec)>& fn)
{
    const double s = best_of(repeats, [&] { fn(Exec::serial); });
    const double p = best_of(repeats, [&] { fn(Exec::parallel); });
    std::printf("%-28s %10.4f %10.4f %8.2fx\n", name, s, p, s / p);
}

} // namespace

int main(int argc, char** argv)
{
    if (argc > 1)
        set_thread_count(std::atoi(argv[1]));
    const int repeats = argc > 2 ? std::atoi(argv[2]) : 3;
    std::printf("threads %d, best of %d\n", max_threads(), repeats);
    std::printf("%-28s %10s %10s %9s\n", "kernel", "serial[s]", "omp[s]", "speedup");

    const auto dist = validate_alpha({{0.8, 0.7}, {0.3, 0.3}}, 0.2);
    const auto env = Environment::sample(dist, -2000, 2000 + 100'000, 1);
    const auto lambdas = GridSpec{-3.0, 0.0, 201, 20}.build();
    volatile double sink = 0.0;

    row("hitting_logmgf_rates", repeats, [&](Exec e) {
        sink = sink + hitting_logmgf_rates(env, 100'000, lambdas, 2000, e).back();
    });
    row("jstar_curve", repeats, [&](Exec e) {
        sink = sink + jstar_curve(dist, lambdas, 50'000, 3, 2000, e).values.ys()[0];
    });

    ExperimentConfig cfg;
    cfg.n_grid = {1000, 10000, 100000};
    cfg.replicas = 40;
    row("slln_run", repeats, [&](Exec e) { sink = sink + slln_run(cfg, e).tables.size(); });

    ExperimentConfig ldp = cfg;
    ldp.n_grid = {2000, 8000};
    ldp.replicas = 16;
    ldp.chain_n = 20'000;
    row("ldp_cumulant_run", repeats, [&](Exec e) { sink = sink + ldp_cumulant_run(ldp, e).tables.size(); });

    ExperimentConfig tail = cfg;
    tail.n_grid = {500, 1000, 2000};
    tail.tail_environments = 40;
    row("annealed_tail_run", repeats, [&](Exec e) { sink = sink + annealed_tail_run(tail, e).tables.size(); });
    return 0;
}
