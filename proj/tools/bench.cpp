// Compares the serial reference kernels against their OpenMP counterparts on
// representative sizes and prints one timing row per kernel.

#include <chrono>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dars/preference.hpp"
#include "dars/rng.hpp"
#include "dars/simgen.hpp"
#include "dars/vdg.hpp"

using namespace dars;

namespace {

template <typename F>
double time_ms(F&& fn) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

void report(const std::string& kernel, double serial_ms, double parallel_ms) {
    std::printf("%-28s %10.1f ms %10.1f ms %8.2fx\n", kernel.c_str(), serial_ms, parallel_ms,
                parallel_ms > 0.0 ? serial_ms / parallel_ms : 0.0);
}

PreferenceMatrix random_preferences(int users, int requirements, SplitMix64& rng) {
    PreferenceMatrix m;
    m.users = users;
    m.requirements = requirements;
    m.entries = Matrix<std::uint8_t>(users, requirements);
    for (int u = 0; u < users; ++u)
        for (int i = 0; i < requirements; ++i)
            m.entries(u, i) = rng.next_double() < 0.5 ? 0 : 1;
    return m;
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both columns run serially\n");
#endif
    std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    SplitMix64 rng(42);

    {
        const PreferenceMatrix prefs = random_preferences(4000, 160, rng);
        EellsMatrix a, b;
        const double ts = time_ms([&] { a = eells_measure_serial(prefs); });
        const double tp = time_ms([&] { b = eells_measure(prefs, true); });
        report("eells_measure 4000x160", ts, tp);
        if (!(a.values == b.values)) std::printf("  MISMATCH in eells_measure outputs!\n");
    }

    {
        SplitMix64 g(7);
        const ValueDependencyGraph graph = gen_value_dependencies(400, 0.2, 0.25, g);
        StrengthMatrices a, b;
        const double ts = time_ms(
            [&] { a = all_pairs_strengths(graph, {StrengthsAlgorithm::Relaxation, false}); });
        const double tp = time_ms(
            [&] { b = all_pairs_strengths(graph, {StrengthsAlgorithm::Relaxation, true}); });
        report("relaxation n=400", ts, tp);
        if (!(a.positive == b.positive && a.negative == b.negative))
            std::printf("  MISMATCH in relaxation outputs!\n");
    }

    {
        SplitMix64 g(11);
        const ValueDependencyGraph graph = gen_value_dependencies(15, 0.5, 0.25, g);
        StrengthMatrices a, b;
        const double ts = time_ms(
            [&] { a = all_pairs_strengths(graph, {StrengthsAlgorithm::ExactPaths, false}); });
        const double tp = time_ms(
            [&] { b = all_pairs_strengths(graph, {StrengthsAlgorithm::ExactPaths, true}); });
        report("exact paths n=15", ts, tp);
        if (!(a.positive == b.positive && a.negative == b.negative))
            std::printf("  MISMATCH in exact-path outputs!\n");
    }

    {
        SimulationConfig cfg;
        cfg.n = 11;
        cfg.budget_percents = {30, 50, 70, 90};
        cfg.vdl = {0.1, 0.3, 0.5};
        cfg.nvdl = {0.0, 0.25};
        cfg.pdl = {0.05};
        cfg.npdl = {0.0};
        cfg.methods = {Method::Pcbk, Method::Dars};
        cfg.seed = 3;
        SplitMix64 g(3);
        const auto base = gen_requirements(cfg.n, g);
        std::vector<SimulationRecord> a, b;
        const double ts = time_ms([&] { a = run_grid(cfg, base, false); });
        const double tp = time_ms([&] { b = run_grid(cfg, base, true); });
        report("run_grid 24 cells", ts, tp);
        bool same = a.size() == b.size();
        for (std::size_t i = 0; same && i < a.size(); ++i)
            same = a[i].pct_ov == b[i].pct_ov && a[i].pct_av == b[i].pct_av &&
                   a[i].feasible == b[i].feasible;
        if (!same) std::printf("  MISMATCH in run_grid outputs!\n");
    }

    return 0;
}
