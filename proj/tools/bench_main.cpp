// Benchmark comparing the serial reference against the OpenMP per-gene map
// on the fit -> variance -> tube -> call chain, with a correctness check
// that both paths produce identical results.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>

#include "lrsa/pipeline.hpp"
#include "lrsa/simgen.hpp"

using namespace lrsa;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct StageResult {
    double fit_seconds = 0.0;
    double call_seconds = 0.0;
    std::size_t n_de = 0;
    std::vector<FitBundle> bundles;
};

StageResult run(const std::vector<ConsolidatedSeries>& series,
                const std::vector<ProbeAnnotation>& annotations, ExecMode mode) {
    StageResult r;
    LocalFitConfig cfg;
    auto t0 = Clock::now();
    r.bundles = fit_genes(series, cfg, mode);
    r.fit_seconds = seconds_since(t0);

    CallSettings settings;
    t0 = Clock::now();
    const auto outcome = call_genes(r.bundles, annotations, settings, mode);
    r.call_seconds = seconds_since(t0);
    r.n_de = outcome.fdr.n_total_de;
    return r;
}

bool identical(const StageResult& a, const StageResult& b) {
    if (a.n_de != b.n_de || a.bundles.size() != b.bundles.size()) return false;
    for (std::size_t i = 0; i < a.bundles.size(); ++i) {
        if (a.bundles[i].fit.gcv != b.bundles[i].fit.gcv) return false;
        if (a.bundles[i].fit.bandwidth != b.bundles[i].fit.bandwidth) return false;
        if (a.bundles[i].kappa0 != b.bundles[i].kappa0) return false;
        for (std::size_t j = 0; j < a.bundles[i].fit.fitted.size(); ++j) {
            if (a.bundles[i].fit.fitted[j].value != b.bundles[i].fit.fitted[j].value) return false;
        }
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    std::size_t n_targets = 2000;
    int repeats = 1;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--genes") == 0 && i + 1 < argc) n_targets = std::stoul(argv[++i]);
        else if (std::strcmp(argv[i], "--repeats") == 0 && i + 1 < argc) repeats = std::stoi(argv[++i]);
        else if (std::strcmp(argv[i], "--quick") == 0) n_targets = 150;
        else {
            std::printf("usage: lrsa_bench [--genes N] [--repeats R] [--quick]\n");
            return 64;
        }
    }

    SimSpec spec;
    spec.n_targets = n_targets;
    spec.n_controls = n_targets / 10;
    spec.de_fraction = 0.1;
    spec.peak_log2_amplitude = 2.0;
    spec.seed = 20240501;
    const auto sim = generate(spec);
    const auto series = merge_technical_replicates(sim.matrix);

    std::printf("genes=%zu arrays=%zu workers(openmp)=%d\n", series.size(), sim.matrix.n_arrays(),
                worker_count(ExecMode::openmp));
    std::printf("%-8s %12s %12s %8s\n", "mode", "fit [s]", "call [s]", "n_de");

    StageResult serial, parallel;
    for (int rep = 0; rep < repeats; ++rep) {
        serial = run(series, sim.matrix.annotations, ExecMode::serial);
        std::printf("%-8s %12.3f %12.3f %8zu\n", "serial", serial.fit_seconds, serial.call_seconds,
                    serial.n_de);
        parallel = run(series, sim.matrix.annotations, ExecMode::openmp);
        std::printf("%-8s %12.3f %12.3f %8zu\n", "openmp", parallel.fit_seconds,
                    parallel.call_seconds, parallel.n_de);
    }

    if (!identical(serial, parallel)) {
        std::printf("FAIL: serial and openmp results differ\n");
        return 1;
    }
    const double speedup = (serial.fit_seconds + serial.call_seconds) /
                           std::max(parallel.fit_seconds + parallel.call_seconds, 1e-9);
    std::printf("identical results; speedup x%.2f\n", speedup);
    return 0;
}
