#include <doctest.h>

#include <cmath>

#include "lrsa/simgen.hpp"

using namespace lrsa;

TEST_SUITE("simgen") {

TEST_CASE("de_fraction zero plants nothing") {
    SimSpec spec;
    spec.n_targets = 40;
    spec.n_controls = 10;
    spec.de_fraction = 0.0;
    spec.seed = 3;
    const auto sim = generate(spec);
    CHECK(sim.truth.de_ids.empty());
    for (const auto& [gene, curve] : sim.truth.true_curves) {
        for (double v : curve) CHECK(v == curve.front());  // constant baselines
    }
}

TEST_CASE("the standard replication yields 15 arrays") {
    SimSpec spec;
    spec.n_targets = 5;
    spec.n_controls = 2;
    const auto sim = generate(spec);
    CHECK(sim.matrix.n_arrays() == 15);  // 3+3+2+3+3+1
    CHECK(sim.matrix.n_probes() == 7);
}

TEST_CASE("noiseless generation reproduces the pattern exactly") {
    SimSpec spec;
    spec.n_targets = 30;
    spec.n_controls = 5;
    spec.de_fraction = 0.5;
    spec.noise_sd = {0.0};
    spec.peak_log2_amplitude = 1.5;
    spec.seed = 9;
    const auto sim = generate(spec);
    CHECK(sim.truth.de_ids.size() == 15);

    for (std::size_t r = 0; r < sim.matrix.n_probes(); ++r) {
        const auto& curve = sim.truth.true_curves.at(sim.matrix.row_index[r]);
        std::size_t col = 0;
        for (std::size_t ti = 0; ti < spec.design_times.size(); ++ti) {
            for (int rep = 0; rep < spec.replicates_per_time[ti]; ++rep, ++col) {
                CHECK(sim.matrix.at(r, col) == curve[ti]);
            }
        }
    }

    // planted genes peak at exactly the requested amplitude, from a baseline at t=0
    for (const auto& id : sim.truth.de_ids) {
        const auto& curve = sim.truth.true_curves.at(id);
        double peak = 0.0;
        for (double v : curve) peak = std::max(peak, std::fabs(v - curve.front()));
        CHECK(peak == doctest::Approx(spec.peak_log2_amplitude).epsilon(1e-12));
    }
}

TEST_CASE("controls are never planted as DE") {
    SimSpec spec;
    spec.n_targets = 50;
    spec.n_controls = 50;
    spec.de_fraction = 1.0;
    spec.seed = 4;
    const auto sim = generate(spec);
    CHECK(sim.truth.de_ids.size() == 50);
    for (const auto& id : sim.truth.de_ids) CHECK(id[0] == 'g');
}

TEST_CASE("generation is byte-identical for the same seed") {
    SimSpec spec;
    spec.n_targets = 25;
    spec.n_controls = 5;
    spec.seed = 77;
    const auto s1 = generate(spec);
    const auto s2 = generate(spec);
    CHECK(s1.matrix.values == s2.matrix.values);
    CHECK(s1.matrix.row_index == s2.matrix.row_index);
    CHECK(s1.truth.de_ids == s2.truth.de_ids);

    spec.seed = 78;
    const auto s3 = generate(spec);
    CHECK(s1.matrix.values != s3.matrix.values);
}

TEST_CASE("score_run arithmetic") {
    SimTruth truth;
    for (int i = 0; i < 100; ++i) truth.de_ids.insert("g" + std::to_string(i));

    {
        const auto s = score_run(truth, truth.de_ids);
        CHECK(s.power == 1.0);
        CHECK(s.true_fdr == 0.0);
    }
    {
        std::set<std::string> disjoint = {"x1", "x2"};
        const auto s = score_run(truth, disjoint);
        CHECK(s.power == 0.0);
        CHECK(s.true_fdr == 1.0);
    }
    {
        std::set<std::string> calls;
        for (int i = 0; i < 80; ++i) calls.insert("g" + std::to_string(i));
        for (int i = 0; i < 5; ++i) calls.insert("fp" + std::to_string(i));
        const auto s = score_run(truth, calls);
        CHECK(s.power == doctest::Approx(0.8));
        CHECK(s.true_fdr == doctest::Approx(5.0 / 85.0));
    }
    {
        const auto s = score_run(truth, {});
        CHECK(s.power == 0.0);
        CHECK(s.true_fdr == 0.0);
    }
}

TEST_CASE("invalid specs are rejected") {
    SimSpec spec;
    spec.replicates_per_time = {1, 1};
    CHECK_THROWS_AS(generate(spec), Error);
    spec = SimSpec{};
    spec.de_fraction = 1.5;
    CHECK_THROWS_AS(generate(spec), Error);
    spec = SimSpec{};
    spec.noise_sd = {0.1, 0.2};
    CHECK_THROWS_AS(generate(spec), Error);
}

}  // TEST_SUITE
