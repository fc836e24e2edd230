#include "lrsa/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lrsa/tsv.hpp"

namespace lrsa {

const char* to_string(Pattern p) {
    switch (p) {
        case Pattern::single_peak: return "single_peak";
        case Pattern::monotone: return "monotone";
        case Pattern::cyclic: return "cyclic";
    }
    return "single_peak";
}

void SimSpec::validate() const {
    if (design_times.size() < 2) fail(ErrorCategory::validation, "simulation needs >= 2 design times");
    for (std::size_t i = 1; i < design_times.size(); ++i) {
        if (!(design_times[i] > design_times[i - 1])) {
            fail(ErrorCategory::validation, "design times must be strictly increasing");
        }
    }
    if (replicates_per_time.size() != design_times.size()) {
        fail(ErrorCategory::validation, "replicates_per_time must match design_times in length");
    }
    for (int r : replicates_per_time) {
        if (r < 1) fail(ErrorCategory::validation, "each time needs >= 1 biological replicate");
    }
    if (noise_sd.size() != 1 && noise_sd.size() != design_times.size()) {
        fail(ErrorCategory::validation, "noise_sd must hold one value or one per design time");
    }
    for (double sd : noise_sd) {
        if (!(sd >= 0.0) || !std::isfinite(sd)) fail(ErrorCategory::validation, "noise sd must be finite and >= 0");
    }
    if (de_fraction < 0.0 || de_fraction > 1.0) fail(ErrorCategory::validation, "de_fraction outside [0, 1]");
    if (!(peak_log2_amplitude >= 0.0) || !std::isfinite(peak_log2_amplitude)) {
        fail(ErrorCategory::validation, "peak amplitude must be finite and >= 0");
    }
    if (weight_single_peak < 0.0 || weight_monotone < 0.0 || weight_cyclic < 0.0 ||
        weight_single_peak + weight_monotone + weight_cyclic <= 0.0) {
        fail(ErrorCategory::validation, "pattern weights must be >= 0 and not all zero");
    }
}

double SimSpec::sd_at(std::size_t time_index) const {
    return noise_sd.size() == 1 ? noise_sd[0] : noise_sd[time_index];
}

namespace {

std::string zero_padded(std::size_t value, int width) {
    std::string s = std::to_string(value);
    while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
    return s;
}

// Pattern shapes, normalized so shape(0) = 0 and max |shape| over the
// design times = 1. The gene curve is baseline + sign * amplitude * shape.
std::vector<double> raw_shape(Pattern p, const std::vector<double>& times, double param) {
    const double t0 = times.front();
    const double range = times.back() - t0;
    std::vector<double> s(times.size());
    switch (p) {
        case Pattern::single_peak: {
            const double center = param;
            const double width = std::max((center - t0) / 2.5, range / 100.0);
            for (std::size_t i = 0; i < times.size(); ++i) {
                const double z = (times[i] - center) / width;
                s[i] = std::exp(-0.5 * z * z);
            }
            break;
        }
        case Pattern::monotone: {
            const double mid = t0 + 0.5 * range;
            const double tau = range / 8.0;
            for (std::size_t i = 0; i < times.size(); ++i) {
                s[i] = 1.0 / (1.0 + std::exp(-(times[i] - mid) / tau));
            }
            break;
        }
        case Pattern::cyclic: {
            for (std::size_t i = 0; i < times.size(); ++i) {
                s[i] = std::sin(2.0 * M_PI * (times[i] - t0) / range);
            }
            break;
        }
    }
    const double base = s[0];
    double peak = 0.0;
    for (double& v : s) {
        v -= base;
        peak = std::max(peak, std::fabs(v));
    }
    if (peak > 0.0) {
        for (double& v : s) v /= peak;
    }
    return s;
}

}  // namespace

SimResult generate(const SimSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const std::size_t n_times = spec.design_times.size();
    SimResult out;
    ExperimentMatrix& m = out.matrix;

    for (std::size_t ti = 0; ti < n_times; ++ti) {
        for (int r = 0; r < spec.replicates_per_time[ti]; ++r) {
            SampleMeta meta;
            meta.time_days = spec.design_times[ti];
            meta.biological_replicate = "b" + std::to_string(ti) + "_" + std::to_string(r + 1);
            meta.array_id = "a" + std::to_string(ti) + "_" + std::to_string(r + 1);
            meta.technical_replicate_index = 1;
            m.meta.push_back(meta);
            m.col_index.push_back(m.meta.back().array_id);
        }
    }
    const std::size_t n_arrays = m.col_index.size();
    std::vector<std::size_t> time_of_col;
    for (std::size_t ti = 0; ti < n_times; ++ti) {
        for (int r = 0; r < spec.replicates_per_time[ti]; ++r) time_of_col.push_back(ti);
    }

    // choose the planted DE targets
    const std::size_t n_de = static_cast<std::size_t>(
        std::floor(spec.de_fraction * static_cast<double>(spec.n_targets)));
    std::vector<std::size_t> target_order(spec.n_targets);
    for (std::size_t i = 0; i < spec.n_targets; ++i) target_order[i] = i;
    std::shuffle(target_order.begin(), target_order.end(), rng);
    std::vector<bool> is_de(spec.n_targets, false);
    for (std::size_t i = 0; i < n_de; ++i) is_de[target_order[i]] = true;

    const double w_total = spec.weight_single_peak + spec.weight_monotone + spec.weight_cyclic;
    auto draw_pattern = [&]() {
        const double u = unit(rng) * w_total;
        if (u < spec.weight_single_peak) return Pattern::single_peak;
        if (u < spec.weight_single_peak + spec.weight_monotone) return Pattern::monotone;
        return Pattern::cyclic;
    };
    std::vector<double> positive_times;
    for (double t : spec.design_times) {
        if (t > spec.design_times.front()) positive_times.push_back(t);
    }

    const std::size_t n_probes = spec.n_targets + spec.n_controls;
    m.values.reserve(n_probes * n_arrays);
    std::vector<double> curve(n_times);
    for (std::size_t g = 0; g < n_probes; ++g) {
        const bool control = g >= spec.n_targets;
        std::string probe = control ? "ec" + zero_padded(g - spec.n_targets + 1, 4)
                                    : "g" + zero_padded(g + 1, 5);
        m.row_index.push_back(probe);
        m.annotations.push_back({probe, control ? ProbeRole::negative_control : ProbeRole::target});

        const double baseline = 6.0 + 6.0 * unit(rng);
        std::fill(curve.begin(), curve.end(), baseline);
        if (!control && is_de[g]) {
            const Pattern pattern = draw_pattern();
            const double center = positive_times[static_cast<std::size_t>(
                unit(rng) * static_cast<double>(positive_times.size())) % positive_times.size()];
            const double sign = unit(rng) < 0.5 ? 1.0 : -1.0;
            const auto shape = raw_shape(pattern, spec.design_times, center);
            for (std::size_t ti = 0; ti < n_times; ++ti) {
                curve[ti] = baseline + sign * spec.peak_log2_amplitude * shape[ti];
            }
            out.truth.de_ids.insert(probe);
            out.truth.pattern_of[probe] = pattern;
        }
        out.truth.true_curves[probe] = curve;

        for (std::size_t col = 0; col < n_arrays; ++col) {
            const std::size_t ti = time_of_col[col];
            m.values.push_back(curve[ti] + spec.sd_at(ti) * gauss(rng));
        }
    }
    return out;
}

RunScore score_run(const SimTruth& truth, const std::set<std::string>& calls) {
    RunScore score;
    if (!truth.de_ids.empty()) {
        std::size_t hit = 0;
        for (const auto& id : truth.de_ids) hit += calls.count(id);
        score.power = static_cast<double>(hit) / static_cast<double>(truth.de_ids.size());
    }
    if (!calls.empty()) {
        std::size_t false_pos = 0;
        for (const auto& id : calls) false_pos += truth.de_ids.count(id) ? 0 : 1;
        score.true_fdr = static_cast<double>(false_pos) / static_cast<double>(calls.size());
    }
    return score;
}

}
