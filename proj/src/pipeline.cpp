#include "lrsa/pipeline.hpp"

#include <algorithm>
#include <cmath>

namespace lrsa {

const char* to_string(Correction c) {
    switch (c) {
        case Correction::none: return "none";
        case Correction::time_points: return "time_points";
        case Correction::genes: return "genes";
    }
    return "none";
}

Correction parse_correction(const std::string& text) {
    if (text == "none") return Correction::none;
    if (text == "time_points") return Correction::time_points;
    if (text == "genes") return Correction::genes;
    fail(ErrorCategory::usage, "unknown correction \"" + text + "\" (none | time_points | genes)");
}

std::vector<FitBundle> fit_genes(const std::vector<ConsolidatedSeries>& series,
                                 const LocalFitConfig& cfg, ExecMode mode, double variance_floor) {
    cfg.validate();
    std::vector<FitBundle> bundles(series.size());
    parallel_for_index(series.size(), mode, [&](std::size_t i) {
        FitBundle& b = bundles[i];
        b.fit = select_bandwidth(series[i], cfg);
        b.var = estimate_variance(b.fit, series[i], variance_floor);
        b.kappa0 = tube_length(b.fit, default_tube_grid(b.fit));
    });
    return bundles;
}

std::size_t CallSettings::multiplicity_m(std::size_t n_time_points, std::size_t n_genes) const {
    switch (correction) {
        case Correction::none: return 1;
        case Correction::time_points: return n_time_points;
        case Correction::genes: return n_genes;
    }
    return 1;
}

std::set<std::string> CallOutcome::de_ids() const {
    std::set<std::string> out;
    for (const auto& c : calls) {
        if (c.is_de) out.insert(c.probe_id);
    }
    return out;
}

CallOutcome call_genes(const std::vector<FitBundle>& bundles,
                       const std::vector<ProbeAnnotation>& annotations,
                       const CallSettings& settings, ExecMode mode) {
    if (bundles.empty()) fail(ErrorCategory::validation, "no genes to call");

    const std::vector<double> design_times = bundles.front().fit.distinct_obs_times();
    const std::size_t m = settings.multiplicity_m(design_times.size(), bundles.size());
    const double level = multiplicity_level(settings.alpha, m);

    CallOutcome out;
    out.band_level = level;
    out.calls.resize(bundles.size());
    parallel_for_index(bundles.size(), mode, [&](std::size_t i) {
        const FitBundle& b = bundles[i];
        BandSet band = assemble_band(b.fit, b.var, level, b.kappa0);
        if (settings.sparse_band_mode) widen_to_anchor_max(band, b.fit, settings.anchor_times);
        out.calls[i] = call_de(b.fit, band, settings.fold_threshold,
                               b.fit.distinct_obs_times(), settings.criterion);
    });

    out.fdr = fdr_ec(out.calls, annotations);
    const std::size_t n_total = out.calls.size();
    const std::size_t n_de = out.fdr.n_total_de;
    const bool margins_ok = n_de > 0 && n_de < n_total;
    if (margins_ok) out.enrichment = control_enrichment(out.calls, annotations);
    return out;
}

std::vector<AnovaResult> anova_genes(const std::vector<ConsolidatedSeries>& series, ExecMode mode,
                                     bool adjust) {
    std::vector<AnovaResult> results(series.size());
    parallel_for_index(series.size(), mode, [&](std::size_t i) { results[i] = anova_fit(series[i]); });
    if (adjust) bh_adjust_in_place(results);
    return results;
}

}
