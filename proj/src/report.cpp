#include "lrsa/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "lrsa/tsv.hpp"

namespace lrsa {

std::string display_fdr(double fdr) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", fdr);
    return buf;
}

std::string display_odds_ratio(double odds_ratio) {
    if (std::isinf(odds_ratio)) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", odds_ratio);
    return buf;
}

std::string display_p(double p) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.0e", p);  // one significant figure
    return buf;
}

void write_fits_tsv(const std::vector<FitBundle>& bundles, const std::string& path) {
    std::ostringstream out;
    out << "probe_id\tbandwidth\tgcv";
    if (!bundles.empty()) {
        for (const auto& s : bundles.front().fit.fitted) out << "\tfit_t" << format_value(s.t);
    }
    out << '\n';
    for (const auto& b : bundles) {
        out << b.fit.probe_id << '\t' << format_value(b.fit.bandwidth) << '\t' << format_value(b.fit.gcv);
        for (const auto& s : b.fit.fitted) out << '\t' << format_value(s.value);
        out << '\n';
    }
    write_text_file(path, out.str());
}

void write_band_csv(const BandSet& band, const std::string& path) {
    std::ostringstream out;
    out << "t,fit,lower,upper\n";
    for (const auto& iv : band.intervals) {
        out << format_value(iv.t) << ',' << format_value(iv.fit) << ','
            << format_value(iv.lower) << ',' << format_value(iv.upper) << '\n';
    }
    write_text_file(path, out.str());
}

void write_calls_tsv(const CallOutcome& outcome, const std::vector<ProbeAnnotation>& annotations,
                     const std::string& path) {
    std::ostringstream out;
    out << "probe_id\trole\tis_de\ttrigger_time\tlog2_delta\tdirection\n";
    for (std::size_t i = 0; i < outcome.calls.size(); ++i) {
        const DECall& c = outcome.calls[i];
        out << c.probe_id << '\t' << to_string(annotations[i].role) << '\t' << (c.is_de ? 1 : 0) << '\t';
        if (c.trigger_time) out << format_value(*c.trigger_time);
        else out << "NA";
        out << '\t' << format_value(c.log2_delta) << '\t' << to_string(c.direction) << '\n';
    }
    write_text_file(path, out.str());
}

nlohmann::json call_summary_json(const CallOutcome& outcome, const CallSettings& settings,
                                 const nlohmann::json& resolved_config) {
    nlohmann::json j;
    j["n_genes"] = outcome.calls.size();
    j["n_total_de"] = outcome.fdr.n_total_de;
    j["n_ec_de"] = outcome.fdr.n_ec_de;
    j["fdr_ec"] = outcome.fdr.fdr_ec;
    j["fdr_ec_display"] = display_fdr(outcome.fdr.fdr_ec);
    j["no_calls_warning"] = outcome.fdr.no_calls;
    if (outcome.enrichment) {
        j["odds_ratio"] = outcome.enrichment->odds_ratio;
        j["fisher_p"] = outcome.enrichment->p_value;
        j["odds_ratio_display"] = display_odds_ratio(outcome.enrichment->odds_ratio);
        j["fisher_p_display"] = display_p(outcome.enrichment->p_value);
    } else {
        j["odds_ratio"] = nullptr;
        j["fisher_p"] = nullptr;
    }
    j["band_level"] = outcome.band_level;
    j["settings"] = {
        {"alpha", settings.alpha},
        {"fold_threshold", settings.fold_threshold},
        {"correction", to_string(settings.correction)},
        {"de_rule", settings.criterion == DECriterion::band_disjoint ? "band_disjoint" : "band_excludes_control"},
        {"sparse_band_mode", settings.sparse_band_mode},
        {"anchor_times", settings.anchor_times},
    };
    j["config"] = resolved_config;
    return j;
}

void write_anova_tsv(const std::vector<AnovaResult>& results, const std::set<std::string>& de_calls,
                     const std::string& path) {
    std::ostringstream out;
    out << "probe_id\tf_statistic\tp_value\tp_adjusted\tmax_abs_log2_delta\tis_de\n";
    for (const auto& r : results) {
        out << r.probe_id << '\t' << format_value(r.f_statistic) << '\t' << format_value(r.p_value)
            << '\t' << format_value(r.p_adjusted) << '\t' << format_value(r.max_abs_log2_delta)
            << '\t' << (de_calls.count(r.probe_id) ? 1 : 0) << '\n';
    }
    write_text_file(path, out.str());
}

void write_labels_tsv(const ClusterResult& clusters, const std::string& path) {
    std::ostringstream out;
    out << "probe_id\tcluster\n";
    for (const auto& [gene, cluster] : clusters.labels) out << gene << '\t' << cluster << '\n';
    write_text_file(path, out.str());
}

void write_median_csv(const std::vector<FitSample>& pattern, const std::string& path) {
    std::ostringstream out;
    out << "t,median\n";
    for (const auto& s : pattern) out << format_value(s.t) << ',' << format_value(s.value) << '\n';
    write_text_file(path, out.str());
}

void write_compare_tsv(const std::vector<CompareRow>& rows, const std::string& path) {
    std::ostringstream out;
    out << "method\tcorrection\tfold_change\tn_total_de\tn_ec_de\tfdr_ec\todds_ratio\tp_value"
        << "\toverlap_pct\taccuracy_pct\n";
    for (const auto& r : rows) {
        out << r.method << '\t' << r.correction << '\t' << format_value(r.fold_threshold) << '\t'
            << r.n_de << '\t' << r.n_ec_de << '\t' << display_fdr(r.fdr_ec) << '\t';
        if (r.enrichment_defined) out << display_odds_ratio(r.odds_ratio) << '\t' << display_p(r.fisher_p);
        else out << "NA\tNA";
        out << '\t';
        if (r.overlap_defined) out << format_value(std::round(r.overlap_pct));
        else out << "NA";
        out << '\t';
        if (r.accuracy_defined) out << format_value(r.accuracy_pct);
        else out << "NA";
        out << '\n';
    }
    write_text_file(path, out.str());
}

nlohmann::json compare_summary_json(const std::vector<CompareRow>& rows,
                                    const nlohmann::json& resolved_config) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json j;
        j["method"] = r.method;
        j["correction"] = r.correction;
        j["fold_threshold"] = r.fold_threshold;
        j["n_total_de"] = r.n_de;
        j["n_ec_de"] = r.n_ec_de;
        j["fdr_ec"] = r.fdr_ec;
        if (r.enrichment_defined) {
            j["odds_ratio"] = r.odds_ratio;
            j["fisher_p"] = r.fisher_p;
        } else {
            j["odds_ratio"] = nullptr;
            j["fisher_p"] = nullptr;
        }
        if (r.overlap_defined) j["overlap_pct"] = r.overlap_pct;
        if (r.accuracy_defined) j["accuracy_pct"] = r.accuracy_pct;
        arr.push_back(j);
    }
    nlohmann::json out;
    out["rows"] = arr;
    out["config"] = resolved_config;
    return out;
}

}
