#include "lrsa/decaller.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "lrsa/mathx.hpp"
#include "lrsa/tsv.hpp"

namespace lrsa {

const char* to_string(Direction d) {
    switch (d) {
        case Direction::up: return "up";
        case Direction::down: return "down";
        case Direction::none: return "none";
    }
    return "none";
}

DECall call_de(const GeneFit& fit, const BandSet& band, double fold_threshold,
               const std::vector<double>& design_times, DECriterion criterion) {
    if (!(fold_threshold >= 1.0)) fail(ErrorCategory::validation, "fold threshold must be >= 1");
    if (!band.covers_time(0.0)) {
        fail(ErrorCategory::validation, "band for " + fit.probe_id + " does not cover t=0");
    }
    for (double t : design_times) {
        if (!band.covers_time(t)) {
            fail(ErrorCategory::validation, "band for " + fit.probe_id + " does not cover design time t=" +
                 format_value(t));
        }
    }

    const BandInterval& control = band.at_time(0.0);
    const double min_delta = std::log2(fold_threshold);

    DECall call;
    call.probe_id = fit.probe_id;
    double best_abs = -1.0;
    for (double t : design_times) {
        if (!(t > 0.0)) continue;
        const BandInterval& iv = band.at_time(t);
        const bool significant = criterion == DECriterion::band_disjoint
            ? (iv.lower > control.upper || iv.upper < control.lower)
            : (control.fit < iv.lower || control.fit > iv.upper);
        if (!significant) continue;
        const double delta = iv.fit - control.fit;
        if (std::fabs(delta) < min_delta) continue;
        if (std::fabs(delta) > best_abs) {
            best_abs = std::fabs(delta);
            call.is_de = true;
            call.trigger_time = t;
            call.log2_delta = delta;
            call.direction = delta > 0.0 ? Direction::up : Direction::down;
        }
    }
    return call;
}

namespace {

std::unordered_map<std::string, ProbeRole> role_map(const std::vector<ProbeAnnotation>& annotations) {
    std::unordered_map<std::string, ProbeRole> roles;
    roles.reserve(annotations.size());
    for (const auto& a : annotations) roles.emplace(a.probe_id, a.role);
    return roles;
}

ProbeRole role_of(const std::unordered_map<std::string, ProbeRole>& roles, const std::string& probe) {
    auto it = roles.find(probe);
    if (it == roles.end()) {
        fail(ErrorCategory::validation, "probe \"" + probe + "\" has no annotation");
    }
    return it->second;
}

}  // namespace

FdrEcResult fdr_ec(const std::vector<DECall>& calls, const std::vector<ProbeAnnotation>& annotations) {
    const auto roles = role_map(annotations);
    FdrEcResult out;
    for (const auto& call : calls) {
        const ProbeRole role = role_of(roles, call.probe_id);
        if (!call.is_de) continue;
        ++out.n_total_de;
        if (is_external_control(role)) ++out.n_ec_de;
    }
    if (out.n_total_de == 0) {
        out.no_calls = true;
        out.fdr_ec = 0.0;
    } else {
        out.fdr_ec = static_cast<double>(out.n_ec_de) / static_cast<double>(out.n_total_de);
    }
    return out;
}

double fisher_exact_two_sided(std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
    const double r1 = static_cast<double>(a + b);
    const double r2 = static_cast<double>(c + d);
    const double n1 = static_cast<double>(a + c);
    const double n2 = static_cast<double>(b + d);
    const double total = r1 + r2;
    if (r1 == 0.0 || r2 == 0.0 || n1 == 0.0 || n2 == 0.0) {
        fail(ErrorCategory::validation, "fisher exact test: a margin of the 2x2 table is empty");
    }

    const long klo = static_cast<long>(std::max(0.0, n1 - r2));
    const long khi = static_cast<long>(std::min(r1, n1));
    const double log_denom = log_choose(total, n1);
    auto log_pmf = [&](long k) {
        return log_choose(r1, static_cast<double>(k)) +
               log_choose(r2, n1 - static_cast<double>(k)) - log_denom;
    };

    const double log_obs = log_pmf(static_cast<long>(a));
    // R's convention: include tables with pmf <= pmf_obs * (1 + 1e-7)
    const double cutoff = log_obs + std::log1p(1e-7);
    double scaled_sum = 0.0;
    for (long k = klo; k <= khi; ++k) {
        const double lp = log_pmf(k);
        if (lp <= cutoff) scaled_sum += std::exp(lp - log_obs);
    }
    return std::min(1.0, std::exp(log_obs) * scaled_sum);
}

EnrichmentResult control_enrichment(const std::vector<DECall>& calls,
                                    const std::vector<ProbeAnnotation>& annotations) {
    const auto roles = role_map(annotations);
    EnrichmentResult out;
    for (const auto& call : calls) {
        const bool ec = is_external_control(role_of(roles, call.probe_id));
        if (ec && call.is_de) ++out.a;
        else if (ec) ++out.b;
        else if (call.is_de) ++out.c;
        else ++out.d;
    }
    out.p_value = fisher_exact_two_sided(out.a, out.b, out.c, out.d);
    out.odds_ratio = out.a == 0
        ? 0.0
        : (static_cast<double>(out.a) * static_cast<double>(out.d)) /
          (static_cast<double>(out.b) * static_cast<double>(out.c));
    return out;
}

double prediction_accuracy(const std::set<std::string>& calls,
                           const std::vector<std::string>& known_genes,
                           const std::vector<std::string>& verified_genes) {
    if (known_genes.empty() && verified_genes.empty()) {
        fail(ErrorCategory::validation, "prediction accuracy needs at least one reference gene");
    }
    for (const auto& g : known_genes) {
        if (std::find(verified_genes.begin(), verified_genes.end(), g) != verified_genes.end()) {
            fail(ErrorCategory::validation, "gene \"" + g + "\" appears in both reference lists");
        }
    }
    std::size_t hits = 0;
    for (const auto& g : known_genes) hits += calls.count(g);
    for (const auto& g : verified_genes) hits += calls.count(g);
    return 100.0 * static_cast<double>(hits) /
           static_cast<double>(known_genes.size() + verified_genes.size());
}

double overlap_percent(const std::set<std::string>& real_calls, const std::set<std::string>& sim_calls) {
    if (real_calls.empty()) return 0.0;
    std::size_t both = 0;
    for (const auto& g : real_calls) both += sim_calls.count(g);
    return 100.0 * static_cast<double>(both) / static_cast<double>(real_calls.size());
}

}
