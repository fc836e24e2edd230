// Command-line front end for the time-course DE pipeline:
//   simulate | fit | call | cluster | anova | compare
// Every command is a pure function of (config, input files, seed); reruns
// with the same inputs produce byte-identical outputs.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "lrsa/dataset.hpp"
#include "lrsa/pipeline.hpp"
#include "lrsa/report.hpp"
#include "lrsa/simgen.hpp"
#include "lrsa/spectral.hpp"
#include "lrsa/tsv.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunConfig {
    double alpha = 0.05;
    double fold_threshold = 2.0;
    std::string correction = "none";
    std::string de_rule = "band_disjoint";
    int cluster_k = 7;
    int eval_grid_points = 31;
    int restarts = 20;
    bool sparse_band_mode = false;
    std::vector<double> anchor_times = {0.0, 14.0};
    std::vector<double> bandwidth_grid = {0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::uint64_t seed = 1;
    bool serial = false;

    std::string matrix_path, samples_path, annotations_path, out_dir;

    lrsa::ExecMode mode() const { return serial ? lrsa::ExecMode::serial : lrsa::ExecMode::openmp; }

    json to_json() const {
        json j;
        j["alpha"] = alpha;
        j["fold_threshold"] = fold_threshold;
        j["correction"] = correction;
        j["de_rule"] = de_rule;
        j["cluster_k"] = cluster_k;
        j["eval_grid_points"] = eval_grid_points;
        j["restarts"] = restarts;
        j["sparse_band_mode"] = sparse_band_mode;
        j["anchor_times"] = anchor_times;
        j["bandwidth_grid"] = bandwidth_grid;
        j["seed"] = seed;
        j["serial"] = serial;
        j["matrix"] = matrix_path;
        j["samples"] = samples_path;
        j["annotations"] = annotations_path;
        j["out_dir"] = out_dir;
        return j;
    }
};

// Config-file values fill in every field whose flag was not given on the
// command line, so flag-vs-file precedence does not depend on argument
// order. Applied after parsing.
void apply_config_file(RunConfig& cfg, const std::string& path, const CLI::App& sub) {
    std::ifstream in(path);
    if (!in) lrsa::fail(lrsa::ErrorCategory::io, "cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        lrsa::fail(lrsa::ErrorCategory::parse, "config file " + path + ": " + e.what());
    }
    auto flag_given = [&sub](const std::string& flag) {
        const CLI::Option* opt = sub.get_option_no_throw(flag);
        return opt != nullptr && opt->count() > 0;
    };
    try {
        if (j.contains("alpha") && !flag_given("--alpha")) cfg.alpha = j["alpha"].get<double>();
        if (j.contains("fold_threshold") && !flag_given("--fold")) {
            cfg.fold_threshold = j["fold_threshold"].get<double>();
        }
        if (j.contains("correction") && !flag_given("--correction")) {
            cfg.correction = j["correction"].get<std::string>();
        }
        if (j.contains("de_rule") && !flag_given("--de-rule")) cfg.de_rule = j["de_rule"].get<std::string>();
        if (j.contains("cluster_k") && !flag_given("--k")) cfg.cluster_k = j["cluster_k"].get<int>();
        if (j.contains("eval_grid_points") && !flag_given("--grid-points")) {
            cfg.eval_grid_points = j["eval_grid_points"].get<int>();
        }
        if (j.contains("restarts") && !flag_given("--restarts")) cfg.restarts = j["restarts"].get<int>();
        if (j.contains("sparse_band_mode") && !flag_given("--sparse-bands")) {
            cfg.sparse_band_mode = j["sparse_band_mode"].get<bool>();
        }
        if (j.contains("anchor_times") && !flag_given("--anchor-times")) {
            cfg.anchor_times = j["anchor_times"].get<std::vector<double>>();
        }
        if (j.contains("bandwidth_grid") && !flag_given("--bandwidths")) {
            cfg.bandwidth_grid = j["bandwidth_grid"].get<std::vector<double>>();
        }
        if (j.contains("seed") && !flag_given("--seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("serial") && !flag_given("--serial")) cfg.serial = j["serial"].get<bool>();
    } catch (const json::exception& e) {
        lrsa::fail(lrsa::ErrorCategory::parse, "config file " + path + ": " + e.what());
    }
}

void ensure_out_dir(const std::string& dir) {
    if (dir.empty()) lrsa::fail(lrsa::ErrorCategory::usage, "--out-dir is required");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) lrsa::fail(lrsa::ErrorCategory::io, "cannot create output directory " + dir + ": " + ec.message());
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void write_json_file(const json& j, const std::string& path) {
    lrsa::write_text_file(path, j.dump(2) + "\n");
}

lrsa::DECriterion parse_de_rule(const std::string& text) {
    if (text == "band_disjoint") return lrsa::DECriterion::band_disjoint;
    if (text == "band_excludes_control") return lrsa::DECriterion::band_excludes_control;
    lrsa::fail(lrsa::ErrorCategory::usage,
               "unknown de rule \"" + text + "\" (band_disjoint | band_excludes_control)");
}

struct LoadedExperiment {
    lrsa::ExperimentMatrix matrix;
    std::vector<lrsa::ConsolidatedSeries> series;
};

LoadedExperiment load_inputs(const RunConfig& cfg) {
    if (cfg.matrix_path.empty() || cfg.samples_path.empty() || cfg.annotations_path.empty()) {
        lrsa::fail(lrsa::ErrorCategory::usage, "--matrix, --samples and --annotations are required");
    }
    LoadedExperiment loaded;
    loaded.matrix = lrsa::load_experiment(cfg.matrix_path, cfg.samples_path, cfg.annotations_path);
    loaded.series = lrsa::merge_technical_replicates(loaded.matrix);
    return loaded;
}

lrsa::LocalFitConfig fit_config(const RunConfig& cfg, const std::vector<lrsa::ConsolidatedSeries>& series) {
    lrsa::LocalFitConfig fc;
    fc.bandwidth_grid = cfg.bandwidth_grid;
    double tmin = series.front().points.front().time_days;
    double tmax = tmin;
    for (const auto& s : series.front().points) {
        tmin = std::min(tmin, s.time_days);
        tmax = std::max(tmax, s.time_days);
    }
    fc.eval_grid = lrsa::equispaced_grid(tmin, tmax, static_cast<std::size_t>(cfg.eval_grid_points));
    return fc;
}

lrsa::CallSettings call_settings(const RunConfig& cfg) {
    lrsa::CallSettings s;
    s.alpha = cfg.alpha;
    s.fold_threshold = cfg.fold_threshold;
    s.correction = lrsa::parse_correction(cfg.correction);
    s.criterion = parse_de_rule(cfg.de_rule);
    s.sparse_band_mode = cfg.sparse_band_mode;
    s.anchor_times = cfg.anchor_times;
    return s;
}

std::set<std::string> read_gene_list(const std::string& path) {
    std::set<std::string> out;
    for (const auto& line : lrsa::read_lines(path)) {
        if (!line.empty()) out.insert(line);
    }
    return out;
}

// calls.tsv reader used by cluster and compare (--sim-calls)
std::set<std::string> read_calls_tsv(const std::string& path) {
    const auto lines = lrsa::read_lines(path);
    if (lines.empty()) lrsa::fail(lrsa::ErrorCategory::parse, path + ": empty calls file");
    const auto header = lrsa::split_tabs(lines[0]);
    std::size_t id_col = 0, de_col = 2;
    bool found = false;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == "is_de") {
            de_col = c;
            found = true;
        }
    }
    if (!found) lrsa::fail(lrsa::ErrorCategory::parse, path + ": no is_de column");
    std::set<std::string> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto f = lrsa::split_tabs(lines[i]);
        if (f.size() <= de_col) lrsa::fail(lrsa::ErrorCategory::parse, path + ": short row " + std::to_string(i + 1));
        if (f[de_col] == "1") out.insert(f[id_col]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

int cmd_simulate(const RunConfig& cfg, const lrsa::SimSpec& spec) {
    ensure_out_dir(cfg.out_dir);
    const auto sim = lrsa::generate(spec);
    lrsa::write_matrix_tsv(sim.matrix, join_path(cfg.out_dir, "matrix.tsv"));
    lrsa::write_samplesheet_tsv(sim.matrix, join_path(cfg.out_dir, "samples.tsv"));
    lrsa::write_annotation_tsv(sim.matrix, join_path(cfg.out_dir, "annotations.tsv"));

    json truth;
    truth["de_ids"] = sim.truth.de_ids;
    json patterns = json::object();
    for (const auto& [gene, pattern] : sim.truth.pattern_of) patterns[gene] = lrsa::to_string(pattern);
    truth["pattern_of"] = patterns;
    json curves = json::object();
    for (const auto& [gene, curve] : sim.truth.true_curves) curves[gene] = curve;
    truth["true_curves"] = curves;
    truth["design_times"] = spec.design_times;
    truth["seed"] = spec.seed;
    write_json_file(truth, join_path(cfg.out_dir, "truth.json"));

    std::printf("simulate: wrote %zu probes x %zu arrays to %s\n", sim.matrix.n_probes(),
                sim.matrix.n_arrays(), cfg.out_dir.c_str());
    return 0;
}

int cmd_fit(const RunConfig& cfg, const std::vector<std::string>& band_genes) {
    ensure_out_dir(cfg.out_dir);
    const auto loaded = load_inputs(cfg);
    const auto fc = fit_config(cfg, loaded.series);
    const auto bundles = lrsa::fit_genes(loaded.series, fc, cfg.mode());
    lrsa::write_fits_tsv(bundles, join_path(cfg.out_dir, "fits.tsv"));

    const auto settings = call_settings(cfg);
    const std::size_t m = settings.multiplicity_m(bundles.front().fit.distinct_obs_times().size(),
                                                  bundles.size());
    const double level = lrsa::multiplicity_level(cfg.alpha, m);
    for (const auto& gene : band_genes) {
        const lrsa::FitBundle* bundle = nullptr;
        for (const auto& b : bundles) {
            if (b.fit.probe_id == gene) bundle = &b;
        }
        if (!bundle) lrsa::fail(lrsa::ErrorCategory::usage, "requested band for unknown gene \"" + gene + "\"");
        auto band = lrsa::assemble_band(bundle->fit, bundle->var, level, bundle->kappa0);
        if (cfg.sparse_band_mode) lrsa::widen_to_anchor_max(band, bundle->fit, cfg.anchor_times);
        lrsa::write_band_csv(band, join_path(cfg.out_dir, "band_" + gene + ".csv"));
    }
    std::printf("fit: %zu genes, band level %s, wrote %s\n", bundles.size(),
                lrsa::format_value(level).c_str(), cfg.out_dir.c_str());
    return 0;
}

int cmd_call(const RunConfig& cfg) {
    ensure_out_dir(cfg.out_dir);
    const auto loaded = load_inputs(cfg);
    const auto fc = fit_config(cfg, loaded.series);
    const auto bundles = lrsa::fit_genes(loaded.series, fc, cfg.mode());
    const auto settings = call_settings(cfg);
    const auto outcome = lrsa::call_genes(bundles, loaded.matrix.annotations, settings, cfg.mode());

    lrsa::write_calls_tsv(outcome, loaded.matrix.annotations, join_path(cfg.out_dir, "calls.tsv"));
    write_json_file(lrsa::call_summary_json(outcome, settings, cfg.to_json()),
                    join_path(cfg.out_dir, "summary.json"));
    std::printf("call: %zu DE of %zu genes (FDR_EC %s)\n", outcome.fdr.n_total_de,
                outcome.calls.size(), lrsa::display_fdr(outcome.fdr.fdr_ec).c_str());
    return 0;
}

int cmd_anova(const RunConfig& cfg, bool adjust) {
    ensure_out_dir(cfg.out_dir);
    const auto loaded = load_inputs(cfg);
    const auto results = lrsa::anova_genes(loaded.series, cfg.mode(), true);
    const auto calls = lrsa::anova_call(results, cfg.alpha, cfg.fold_threshold, adjust);
    lrsa::write_anova_tsv(results, calls, join_path(cfg.out_dir, "anova.tsv"));
    std::printf("anova: %zu DE of %zu genes (%s p-values)\n", calls.size(), results.size(),
                adjust ? "adjusted" : "raw");
    return 0;
}

int cmd_cluster(const RunConfig& cfg, const std::string& calls_path) {
    ensure_out_dir(cfg.out_dir);
    const auto loaded = load_inputs(cfg);
    if (calls_path.empty()) lrsa::fail(lrsa::ErrorCategory::usage, "--calls is required for cluster");
    const auto de_ids = read_calls_tsv(calls_path);
    if (de_ids.size() < static_cast<std::size_t>(cfg.cluster_k)) {
        lrsa::fail(lrsa::ErrorCategory::validation,
                   "k=" + std::to_string(cfg.cluster_k) + " exceeds the " +
                   std::to_string(de_ids.size()) + " DE genes in " + calls_path);
    }

    const auto fc = fit_config(cfg, loaded.series);
    const auto bundles = lrsa::fit_genes(loaded.series, fc, cfg.mode());
    std::vector<lrsa::GeneFit> fits;
    fits.reserve(bundles.size());
    for (const auto& b : bundles) fits.push_back(b.fit);

    const auto profiles = lrsa::build_profiles(fits, de_ids, fc.eval_grid);
    const auto aff = lrsa::affinity(profiles);
    auto clusters = lrsa::spectral_cluster(aff, cfg.cluster_k, cfg.seed, cfg.restarts);
    clusters.medians = lrsa::cluster_medians(profiles, clusters.labels);

    lrsa::write_labels_tsv(clusters, join_path(cfg.out_dir, "labels.tsv"));
    for (const auto& [cluster, pattern] : clusters.medians) {
        lrsa::write_median_csv(pattern, join_path(cfg.out_dir, "cluster_" + std::to_string(cluster) + "_median.csv"));
    }

    json summary;
    summary["k"] = clusters.k;
    summary["eigenvalues"] = clusters.eigenvalues;
    summary["kmeans_inertia"] = clusters.kmeans_inertia;
    summary["n_clustered"] = clusters.labels.size();
    summary["excluded_flat"] = profiles.excluded_flat;
    summary["config"] = cfg.to_json();
    write_json_file(summary, join_path(cfg.out_dir, "cluster_summary.json"));

    std::printf("cluster: %zu genes into %d clusters\n", clusters.labels.size(), clusters.k);
    return 0;
}

int cmd_compare(const RunConfig& cfg, const std::string& known_path, const std::string& verified_path,
                const std::string& sim_calls_path) {
    ensure_out_dir(cfg.out_dir);
    const auto loaded = load_inputs(cfg);
    const auto fc = fit_config(cfg, loaded.series);
    const auto bundles = lrsa::fit_genes(loaded.series, fc, cfg.mode());
    const auto settings = call_settings(cfg);
    const auto lrsa_outcome = lrsa::call_genes(bundles, loaded.matrix.annotations, settings, cfg.mode());
    const auto lrsa_ids = lrsa_outcome.de_ids();

    const bool anova_adjust = settings.correction != lrsa::Correction::none;
    const auto anova_results = lrsa::anova_genes(loaded.series, cfg.mode(), true);
    const auto anova_ids = lrsa::anova_call(anova_results, cfg.alpha, cfg.fold_threshold, anova_adjust);
    std::vector<lrsa::DECall> anova_as_calls;
    for (const auto& r : anova_results) {
        lrsa::DECall c;
        c.probe_id = r.probe_id;
        c.is_de = anova_ids.count(r.probe_id) > 0;
        anova_as_calls.push_back(c);
    }
    const auto anova_fdr = lrsa::fdr_ec(anova_as_calls, loaded.matrix.annotations);

    std::set<std::string> known, verified, sim_calls;
    if (!known_path.empty()) known = read_gene_list(known_path);
    if (!verified_path.empty()) verified = read_gene_list(verified_path);
    if (!sim_calls_path.empty()) sim_calls = read_calls_tsv(sim_calls_path);

    auto make_row = [&](const std::string& method, const std::set<std::string>& ids,
                        const lrsa::FdrEcResult& fdr,
                        const std::optional<lrsa::EnrichmentResult>& enrichment) {
        lrsa::CompareRow row;
        row.method = method;
        row.correction = cfg.correction;
        row.fold_threshold = cfg.fold_threshold;
        row.n_de = fdr.n_total_de;
        row.n_ec_de = fdr.n_ec_de;
        row.fdr_ec = fdr.fdr_ec;
        if (enrichment) {
            row.enrichment_defined = true;
            row.odds_ratio = enrichment->odds_ratio;
            row.fisher_p = enrichment->p_value;
        }
        if (!sim_calls.empty()) {
            row.overlap_defined = true;
            row.overlap_pct = lrsa::overlap_percent(ids, sim_calls);
        }
        if (!known.empty() || !verified.empty()) {
            row.accuracy_defined = true;
            row.accuracy_pct = lrsa::prediction_accuracy(
                ids, std::vector<std::string>(known.begin(), known.end()),
                std::vector<std::string>(verified.begin(), verified.end()));
        }
        return row;
    };

    std::optional<lrsa::EnrichmentResult> anova_enrichment;
    if (anova_fdr.n_total_de > 0 && anova_fdr.n_total_de < anova_as_calls.size()) {
        anova_enrichment = lrsa::control_enrichment(anova_as_calls, loaded.matrix.annotations);
    }

    std::vector<lrsa::CompareRow> rows;
    rows.push_back(make_row("lrsa", lrsa_ids, lrsa_outcome.fdr, lrsa_outcome.enrichment));
    rows.push_back(make_row("anova", anova_ids, anova_fdr, anova_enrichment));

    lrsa::write_compare_tsv(rows, join_path(cfg.out_dir, "compare.tsv"));
    write_json_file(lrsa::compare_summary_json(rows, cfg.to_json()), join_path(cfg.out_dir, "compare.json"));
    std::printf("compare: lrsa %zu DE vs anova %zu DE\n", lrsa_ids.size(), anova_ids.size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-course differential expression via local regression and spectral analysis"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;

    auto add_common = [&](CLI::App* sub, bool needs_inputs) {
        sub->add_option("--config", config_path, "JSON config file with defaults");
        sub->add_option("--out-dir", cfg.out_dir, "output directory");
        sub->add_option("--alpha", cfg.alpha, "significance level");
        sub->add_option("--fold", cfg.fold_threshold, "fold-change threshold (original scale)");
        sub->add_option("--correction", cfg.correction, "multiplicity correction: none|time_points|genes");
        sub->add_option("--seed", cfg.seed, "random seed");
        sub->add_flag("--serial", cfg.serial, "run the serial reference implementation");
        if (needs_inputs) {
            sub->add_option("--matrix", cfg.matrix_path, "expression matrix TSV");
            sub->add_option("--samples", cfg.samples_path, "sample sheet TSV");
            sub->add_option("--annotations", cfg.annotations_path, "probe annotation TSV");
            sub->add_option("--grid-points", cfg.eval_grid_points, "evaluation grid size");
            sub->add_option("--bandwidths", cfg.bandwidth_grid, "bandwidth fraction grid");
            sub->add_option("--de-rule", cfg.de_rule, "band_disjoint|band_excludes_control");
            sub->add_flag("--sparse-bands", cfg.sparse_band_mode, "anchor-width band heuristic");
            sub->add_option("--anchor-times", cfg.anchor_times, "anchor times for sparse bands");
        }
    };

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "generate a synthetic experiment");
    lrsa::SimSpec spec;
    add_common(sim_cmd, false);
    sim_cmd->add_option("--targets", spec.n_targets, "number of target probes");
    sim_cmd->add_option("--controls", spec.n_controls, "number of external-control probes");
    sim_cmd->add_option("--de-fraction", spec.de_fraction, "fraction of targets planted as DE");
    sim_cmd->add_option("--amplitude", spec.peak_log2_amplitude, "peak |log2 delta| of planted genes");
    sim_cmd->add_option("--noise-sd", spec.noise_sd, "noise sd (one value or one per time)");
    sim_cmd->add_option("--times", spec.design_times, "design times in days");
    sim_cmd->add_option("--replicates", spec.replicates_per_time, "biological replicates per time");
    sim_cmd->add_option("--weight-peak", spec.weight_single_peak, "single-peak pattern weight");
    sim_cmd->add_option("--weight-monotone", spec.weight_monotone, "monotone pattern weight");
    sim_cmd->add_option("--weight-cyclic", spec.weight_cyclic, "cyclic pattern weight");

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "per-gene smoothing fits and band CSVs");
    std::vector<std::string> band_genes;
    add_common(fit_cmd, true);
    fit_cmd->add_option("--genes", band_genes, "genes whose band CSVs to write");

    // call
    auto* call_cmd = app.add_subcommand("call", "DE calls with FDR_EC and enrichment");
    add_common(call_cmd, true);

    // anova
    auto* anova_cmd = app.add_subcommand("anova", "quadratic-regression F-test baseline");
    bool anova_adjust = false;
    add_common(anova_cmd, true);
    anova_cmd->add_flag("--adjust", anova_adjust, "threshold on BH-adjusted p-values");

    // cluster
    auto* cluster_cmd = app.add_subcommand("cluster", "spectral clustering of DE gene profiles");
    std::string calls_path;
    add_common(cluster_cmd, true);
    cluster_cmd->add_option("--calls", calls_path, "calls.tsv from a previous call run");
    cluster_cmd->add_option("--k", cfg.cluster_k, "number of clusters");
    cluster_cmd->add_option("--restarts", cfg.restarts, "k-means restarts");

    // compare
    auto* compare_cmd = app.add_subcommand("compare", "side-by-side lrsa vs anova report");
    std::string known_path, verified_path, sim_calls_path;
    add_common(compare_cmd, true);
    compare_cmd->add_option("--known", known_path, "file of known DE gene ids (one per line)");
    compare_cmd->add_option("--verified", verified_path, "file of verified DE gene ids");
    compare_cmd->add_option("--sim-calls", sim_calls_path, "calls.tsv from a companion run for overlap");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) {
            for (CLI::App* sub : {sim_cmd, fit_cmd, call_cmd, anova_cmd, cluster_cmd, compare_cmd}) {
                if (sub->parsed()) apply_config_file(cfg, config_path, *sub);
            }
        }
        if (sim_cmd->parsed()) {
            spec.seed = cfg.seed;
            return cmd_simulate(cfg, spec);
        }
        if (fit_cmd->parsed()) return cmd_fit(cfg, band_genes);
        if (call_cmd->parsed()) return cmd_call(cfg);
        if (anova_cmd->parsed()) return cmd_anova(cfg, anova_adjust);
        if (cluster_cmd->parsed()) return cmd_cluster(cfg, calls_path);
        if (compare_cmd->parsed()) return cmd_compare(cfg, known_path, verified_path, sim_calls_path);
    } catch (const lrsa::Error& e) {
        std::cerr << "error: " << lrsa::to_string(e.category()) << ": " << e.what() << "\n";
        switch (e.category()) {
            case lrsa::ErrorCategory::io: return 2;
            case lrsa::ErrorCategory::parse: return 3;
            case lrsa::ErrorCategory::validation: return 4;
            case lrsa::ErrorCategory::numeric: return 5;
            case lrsa::ErrorCategory::usage: return 64;
        }
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 70;
    }
    return 0;
}
