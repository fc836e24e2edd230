#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "lrsa/tsv.hpp"
#include "schema_check.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string cli_path() {
    const char* env = std::getenv("LRSA_CLI");
    REQUIRE_MESSAGE(env != nullptr, "LRSA_CLI must point at the built lrsa binary");
    return env;
}

std::string schemas_dir() {
    const char* env = std::getenv("LRSA_SCHEMAS");
    REQUIRE_MESSAGE(env != nullptr, "LRSA_SCHEMAS must point at the schemas directory");
    return env;
}

int run(const std::string& command) { return std::system(command.c_str()); }

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

json load_json(const std::string& path) { return json::parse(slurp(path)); }

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("lrsa_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string sub(const std::string& name) const { return (path / name).string(); }
};

// one shared simulated dataset for the whole suite
const TempDir& dataset() {
    static TempDir dir;
    static bool ready = false;
    if (!ready) {
        const std::string cmd = cli_path() +
            " simulate --out-dir " + dir.sub("data") +
            " --targets 60 --controls 15 --de-fraction 0.2 --amplitude 2.0 --noise-sd 0.25 --seed 5";
        REQUIRE(run(cmd) == 0);
        ready = true;
    }
    return dir;
}

std::string inputs() {
    const auto& dir = dataset();
    return " --matrix " + dir.sub("data") + "/matrix.tsv" +
           " --samples " + dir.sub("data") + "/samples.tsv" +
           " --annotations " + dir.sub("data") + "/annotations.tsv";
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate writes the TSV triplet and schema-valid truth") {
    const auto& dir = dataset();
    CHECK(fs::exists(dir.sub("data") + "/matrix.tsv"));
    CHECK(fs::exists(dir.sub("data") + "/samples.tsv"));
    CHECK(fs::exists(dir.sub("data") + "/annotations.tsv"));

    const auto truth = load_json(dir.sub("data") + "/truth.json");
    const auto schema = load_json(schemas_dir() + "/sim_truth.schema.json");
    const auto errors = schema_check::validate(schema, truth);
    for (const auto& e : errors) MESSAGE(e);
    CHECK(errors.empty());
    CHECK(truth["de_ids"].size() == 12);  // 20% of 60
}

TEST_CASE("fit writes the fits table and 4-column band CSVs") {
    const auto& dir = dataset();
    const std::string out = dir.sub("fit_out");
    REQUIRE(run(cli_path() + " fit" + inputs() + " --out-dir " + out + " --genes g00001") == 0);

    const auto fits = lrsa::read_lines(out + "/fits.tsv");
    REQUIRE(fits.size() == 76);  // header + 75 probes
    CHECK(lrsa::split_tabs(fits[0]).size() == 3 + 31);

    const auto band = lrsa::read_lines(out + "/band_g00001.csv");
    CHECK(band[0] == "t,fit,lower,upper");
    REQUIRE(band.size() >= 32);
    for (std::size_t i = 1; i < band.size(); ++i) {
        std::size_t commas = 0;
        for (char ch : band[i]) commas += ch == ',' ? 1 : 0;
        CHECK(commas == 3);
    }
}

TEST_CASE("call emits a schema-valid summary with correction levels") {
    const auto& dir = dataset();
    const std::string out = dir.sub("call_out");
    REQUIRE(run(cli_path() + " call" + inputs() + " --out-dir " + out) == 0);

    const auto schema = load_json(schemas_dir() + "/call_summary.schema.json");
    const auto summary = load_json(out + "/summary.json");
    const auto errors = schema_check::validate(schema, summary);
    for (const auto& e : errors) MESSAGE(e);
    CHECK(errors.empty());
    CHECK(summary["band_level"].get<double>() == doctest::Approx(0.95));

    // time_points correction on the 6-time design
    const std::string out_tp = dir.sub("call_tp");
    REQUIRE(run(cli_path() + " call" + inputs() + " --out-dir " + out_tp + " --correction time_points") == 0);
    const auto tp = load_json(out_tp + "/summary.json");
    CHECK(tp["band_level"].get<double>() == doctest::Approx(0.9916667).epsilon(1e-6));
    CHECK(tp["settings"]["correction"] == "time_points");

    // genes correction uses the loaded probe count (75)
    const std::string out_g = dir.sub("call_genes");
    REQUIRE(run(cli_path() + " call" + inputs() + " --out-dir " + out_g + " --correction genes") == 0);
    const auto g = load_json(out_g + "/summary.json");
    CHECK(g["band_level"].get<double>() == doctest::Approx(1.0 - 0.05 / 75.0).epsilon(1e-9));
}

TEST_CASE("cluster writes labels and grid-length median CSVs") {
    const auto& dir = dataset();
    const std::string calls_out = dir.sub("call_out");  // produced above
    REQUIRE(fs::exists(calls_out + "/calls.tsv"));
    const std::string out = dir.sub("cluster_out");
    REQUIRE(run(cli_path() + " cluster" + inputs() + " --calls " + calls_out + "/calls.tsv --k 3 --out-dir " +
                out + " --seed 2") == 0);

    const auto labels = lrsa::read_lines(out + "/labels.tsv");
    CHECK(labels[0] == "probe_id\tcluster");
    CHECK(labels.size() > 3);
    for (int cluster = 1; cluster <= 3; ++cluster) {
        const auto median = lrsa::read_lines(out + "/cluster_" + std::to_string(cluster) + "_median.csv");
        CHECK(median.size() == 32);  // header + 31 grid rows
    }
}

TEST_CASE("cluster rejects k above the DE count naming both numbers") {
    const auto& dir = dataset();
    const std::string calls_out = dir.sub("call_out");
    const std::string cmd = cli_path() + " cluster" + inputs() + " --calls " + calls_out +
                            "/calls.tsv --k 60 --out-dir " + dir.sub("cluster_bad") + " 2> " +
                            dir.sub("cluster_err.txt");
    CHECK(run(cmd) != 0);
    const auto err = slurp(dir.sub("cluster_err.txt"));
    CHECK(err.find("k=60") != std::string::npos);
    CHECK(err.find("error: validation") != std::string::npos);
}

TEST_CASE("anova writes the six-column table") {
    const auto& dir = dataset();
    const std::string out = dir.sub("anova_out");
    REQUIRE(run(cli_path() + " anova" + inputs() + " --out-dir " + out + " --adjust") == 0);
    const auto lines = lrsa::read_lines(out + "/anova.tsv");
    CHECK(lines[0] == "probe_id\tf_statistic\tp_value\tp_adjusted\tmax_abs_log2_delta\tis_de");
    CHECK(lines.size() == 76);
}

TEST_CASE("compare merges both methods into one schema-valid report") {
    const auto& dir = dataset();
    const std::string out = dir.sub("compare_out");
    // known/verified lists from the truth file
    const auto truth = load_json(dir.sub("data") + "/truth.json");
    std::string known_path = dir.sub("known.txt");
    std::string verified_path = dir.sub("verified.txt");
    std::string known, verified;
    int i = 0;
    for (const auto& id : truth["de_ids"]) {
        if (i < 4) known += id.get<std::string>() + "\n";
        else if (i < 10) verified += id.get<std::string>() + "\n";
        ++i;
    }
    lrsa::write_text_file(known_path, known);
    lrsa::write_text_file(verified_path, verified);

    REQUIRE(run(cli_path() + " compare" + inputs() + " --out-dir " + out + " --known " + known_path +
                " --verified " + verified_path) == 0);

    const auto schema = load_json(schemas_dir() + "/compare_summary.schema.json");
    const auto summary = load_json(out + "/compare.json");
    const auto errors = schema_check::validate(schema, summary);
    for (const auto& e : errors) MESSAGE(e);
    CHECK(errors.empty());
    REQUIRE(summary["rows"].size() == 2);
    CHECK(summary["rows"][0]["method"] == "lrsa");
    CHECK(summary["rows"][1]["method"] == "anova");
    CHECK(summary["rows"][0].contains("accuracy_pct"));

    const auto table = lrsa::read_lines(out + "/compare.tsv");
    REQUIRE(table.size() == 3);
    CHECK(lrsa::split_tabs(table[1])[0] == "lrsa");
}

TEST_CASE("fit on noiseless quadratic data reproduces the truth") {
    TempDir dir;
    // three probes on exact quadratics over the standard design
    const std::vector<double> times = {0, 1, 3, 7, 14, 30};
    const std::vector<std::array<double, 3>> coef = {{8.0, 0.1, -0.003}, {5.0, -0.2, 0.01}, {7.5, 0.0, 0.0}};
    std::string matrix = "probe_id";
    std::string samples = "array_id\ttime_days\tbiological_replicate\ttechnical_replicate_index\n";
    for (std::size_t c = 0; c < times.size(); ++c) {
        matrix += "\ta" + std::to_string(c);
        samples += "a" + std::to_string(c) + "\t" + lrsa::format_value(times[c]) + "\tr" +
                   std::to_string(c) + "\t1\n";
    }
    matrix += "\n";
    std::string annot = "probe_id\trole\n";
    for (std::size_t p = 0; p < coef.size(); ++p) {
        matrix += "q" + std::to_string(p);
        for (double t : times) {
            matrix += "\t" + lrsa::format_value(coef[p][0] + coef[p][1] * t + coef[p][2] * t * t);
        }
        matrix += "\n";
        annot += "q" + std::to_string(p) + "\ttarget\n";
    }
    lrsa::write_text_file(dir.sub("matrix.tsv"), matrix);
    lrsa::write_text_file(dir.sub("samples.tsv"), samples);
    lrsa::write_text_file(dir.sub("annot.tsv"), annot);

    const std::string out = dir.sub("out");
    REQUIRE(run(cli_path() + " fit --matrix " + dir.sub("matrix.tsv") + " --samples " +
                dir.sub("samples.tsv") + " --annotations " + dir.sub("annot.tsv") +
                " --out-dir " + out) == 0);

    const auto lines = lrsa::read_lines(out + "/fits.tsv");
    REQUIRE(lines.size() == 4);
    const auto header = lrsa::split_tabs(lines[0]);
    for (std::size_t p = 0; p < coef.size(); ++p) {
        const auto row = lrsa::split_tabs(lines[p + 1]);
        REQUIRE(row.size() == header.size());
        for (std::size_t col = 3; col < row.size(); ++col) {
            // grid time encoded in the header as fit_t<value>
            const double t = std::stod(header[col].substr(5));
            const double expected = coef[p][0] + coef[p][1] * t + coef[p][2] * t * t;
            const double got = std::stod(row[col]);
            // 6-significant-digit serialization bounds the round-trip error
            CHECK(std::fabs(got - expected) <= 1e-9 + 1e-5 * std::fabs(expected));
        }
    }
}

TEST_CASE("reruns with the same config are byte-identical") {
    const auto& dir = dataset();
    const std::string out1 = dir.sub("rerun1");
    const std::string out2 = dir.sub("rerun2");
    REQUIRE(run(cli_path() + " call" + inputs() + " --out-dir " + out1) == 0);
    REQUIRE(run(cli_path() + " call" + inputs() + " --out-dir " + out2) == 0);
    CHECK(slurp(out1 + "/calls.tsv") == slurp(out2 + "/calls.tsv"));

    // summaries embed the out_dir path, so compare them with it masked
    auto j1 = load_json(out1 + "/summary.json");
    auto j2 = load_json(out2 + "/summary.json");
    j1["config"]["out_dir"] = "";
    j2["config"]["out_dir"] = "";
    CHECK(j1 == j2);
}

TEST_CASE("config file values apply and flags override them") {
    const auto& dir = dataset();
    const std::string cfg_path = dir.sub("config.json");
    lrsa::write_text_file(cfg_path, "{\"alpha\": 0.01, \"fold_threshold\": 1.5}\n");
    const std::string out = dir.sub("cfg_out");
    REQUIRE(run(cli_path() + " call" + inputs() + " --config " + cfg_path + " --out-dir " + out +
                " --fold 3.0") == 0);
    const auto summary = load_json(out + "/summary.json");
    CHECK(summary["settings"]["alpha"].get<double>() == doctest::Approx(0.01));        // from config
    CHECK(summary["settings"]["fold_threshold"].get<double>() == doctest::Approx(3.0));  // flag wins

    // flag placement relative to --config must not matter
    const std::string out2 = dir.sub("cfg_out2");
    REQUIRE(run(cli_path() + " call" + inputs() + " --fold 3.0 --out-dir " + out2 +
                " --config " + cfg_path) == 0);
    const auto summary2 = load_json(out2 + "/summary.json");
    CHECK(summary2["settings"]["fold_threshold"].get<double>() == doctest::Approx(3.0));
    CHECK(summary2["settings"]["alpha"].get<double>() == doctest::Approx(0.01));
}

TEST_CASE("missing input files exit nonzero with a categorized error") {
    const auto& dir = dataset();
    const std::string cmd = cli_path() + " call --matrix /nonexistent.tsv --samples /n.tsv"
                            " --annotations /n.tsv --out-dir " + dir.sub("err_out") +
                            " 2> " + dir.sub("err.txt");
    CHECK(run(cmd) != 0);
    const auto err = slurp(dir.sub("err.txt"));
    CHECK(err.find("error: io") != std::string::npos);
}

}  // TEST_SUITE
