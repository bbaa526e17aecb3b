#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "fisherspike/io.hpp"
#include "fisherspike/simulate.hpp"

using namespace fisherspike;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("fisherspike_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

SimulationConfig small_config() {
    SimulationConfig cfg;
    cfg.p = 50;
    cfg.reps = 6;
    cfg.master_seed = 4242;
    return cfg;
}

}  // namespace

TEST_SUITE("simulate") {

TEST_CASE("config finalize fills the study defaults") {
    SimulationConfig cfg;
    cfg.p = 100;
    cfg.finalize();
    CHECK(cfg.n1 == 200);
    CHECK(cfg.n2 == 400);
    REQUIRE(cfg.spikes.size() == 4);
    CHECK(cfg.spikes[0].ranks == std::vector<int>{1});
    CHECK(cfg.spikes[1].ranks == std::vector<int>{2, 3});
    CHECK(cfg.spikes[2].ranks == std::vector<int>{98, 99});
    CHECK(cfg.spikes[3].ranks == std::vector<int>{100});
    CHECK(cfg.spikes[0].true_value == 10.0);
    CHECK(cfg.spikes[3].true_value == 0.1);
    cfg.finalize();  // idempotent
    CHECK(cfg.spikes.size() == 4);

    SimulationConfig bad;
    bad.p = 7;
    CHECK_THROWS_AS(bad.finalize(), std::invalid_argument);
    SimulationConfig odd;
    odd.p = 9;
    CHECK_THROWS_AS(odd.finalize(), BadDimension);
}

TEST_CASE("replications are deterministic in (config, rep)") {
    SimulationConfig cfg = small_config();
    cfg.finalize();
    const ReplicationRecord a = run_replication(cfg, 3);
    const ReplicationRecord b = run_replication(cfg, 3);
    CHECK(a.estimates == b.estimates);
    CHECK(a.largest == b.largest);
    CHECK(a.smallest == b.smallest);
    CHECK(a.stream == 3);
    CHECK(a.generated);
    CHECK(std::is_sorted(a.largest.rbegin(), a.largest.rend()));
    CHECK(std::is_sorted(a.smallest.rbegin(), a.smallest.rend()));
}

TEST_CASE("study-size replication lands in the expected estimator range") {
    SimulationConfig cfg;
    cfg.p = 100;
    cfg.master_seed = 31415;
    cfg.finalize();
    const ReplicationRecord rec = run_replication(cfg, 0);
    REQUIRE(rec.generated);
    CHECK(rec.estimates[0] > 8.0);   // a1 targets 10 at p = 100
    CHECK(rec.estimates[0] < 12.0);
}

TEST_CASE("minimal p = 8 pipeline stays alive") {
    SimulationConfig cfg;
    cfg.p = 8;
    cfg.reps = 2;
    cfg.master_seed = 11;
    cfg.finalize();
    const AggregateReport report = run_monte_carlo(cfg);
    CHECK(report.successful_reps == 2);
    for (const auto& rec : report.records) {
        CHECK(rec.generated);
        CHECK(rec.estimates.size() == 4);
    }
}

TEST_CASE("single replication statistics") {
    SimulationConfig cfg = small_config();
    cfg.reps = 1;
    const AggregateReport report = run_monte_carlo(cfg);
    for (std::size_t g = 0; g < report.per_spike.size(); ++g) {
        const auto& agg = report.per_spike[g];
        if (agg.count == 0) continue;
        CHECK(agg.mean == report.records[0].estimates[g]);
        CHECK(agg.sd == 0.0);
    }
}

TEST_CASE("histogram counts are conserved") {
    SimulationConfig cfg = small_config();
    cfg.reps = 40;
    const AggregateReport report = run_monte_carlo(cfg);
    for (const auto& agg : report.per_spike) {
        int total = 0;
        for (int c : agg.histogram.counts) total += c;
        CHECK(total == agg.count);
        CHECK(agg.histogram.counts.size() == kHistogramBins);
        CHECK(agg.histogram.edges.size() == kHistogramBins + 1);
    }
}

TEST_CASE("outputs are byte-identical across runs and worker counts") {
    const fs::path d1 = fresh_dir("det1");
    const fs::path d2 = fresh_dir("det2");
    const fs::path d3 = fresh_dir("det3");

    SimulationConfig cfg = small_config();
    cfg.reps = 8;
    cfg.workers = 1;
    cfg.out_dir = d1.string();
    run_monte_carlo(cfg);
    cfg.out_dir = d2.string();
    run_monte_carlo(cfg);
    cfg.workers = 2;
    cfg.out_dir = d3.string();
    run_monte_carlo(cfg);

    for (const char* name : {"summary.csv", "replications.csv", "histogram_a1.csv",
                             "histogram_a2.csv", "histogram_a3.csv", "histogram_a4.csv"}) {
        CAPTURE(name);
        const std::string base = slurp(d1 / name);
        CHECK(base == slurp(d2 / name));
        CHECK(base == slurp(d3 / name));
        CHECK_FALSE(base.empty());
    }
    fs::remove_all(d1);
    fs::remove_all(d2);
    fs::remove_all(d3);
}

TEST_CASE("report round-trips through the CSV files") {
    const fs::path dir = fresh_dir("roundtrip");
    SimulationConfig cfg = small_config();
    cfg.reps = 10;
    cfg.out_dir = dir.string();
    const AggregateReport report = run_monte_carlo(cfg);

    // replications.csv: one row per record plus header, full precision.
    std::ifstream reps_file(dir / "replications.csv");
    std::string line;
    std::getline(reps_file, line);
    CHECK(line == "rep,stream,ok,a1,a2,a3,a4,top1,top2,top3,top4,bottom1,bottom2,bottom3,"
                  "bottom4");
    int rows = 0;
    while (std::getline(reps_file, line)) {
        std::istringstream ss(line);
        std::string field;
        std::getline(ss, field, ',');
        CHECK(std::stoi(field) == rows);
        for (int skip = 0; skip < 2; ++skip) std::getline(ss, field, ',');
        std::getline(ss, field, ',');
        const double a1 = std::strtod(field.c_str(), nullptr);
        CHECK(a1 == report.records[static_cast<std::size_t>(rows)].estimates[0]);
        ++rows;
    }
    CHECK(rows == 10);

    // summary.csv parses and echoes the aggregate.
    std::ifstream summary(dir / "summary.csv");
    std::getline(summary, line);
    CHECK(line == "spike,true_value,mean,sd,reps_ok,reps_failed");
    int spikes_seen = 0;
    while (std::getline(summary, line)) {
        std::istringstream ss(line);
        std::string label, truev, mean, sd, ok, failed;
        std::getline(ss, label, ',');
        std::getline(ss, truev, ',');
        std::getline(ss, mean, ',');
        std::getline(ss, sd, ',');
        std::getline(ss, ok, ',');
        std::getline(ss, failed, ',');
        const auto& agg = report.per_spike[static_cast<std::size_t>(spikes_seen)];
        CHECK(label == agg.label);
        CHECK(std::strtod(mean.c_str(), nullptr) == agg.mean);
        CHECK(std::stoi(ok) == agg.count);
        ++spikes_seen;
    }
    CHECK(spikes_seen == 4);

    // histogram files: counts sum to the aggregate count.
    for (const auto& agg : report.per_spike) {
        std::ifstream hist(dir / ("histogram_" + agg.label + ".csv"));
        std::getline(hist, line);
        CHECK(line == "bin_left,bin_right,count");
        int total = 0, bins = 0;
        while (std::getline(hist, line)) {
            const auto last_comma = line.rfind(',');
            total += std::stoi(line.substr(last_comma + 1));
            ++bins;
        }
        CHECK(total == agg.count);
        CHECK(bins == kHistogramBins);
    }
    fs::remove_all(dir);
}

TEST_CASE("report writing survives a spike with no successful estimates") {
    const fs::path dir = fresh_dir("degenerate");

    AggregateReport report;
    report.config = small_config();
    report.config.finalize();
    report.successful_reps = 1;
    ReplicationRecord rec;
    rec.rep = 0;
    rec.generated = true;
    rec.estimates = {1.0, std::numeric_limits<double>::quiet_NaN()};
    rec.estimate_errors = {"", "all ranks failed"};
    rec.largest = {3.0, 2.0, 1.5, 1.0};
    rec.smallest = {0.4, 0.3, 0.2, 0.1};
    report.records.push_back(rec);

    SpikeAggregate good;
    good.label = "ok";
    good.count = 1;
    good.mean = 1.0;
    good.histogram.edges = {0.9, 1.1};
    good.histogram.counts = {1};
    report.per_spike.push_back(good);

    SpikeAggregate empty;
    empty.label = "dead";
    empty.count = 0;
    report.per_spike.push_back(empty);

    write_report(report, dir.string());

    const std::string summary = slurp(dir / "summary.csv");
    CHECK(summary.find("dead,,,,0,1") != std::string::npos);
    CHECK(slurp(dir / "histogram_dead.csv") == "bin_left,bin_right,count\n");
    fs::remove_all(dir);
}

TEST_CASE("config JSON loading") {
    const fs::path dir = fresh_dir("config");
    const fs::path cfg_path = dir / "cfg.json";
    {
        std::ofstream out(cfg_path);
        out << R"({
            "p": 50, "dist": "chisq", "reps": 3, "seed": 9,
            "exclusion_ratio": 0.25,
            "spikes": [{"label": "top", "value": 10.0, "ranks": [1]}],
            "out_dir": ")" << (dir / "out").string() << R"("
        })";
    }
    SimulationConfig cfg = load_simulation_config(cfg_path.string());
    CHECK(cfg.p == 50);
    CHECK(cfg.dist == EntryDistribution::StandardizedChiSquare2);
    CHECK(cfg.reps == 3);
    CHECK(cfg.master_seed == 9);
    CHECK(cfg.exclusion_ratio == 0.25);
    REQUIRE(cfg.spikes.size() == 1);
    CHECK(cfg.spikes[0].label == "top");
    cfg.finalize();
    CHECK(cfg.n1 == 100);
    CHECK(cfg.spikes.size() == 1);  // explicit spikes are kept

    const AggregateReport report = run_monte_carlo(cfg);
    CHECK(report.successful_reps == 3);
    CHECK(fs::exists(dir / "out" / "summary.csv"));

    CHECK_THROWS_AS(load_simulation_config((dir / "missing.json").string()), Error);
    fs::remove_all(dir);
}

}  // TEST_SUITE
