#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fisherspike/io.hpp"

using namespace fisherspike;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code;
    std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(FISHERSPIKE_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string output;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) output.append(buf.data(), n);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, output};
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("fisherspike_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> csv_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::istringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
}

// Field `column` (0-based) of the first data row whose first field equals key,
// compared as text or, failing that, as a parsed number.
double csv_lookup(const fs::path& path, const std::string& key, std::size_t column) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        const auto fields = csv_fields(line);
        if (fields.empty()) continue;
        const bool match =
            fields[0] == key ||
            std::strtod(fields[0].c_str(), nullptr) == std::strtod(key.c_str(), nullptr);
        if (!match) continue;
        REQUIRE(fields.size() > column);
        return std::strtod(fields[column].c_str(), nullptr);
    }
    REQUIRE_MESSAGE(false, "row not found: " << key);
    return 0.0;
}

// Pooled value from an estimate CSV: the row of `label` with an empty rank.
double csv_pooled(const fs::path& path, const std::string& label) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        const auto fields = csv_fields(line);
        if (fields.size() < 4 || fields[0] != label || !fields[1].empty()) continue;
        return std::strtod(fields[3].c_str(), nullptr);
    }
    REQUIRE_MESSAGE(false, "pooled row not found: " << label);
    return 0.0;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help and unknown flags") {
    CHECK(run_cli("--help").exit_code == 0);
    const RunResult help = run_cli("limits --help");
    CHECK(help.exit_code == 0);
    CHECK(help.output.find("--atoms") != std::string::npos);
    CHECK(help.output.find("--spikes") != std::string::npos);

    CHECK(run_cli("limits --atoms 1:1 --c1 0.5 --c2 0.25 --spikes 3 --bogus 1").exit_code !=
          0);
    CHECK(run_cli("").exit_code != 0);  // a subcommand is required
}

TEST_CASE("limits matches the library exactly") {
    const fs::path dir = fresh_dir("limits");
    const fs::path csv = dir / "limits.csv";

    const RunResult r = run_cli(
        "limits --atoms 2:0.5,1:0.5 --c1 0.5 --c2 0.25 --spikes 10,7.5,0.2,0.1 --csv " +
        csv.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("15.468") != std::string::npos);
    for (int i = 0; i < 4; ++i) {
        CHECK(r.output.find("Distant") != std::string::npos);
    }

    const SpectralMeasure h({1.0, 2.0}, {0.5, 0.5});
    const AspectRatios c(0.5, 0.25);
    CHECK(csv_lookup(csv, "10", 2) == psi(10.0, h, c));
    CHECK(csv_lookup(csv, "7.5", 2) == psi(7.5, h, c));
    CHECK(csv_lookup(csv, "0.2", 2) == psi(0.2, h, c));
    CHECK(csv_lookup(csv, "0.1", 2) == psi(0.1, h, c));
    CHECK(csv_lookup(csv, "10", 4) == condition_ii(10.0, h, c));
    CHECK(csv_lookup(csv, "10", 5) == psi_prime(10.0, h, c));
    fs::remove_all(dir);
}

TEST_CASE("limits identity regime and in-support flag") {
    const RunResult ident = run_cli("limits --atoms 1:1 --c1 0 --c2 0 --spikes 3");
    CHECK(ident.exit_code == 0);
    CHECK(ident.output.find("Distant") != std::string::npos);
    CHECK(ident.output.find("3") != std::string::npos);

    const RunResult atom = run_cli("limits --atoms 1:1 --c1 0.5 --c2 0.25 --spikes 1");
    CHECK(atom.exit_code == 0);
    CHECK(atom.output.find("in support of H") != std::string::npos);
}

TEST_CASE("support matches the closed-form point-mass edges") {
    const fs::path dir = fresh_dir("support");
    const fs::path csv = dir / "support.csv";

    const RunResult r =
        run_cli("support --atoms 1:1 --c1 0.5 --c2 0.25 --csv " + csv.string());
    CHECK(r.exit_code == 0);

    const std::string content = slurp(csv);
    std::istringstream ss(content);
    std::string line;
    std::getline(ss, line);
    CHECK(line == "lower,upper");
    std::getline(ss, line);
    const auto comma = line.find(',');
    const double lo = std::strtod(line.substr(0, comma).c_str(), nullptr);
    const double hi = std::strtod(line.substr(comma + 1).c_str(), nullptr);

    const SupportSet sup = lsd_support(SpectralMeasure::point_mass(1.0),
                                       AspectRatios(0.5, 0.25));
    CHECK(lo == sup.intervals[0].first);
    CHECK(hi == sup.intervals[0].second);
    CHECK(lo == doctest::Approx(0.07797541318366283).epsilon(1e-8));
    CHECK(hi == doctest::Approx(5.699802364594115).epsilon(1e-8));

    const RunResult narrow = run_cli("support --atoms 1:1 --c1 1e-4 --c2 1e-4");
    CHECK(narrow.exit_code == 0);
    CHECK(narrow.output.find("1 interval") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("estimate reproduces the hand chain through the file path") {
    const fs::path dir = fresh_dir("estimate");
    const fs::path file = dir / "eigs.txt";
    save_eigenvalues(file.string(), {5.0, 1.0, 0.5});

    const fs::path csv = dir / "est.csv";
    const RunResult r = run_cli("estimate --file " + file.string() +
                                " --n1 4 --n2 8 --ranks a=1 --csv " + csv.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("3.23248") != std::string::npos);

    const EigenSample s({5.0, 1.0, 0.5}, 4, 8);
    CHECK(csv_lookup(csv, "a", 2) == estimate_spike_at(s, 1));
    CHECK(csv_pooled(csv, "a") == estimate_spike_at(s, 1));
    CHECK(estimate_spike_at(s, 1) == doctest::Approx(3.232484076433121).epsilon(1e-14));
    fs::remove_all(dir);
}

TEST_CASE("estimate exit code tracks whether any group succeeded") {
    const fs::path dir = fresh_dir("exitcode");
    const fs::path file = dir / "eigs.txt";
    save_eigenvalues(file.string(), {5.0, 1.0, 0.0});  // rank 3 cannot be estimated

    // One failing group among two: reported, exit 0.
    const RunResult partial = run_cli("estimate --file " + file.string() +
                                      " --n1 4 --n2 8 --ranks a=1 --ranks bad=3");
    CHECK(partial.exit_code == 0);
    CHECK(partial.output.find("error") != std::string::npos);

    // Every group failing: exit nonzero.
    const RunResult total = run_cli("estimate --file " + file.string() +
                                    " --n1 4 --n2 8 --ranks bad=3");
    CHECK(total.exit_code != 0);
    fs::remove_all(dir);
}

TEST_CASE("estimate rejects unsorted input with a sorting hint") {
    const fs::path dir = fresh_dir("unsorted");
    const fs::path file = dir / "eigs.txt";
    {
        std::ofstream out(file);
        out << "1\n5\n0.5\n";
    }
    const RunResult r =
        run_cli("estimate --file " + file.string() + " --n1 4 --n2 8 --ranks a=1");
    CHECK(r.exit_code != 0);
    CHECK(r.output.find("sort") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("estimate on a simulated sample recovers the study spikes") {
    const fs::path dir = fresh_dir("est_sim");
    const fs::path file = dir / "eigs.txt";

    const int p = 400;
    const PopulationSpec spec(p, 0.5, build_lambda(p));
    StreamRng rng(5150, 0);
    const EigenSample s =
        fisher_eigenvalues(spec, EntryDistribution::StandardNormal, 2 * p, 4 * p, rng);
    save_eigenvalues(file.string(), s.values);

    const fs::path csv = dir / "est.csv";
    const RunResult r = run_cli(
        "estimate --file " + file.string() +
        " --n1 800 --n2 1600 --ranks a1=1 --ranks a2=2,3 --ranks a3=398,399 --ranks a4=400"
        " --csv " + csv.string());
    CHECK(r.exit_code == 0);

    CHECK(csv_pooled(csv, "a1") == estimate_spike_at(s, 1));
    CHECK(csv_pooled(csv, "a2") == estimate_spike_group(s, {2, 3}).pooled);
    CHECK(csv_pooled(csv, "a1") == doctest::Approx(10.0).epsilon(0.20));
    CHECK(csv_pooled(csv, "a2") == doctest::Approx(7.5).epsilon(0.20));
    CHECK(csv_pooled(csv, "a3") == doctest::Approx(0.2).epsilon(0.20));
    CHECK(csv_pooled(csv, "a4") == doctest::Approx(0.1).epsilon(0.20));
    fs::remove_all(dir);
}

TEST_CASE("simulate runs all three distributions deterministically") {
    const fs::path base = fresh_dir("simulate");

    for (const std::string dist : {"normal", "chisq", "uniform"}) {
        const fs::path out = base / dist;
        const RunResult r = run_cli("simulate --p 50 --dist " + dist +
                                    " --reps 5 --seed 7 --out " + out.string());
        CAPTURE(dist);
        CHECK(r.exit_code == 0);
        CHECK(fs::exists(out / "summary.csv"));
        CHECK(fs::exists(out / "replications.csv"));
        CHECK(fs::exists(out / "histogram_a1.csv"));
    }

    const fs::path again = base / "normal_again";
    const RunResult r = run_cli("simulate --p 50 --dist normal --reps 5 --seed 7 --out " +
                                again.string());
    CHECK(r.exit_code == 0);
    for (const char* name : {"summary.csv", "replications.csv", "histogram_a1.csv"}) {
        CHECK(slurp(base / "normal" / name) == slurp(again / name));
    }
    fs::remove_all(base);
}

}  // TEST_SUITE
