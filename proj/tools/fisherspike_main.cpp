#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fisherspike/io.hpp"

namespace {

using namespace fisherspike;

std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_csv(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    return out;
}

struct LimitsArgs {
    std::string atoms;
    double c1 = 0.0, c2 = 0.0;
    std::string spikes;
    double delta = -1.0;  // negative: use the measure default
    std::string csv;
};

int run_limits(const LimitsArgs& args) {
    const SpectralMeasure H = parse_measure_spec(args.atoms);
    const AspectRatios c(args.c1, args.c2);
    const std::vector<double> spikes = parse_double_list(args.spikes);
    const double delta = args.delta >= 0.0 ? args.delta : H.default_delta();

    std::ofstream csv;
    if (!args.csv.empty()) {
        csv = open_csv(args.csv);
        csv << "spike,kind,limit,critical_point,condition_ii,psi_prime\n";
    }

    std::printf("%-12s %-12s %-14s %-14s %-14s %-14s\n", "spike", "kind", "limit",
                "critical_pt", "cond_ii", "psi_prime");
    for (double alpha : spikes) {
        if (H.in_support(alpha, delta)) {
            std::printf("%-12s %-12s %s\n", fmt6(alpha).c_str(), "InSupport",
                        "in support of H (within delta)");
            if (csv) csv << fmt_full(alpha) << ",InSupport,,,,\n";
            continue;
        }
        try {
            const SpikeClassification cls = phase_transition_limit(alpha, H, c);
            const double cond = condition_ii(alpha, H, c);
            const double dp = psi_prime(alpha, H, c);
            const std::string crit =
                cls.critical_point ? fmt6(*cls.critical_point) : std::string("-");
            std::printf("%-12s %-12s %-14s %-14s %-14s %-14s\n", fmt6(alpha).c_str(),
                        to_string(cls.kind), fmt6(cls.limit).c_str(), crit.c_str(),
                        fmt6(cond).c_str(), fmt6(dp).c_str());
            if (csv) {
                csv << fmt_full(alpha) << ',' << to_string(cls.kind) << ','
                    << fmt_full(cls.limit) << ','
                    << (cls.critical_point ? fmt_full(*cls.critical_point) : "") << ','
                    << fmt_full(cond) << ',' << fmt_full(dp) << '\n';
            }
        } catch (const AtomCollision&) {
            std::printf("%-12s %-12s %s\n", fmt6(alpha).c_str(), "InSupport",
                        "in support of H (atom collision)");
            if (csv) csv << fmt_full(alpha) << ",InSupport,,,,\n";
        }
    }
    return 0;
}

struct SupportArgs {
    std::string atoms;
    double c1 = 0.0, c2 = 0.0;
    std::string csv;
};

int run_support(const SupportArgs& args) {
    const SpectralMeasure H = parse_measure_spec(args.atoms);
    const AspectRatios c(args.c1, args.c2);
    const SupportSet support = lsd_support(H, c);

    std::printf("support of the Fisher LSD (%zu interval%s):\n", support.intervals.size(),
                support.intervals.size() == 1 ? "" : "s");
    for (const auto& [lo, hi] : support.intervals) {
        std::printf("  [%s, %s]\n", fmt6(lo).c_str(), fmt6(hi).c_str());
    }
    if (!args.csv.empty()) {
        auto csv = open_csv(args.csv);
        csv << "lower,upper\n";
        for (const auto& [lo, hi] : support.intervals) {
            csv << fmt_full(lo) << ',' << fmt_full(hi) << '\n';
        }
    }
    return 0;
}

struct EstimateArgs {
    std::string file;
    int n1 = 0, n2 = 0;
    std::vector<std::string> ranks;
    double exclusion_ratio = kDefaultExclusionRatio;
    std::string csv;
};

int run_estimate(const EstimateArgs& args) {
    const EigenSample sample = load_eigen_sample(args.file, args.n1, args.n2);

    std::vector<std::pair<std::string, std::vector<int>>> groups;
    for (const auto& spec : args.ranks) groups.push_back(parse_rank_group(spec));
    if (groups.empty()) throw Error("at least one --ranks group is required");

    std::ofstream csv;
    if (!args.csv.empty()) {
        csv = open_csv(args.csv);
        csv << "group,rank,estimate,pooled\n";
    }

    int failed_groups = 0;
    for (const auto& [label, ranks] : groups) {
        try {
            const SpikeEstimate est = estimate_spike_group(sample, ranks,
                                                           args.exclusion_ratio);
            for (std::size_t i = 0; i < est.ranks.size(); ++i) {
                if (est.rank_errors[i].empty()) {
                    std::printf("%s rank %d: %s\n", label.c_str(), est.ranks[i],
                                fmt6(est.per_rank[i]).c_str());
                } else {
                    std::printf("%s rank %d: error: %s\n", label.c_str(), est.ranks[i],
                                est.rank_errors[i].c_str());
                }
                if (csv) {
                    csv << label << ',' << est.ranks[i] << ','
                        << (est.rank_errors[i].empty() ? fmt_full(est.per_rank[i]) : "")
                        << ",\n";
                }
            }
            if (est.any_success()) {
                std::printf("%s pooled: %s\n", label.c_str(), fmt6(est.pooled).c_str());
                if (csv) csv << label << ",,," << fmt_full(est.pooled) << '\n';
            } else {
                std::printf("%s pooled: all ranks failed\n", label.c_str());
                ++failed_groups;
            }
        } catch (const std::exception& e) {
            std::printf("%s: error: %s\n", label.c_str(), e.what());
            ++failed_groups;
        }
    }
    return failed_groups == static_cast<int>(groups.size()) ? 1 : 0;
}

struct SimulateArgs {
    std::string config_file;
    std::optional<int> p, n1, n2, reps, workers;
    std::optional<std::string> dist, out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<double> rho, exclusion_ratio;
};

int run_simulate(const SimulateArgs& args) {
    SimulationConfig cfg;
    if (!args.config_file.empty()) cfg = load_simulation_config(args.config_file);
    if (args.p) cfg.p = *args.p;
    if (args.n1) cfg.n1 = *args.n1;
    if (args.n2) cfg.n2 = *args.n2;
    if (args.reps) cfg.reps = *args.reps;
    if (args.workers) cfg.workers = *args.workers;
    if (args.dist) cfg.dist = entry_distribution_from_string(*args.dist);
    if (args.seed) cfg.master_seed = *args.seed;
    if (args.rho) cfg.rho = *args.rho;
    if (args.exclusion_ratio) cfg.exclusion_ratio = *args.exclusion_ratio;
    if (args.out_dir) cfg.out_dir = *args.out_dir;
    if (cfg.out_dir.empty()) cfg.out_dir = "fisherspike_out";
    cfg.finalize();

    const AggregateReport report = run_monte_carlo(cfg);

    std::printf("%d/%d replications succeeded; outputs in %s\n", report.successful_reps,
                cfg.reps, cfg.out_dir.c_str());
    std::printf("%-8s %-12s %-12s %-12s %-8s\n", "spike", "true", "mean", "sd", "count");
    for (const auto& agg : report.per_spike) {
        std::printf("%-8s %-12s %-12s %-12s %-8d\n", agg.label.c_str(),
                    agg.true_value ? fmt6(*agg.true_value).c_str() : "-",
                    agg.count > 0 ? fmt6(agg.mean).c_str() : "-",
                    agg.count > 0 ? fmt6(agg.sd).c_str() : "-", agg.count);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spiked-eigenvalue limits, support sets and estimators for "
                 "high-dimensional Fisher matrices"};
    app.require_subcommand(1);

    LimitsArgs limits_args;
    auto* limits = app.add_subcommand(
        "limits", "Classify spikes and compute the limits of their sample eigenvalues");
    limits->add_option("--atoms", limits_args.atoms, "bulk measure H as t:w[,t:w...]")
        ->required();
    limits->add_option("--c1", limits_args.c1, "aspect ratio p/n1")->required();
    limits->add_option("--c2", limits_args.c2, "aspect ratio p/n2")->required();
    limits->add_option("--spikes", limits_args.spikes, "comma-separated spike values")
        ->required();
    limits->add_option("--delta", limits_args.delta,
                       "spike separation constant (default 1e-3 * atom span)");
    limits->add_option("--csv", limits_args.csv, "write full-precision results to CSV");

    SupportArgs support_args;
    auto* support = app.add_subcommand(
        "support", "Compute the support of the Fisher limiting spectral distribution");
    support->add_option("--atoms", support_args.atoms, "bulk measure H as t:w[,t:w...]")
        ->required();
    support->add_option("--c1", support_args.c1, "aspect ratio p/n1")->required();
    support->add_option("--c2", support_args.c2, "aspect ratio p/n2")->required();
    support->add_option("--csv", support_args.csv, "write intervals to CSV");

    EstimateArgs estimate_args;
    auto* estimate = app.add_subcommand(
        "estimate", "Estimate population spikes from a file of sample eigenvalues");
    estimate->add_option("--file", estimate_args.file,
                         "eigenvalue file, one nonnegative real per line, descending")
        ->required();
    estimate->add_option("--n1", estimate_args.n1, "first sample size")->required();
    estimate->add_option("--n2", estimate_args.n2, "second sample size")->required();
    estimate
        ->add_option("--ranks", estimate_args.ranks,
                     "labeled rank group label=r1[,r2...]; repeatable")
        ->required();
    estimate->add_option("--exclusion-ratio", estimate_args.exclusion_ratio,
                         "relative exclusion window (default 0.2)");
    estimate->add_option("--csv", estimate_args.csv, "write full-precision results to CSV");

    SimulateArgs sim_args;
    auto* simulate = app.add_subcommand("simulate", "Run the Monte Carlo study");
    simulate->add_option("--config", sim_args.config_file, "JSON config file");
    simulate->add_option("--p", sim_args.p, "dimension (even, >= 8)");
    simulate->add_option("--n1", sim_args.n1, "first sample size (default 2p)");
    simulate->add_option("--n2", sim_args.n2, "second sample size (default 4p)");
    simulate->add_option("--dist", sim_args.dist, "normal | chisq | uniform");
    simulate->add_option("--reps", sim_args.reps, "number of replications");
    simulate->add_option("--seed", sim_args.seed, "master seed");
    simulate->add_option("--rho", sim_args.rho, "Toeplitz decay of the rotation");
    simulate->add_option("--exclusion-ratio", sim_args.exclusion_ratio,
                         "relative exclusion window (default 0.2)");
    simulate->add_option("--workers", sim_args.workers, "worker threads (0 = hardware)");
    simulate->add_option("--out", sim_args.out_dir, "output directory for CSV artifacts");

    CLI11_PARSE(app, argc, argv);

    try {
        if (limits->parsed()) return run_limits(limits_args);
        if (support->parsed()) return run_support(support_args);
        if (estimate->parsed()) return run_estimate(estimate_args);
        if (simulate->parsed()) return run_simulate(sim_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
