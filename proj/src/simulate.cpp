#include "fisherspike/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <thread>

namespace fisherspike {

namespace {

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void check_label(const std::string& label) {
    if (label.empty()) throw std::invalid_argument("spike label must be nonempty");
    for (char ch : label) {
        const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                        (ch >= '0' && ch <= '9') || ch == '_' || ch == '-';
        if (!ok) {
            throw std::invalid_argument("spike label '" + label +
                                        "' may only use [A-Za-z0-9_-]");
        }
    }
}

}  // namespace

void SimulationConfig::finalize() {
    if (p < 8) throw std::invalid_argument("p must be at least 8");
    if (n1 == 0) n1 = 2 * p;
    if (n2 == 0) n2 = 4 * p;
    if (n1 < 1) throw std::invalid_argument("n1 must be positive");
    if (n2 <= p) throw std::invalid_argument("n2 must exceed p");
    if (reps < 1) throw std::invalid_argument("reps must be at least 1");
    if (!(exclusion_ratio >= 0.0)) {
        throw std::invalid_argument("exclusion_ratio must be nonnegative");
    }
    if (!(rho >= 0.0) || !(rho < 1.0)) throw std::invalid_argument("rho must lie in [0, 1)");
    if (workers < 0) throw std::invalid_argument("workers must be nonnegative");

    (void)build_lambda(p, lambda_head, lambda_tail);  // validates dimensions

    if (spikes.empty() && lambda_head.size() == 3 && lambda_tail.size() == 3) {
        spikes = {
            {"a1", {1}, lambda_head[0]},
            {"a2", {2, 3}, lambda_head[1]},
            {"a3", {p - 2, p - 1}, lambda_tail[0]},
            {"a4", {p}, lambda_tail[2]},
        };
    }
    for (const auto& s : spikes) {
        check_label(s.label);
        if (s.ranks.empty()) {
            throw std::invalid_argument("spike group '" + s.label + "' has no ranks");
        }
        for (int r : s.ranks) {
            if (r < 1 || r > p) {
                throw std::invalid_argument("rank " + std::to_string(r) + " of spike '" +
                                            s.label + "' outside [1, p]");
            }
        }
    }
    for (std::size_t i = 0; i < spikes.size(); ++i) {
        for (std::size_t j = i + 1; j < spikes.size(); ++j) {
            if (spikes[i].label == spikes[j].label) {
                throw std::invalid_argument("duplicate spike label '" + spikes[i].label + "'");
            }
        }
    }
}

ReplicationRecord run_replication(const SimulationConfig& config, int rep,
                                  const Eigen::MatrixXd& sigma1_half) {
    ReplicationRecord rec;
    rec.rep = rep;
    rec.stream = static_cast<std::uint64_t>(rep);
    rec.estimates.resize(config.spikes.size(), std::numeric_limits<double>::quiet_NaN());
    rec.estimate_errors.resize(config.spikes.size());

    StreamRng rng(config.master_seed, rec.stream);
    EigenSample sample =
        fisher_eigenvalues(sigma1_half, config.dist, config.n1, config.n2, rng);
    rec.generated = true;

    const int k = std::min(4, sample.p);
    rec.largest.assign(sample.values.begin(), sample.values.begin() + k);
    rec.smallest.assign(sample.values.end() - k, sample.values.end());

    for (std::size_t g = 0; g < config.spikes.size(); ++g) {
        const SpikeEstimate est =
            estimate_spike_group(sample, config.spikes[g].ranks, config.exclusion_ratio);
        if (est.any_success()) {
            rec.estimates[g] = est.pooled;
        }
        if (!est.complete()) {
            for (const auto& msg : est.rank_errors) {
                if (!msg.empty()) {
                    rec.estimate_errors[g] = msg;
                    break;
                }
            }
        }
    }
    return rec;
}

ReplicationRecord run_replication(const SimulationConfig& config, int rep) {
    SimulationConfig cfg = config;
    cfg.finalize();
    const PopulationSpec spec(cfg.p, cfg.rho, build_lambda(cfg.p, cfg.lambda_head,
                                                           cfg.lambda_tail));
    return run_replication(cfg, rep, sigma1_sqrt(spec));
}

AggregateReport run_monte_carlo(const SimulationConfig& config) {
    SimulationConfig cfg = config;
    cfg.finalize();

    const PopulationSpec spec(cfg.p, cfg.rho, build_lambda(cfg.p, cfg.lambda_head,
                                                           cfg.lambda_tail));
    const Eigen::MatrixXd sigma1_half = sigma1_sqrt(spec);

    std::vector<ReplicationRecord> records(static_cast<std::size_t>(cfg.reps));
    unsigned n_workers = cfg.workers > 0 ? static_cast<unsigned>(cfg.workers)
                                         : std::max(1u, std::thread::hardware_concurrency());
    n_workers = std::min<unsigned>(n_workers, static_cast<unsigned>(cfg.reps));

    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            const int rep = next.fetch_add(1);
            if (rep >= cfg.reps) return;
            auto& rec = records[static_cast<std::size_t>(rep)];
            try {
                rec = run_replication(cfg, rep, sigma1_half);
            } catch (const std::exception& e) {
                rec.rep = rep;
                rec.stream = static_cast<std::uint64_t>(rep);
                rec.generated = false;
                rec.error = e.what();
                rec.estimates.assign(cfg.spikes.size(),
                                     std::numeric_limits<double>::quiet_NaN());
                rec.estimate_errors.assign(cfg.spikes.size(), "replication failed");
            }
        }
    };

    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    AggregateReport report;
    report.config = cfg;
    report.records = std::move(records);
    for (const auto& rec : report.records) {
        if (rec.generated) ++report.successful_reps;
    }
    if (report.successful_reps == 0) {
        throw Error("every replication failed; first error: " +
                    (report.records.empty() ? std::string("none") : report.records[0].error));
    }

    for (std::size_t g = 0; g < cfg.spikes.size(); ++g) {
        SpikeAggregate agg;
        agg.label = cfg.spikes[g].label;
        agg.true_value = cfg.spikes[g].true_value;

        std::vector<double> vals;
        vals.reserve(report.records.size());
        for (const auto& rec : report.records) {
            if (rec.generated && std::isfinite(rec.estimates[g])) {
                vals.push_back(rec.estimates[g]);
            }
        }
        agg.count = static_cast<int>(vals.size());
        if (agg.count > 0) {
            double sum = 0.0;
            for (double v : vals) sum += v;
            agg.mean = sum / agg.count;
            if (agg.count > 1) {
                double ss = 0.0;
                for (double v : vals) ss += (v - agg.mean) * (v - agg.mean);
                agg.sd = std::sqrt(ss / (agg.count - 1));
            }

            double half = 4.0 * agg.sd;
            if (!(half > 0.0)) half = 1e-9 * std::max(1.0, std::abs(agg.mean));
            const double lo = agg.mean - half;
            const double width = 2.0 * half / kHistogramBins;
            agg.histogram.counts.assign(kHistogramBins, 0);
            agg.histogram.edges.resize(kHistogramBins + 1);
            for (int b = 0; b <= kHistogramBins; ++b) {
                agg.histogram.edges[static_cast<std::size_t>(b)] = lo + width * b;
            }
            for (double v : vals) {
                int b = static_cast<int>(std::floor((v - lo) / width));
                b = std::clamp(b, 0, kHistogramBins - 1);  // outliers land in end bins
                ++agg.histogram.counts[static_cast<std::size_t>(b)];
            }
        }
        report.per_spike.push_back(std::move(agg));
    }

    if (!cfg.out_dir.empty()) write_report(report, cfg.out_dir);
    return report;
}

void write_report(const AggregateReport& report, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());

    auto open = [&](const std::string& name) {
        std::ofstream out(fs::path(dir) / name, std::ios::binary);
        if (!out) throw Error("cannot open '" + (fs::path(dir) / name).string() +
                              "' for writing");
        return out;
    };

    {
        auto out = open("summary.csv");
        out << "spike,true_value,mean,sd,reps_ok,reps_failed\n";
        for (const auto& agg : report.per_spike) {
            out << agg.label << ',';
            if (agg.true_value) out << format_full(*agg.true_value);
            out << ',';
            if (agg.count > 0) {
                out << format_full(agg.mean) << ',' << format_full(agg.sd);
            } else {
                out << ',';
            }
            out << ',' << agg.count << ','
                << (static_cast<int>(report.records.size()) - agg.count) << '\n';
        }
    }

    for (const auto& agg : report.per_spike) {
        auto out = open("histogram_" + agg.label + ".csv");
        out << "bin_left,bin_right,count\n";
        for (std::size_t b = 0; b < agg.histogram.counts.size(); ++b) {
            out << format_full(agg.histogram.edges[b]) << ','
                << format_full(agg.histogram.edges[b + 1]) << ',' << agg.histogram.counts[b]
                << '\n';
        }
    }

    {
        auto out = open("replications.csv");
        out << "rep,stream,ok";
        for (const auto& agg : report.per_spike) out << ',' << agg.label;
        std::size_t k = 0;
        for (const auto& rec : report.records) k = std::max(k, rec.largest.size());
        for (std::size_t i = 1; i <= k; ++i) out << ",top" << i;
        for (std::size_t i = 1; i <= k; ++i) out << ",bottom" << i;
        out << '\n';
        for (const auto& rec : report.records) {
            out << rec.rep << ',' << rec.stream << ',' << (rec.generated ? 1 : 0);
            for (double v : rec.estimates) out << ',' << format_full(v);
            for (double v : rec.largest) out << ',' << format_full(v);
            for (double v : rec.smallest) out << ',' << format_full(v);
            if (!rec.generated) {
                for (std::size_t i = rec.largest.size(); i < 2 * k; ++i) out << ',';
            }
            out << '\n';
        }
    }
}

}  // namespace fisherspike
