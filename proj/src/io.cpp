#include "fisherspike/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fisherspike {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) parts.push_back(cur);
    return parts;
}

double parse_double(const std::string& s, const std::string& what) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse " + what + " from '" + s + "'");
    }
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) {
        throw std::invalid_argument("trailing characters parsing " + what + " from '" + s +
                                    "'");
    }
    return v;
}

}  // namespace

SpectralMeasure parse_measure_spec(const std::string& spec) {
    std::vector<std::pair<double, double>> atoms;
    for (const auto& part : split(spec, ',')) {
        const auto fields = split(part, ':');
        if (fields.size() != 2) {
            throw std::invalid_argument("atom '" + part + "' is not of the form t:w");
        }
        atoms.emplace_back(parse_double(fields[0], "atom location"),
                           parse_double(fields[1], "atom weight"));
    }
    if (atoms.empty()) throw std::invalid_argument("measure spec is empty");
    std::sort(atoms.begin(), atoms.end());

    double sum = 0.0;
    for (const auto& [t, w] : atoms) sum += w;
    if (std::abs(sum - 1.0) > 0.01) {
        throw std::invalid_argument("atom weights sum to " + std::to_string(sum) +
                                    "; must be within 1% of 1");
    }
    std::vector<double> locations, weights;
    for (const auto& [t, w] : atoms) {
        locations.push_back(t);
        weights.push_back(w / sum);
    }
    return SpectralMeasure(std::move(locations), std::move(weights));
}

std::pair<std::string, std::vector<int>> parse_rank_group(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
        throw std::invalid_argument("rank group '" + spec +
                                    "' is not of the form label=r1[,r2...]");
    }
    const std::string label = spec.substr(0, eq);
    std::vector<int> ranks;
    for (const auto& part : split(spec.substr(eq + 1), ',')) {
        const double v = parse_double(part, "rank");
        const int r = static_cast<int>(v);
        if (v != r || r < 1) {
            throw std::invalid_argument("rank '" + part + "' must be a positive integer");
        }
        ranks.push_back(r);
    }
    return {label, ranks};
}

std::vector<double> parse_double_list(const std::string& spec) {
    std::vector<double> vals;
    for (const auto& part : split(spec, ',')) {
        vals.push_back(parse_double(part, "value"));
    }
    if (vals.empty()) throw std::invalid_argument("value list is empty");
    return vals;
}

EigenSample load_eigen_sample(const std::string& path, int n1, int n2) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open eigenvalue file '" + path + "'");

    std::vector<double> values;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        const std::string token = line.substr(first, last - first + 1);
        const double v = [&] {
            try {
                return parse_double(token, "eigenvalue");
            } catch (const std::exception& e) {
                throw Error(path + ":" + std::to_string(line_no) + ": " + e.what());
            }
        }();
        if (!std::isfinite(v) || v < 0.0) {
            throw Error(path + ":" + std::to_string(line_no) +
                        ": eigenvalues must be finite and nonnegative");
        }
        if (!values.empty() && v > values.back()) {
            throw Error(path + ":" + std::to_string(line_no) +
                        ": eigenvalues must be sorted in descending order "
                        "(largest first); sort the file before loading");
        }
        values.push_back(v);
    }
    if (values.empty()) throw Error("eigenvalue file '" + path + "' is empty");
    try {
        return EigenSample(std::move(values), n1, n2);
    } catch (const std::exception& e) {
        throw Error(path + ": " + e.what());
    }
}

void save_eigenvalues(const std::string& path, const std::vector<double>& values) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    char buf[40];
    for (double v : values) {
        std::snprintf(buf, sizeof(buf), "%.17g\n", v);
        out << buf;
    }
}

SimulationConfig load_simulation_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error("config '" + path + "': " + e.what());
    }

    SimulationConfig cfg;
    try {
        if (j.contains("p")) cfg.p = j.at("p").get<int>();
        if (j.contains("n1")) cfg.n1 = j.at("n1").get<int>();
        if (j.contains("n2")) cfg.n2 = j.at("n2").get<int>();
        if (j.contains("dist")) {
            cfg.dist = entry_distribution_from_string(j.at("dist").get<std::string>());
        }
        if (j.contains("reps")) cfg.reps = j.at("reps").get<int>();
        if (j.contains("seed")) cfg.master_seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("rho")) cfg.rho = j.at("rho").get<double>();
        if (j.contains("exclusion_ratio")) {
            cfg.exclusion_ratio = j.at("exclusion_ratio").get<double>();
        }
        if (j.contains("workers")) cfg.workers = j.at("workers").get<int>();
        if (j.contains("lambda_head")) {
            cfg.lambda_head = j.at("lambda_head").get<std::vector<double>>();
        }
        if (j.contains("lambda_tail")) {
            cfg.lambda_tail = j.at("lambda_tail").get<std::vector<double>>();
        }
        if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
        if (j.contains("spikes")) {
            for (const auto& s : j.at("spikes")) {
                SpikeGroupConfig group;
                group.label = s.at("label").get<std::string>();
                group.ranks = s.at("ranks").get<std::vector<int>>();
                if (s.contains("value")) group.true_value = s.at("value").get<double>();
                cfg.spikes.push_back(std::move(group));
            }
        }
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error("config '" + path + "': " + e.what());
    }
    return cfg;
}

}  // namespace fisherspike
