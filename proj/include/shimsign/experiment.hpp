#pragma once

// End-to-end experiments behind the command-line tool: build the eigenform,
// invert the lift, verify it, and emit CSV or JSON. Each run_* function
// writes its data section to a stream and throws ConfigError or
// VerificationFailure; the cmd_* wrappers map those onto exit codes.

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "shimsign/arith.hpp"
#include "shimsign/densities.hpp"
#include "shimsign/qseries.hpp"
#include "shimsign/report_json.hpp"
#include "shimsign/shimura.hpp"
#include "shimsign/signstats.hpp"

namespace shimsign {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitVerification = 3;

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class VerificationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    int weight = 12;
    std::uint64_t t = 1;
    std::uint64_t nmax = 100000;
    /// Empty means powers of ten up to nmax.
    std::vector<std::uint64_t> checkpoints;
    double C = 10.0;
    std::size_t bins = 20;
    /// "-" is standard output.
    std::string out = "-";
    std::string format = "csv";
    std::optional<std::string> cache;
    /// Random coprime pairs for the multiplicativity check.
    std::size_t trials = 10000;

    // probe
    std::string probe_set = "all";
    std::vector<double> zgrid;
    std::uint64_t probe_cutoff = 0;
};

inline std::vector<std::uint64_t> default_checkpoints(std::uint64_t nmax) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t x = 10; x <= nmax; x *= 10) {
        out.push_back(x);
    }
    if (out.empty()) {
        out.push_back(nmax);
    }
    return out;
}

/// Ten points from 1.5 down to 1.01.
inline std::vector<double> default_zgrid() {
    std::vector<double> z;
    for (int i = 0; i < 10; ++i) {
        z.push_back(1.5 - (0.49 * i) / 9.0);
    }
    return z;
}

/// Checks every field before any heavy work and fills in defaults.
inline ExperimentConfig validate(ExperimentConfig cfg) {
    if (!is_one_dimensional_weight(cfg.weight)) {
        throw ConfigError("weight must be one of 12,16,18,20,22,26");
    }
    if (cfg.t == 0 || !is_squarefree(cfg.t)) {
        throw ConfigError("t must be squarefree");
    }
    if (cfg.nmax < 2) {
        throw ConfigError("nmax must be >= 2");
    }
    try {
        if (sieve_bytes(cfg.nmax) > default_sieve_budget()) {
            throw ConfigError("nmax exceeds the sieve memory budget (" + std::string(kSieveBudgetEnv) + ")");
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (cfg.checkpoints.empty()) {
        cfg.checkpoints = default_checkpoints(cfg.nmax);
    }
    for (std::size_t i = 0; i < cfg.checkpoints.size(); ++i) {
        if (cfg.checkpoints[i] < 1) {
            throw ConfigError("checkpoints must be >= 1");
        }
        if (i > 0 && cfg.checkpoints[i] <= cfg.checkpoints[i - 1]) {
            throw ConfigError("checkpoints must be sorted ascending without repeats");
        }
    }
    if (cfg.checkpoints.back() > cfg.nmax) {
        throw ConfigError("largest checkpoint exceeds nmax");
    }
    if (!(cfg.C > 0.0)) {
        throw ConfigError("C must be positive");
    }
    if (cfg.bins < 2) {
        throw ConfigError("bins must be >= 2");
    }
    if (cfg.format != "csv" && cfg.format != "json") {
        throw ConfigError("format must be csv or json");
    }
    if (cfg.probe_set != "all" && cfg.probe_set != "pos" && cfg.probe_set != "neg" &&
        cfg.probe_set != "zero") {
        throw ConfigError("probe set must be all, pos, neg or zero");
    }
    if (cfg.zgrid.empty()) {
        cfg.zgrid = default_zgrid();
    }
    if (cfg.zgrid.size() < 3) {
        throw ConfigError("zgrid needs at least 3 points");
    }
    for (double z : cfg.zgrid) {
        if (!(z > 1.0 && z <= 2.0)) {
            throw ConfigError("zgrid values must lie in (1, 2]");
        }
    }
    if (cfg.probe_cutoff == 0) {
        cfg.probe_cutoff = cfg.nmax;
    }
    if (cfg.probe_cutoff < 2 || cfg.probe_cutoff > cfg.nmax) {
        throw ConfigError("probe cutoff must lie in [2, nmax]");
    }
    return cfg;
}

/// Loads the eigenform from the cache when it holds enough coefficients,
/// otherwise computes it and (re)writes the cache.
inline std::shared_ptr<const Eigenform> load_eigenform(const ExperimentConfig& cfg) {
    if (cfg.cache) {
        std::ifstream in(*cfg.cache);
        if (in) {
            std::string header;
            std::getline(in, header);
            in.seekg(0);
            const std::string want_weight = "weight=" + std::to_string(cfg.weight) + " ";
            if (header.find(want_weight) == std::string::npos) {
                throw ConfigError("cache " + *cfg.cache + " header '" + header +
                                  "' does not match weight " + std::to_string(cfg.weight));
            }
            try {
                return std::make_shared<const Eigenform>(read_coefficient_cache(in, cfg.weight, cfg.nmax));
            } catch (const std::runtime_error& e) {
                const std::string what = e.what();
                if (what.find("below requested") == std::string::npos) {
                    throw ConfigError(what);
                }
                // too short: fall through and rebuild
            }
        }
    }
    auto f = std::make_shared<const Eigenform>(level1_eigenform(cfg.weight, cfg.nmax));
    if (cfg.cache) {
        std::ofstream out(*cfg.cache, std::ios::trunc);
        if (!out) {
            throw ConfigError("cannot write cache " + *cfg.cache);
        }
        write_coefficient_cache(out, *f);
    }
    return f;
}

/// Everything a command needs, built and verified once.
struct Pipeline {
    ExperimentConfig cfg;
    PrimeTable table;
    std::shared_ptr<const Eigenform> form;
    std::optional<LiftedStream> stream;
    RelationReport verification;
};

inline Pipeline build_pipeline(const ExperimentConfig& raw) {
    Pipeline p;
    p.cfg = validate(raw);
    p.table = sieve(p.cfg.nmax);
    p.form = load_eigenform(p.cfg);
    LiftParams params(p.cfg.t, p.form);
    p.stream.emplace(lift_invert(params, p.cfg.nmax, p.table));
    p.verification = verify_relations(*p.stream, p.cfg.trials);
    if (!p.verification.passed) {
        throw VerificationFailure("verify_relations failed (" + p.verification.relation +
                                  "): " + p.verification.message);
    }
    return p;
}

inline void run_coeffs(const ExperimentConfig& cfg, std::ostream& out) {
    const Pipeline p = build_pipeline(cfg);
    if (p.cfg.format == "json") {
        nlohmann::json j;
        j["params"] = {{"t", p.cfg.t}, {"k", p.cfg.weight / 2}, {"weight2k", p.cfg.weight}, {"N", p.cfg.nmax}};
        j["verification"] = to_json(p.verification);
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t n = 1; n <= p.stream->precision(); ++n) {
            rows.push_back({{"n", n}, {"a_tn2", p.stream->value(n).get_str()}, {"sign", sgn(p.stream->value(n))}});
        }
        j["rows"] = std::move(rows);
        out << j.dump(2) << '\n';
        return;
    }
    write_stream_csv(out, *p.stream);
}

inline void run_equidist(const ExperimentConfig& cfg, std::ostream& out) {
    const Pipeline p = build_pipeline(cfg);
    const SignSeries g = sign_series(*p.stream);
    const auto rows = running_stats(g, p.cfg.checkpoints, p.table);
    if (p.cfg.format == "json") {
        nlohmann::json j;
        j["params"] = {{"C", p.cfg.C}, {"t", p.cfg.t}, {"weight", p.cfg.weight}, {"nmax", p.cfg.nmax}};
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : rows) {
            arr.push_back(to_json(r, p.cfg.C));
        }
        j["checkpoints"] = std::move(arr);
        out << j.dump(2) << '\n';
        return;
    }
    write_checkpoints_csv(out, rows, p.cfg.C, p.cfg.t, p.cfg.weight);
}

inline void run_primes(const ExperimentConfig& cfg, std::ostream& out) {
    const Pipeline p = build_pipeline(cfg);
    const std::uint64_t x = p.cfg.nmax;
    const SatoTateHistogram hist = sato_tate_histogram(*p.form, x, p.cfg.bins, p.table);
    if (p.cfg.format == "csv") {
        write_histogram_csv(out, hist);
        return;
    }
    const PrimePartition part = prime_partition(*p.stream, x, p.table);
    const ExceptionalReport exc = exceptional_primes(*p.form, p.form->k(), x, p.cfg.t, p.table);
    const LiftedStream& stream = *p.stream;
    const auto zero_sums = reciprocal_prime_sum(
        [&stream](std::uint64_t q) { return stream.value(q) == 0; }, p.table, p.cfg.checkpoints);

    nlohmann::json j;
    j["params"] = {{"weight", p.cfg.weight}, {"k", p.form->k()}, {"t", p.cfg.t}, {"x", x}, {"bins", p.cfg.bins}};
    j["prime_partition"] = to_json(part);
    j["exceptional_primes"] = to_json(exc);
    j["reciprocal_prime_sum_zero"] = {{"checkpoints", p.cfg.checkpoints}, {"values", zero_sums}};
    j["sato_tate_histogram"] = to_json(hist);
    out << j.dump(2) << '\n';
}

inline void run_probe(const ExperimentConfig& cfg, std::ostream& out) {
    const Pipeline p = build_pipeline(cfg);
    const LiftedStream& stream = *p.stream;
    PrimePredicate pred;
    if (p.cfg.probe_set == "all") {
        pred = [](std::uint64_t) { return true; };
    } else if (p.cfg.probe_set == "pos") {
        pred = [&stream](std::uint64_t q) { return stream.value(q) > 0; };
    } else if (p.cfg.probe_set == "neg") {
        pred = [&stream](std::uint64_t q) { return stream.value(q) < 0; };
    } else {
        pred = [&stream](std::uint64_t q) { return stream.value(q) == 0; };
    }
    const DensityProbe probe = dirichlet_probe(pred, p.table, p.cfg.zgrid, p.cfg.probe_cutoff);
    if (p.cfg.format == "csv") {
        out << "# set=" << p.cfg.probe_set << " cutoff=" << probe.cutoff
            << " fitted_a=" << format_double(probe.fitted_a) << '\n';
        out << "z,partial_sum\n";
        for (std::size_t i = 0; i < probe.zgrid.size(); ++i) {
            out << format_double(probe.zgrid[i]) << ',' << format_double(probe.partial_sums[i]) << '\n';
        }
        return;
    }
    nlohmann::json j;
    j["params"] = {{"set", p.cfg.probe_set}, {"weight", p.cfg.weight}, {"t", p.cfg.t}};
    j["probe"] = to_json(probe);
    out << j.dump(2) << '\n';
}

/// Runs `body` against the configured output and converts failures into the
/// documented exit codes with a one-line diagnostic on `err`.
template <class Body>
int run_command(const ExperimentConfig& cfg, std::ostream& err, Body&& body) {
    try {
        const ExperimentConfig checked = validate(cfg);
        if (checked.out == "-") {
            body(checked, std::cout);
            std::cout.flush();
        } else {
            // Render fully before touching the file so failures leave no partial output.
            std::ostringstream buf;
            body(checked, buf);
            std::ofstream file(checked.out, std::ios::trunc | std::ios::binary);
            if (!file) {
                throw ConfigError("cannot open output " + checked.out);
            }
            file << buf.str();
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const VerificationFailure& e) {
        err << "verification failure: " << e.what() << '\n';
        return kExitVerification;
    } catch (const DeligneViolation& e) {
        err << "verification failure: " << e.what() << '\n';
        return kExitVerification;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::out_of_range& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::logic_error& e) {
        // internal oracle mismatch, e.g. the two routes to Delta disagreeing
        err << "verification failure: " << e.what() << '\n';
        return kExitVerification;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}

inline int cmd_coeffs(const ExperimentConfig& cfg, std::ostream& err = std::cerr) {
    return run_command(cfg, err, run_coeffs);
}
inline int cmd_equidist(const ExperimentConfig& cfg, std::ostream& err = std::cerr) {
    return run_command(cfg, err, run_equidist);
}
inline int cmd_primes(const ExperimentConfig& cfg, std::ostream& err = std::cerr) {
    return run_command(cfg, err, run_primes);
}
inline int cmd_probe(const ExperimentConfig& cfg, std::ostream& err = std::cerr) {
    return run_command(cfg, err, run_probe);
}

}  // namespace shimsign
