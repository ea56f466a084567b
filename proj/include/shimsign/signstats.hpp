#pragma once

// The multiplicative sign function g(n) = sign a(t n^2) and its mean-value
// statistics: partial sums S(x), sign counts, the Halasz-type envelope
// C x exp(-1/4 sum_{p<=x} (1 - g(p))/p), and the ratio of positive to
// nonzero terms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "shimsign/arith.hpp"
#include "shimsign/io.hpp"
#include "shimsign/parallel.hpp"
#include "shimsign/shimura.hpp"

namespace shimsign {

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double v) noexcept {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }

    void merge(const CompensatedSum& o) noexcept {
        add(o.sum_);
        comp_ += o.comp_;
    }

    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

class SignSeries {
public:
    enum class Source { lifted, synthetic };

    /// g(1..N); values[0] is a placeholder.
    SignSeries(std::vector<std::int8_t> values, Source source, std::string tag)
        : values_(std::move(values)), source_(source), tag_(std::move(tag)) {
        if (values_.size() < 2) {
            throw std::invalid_argument("sign series needs at least one term");
        }
        for (std::size_t n = 1; n < values_.size(); ++n) {
            if (values_[n] < -1 || values_[n] > 1) {
                throw std::invalid_argument("sign values must lie in {-1, 0, 1}");
            }
        }
    }

    /// Test helper: g(n) = values[n-1]; tagged synthetic, so multiplicativity
    /// checks skip it.
    static SignSeries synthetic(const std::vector<int>& values, std::string tag = "synthetic") {
        std::vector<std::int8_t> v(values.size() + 1, 0);
        for (std::size_t i = 0; i < values.size(); ++i) {
            v[i + 1] = static_cast<std::int8_t>(values[i]);
        }
        return SignSeries(std::move(v), Source::synthetic, std::move(tag));
    }

    std::size_t precision() const noexcept { return values_.size() - 1; }
    Source source() const noexcept { return source_; }
    const std::string& tag() const noexcept { return tag_; }

    int operator()(std::size_t n) const {
        if (n == 0 || n > precision()) {
            throw std::out_of_range("g(" + std::to_string(n) + ") outside 1.." +
                                    std::to_string(precision()));
        }
        return values_[n];
    }

private:
    std::vector<std::int8_t> values_;
    Source source_;
    std::string tag_;
};

inline SignSeries sign_series(const LiftedStream& stream) {
    std::vector<std::int8_t> v(stream.precision() + 1, 0);
    for (std::size_t n = 1; n <= stream.precision(); ++n) {
        v[n] = static_cast<std::int8_t>(sgn(stream.value(n)));
    }
    const auto& p = stream.params();
    return SignSeries(std::move(v), SignSeries::Source::lifted,
                      "t=" + std::to_string(p.t()) + " weight=" + std::to_string(2 * p.k()));
}

struct SignMultiplicativity {
    bool passed = true;
    std::size_t pairs_checked = 0;
    std::size_t n = 0;
    std::size_t m = 0;
};

/// Randomised check of g(nm) = g(n) g(m) over coprime pairs; stops at the
/// first failure. Synthetic series are skipped (std::nullopt).
inline std::optional<SignMultiplicativity> check_sign_multiplicativity(const SignSeries& g,
                                                                       std::size_t trials,
                                                                       std::uint64_t seed = 17) {
    if (g.source() == SignSeries::Source::synthetic) {
        return std::nullopt;
    }
    SignMultiplicativity r;
    const std::size_t N = g.precision();
    if (N < 6) {
        return r;
    }
    std::mt19937_64 rng(seed);
    while (r.pairs_checked < trials) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(2, N / 2)(rng);
        const std::size_t m = std::uniform_int_distribution<std::size_t>(2, N / n)(rng);
        if (std::gcd(n, m) != 1) {
            continue;
        }
        ++r.pairs_checked;
        if (g(n * m) != g(n) * g(m)) {
            r.passed = false;
            r.n = n;
            r.m = m;
            return r;
        }
    }
    return r;
}

struct RunningStats {
    std::uint64_t x = 0;
    std::int64_t S = 0;
    std::uint64_t n_pos = 0;
    std::uint64_t n_neg = 0;
    std::uint64_t n_zero = 0;
    /// sum_{p <= x} (1 - g(p)) / p
    double prime_exponent_sum = 0.0;
    /// sum_{p <= x, g(p) = 0} 1 / p
    double zero_prime_sum = 0.0;
};

/// Partial statistics over a contiguous range of n; merging is associative
/// and exact on every integer field.
class SignAccumulator {
public:
    void add(std::uint64_t n, int g, bool n_is_prime) {
        ++count_;
        S_ += g;
        if (g > 0) {
            ++pos_;
        } else if (g < 0) {
            ++neg_;
        } else {
            ++zero_;
        }
        if (n_is_prime) {
            const double inv = 1.0 / static_cast<double>(n);
            if (g != 1) {
                exponent_.add(static_cast<double>(1 - g) * inv);
            }
            if (g == 0) {
                zero_primes_.add(inv);
            }
        }
    }

    void merge(const SignAccumulator& o) {
        count_ += o.count_;
        S_ += o.S_;
        pos_ += o.pos_;
        neg_ += o.neg_;
        zero_ += o.zero_;
        exponent_.merge(o.exponent_);
        zero_primes_.merge(o.zero_primes_);
    }

    RunningStats snapshot() const {
        return RunningStats{count_, S_, pos_, neg_, zero_, exponent_.value(), zero_primes_.value()};
    }

private:
    std::uint64_t count_ = 0;
    std::int64_t S_ = 0;
    std::uint64_t pos_ = 0;
    std::uint64_t neg_ = 0;
    std::uint64_t zero_ = 0;
    CompensatedSum exponent_;
    CompensatedSum zero_primes_;
};

namespace detail {

inline void validate_checkpoints(const std::vector<std::uint64_t>& checkpoints, std::size_t limit) {
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] < 1 || checkpoints[i] > limit) {
            throw std::out_of_range("checkpoint " + std::to_string(checkpoints[i]) + " outside 1.." +
                                    std::to_string(limit));
        }
        if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) {
            throw std::invalid_argument("checkpoints must be strictly increasing");
        }
    }
}

}  // namespace detail

/// One RunningStats per checkpoint, in a single sequential pass.
inline std::vector<RunningStats> running_stats(const SignSeries& g,
                                               const std::vector<std::uint64_t>& checkpoints,
                                               const PrimeTable& table) {
    detail::validate_checkpoints(checkpoints, g.precision());
    std::vector<RunningStats> out;
    if (checkpoints.empty()) {
        return out;
    }
    table.check_range(checkpoints.back());
    SignAccumulator acc;
    std::size_t next = 0;
    for (std::uint64_t n = 1; n <= checkpoints.back(); ++n) {
        acc.add(n, g(n), table.is_prime(n));
        if (n == checkpoints[next]) {
            out.push_back(acc.snapshot());
            ++next;
        }
    }
    return out;
}

inline std::vector<RunningStats> running_stats(const SignSeries& g,
                                               const std::vector<std::uint64_t>& checkpoints) {
    const std::uint64_t top = checkpoints.empty() ? 2 : std::max<std::uint64_t>(checkpoints.back(), 2);
    return running_stats(g, checkpoints, sieve(top));
}

/// Block-parallel variant: [1, max checkpoint] is split into contiguous
/// blocks whose accumulators are merged in block order. Integer fields equal
/// the sequential result exactly; the floating sums agree to rounding.
inline std::vector<RunningStats> running_stats_parallel(const SignSeries& g,
                                                        const std::vector<std::uint64_t>& checkpoints,
                                                        const PrimeTable& table,
                                                        unsigned threads = default_threads()) {
    detail::validate_checkpoints(checkpoints, g.precision());
    if (checkpoints.empty()) {
        return {};
    }
    const std::uint64_t top = checkpoints.back();
    table.check_range(top);

    struct Block {
        SignAccumulator total;
        std::vector<std::pair<std::size_t, SignAccumulator>> at_checkpoint;
    };
    const std::size_t nblocks = block_count(1, top + 1, threads);
    std::vector<Block> blocks(nblocks);
    parallel_blocks(1, top + 1, threads, [&](std::size_t lo, std::size_t hi, std::size_t b) {
        Block& blk = blocks[b];
        auto it = std::lower_bound(checkpoints.begin(), checkpoints.end(), lo);
        for (std::size_t n = lo; n < hi; ++n) {
            blk.total.add(n, g(n), table.is_prime(n));
            if (it != checkpoints.end() && *it == n) {
                blk.at_checkpoint.emplace_back(static_cast<std::size_t>(it - checkpoints.begin()),
                                               blk.total);
                ++it;
            }
        }
    });

    std::vector<RunningStats> out(checkpoints.size());
    SignAccumulator prefix;
    for (const Block& blk : blocks) {
        for (const auto& [idx, partial] : blk.at_checkpoint) {
            SignAccumulator combined = prefix;
            combined.merge(partial);
            out[idx] = combined.snapshot();
        }
        prefix.merge(blk.total);
    }
    return out;
}

/// C x exp(-1/4 sum_{p<=x} (1 - g(p))/p), valid for x >= 2.
inline double halasz_bound(const RunningStats& stats, double C) {
    if (stats.x < 2) {
        throw std::invalid_argument("halasz_bound requires x >= 2");
    }
    if (!(C > 0.0)) {
        throw std::invalid_argument("halasz_bound requires C > 0");
    }
    return C * static_cast<double>(stats.x) * std::exp(-0.25 * stats.prime_exponent_sum);
}

struct EquidistributionRatio {
    double pos = 0.0;
    double neg = 0.0;
};

/// (n_pos, n_neg) / (n_pos + n_neg); std::nullopt when every g(n) up to x is 0.
inline std::optional<EquidistributionRatio> equidistribution_ratio(const RunningStats& stats) {
    const std::uint64_t nonzero = stats.n_pos + stats.n_neg;
    if (nonzero == 0) {
        return std::nullopt;
    }
    const double pos = static_cast<double>(stats.n_pos) / static_cast<double>(nonzero);
    return EquidistributionRatio{pos, static_cast<double>(stats.n_neg) / static_cast<double>(nonzero)};
}

inline double mean_value(const RunningStats& stats) {
    if (stats.x < 1) {
        throw std::invalid_argument("mean_value requires x >= 1");
    }
    return static_cast<double>(stats.S) / static_cast<double>(stats.x);
}

inline double nonzero_density(const RunningStats& stats) {
    if (stats.x < 1) {
        throw std::invalid_argument("nonzero_density requires x >= 1");
    }
    return static_cast<double>(stats.n_pos + stats.n_neg) / static_cast<double>(stats.x);
}

/// Checkpoint CSV: "# C=.. t=.. weight=.." then
/// x,S,n_pos,n_neg,n_zero,ratio_pos,mean,halasz_bound. Undefined entries
/// (ratio with no nonzero term, bound below x = 2) print as "nan".
inline void write_checkpoints_csv(std::ostream& out, const std::vector<RunningStats>& rows, double C,
                                  std::uint64_t t, int weight) {
    out << "# C=" << format_double(C) << " t=" << t << " weight=" << weight << '\n';
    out << "x,S,n_pos,n_neg,n_zero,ratio_pos,mean,halasz_bound\n";
    for (const auto& r : rows) {
        const auto ratio = equidistribution_ratio(r);
        const double bound = r.x >= 2 ? halasz_bound(r, C) : std::nan("");
        out << r.x << ',' << r.S << ',' << r.n_pos << ',' << r.n_neg << ',' << r.n_zero << ','
            << format_double(ratio ? ratio->pos : std::nan("")) << ',' << format_double(mean_value(r))
            << ',' << format_double(bound) << '\n';
    }
}

}  // namespace shimsign
