#pragma once

// Prime-indexed statistics of the lifted stream and the eigenform: the sign
// partition of the primes, exceptional primes with A(p) = +-p^(k-1), a
// Dirichlet-density probe, reciprocal prime sums and a Sato-Tate histogram.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "shimsign/arith.hpp"
#include "shimsign/io.hpp"
#include "shimsign/qseries.hpp"
#include "shimsign/shimura.hpp"
#include "shimsign/signstats.hpp"

namespace shimsign {

using PrimePredicate = std::function<bool(std::uint64_t)>;

struct PrimePartition {
    std::uint64_t x = 0;
    std::vector<std::uint32_t> pos;
    std::vector<std::uint32_t> neg;
    std::vector<std::uint32_t> zero;
    double recip_zero = 0.0;

    std::size_t prime_count() const noexcept { return pos.size() + neg.size() + zero.size(); }

    double fraction_pos() const { return fraction(pos.size()); }
    double fraction_neg() const { return fraction(neg.size()); }
    double fraction_zero() const { return fraction(zero.size()); }

private:
    double fraction(std::size_t c) const {
        const std::size_t total = prime_count();
        return total == 0 ? 0.0 : static_cast<double>(c) / static_cast<double>(total);
    }
};

/// Splits the primes p <= x by the sign of a(t p^2).
inline PrimePartition prime_partition(const LiftedStream& stream, std::uint64_t x,
                                      const PrimeTable& table) {
    if (x > stream.precision()) {
        throw std::out_of_range("prime_partition: x = " + std::to_string(x) +
                                " exceeds stream precision " + std::to_string(stream.precision()));
    }
    table.check_range(x);
    PrimePartition part;
    part.x = x;
    CompensatedSum recip;
    for (std::uint32_t p : table.primes()) {
        if (p > x) {
            break;
        }
        switch (sgn(stream.value(p))) {
            case 1: part.pos.push_back(p); break;
            case -1: part.neg.push_back(p); break;
            default:
                part.zero.push_back(p);
                recip.add(1.0 / p);
                break;
        }
    }
    part.recip_zero = recip.value();
    return part;
}

inline PrimePartition prime_partition(const LiftedStream& stream, std::uint64_t x) {
    return prime_partition(stream, x, sieve(std::max<std::uint64_t>(x, 2)));
}

// ---------------------------------------------------------------------------

struct ExceptionalReport {
    std::uint64_t x = 0;
    int k = 0;
    std::uint64_t t = 1;
    /// Primes p <= x with A(p) = +p^(k-1) or -p^(k-1), and the matching sign.
    std::vector<std::uint64_t> matches;
    std::vector<int> match_signs;
    /// Primes p <= x dividing 2t, kept out of the count.
    std::vector<std::uint64_t> excluded;
    /// Matches not dividing 2t.
    std::size_t count = 0;
    /// count / (x / log(x)^(9/8))
    double ratio = 0.0;
};

/// Scans p <= x for A(p) = +-p^(k-1) with exact integer comparison.
inline ExceptionalReport exceptional_primes(const Eigenform& F, int k, std::uint64_t x,
                                            std::uint64_t t, const PrimeTable& table) {
    if (F.weight() != 2 * k) {
        throw std::invalid_argument("exceptional_primes: eigenform weight is not 2k");
    }
    if (x < 2) {
        throw std::invalid_argument("exceptional_primes: x must be >= 2");
    }
    if (x > F.precision()) {
        throw std::out_of_range("exceptional_primes: x = " + std::to_string(x) +
                                " exceeds eigenform precision " + std::to_string(F.precision()));
    }
    table.check_range(x);
    ExceptionalReport rep;
    rep.x = x;
    rep.k = k;
    rep.t = t;
    for (std::uint32_t p : table.primes()) {
        if (p > x) {
            break;
        }
        const bool divides_2t = p == 2 || t % p == 0;
        if (divides_2t) {
            rep.excluded.push_back(p);
        }
        const BigInt& ap = F.A(p);
        // Cheap magnitude filter before forming p^(k-1).
        const std::size_t bits = mpz_sizeinbase(ap.get_mpz_t(), 2);
        const double expected_bits = (k - 1) * std::log2(static_cast<double>(p));
        if (ap == 0 || std::abs(static_cast<double>(bits) - expected_bits) > 2.0) {
            continue;
        }
        const BigInt pk = ipow(p, static_cast<unsigned long>(k - 1));
        int s = 0;
        if (ap == pk) {
            s = 1;
        } else if (ap == -pk) {
            s = -1;
        }
        if (s != 0) {
            rep.matches.push_back(p);
            rep.match_signs.push_back(s);
            if (!divides_2t) {
                ++rep.count;
            }
        }
    }
    const double lx = std::log(static_cast<double>(x));
    rep.ratio = static_cast<double>(rep.count) / (static_cast<double>(x) / std::pow(lx, 9.0 / 8.0));
    return rep;
}

inline ExceptionalReport exceptional_primes(const Eigenform& F, int k, std::uint64_t x,
                                            std::uint64_t t = 1) {
    return exceptional_primes(F, k, x, t, sieve(x));
}

// ---------------------------------------------------------------------------

/// Truncated prime Dirichlet series sum_{p in S, p <= cutoff} p^(-z) over a
/// grid of z, and a density estimate fitted to them. Diagnostic only: no
/// finite computation certifies weak regularity.
///
/// The fit is least squares of the partial sums against
///   a * (log(1/(z-1)) - E1((z-1) log cutoff)) + c0 + c1 (z-1),
/// where the E1 term removes the prime-number-theorem tail beyond the cutoff
/// and c0 + c1 (z-1) absorbs the continuous part near z = 1.
struct DensityProbe {
    std::uint64_t cutoff = 0;
    std::size_t set_size = 0;
    std::vector<double> zgrid;
    std::vector<double> partial_sums;
    double fitted_a = 0.0;
    double fitted_c0 = 0.0;
    double fitted_c1 = 0.0;
};

/// E1(x) = int_x^inf e^-s / s ds for x > 0.
inline double exponential_integral_e1(double x) { return -std::expint(-x); }

namespace detail {

// Solves the 3x3 system m * sol = rhs by Gaussian elimination with partial
// pivoting. Returns false when singular.
inline bool solve3(std::array<std::array<double, 3>, 3> m, std::array<double, 3> rhs,
                   std::array<double, 3>& sol) {
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(m[r][col]) > std::abs(m[piv][col])) {
                piv = r;
            }
        }
        if (std::abs(m[piv][col]) < 1e-300) {
            return false;
        }
        std::swap(m[piv], m[col]);
        std::swap(rhs[piv], rhs[col]);
        for (int r = col + 1; r < 3; ++r) {
            const double f = m[r][col] / m[col][col];
            for (int c = col; c < 3; ++c) {
                m[r][c] -= f * m[col][c];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    for (int r = 2; r >= 0; --r) {
        double s = rhs[r];
        for (int c = r + 1; c < 3; ++c) {
            s -= m[r][c] * sol[c];
        }
        sol[r] = s / m[r][r];
    }
    return true;
}

}  // namespace detail

inline DensityProbe dirichlet_probe(const PrimePredicate& in_set, const PrimeTable& table,
                                    std::vector<double> zgrid, std::uint64_t cutoff) {
    if (zgrid.size() < 3) {
        throw std::invalid_argument("dirichlet_probe: grid needs at least 3 points");
    }
    for (double z : zgrid) {
        if (!(z > 1.0 && z <= 2.0)) {
            throw std::invalid_argument("dirichlet_probe: grid values must lie in (1, 2]");
        }
    }
    std::sort(zgrid.begin(), zgrid.end(), std::greater<>());
    if (std::adjacent_find(zgrid.begin(), zgrid.end()) != zgrid.end()) {
        throw std::invalid_argument("dirichlet_probe: grid values must be distinct");
    }
    if (cutoff < 2) {
        throw std::invalid_argument("dirichlet_probe: cutoff must be >= 2");
    }
    table.check_range(cutoff);

    DensityProbe probe;
    probe.cutoff = cutoff;
    probe.zgrid = zgrid;
    std::vector<CompensatedSum> sums(zgrid.size());
    for (std::uint32_t p : table.primes()) {
        if (p > cutoff) {
            break;
        }
        if (!in_set(p)) {
            continue;
        }
        ++probe.set_size;
        const double lp = std::log(static_cast<double>(p));
        for (std::size_t i = 0; i < zgrid.size(); ++i) {
            sums[i].add(std::exp(-zgrid[i] * lp));
        }
    }
    probe.partial_sums.reserve(zgrid.size());
    for (const auto& s : sums) {
        probe.partial_sums.push_back(s.value());
    }

    const double log_cutoff = std::log(static_cast<double>(cutoff));
    std::array<std::array<double, 3>, 3> normal{};
    std::array<double, 3> rhs{};
    for (std::size_t i = 0; i < zgrid.size(); ++i) {
        const double h = zgrid[i] - 1.0;
        const std::array<double, 3> row{
            std::log(1.0 / h) - exponential_integral_e1(h * log_cutoff), 1.0, h};
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) {
                normal[r][c] += row[r] * row[c];
            }
            rhs[r] += row[r] * probe.partial_sums[i];
        }
    }
    std::array<double, 3> sol{};
    if (!detail::solve3(normal, rhs, sol)) {
        throw std::invalid_argument("dirichlet_probe: grid gives a singular fit");
    }
    probe.fitted_a = sol[0];
    probe.fitted_c0 = sol[1];
    probe.fitted_c1 = sol[2];
    return probe;
}

/// sum_{p in S, p <= x} 1/p at each checkpoint x.
inline std::vector<double> reciprocal_prime_sum(const PrimePredicate& in_set, const PrimeTable& table,
                                                const std::vector<std::uint64_t>& checkpoints) {
    detail::validate_checkpoints(checkpoints, table.limit());
    std::vector<double> out;
    out.reserve(checkpoints.size());
    CompensatedSum acc;
    std::size_t next = 0;
    const auto& primes = table.primes();
    std::size_t i = 0;
    while (next < checkpoints.size()) {
        while (i < primes.size() && primes[i] <= checkpoints[next]) {
            if (in_set(primes[i])) {
                acc.add(1.0 / primes[i]);
            }
            ++i;
        }
        out.push_back(acc.value());
        ++next;
    }
    return out;
}

// ---------------------------------------------------------------------------

/// Raised when a normalised eigenvalue leaves [-2, 2].
class DeligneViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// CDF of the semicircle density (1/(2 pi)) sqrt(4 - u^2) on [-2, 2].
inline double semicircle_cdf(double u) {
    if (u <= -2.0) {
        return 0.0;
    }
    if (u >= 2.0) {
        return 1.0;
    }
    return 0.5 + (u * std::sqrt(4.0 - u * u)) / (4.0 * std::numbers::pi) +
           std::asin(u / 2.0) / std::numbers::pi;
}

struct SatoTateHistogram {
    std::uint64_t x = 0;
    int weight = 0;
    std::size_t n_primes = 0;
    /// bins + 1 equal-width edges on [-2, 2]
    std::vector<double> edges;
    std::vector<std::uint64_t> counts;
    /// n_primes times the semicircle mass of each bin
    std::vector<double> expected;
    /// max over bin edges of |empirical CDF - semicircle CDF|
    double sup_deviation = 0.0;
    double min_u = 0.0;
    double max_u = 0.0;
};

/// Histogram of u_p = A(p) / p^((2k-1)/2) over p <= x. Every A(p) is first
/// checked exactly against the Deligne bound; a violation throws
/// DeligneViolation.
inline SatoTateHistogram sato_tate_histogram(const Eigenform& F, std::uint64_t x, std::size_t bins,
                                             const PrimeTable& table) {
    if (bins < 2) {
        throw std::invalid_argument("sato_tate_histogram: bins must be >= 2");
    }
    if (x > F.precision()) {
        throw std::out_of_range("sato_tate_histogram: x = " + std::to_string(x) +
                                " exceeds eigenform precision " + std::to_string(F.precision()));
    }
    table.check_range(x);
    SatoTateHistogram h;
    h.x = x;
    h.weight = F.weight();
    h.counts.assign(bins, 0);
    h.edges.resize(bins + 1);
    const double width = 4.0 / static_cast<double>(bins);
    for (std::size_t i = 0; i <= bins; ++i) {
        h.edges[i] = -2.0 + width * static_cast<double>(i);
    }
    h.edges[bins] = 2.0;
    h.min_u = 2.0;
    h.max_u = -2.0;

    const double exponent = (F.weight() - 1) / 2.0;
    for (std::uint32_t p : table.primes()) {
        if (p > x) {
            break;
        }
        const BigInt& ap = F.A(p);
        if (!within_deligne_bound(ap, p, F.weight())) {
            throw DeligneViolation("|A(" + std::to_string(p) + ")| = " + ap.get_str() +
                                   " exceeds 2 p^((2k-1)/2)");
        }
        double u = ap.get_d() / std::pow(static_cast<double>(p), exponent);
        u = std::clamp(u, -2.0, 2.0);
        h.min_u = std::min(h.min_u, u);
        h.max_u = std::max(h.max_u, u);
        auto bin = static_cast<std::size_t>((u + 2.0) / width);
        if (bin >= bins) {
            bin = bins - 1;
        }
        ++h.counts[bin];
        ++h.n_primes;
    }

    h.expected.resize(bins);
    std::uint64_t cumulative = 0;
    h.sup_deviation = 0.0;
    for (std::size_t i = 0; i < bins; ++i) {
        h.expected[i] = static_cast<double>(h.n_primes) *
                        (semicircle_cdf(h.edges[i + 1]) - semicircle_cdf(h.edges[i]));
        cumulative += h.counts[i];
        if (h.n_primes > 0) {
            const double emp = static_cast<double>(cumulative) / static_cast<double>(h.n_primes);
            h.sup_deviation = std::max(h.sup_deviation, std::abs(emp - semicircle_cdf(h.edges[i + 1])));
        }
    }
    return h;
}

inline SatoTateHistogram sato_tate_histogram(const Eigenform& F, std::uint64_t x, std::size_t bins) {
    return sato_tate_histogram(F, x, bins, sieve(std::max<std::uint64_t>(x, 2)));
}

/// bin_lo,bin_hi,count,expected
inline void write_histogram_csv(std::ostream& out, const SatoTateHistogram& h) {
    out << "bin_lo,bin_hi,count,expected\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        out << format_double(h.edges[i]) << ',' << format_double(h.edges[i + 1]) << ',' << h.counts[i]
            << ',' << format_double(h.expected[i]) << '\n';
    }
}

}  // namespace shimsign
