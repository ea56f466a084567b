#pragma once

// Elementary number-theoretic kernels: smallest-prime-factor sieve, Moebius
// function, Kronecker symbol and divisor enumeration.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace shimsign {

/// Environment variable holding the sieve memory budget in bytes.
inline constexpr const char* kSieveBudgetEnv = "SHIMSIGN_SIEVE_MAX_BYTES";

/// 1 GiB unless overridden through `SHIMSIGN_SIEVE_MAX_BYTES`.
inline std::uint64_t default_sieve_budget() {
    constexpr std::uint64_t fallback = std::uint64_t{1} << 30;
    const char* env = std::getenv(kSieveBudgetEnv);
    if (env == nullptr || *env == '\0') {
        return fallback;
    }
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || v == 0) {
        throw std::invalid_argument(std::string(kSieveBudgetEnv) + " must be a positive integer");
    }
    return v;
}

/// Upper bound on the bytes the sieve allocates for limit `x`.
inline std::uint64_t sieve_bytes(std::uint64_t x) {
    const std::uint64_t spf = (x + 1) * sizeof(std::uint32_t);
    const std::uint64_t primes = (x / 2 + 2) * sizeof(std::uint32_t);
    return spf + primes;
}

/// All primes up to `limit()` together with a smallest-prime-factor table.
/// Immutable once built.
class PrimeTable {
public:
    PrimeTable() = default;

    explicit PrimeTable(std::uint32_t limit) : limit_(limit), spf_(std::size_t{limit} + 1, 0) {
        for (std::uint32_t i = 2; i <= limit; ++i) {
            if (spf_[i] == 0) {
                spf_[i] = i;
                primes_.push_back(i);
            }
            // Linear sieve: each composite is struck exactly once by its spf.
            for (std::uint32_t p : primes_) {
                if (p > spf_[i] || std::uint64_t{p} * i > limit) {
                    break;
                }
                spf_[std::size_t{p} * i] = p;
            }
        }
    }

    std::uint32_t limit() const noexcept { return limit_; }
    const std::vector<std::uint32_t>& primes() const noexcept { return primes_; }

    /// Smallest prime factor of 2 <= n <= limit (0 and 1 map to 0).
    std::uint32_t spf(std::uint64_t n) const {
        check_range(n);
        return spf_[n];
    }

    bool is_prime(std::uint64_t n) const {
        check_range(n);
        return n >= 2 && spf_[n] == n;
    }

    /// Number of primes <= x, for x <= limit.
    std::size_t prime_count(std::uint64_t x) const {
        check_range(x);
        return static_cast<std::size_t>(
            std::upper_bound(primes_.begin(), primes_.end(), x) - primes_.begin());
    }

    /// Prime factorization as (prime, exponent) pairs in increasing order.
    std::vector<std::pair<std::uint32_t, int>> factor(std::uint64_t n) const {
        check_range(n);
        if (n == 0) {
            throw std::invalid_argument("factor: n must be positive");
        }
        std::vector<std::pair<std::uint32_t, int>> out;
        while (n > 1) {
            const std::uint32_t p = spf_[n];
            int e = 0;
            while (n % p == 0) {
                n /= p;
                ++e;
            }
            out.emplace_back(p, e);
        }
        return out;
    }

    void check_range(std::uint64_t n) const {
        if (n > limit_) {
            throw std::out_of_range("n = " + std::to_string(n) + " exceeds sieve limit " +
                                    std::to_string(limit_));
        }
    }

private:
    std::uint32_t limit_ = 0;
    std::vector<std::uint32_t> spf_;
    std::vector<std::uint32_t> primes_;
};

/// Builds the prime table up to `x`. Throws std::length_error when the table
/// would exceed `max_bytes`.
inline PrimeTable sieve(std::uint64_t x, std::uint64_t max_bytes = default_sieve_budget()) {
    if (x < 1) {
        throw std::invalid_argument("sieve: x must be >= 1");
    }
    if (x > 0xFFFFFFFEull) {
        throw std::length_error("sieve: x exceeds 32-bit table range");
    }
    if (sieve_bytes(x) > max_bytes) {
        throw std::length_error("sieve: limit " + std::to_string(x) + " needs " +
                                std::to_string(sieve_bytes(x)) + " bytes, budget is " +
                                std::to_string(max_bytes));
    }
    return PrimeTable(static_cast<std::uint32_t>(x));
}

inline int mobius(std::uint64_t n, const PrimeTable& table) {
    if (n == 0) {
        throw std::invalid_argument("mobius: n must be positive");
    }
    table.check_range(n);
    int mu = 1;
    while (n > 1) {
        const std::uint32_t p = table.spf(n);
        n /= p;
        if (n % p == 0) {
            return 0;
        }
        mu = -mu;
    }
    return mu;
}

inline bool is_squarefree(std::uint64_t n) {
    if (n == 0) {
        return false;
    }
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % (p * p) == 0) {
            return false;
        }
    }
    return true;
}

/// Kronecker symbol (a|n) on the full integer domain.
inline int kronecker(std::int64_t a, std::int64_t n) {
    if (n == 0) {
        return (a == 1 || a == -1) ? 1 : 0;
    }
    int result = 1;
    // Magnitudes are handled in unsigned arithmetic so INT64_MIN is safe.
    std::uint64_t un = n < 0 ? std::uint64_t{0} - static_cast<std::uint64_t>(n)
                             : static_cast<std::uint64_t>(n);
    if (n < 0 && a < 0) {
        result = -result;  // (a|-1) = sign(a)
    }
    const bool a_neg = a < 0;
    std::uint64_t ua = a_neg ? std::uint64_t{0} - static_cast<std::uint64_t>(a)
                             : static_cast<std::uint64_t>(a);

    // Strip powers of two from n: (a|2) = 0 for even a, else +-1 by a mod 8.
    if ((un & 1u) == 0) {
        if ((ua & 1u) == 0) {
            return 0;
        }
        int twos = 0;
        while ((un & 1u) == 0) {
            un >>= 1;
            ++twos;
        }
        if (twos & 1) {
            // a mod 8 for negative a uses the signed residue.
            const std::uint64_t r = a_neg ? (8 - ua % 8) % 8 : ua % 8;
            if (r == 3 || r == 5) {
                result = -result;
            }
        }
    }
    // n is now odd and positive: Jacobi symbol (a|un).
    if (un == 1) {
        return result;
    }
    // Reduce a into [0, un): for negative a use un - (|a| mod un).
    std::uint64_t m = ua % un;
    if (a_neg && m != 0) {
        m = un - m;
    }
    std::uint64_t b = un;
    while (m != 0) {
        while ((m & 1u) == 0) {
            m >>= 1;
            const std::uint64_t r = b % 8;
            if (r == 3 || r == 5) {
                result = -result;
            }
        }
        std::swap(m, b);
        if (m % 4 == 3 && b % 4 == 3) {
            result = -result;
        }
        m %= b;
    }
    return b == 1 ? result : 0;
}

/// Divisors of n in increasing order.
inline std::vector<std::uint64_t> divisors(std::uint64_t n, const PrimeTable& table) {
    const auto fac = table.factor(n);
    std::vector<std::uint64_t> out{1};
    for (const auto& [p, e] : fac) {
        const std::size_t base = out.size();
        std::uint64_t pk = 1;
        for (int i = 0; i < e; ++i) {
            pk *= p;
            for (std::size_t j = 0; j < base; ++j) {
                out.push_back(out[j] * pk);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace shimsign
