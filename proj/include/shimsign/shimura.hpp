#pragma once

// Reconstruction of the half-integral weight coefficients a(t n^2) from the
// integral-weight eigenform F_t, normalised by a(t) = 1.
//
// At primes, A(p) = a(t p^2) + eps(p) p^(k-1). The unique multiplicative
// completion is the Dirichlet convolution
//
//     a(t n^2) = sum_{d | n} mu(d) eps(d) d^(k-1) A(n/d),
//
// with eps(d) = (((-1)^k t) | d), the character of the Shimura correspondence
// for trivial nebentypus.

#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "shimsign/arith.hpp"
#include "shimsign/qseries.hpp"

namespace shimsign {

class LiftParams {
public:
    LiftParams(std::uint64_t t, int k, std::shared_ptr<const Eigenform> eigenform)
        : t_(t), k_(k), eigenform_(std::move(eigenform)) {
        if (t_ > static_cast<std::uint64_t>(INT64_MAX)) {
            throw std::invalid_argument("t too large");
        }
        if (!is_squarefree(t_)) {
            throw std::invalid_argument("t must be squarefree and positive, got " + std::to_string(t_));
        }
        if (k_ < 2) {
            throw std::invalid_argument("k must be >= 2");
        }
        if (!eigenform_) {
            throw std::invalid_argument("missing eigenform");
        }
        if (eigenform_->weight() != 2 * k_) {
            throw std::invalid_argument("eigenform weight " + std::to_string(eigenform_->weight()) +
                                        " does not equal 2k = " + std::to_string(2 * k_));
        }
    }

    /// k is read off the eigenform weight.
    LiftParams(std::uint64_t t, const std::shared_ptr<const Eigenform>& eigenform)
        : LiftParams(t, eigenform ? eigenform->k() : 0, eigenform) {}

    std::uint64_t t() const noexcept { return t_; }
    int k() const noexcept { return k_; }
    const Eigenform& eigenform() const noexcept { return *eigenform_; }
    const std::shared_ptr<const Eigenform>& eigenform_ptr() const noexcept { return eigenform_; }

    /// (-1)^k t, the discriminant-like argument of eps.
    std::int64_t character_argument() const noexcept {
        const auto st = static_cast<std::int64_t>(t_);
        return (k_ % 2 == 0) ? st : -st;
    }

private:
    std::uint64_t t_;
    int k_;
    std::shared_ptr<const Eigenform> eigenform_;
};

/// eps(d) = (((-1)^k t) | d); completely multiplicative.
inline int epsilon(const LiftParams& params, std::uint64_t d) {
    if (d == 0) {
        throw std::invalid_argument("epsilon: d must be positive");
    }
    return kronecker(params.character_argument(), static_cast<std::int64_t>(d));
}

/// a(t n^2) for n = 1..N. Index 0 is unused and holds zero.
class LiftedStream {
public:
    LiftedStream(LiftParams params, std::vector<BigInt> values)
        : params_(std::move(params)), values_(std::move(values)) {
        if (values_.size() < 2) {
            throw std::invalid_argument("lifted stream needs precision >= 1");
        }
    }

    const LiftParams& params() const noexcept { return params_; }
    std::size_t precision() const noexcept { return values_.size() - 1; }
    const std::vector<BigInt>& values() const noexcept { return values_; }

    /// a(t n^2)
    const BigInt& value(std::size_t n) const {
        if (n == 0 || n > precision()) {
            throw std::out_of_range("a(t n^2) requested for n=" + std::to_string(n) +
                                    " outside 1.." + std::to_string(precision()));
        }
        return values_[n];
    }

    /// Replaces one coefficient. Exists for fault-injection tests of
    /// verify_relations; streams from lift_invert are never modified.
    LiftedStream with_value(std::size_t n, BigInt v) const {
        LiftedStream copy = *this;
        copy.values_.at(n) = std::move(v);
        return copy;
    }

private:
    LiftParams params_;
    std::vector<BigInt> values_;
};

inline LiftedStream lift_invert(const LiftParams& params, std::size_t N, const PrimeTable& table) {
    const Eigenform& f = params.eigenform();
    if (N < 1) {
        throw std::invalid_argument("lift_invert: N must be >= 1");
    }
    if (f.precision() < N) {
        throw std::invalid_argument("lift_invert: eigenform precision " + std::to_string(f.precision()) +
                                    " is below requested N = " + std::to_string(N));
    }
    table.check_range(N);

    std::vector<BigInt> values(N + 1);
    BigInt coeff;
    for (std::size_t d = 1; d <= N; ++d) {
        const int mu = mobius(d, table);
        if (mu == 0) {
            continue;
        }
        const int e = epsilon(params, d);
        if (e == 0) {
            continue;
        }
        coeff = ipow(d, static_cast<unsigned long>(params.k() - 1));
        if (mu * e < 0) {
            coeff = -coeff;
        }
        for (std::size_t m = 1, n = d; n <= N; ++m, n += d) {
            mpz_addmul(values[n].get_mpz_t(), coeff.get_mpz_t(), f.A(m).get_mpz_t());
        }
    }
    return LiftedStream(params, std::move(values));
}

inline LiftedStream lift_invert(const LiftParams& params, std::size_t N) {
    return lift_invert(params, N, sieve(std::max<std::size_t>(N, 2)));
}

struct RelationReport {
    bool passed = true;
    /// "normalisation", "prime", "prime-power" or "multiplicativity".
    std::string relation;
    std::optional<std::uint64_t> prime;
    std::optional<std::uint64_t> n;
    std::optional<std::uint64_t> m;
    std::string message;
    std::size_t primes_checked = 0;
    std::size_t prime_powers_checked = 0;
    std::size_t pairs_checked = 0;
};

/// Checks, in this order: a(t) = 1; the prime relation for every p <= N; the
/// prime-power form of the completion, a(t p^(2r)) = A(p^r) - eps(p)
/// p^(k-1) A(p^(r-1)); and a(t n^2 m^2) = a(t n^2) a(t m^2) for `trials`
/// random coprime n, m >= 2 with nm <= N. Stops at the first failure.
inline RelationReport verify_relations(const LiftedStream& stream, std::size_t trials,
                                       std::uint64_t seed = 0x5eed5eedULL) {
    RelationReport rep;
    const LiftParams& params = stream.params();
    const Eigenform& f = params.eigenform();
    const std::size_t N = stream.precision();
    const auto fail = [&](std::string relation, std::string message) {
        rep.passed = false;
        rep.relation = std::move(relation);
        rep.message = std::move(message);
        return rep;
    };

    if (stream.value(1) != 1) {
        rep.n = 1;
        return fail("normalisation", "a(t) = " + stream.value(1).get_str() + ", expected 1");
    }
    if (f.precision() < N) {
        return fail("prime", "eigenform precision below stream precision");
    }

    const PrimeTable table = sieve(std::max<std::size_t>(N, 2));
    BigInt rhs;
    for (std::uint32_t p : table.primes()) {
        if (p > N) {
            break;
        }
        const BigInt pk = ipow(p, static_cast<unsigned long>(params.k() - 1));
        const int e = epsilon(params, p);
        rhs = stream.value(p) + e * pk;
        ++rep.primes_checked;
        if (rhs != f.A(p)) {
            rep.prime = p;
            rep.n = p;
            return fail("prime", "A(" + std::to_string(p) + ") = " + f.A(p).get_str() +
                                     " but a(t p^2) + eps(p) p^(k-1) = " + rhs.get_str());
        }
        std::size_t cur = p;
        while (cur <= N / p) {
            const std::size_t next = cur * p;
            rhs = f.A(next) - e * pk * f.A(cur);
            ++rep.prime_powers_checked;
            if (rhs != stream.value(next)) {
                rep.prime = p;
                rep.n = next;
                return fail("prime-power", "a(t n^2) at n=" + std::to_string(next) + " is " +
                                               stream.value(next).get_str() + ", expected " +
                                               rhs.get_str());
            }
            cur = next;
        }
    }

    if (N >= 6) {
        std::mt19937_64 rng(seed);
        BigInt prod;
        std::size_t attempts = 0;
        while (rep.pairs_checked < trials) {
            if (++attempts > 100 * trials + 1000) {
                return fail("multiplicativity", "could not draw enough coprime pairs");
            }
            std::uniform_int_distribution<std::size_t> dn(2, N / 2);
            const std::size_t n = dn(rng);
            if (N / n < 2) {
                continue;
            }
            std::uniform_int_distribution<std::size_t> dm(2, N / n);
            const std::size_t m = dm(rng);
            if (std::gcd(n, m) != 1) {
                continue;
            }
            ++rep.pairs_checked;
            prod = stream.value(n) * stream.value(m);
            if (prod != stream.value(n * m)) {
                rep.n = n;
                rep.m = m;
                return fail("multiplicativity", "a(t (nm)^2) != a(t n^2) a(t m^2) for n=" +
                                                    std::to_string(n) + ", m=" + std::to_string(m));
            }
        }
    }
    return rep;
}

/// CSV export: a "# t=.. k=.. weight2k=.. N=.." comment, the header
/// "n,a_tn2,sign", then one row per n.
inline void write_stream_csv(std::ostream& out, const LiftedStream& stream) {
    const auto& p = stream.params();
    out << "# t=" << p.t() << " k=" << p.k() << " weight2k=" << 2 * p.k() << " N=" << stream.precision()
        << '\n';
    out << "n,a_tn2,sign\n";
    for (std::size_t n = 1; n <= stream.precision(); ++n) {
        out << n << ',' << stream.value(n).get_str() << ',' << sgn(stream.value(n)) << '\n';
    }
}

}  // namespace shimsign
