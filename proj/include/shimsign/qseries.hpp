#pragma once

// Exact truncated power series over arbitrary-precision integers, and the
// level-1 Hecke eigenforms built from them.
//
// A QSeries of precision N stores the coefficients of q^0..q^N. Every binary
// operation truncates to the smaller operand precision; nothing is inferred.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "shimsign/arith.hpp"
#include "shimsign/parallel.hpp"

namespace shimsign {

using BigInt = mpz_class;

/// base^e as an exact integer.
inline BigInt ipow(std::uint64_t base, unsigned long e) {
    BigInt r;
    mpz_ui_pow_ui(r.get_mpz_t(), base, e);
    return r;
}

inline int sign_of(const BigInt& v) { return sgn(v); }

class QSeries {
public:
    /// Zero series of precision `precision`.
    explicit QSeries(std::size_t precision = 0) : coeffs_(precision + 1) {}

    /// Takes ownership of the coefficients; precision is coeffs.size() - 1.
    explicit QSeries(std::vector<BigInt> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) {
            throw std::invalid_argument("QSeries needs at least one coefficient");
        }
    }

    static QSeries one(std::size_t precision) {
        QSeries s(precision);
        s.coeffs_[0] = 1;
        return s;
    }

    /// Builds a series from small integer coefficients, zero-padding to `precision`.
    static QSeries from_ints(std::initializer_list<long> values, std::size_t precision) {
        QSeries s(precision);
        std::size_t i = 0;
        for (long v : values) {
            if (i > precision) {
                break;
            }
            s.coeffs_[i++] = v;
        }
        return s;
    }

    std::size_t precision() const noexcept { return coeffs_.size() - 1; }
    const std::vector<BigInt>& coeffs() const noexcept { return coeffs_; }

    const BigInt& operator[](std::size_t n) const { return coeffs_.at(n); }
    BigInt& operator[](std::size_t n) { return coeffs_.at(n); }

    std::size_t nonzero_count() const {
        return static_cast<std::size_t>(
            std::count_if(coeffs_.begin(), coeffs_.end(), [](const BigInt& c) { return c != 0; }));
    }

    bool is_zero() const { return nonzero_count() == 0; }

    /// Largest bit length of any coefficient magnitude.
    std::size_t max_bits() const {
        std::size_t b = 0;
        for (const auto& c : coeffs_) {
            if (c != 0) {
                b = std::max(b, mpz_sizeinbase(c.get_mpz_t(), 2));
            }
        }
        return b;
    }

    QSeries truncated(std::size_t precision) const {
        if (precision > this->precision()) {
            throw std::invalid_argument("cannot raise precision of a truncated series");
        }
        return QSeries(std::vector<BigInt>(coeffs_.begin(),
                                           coeffs_.begin() + static_cast<std::ptrdiff_t>(precision) + 1));
    }

    /// Multiplies by q^shift, keeping the precision.
    QSeries shifted(std::size_t shift) const {
        QSeries r(precision());
        for (std::size_t i = 0; i + shift <= precision(); ++i) {
            r.coeffs_[i + shift] = coeffs_[i];
        }
        return r;
    }

    friend bool operator==(const QSeries& a, const QSeries& b) { return a.coeffs_ == b.coeffs_; }

    friend QSeries operator+(const QSeries& a, const QSeries& b) {
        const std::size_t n = std::min(a.precision(), b.precision());
        QSeries r(n);
        for (std::size_t i = 0; i <= n; ++i) {
            r.coeffs_[i] = a.coeffs_[i] + b.coeffs_[i];
        }
        return r;
    }

    friend QSeries operator-(const QSeries& a, const QSeries& b) {
        const std::size_t n = std::min(a.precision(), b.precision());
        QSeries r(n);
        for (std::size_t i = 0; i <= n; ++i) {
            r.coeffs_[i] = a.coeffs_[i] - b.coeffs_[i];
        }
        return r;
    }

    friend QSeries operator*(const BigInt& s, const QSeries& a) {
        QSeries r(a.precision());
        for (std::size_t i = 0; i <= a.precision(); ++i) {
            r.coeffs_[i] = s * a.coeffs_[i];
        }
        return r;
    }

    /// Exact division of every coefficient; throws if any remainder is nonzero.
    QSeries divided_exactly(const BigInt& d) const {
        if (d == 0) {
            throw std::domain_error("division by zero");
        }
        QSeries r(precision());
        for (std::size_t i = 0; i <= precision(); ++i) {
            if (!mpz_divisible_p(coeffs_[i].get_mpz_t(), d.get_mpz_t())) {
                throw std::domain_error("coefficient " + std::to_string(i) + " not divisible by " +
                                        d.get_str());
            }
            mpz_divexact(r.coeffs_[i].get_mpz_t(), coeffs_[i].get_mpz_t(), d.get_mpz_t());
        }
        return r;
    }

private:
    std::vector<BigInt> coeffs_;
};

// ---------------------------------------------------------------------------
// Multiplication kernels. All of them return the same exact coefficients; the
// dispatcher in series_mul only picks the cheapest one.

/// Direct convolution, O(N^2) multiplications.
inline QSeries series_mul_schoolbook(const QSeries& a, const QSeries& b) {
    const std::size_t n = std::min(a.precision(), b.precision());
    QSeries r(n);
    for (std::size_t i = 0; i <= n; ++i) {
        if (a[i] == 0) {
            continue;
        }
        for (std::size_t j = 0; i + j <= n; ++j) {
            mpz_addmul(r[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
        }
    }
    return r;
}

/// Dense x sparse: cost is N times the number of nonzero terms of `sparse`.
/// Output ranges are split across threads; each coefficient is produced by
/// one thread in a fixed order, so the result is independent of `threads`.
inline QSeries series_mul_sparse(const QSeries& dense, const QSeries& sparse,
                                 unsigned threads = default_threads()) {
    const std::size_t n = std::min(dense.precision(), sparse.precision());
    std::vector<std::pair<std::size_t, const BigInt*>> terms;
    for (std::size_t j = 0; j <= n; ++j) {
        if (sparse[j] != 0) {
            terms.emplace_back(j, &sparse[j]);
        }
    }
    QSeries r(n);
    parallel_blocks(0, n + 1, threads, [&](std::size_t lo, std::size_t hi, std::size_t) {
        for (std::size_t i = lo; i < hi; ++i) {
            mpz_ptr out = r[i].get_mpz_t();
            for (const auto& [j, v] : terms) {
                if (j > i) {
                    break;
                }
                const BigInt& d = dense[i - j];
                if (d == 0) {
                    continue;
                }
                if (v->fits_slong_p()) {
                    const long s = v->get_si();
                    if (s >= 0) {
                        mpz_addmul_ui(out, d.get_mpz_t(), static_cast<unsigned long>(s));
                    } else {
                        mpz_submul_ui(out, d.get_mpz_t(), -static_cast<unsigned long>(s));
                    }
                } else {
                    mpz_addmul(out, d.get_mpz_t(), v->get_mpz_t());
                }
            }
        }
    });
    return r;
}

namespace detail {

inline constexpr std::size_t kLimbBits = sizeof(mp_limb_t) * 8;

// Writes sum_i (c_i + 2^(w-1)) 2^(w i), w = kLimbBits * width, into `out`.
// Every shifted digit lies in (0, 2^w), so the digits never interact.
inline BigInt pack_biased(const std::vector<BigInt>& c, std::size_t len, std::size_t width) {
    std::vector<mp_limb_t> limbs(len * width, 0);
    BigInt bias = 1;
    bias <<= static_cast<mp_bitcnt_t>(kLimbBits * width - 1);
    BigInt tmp;
    for (std::size_t i = 0; i < len; ++i) {
        tmp = c[i] + bias;
        std::size_t count = 0;
        mpz_export(&limbs[i * width], &count, -1, sizeof(mp_limb_t), 0, 0, tmp.get_mpz_t());
    }
    BigInt out;
    mpz_import(out.get_mpz_t(), limbs.size(), -1, sizeof(mp_limb_t), 0, 0, limbs.data());
    return out;
}

// sum_{i < len} 2^(w-1) 2^(w i)
inline BigInt bias_sum(std::size_t len, std::size_t width) {
    std::vector<mp_limb_t> limbs(len * width, 0);
    for (std::size_t i = 0; i < len; ++i) {
        limbs[i * width + width - 1] = mp_limb_t{1} << (kLimbBits - 1);
    }
    BigInt out;
    mpz_import(out.get_mpz_t(), limbs.size(), -1, sizeof(mp_limb_t), 0, 0, limbs.data());
    return out;
}

inline std::size_t bit_length(std::size_t v) {
    std::size_t b = 0;
    while (v != 0) {
        ++b;
        v >>= 1;
    }
    return b;
}

}  // namespace detail

/// Kronecker substitution: both series are evaluated at 2^w as signed
/// base-2^w numbers, multiplied with one GMP multiplication, and the product
/// digits are read back after re-biasing. w is chosen so every product
/// coefficient satisfies |c| < 2^(w-1).
inline QSeries series_mul_kronecker(const QSeries& a, const QSeries& b) {
    const std::size_t n = std::min(a.precision(), b.precision());
    const std::size_t len = n + 1;
    const std::size_t ba = a.truncated(n).max_bits();
    const std::size_t bb = b.truncated(n).max_bits();
    if (ba == 0 || bb == 0) {
        return QSeries(n);
    }
    const std::size_t bits = ba + bb + detail::bit_length(len) + 1;
    const std::size_t width = (bits + detail::kLimbBits - 1) / detail::kLimbBits;

    const BigInt offset_in = detail::bias_sum(len, width);
    BigInt pa = detail::pack_biased(a.coeffs(), len, width) - offset_in;
    BigInt product;
    if (&a == &b) {
        product = pa * pa;
    } else {
        const BigInt pb = detail::pack_biased(b.coeffs(), len, width) - offset_in;
        product = pa * pb;
    }
    pa = 0;
    const std::size_t out_len = 2 * len - 1;
    product += detail::bias_sum(out_len, width);

    std::vector<mp_limb_t> limbs(out_len * width, 0);
    std::size_t count = 0;
    mpz_export(limbs.data(), &count, -1, sizeof(mp_limb_t), 0, 0, product.get_mpz_t());
    product = 0;

    BigInt bias = 1;
    bias <<= static_cast<mp_bitcnt_t>(detail::kLimbBits * width - 1);
    QSeries r(n);
    for (std::size_t i = 0; i < len; ++i) {
        mpz_import(r[i].get_mpz_t(), width, -1, sizeof(mp_limb_t), 0, 0, &limbs[i * width]);
        r[i] -= bias;
    }
    return r;
}

inline constexpr std::size_t kSparseTermLimit = 16;
inline constexpr std::size_t kSchoolbookLimit = 32;

/// Exact product truncated at min(a.precision(), b.precision()).
inline QSeries series_mul(const QSeries& a, const QSeries& b) {
    const std::size_t n = std::min(a.precision(), b.precision());
    if (n < kSchoolbookLimit) {
        return series_mul_schoolbook(a, b);
    }
    const std::size_t na = a.nonzero_count();
    const std::size_t nb = b.nonzero_count();
    if (std::min(na, nb) <= kSparseTermLimit) {
        return na <= nb ? series_mul_sparse(b, a) : series_mul_sparse(a, b);
    }
    return series_mul_kronecker(a, b);
}

/// a^e by binary exponentiation; a^0 is the constant series 1.
inline QSeries series_pow(const QSeries& a, std::uint64_t e) {
    QSeries result = QSeries::one(a.precision());
    if (e == 0) {
        return result;
    }
    QSeries base = a;
    bool first = true;
    while (true) {
        if (e & 1u) {
            result = first ? base : series_mul(result, base);
            first = false;
        }
        e >>= 1;
        if (e == 0) {
            break;
        }
        base = series_mul(base, base);
    }
    return result;
}

/// prod_{n>=1} (1 - q^n) truncated at N, from the pentagonal number theorem:
/// sum_j (-1)^j q^(j(3j-1)/2) over all integers j.
inline QSeries euler_product(std::size_t N) {
    QSeries r(N);
    r[0] = 1;
    for (std::uint64_t j = 1;; ++j) {
        const std::uint64_t e1 = j * (3 * j - 1) / 2;
        const std::uint64_t e2 = j * (3 * j + 1) / 2;
        if (e1 > N) {
            break;
        }
        const long s = (j % 2 == 0) ? 1 : -1;
        r[e1] = s;
        if (e2 <= N) {
            r[e2] = s;
        }
    }
    return r;
}

/// Normalising constant c_w with E_w = 1 + c_w * sum sigma_{w-1}(n) q^n, for
/// the weights where it is an integer.
inline long eisenstein_constant(int weight) {
    switch (weight) {
        case 4: return 240;
        case 6: return -504;
        case 8: return 480;
        case 10: return -264;
        case 14: return -24;
        default: break;
    }
    if (weight < 4 || weight % 2 != 0) {
        throw std::invalid_argument("eisenstein: weight must be even and >= 4, got " +
                                    std::to_string(weight));
    }
    throw std::invalid_argument("eisenstein: weight " + std::to_string(weight) +
                                " has a non-integral normalising constant");
}

/// Integer-normalised Eisenstein series E_w, w in {4, 6, 8, 10, 14}.
inline QSeries eisenstein(int weight, std::size_t N) {
    const long c = eisenstein_constant(weight);
    std::vector<BigInt> sigma(N + 1);
    for (std::size_t d = 1; d <= N; ++d) {
        const BigInt dp = ipow(d, static_cast<unsigned long>(weight - 1));
        for (std::size_t m = d; m <= N; m += d) {
            sigma[m] += dp;
        }
    }
    QSeries r(N);
    r[0] = 1;
    for (std::size_t n = 1; n <= N; ++n) {
        r[n] = c * sigma[n];
    }
    return r;
}

// ---------------------------------------------------------------------------

/// Normalised level-1 cuspidal Hecke eigenform sum A(n) q^n of even weight 2k.
class Eigenform {
public:
    Eigenform(int weight, QSeries qexp) : weight_(weight), qexp_(std::move(qexp)) {
        if (weight_ < 2 || weight_ % 2 != 0) {
            throw std::invalid_argument("eigenform weight must be even and >= 2");
        }
        if (qexp_[0] != 0) {
            throw std::invalid_argument("eigenform must be cuspidal (A(0) = 0)");
        }
        if (qexp_.precision() >= 1 && qexp_[1] != 1) {
            throw std::invalid_argument("eigenform must be normalised (A(1) = 1)");
        }
    }

    int weight() const noexcept { return weight_; }
    /// Half the weight; the k of the half-integral weight k + 1/2.
    int k() const noexcept { return weight_ / 2; }
    std::size_t precision() const noexcept { return qexp_.precision(); }
    const QSeries& qexp() const noexcept { return qexp_; }

    const BigInt& A(std::size_t n) const {
        if (n > precision()) {
            throw std::out_of_range("A(" + std::to_string(n) + ") beyond precision " +
                                    std::to_string(precision()));
        }
        return qexp_[n];
    }

private:
    int weight_;
    QSeries qexp_;
};

/// (E4^3 - E6^2) / 1728: the Eisenstein route to Delta, used as an oracle.
inline QSeries delta_from_eisenstein(std::size_t N) {
    const QSeries e4 = eisenstein(4, N);
    const QSeries e6 = eisenstein(6, N);
    const QSeries diff = series_mul(series_mul(e4, e4), e4) - series_mul(e6, e6);
    return diff.divided_exactly(BigInt(1728));
}

/// Delta = q * prod (1 - q^n)^24 through the pentagonal expansion. With
/// `cross_check` the result is compared against the Eisenstein route and a
/// std::logic_error is raised on any mismatch.
inline Eigenform delta(std::size_t N, bool cross_check = true) {
    if (N < 1) {
        throw std::invalid_argument("delta: precision must be >= 1");
    }
    const QSeries eta24 = series_pow(euler_product(N - 1), 24);
    QSeries q = QSeries(N);
    for (std::size_t n = 1; n <= N; ++n) {
        q[n] = eta24[n - 1];
    }
    if (cross_check && !(q == delta_from_eisenstein(N))) {
        throw std::logic_error("delta: eta-product and Eisenstein routes disagree");
    }
    return Eigenform(12, std::move(q));
}

/// True for the weights whose level-1 cusp space is one-dimensional.
inline bool is_one_dimensional_weight(int weight) {
    return weight == 12 || weight == 16 || weight == 18 || weight == 20 || weight == 22 ||
           weight == 26;
}

/// The unique normalised cusp form of weight 2k in {12,16,18,20,22,26}:
/// Delta * E4^a * E6^b with 4a + 6b = 2k - 12.
inline Eigenform level1_eigenform(int weight, std::size_t N) {
    if (!is_one_dimensional_weight(weight)) {
        throw std::invalid_argument("weight " + std::to_string(weight) +
                                    " does not have a one-dimensional level-1 cusp space");
    }
    const Eigenform d = delta(N);
    if (weight == 12) {
        return d;
    }
    const int rest = weight - 12;
    int a = 0;
    int b = 0;
    switch (rest) {
        case 4: a = 1; break;
        case 6: b = 1; break;
        case 8: a = 2; break;
        case 10: a = 1; b = 1; break;
        case 14: a = 2; b = 1; break;
        default: throw std::logic_error("unreachable weight");
    }
    QSeries f = d.qexp();
    if (a > 0) {
        f = series_mul(f, series_pow(eisenstein(4, N), static_cast<std::uint64_t>(a)));
    }
    if (b > 0) {
        f = series_mul(f, eisenstein(6, N));
    }
    return Eigenform(weight, std::move(f));
}

// ---------------------------------------------------------------------------
// Classical consistency checks on a constructed eigenform.

struct EigenformCheck {
    bool passed = true;
    std::string detail;
};

/// A(n) = prod A(p^e) over the factorisation of every 2 <= n <= precision.
inline EigenformCheck check_multiplicativity(const Eigenform& f, const PrimeTable& table) {
    BigInt prod;
    for (std::size_t n = 2; n <= f.precision(); ++n) {
        const auto fac = table.factor(n);
        if (fac.size() < 2) {
            continue;
        }
        prod = 1;
        for (const auto& [p, e] : fac) {
            std::size_t pe = 1;
            for (int i = 0; i < e; ++i) {
                pe *= p;
            }
            prod *= f.A(pe);
        }
        if (prod != f.A(n)) {
            return {false, "multiplicativity fails at n=" + std::to_string(n)};
        }
    }
    return {};
}

/// A(p^(r+1)) = A(p) A(p^r) - p^(2k-1) A(p^(r-1)) for all p^(r+1) <= precision.
inline EigenformCheck check_hecke_recursion(const Eigenform& f, const PrimeTable& table) {
    const std::size_t N = f.precision();
    for (std::uint32_t p : table.primes()) {
        if (p > N) {
            break;
        }
        const BigInt pw = ipow(p, static_cast<unsigned long>(f.weight() - 1));
        std::size_t prev = 1;
        std::size_t cur = p;
        while (cur <= N / p) {
            const std::size_t next = cur * p;
            if (f.A(next) != f.A(p) * f.A(cur) - pw * f.A(prev)) {
                return {false, "Hecke recursion fails at p=" + std::to_string(p) +
                                   ", n=" + std::to_string(next)};
            }
            prev = cur;
            cur = next;
        }
    }
    return {};
}

/// |A(p)| <= 2 p^((2k-1)/2), checked exactly as A(p)^2 <= 4 p^(2k-1).
inline bool within_deligne_bound(const BigInt& ap, std::uint64_t p, int weight) {
    const BigInt rhs = 4 * ipow(p, static_cast<unsigned long>(weight - 1));
    return ap * ap <= rhs;
}

inline EigenformCheck check_deligne_bound(const Eigenform& f, const PrimeTable& table) {
    for (std::uint32_t p : table.primes()) {
        if (p > f.precision()) {
            break;
        }
        if (!within_deligne_bound(f.A(p), p, f.weight())) {
            return {false, "Deligne bound violated at p=" + std::to_string(p)};
        }
    }
    return {};
}

// ---------------------------------------------------------------------------
// Coefficient cache: "# eigenform weight=<2k> precision=<N>" followed by one
// "n<TAB>A(n)" record per line for n = 1..N.

inline void write_coefficient_cache(std::ostream& out, const Eigenform& f) {
    out << "# eigenform weight=" << f.weight() << " precision=" << f.precision() << '\n';
    for (std::size_t n = 1; n <= f.precision(); ++n) {
        out << n << '\t' << f.A(n).get_str() << '\n';
    }
}

/// Reads a cache written by write_coefficient_cache. The stored weight must
/// equal `weight` and the stored precision must be at least `precision`; the
/// result is truncated to `precision`.
inline Eigenform read_coefficient_cache(std::istream& in, int weight, std::size_t precision) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("coefficient cache: empty file");
    }
    int cached_weight = 0;
    std::size_t cached_precision = 0;
    {
        std::istringstream hs(line);
        std::string hash, tag, w, p;
        hs >> hash >> tag >> w >> p;
        if (hash != "#" || tag != "eigenform" || w.rfind("weight=", 0) != 0 ||
            p.rfind("precision=", 0) != 0) {
            throw std::runtime_error("coefficient cache: malformed header '" + line + "'");
        }
        try {
            cached_weight = std::stoi(w.substr(7));
            cached_precision = std::stoull(p.substr(10));
        } catch (const std::exception&) {
            throw std::runtime_error("coefficient cache: malformed header '" + line + "'");
        }
    }
    if (cached_weight != weight) {
        throw std::runtime_error("coefficient cache: weight " + std::to_string(cached_weight) +
                                 " does not match requested " + std::to_string(weight));
    }
    if (cached_precision < precision) {
        throw std::runtime_error("coefficient cache: precision " + std::to_string(cached_precision) +
                                 " below requested " + std::to_string(precision));
    }
    QSeries s(precision);
    for (std::size_t n = 1; n <= precision; ++n) {
        if (!std::getline(in, line)) {
            throw std::runtime_error("coefficient cache: truncated at n=" + std::to_string(n));
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos || line.substr(0, tab) != std::to_string(n)) {
            throw std::runtime_error("coefficient cache: bad record for n=" + std::to_string(n));
        }
        if (s[n].set_str(line.substr(tab + 1), 10) != 0) {
            throw std::runtime_error("coefficient cache: bad integer for n=" + std::to_string(n));
        }
    }
    return Eigenform(weight, std::move(s));
}

}  // namespace shimsign
