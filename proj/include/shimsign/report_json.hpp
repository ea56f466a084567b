#pragma once

// nlohmann::json views of the report types.

#include <json.hpp>

#include <algorithm>

#include "shimsign/densities.hpp"
#include "shimsign/shimura.hpp"
#include "shimsign/signstats.hpp"

namespace shimsign {

inline nlohmann::json to_json(const PrimePartition& p, std::size_t sample = 20) {
    const auto head = [sample](const std::vector<std::uint32_t>& v) {
        return std::vector<std::uint32_t>(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(
                                                                    std::min(sample, v.size())));
    };
    return {
        {"x", p.x},
        {"prime_count", p.prime_count()},
        {"count_pos", p.pos.size()},
        {"count_neg", p.neg.size()},
        {"count_zero", p.zero.size()},
        {"fraction_pos", p.fraction_pos()},
        {"fraction_neg", p.fraction_neg()},
        {"fraction_zero", p.fraction_zero()},
        {"recip_zero", p.recip_zero},
        {"zero_primes", p.zero},
        {"sample_pos", head(p.pos)},
        {"sample_neg", head(p.neg)},
    };
}

inline nlohmann::json to_json(const ExceptionalReport& r) {
    return {
        {"x", r.x},
        {"k", r.k},
        {"t", r.t},
        {"matches", r.matches},
        {"match_signs", r.match_signs},
        {"excluded_primes", r.excluded},
        {"count", r.count},
        {"ratio_to_x_over_log_x_9_8", r.ratio},
    };
}

inline nlohmann::json to_json(const DensityProbe& p) {
    return {
        {"cutoff", p.cutoff},
        {"set_size", p.set_size},
        {"zgrid", p.zgrid},
        {"partial_sums", p.partial_sums},
        {"fitted_a", p.fitted_a},
        {"fitted_c0", p.fitted_c0},
        {"fitted_c1", p.fitted_c1},
        {"note", "diagnostic estimate from truncated sums; not a certificate of weak regularity"},
    };
}

inline nlohmann::json to_json(const SatoTateHistogram& h) {
    return {
        {"x", h.x},
        {"weight", h.weight},
        {"n_primes", h.n_primes},
        {"bins", h.counts.size()},
        {"edges", h.edges},
        {"counts", h.counts},
        {"expected", h.expected},
        {"sup_cdf_deviation", h.sup_deviation},
        {"min_u", h.min_u},
        {"max_u", h.max_u},
    };
}

inline nlohmann::json to_json(const RunningStats& r, double C) {
    nlohmann::json j = {
        {"x", r.x},
        {"S", r.S},
        {"n_pos", r.n_pos},
        {"n_neg", r.n_neg},
        {"n_zero", r.n_zero},
        {"prime_exponent_sum", r.prime_exponent_sum},
        {"zero_prime_sum", r.zero_prime_sum},
        {"mean", mean_value(r)},
        {"nonzero_density", nonzero_density(r)},
    };
    const auto ratio = equidistribution_ratio(r);
    j["ratio_pos"] = ratio ? nlohmann::json(ratio->pos) : nlohmann::json(nullptr);
    j["ratio_neg"] = ratio ? nlohmann::json(ratio->neg) : nlohmann::json(nullptr);
    j["halasz_bound"] = r.x >= 2 ? nlohmann::json(halasz_bound(r, C)) : nlohmann::json(nullptr);
    return j;
}

inline nlohmann::json to_json(const RelationReport& r) {
    nlohmann::json j = {
        {"passed", r.passed},
        {"primes_checked", r.primes_checked},
        {"prime_powers_checked", r.prime_powers_checked},
        {"pairs_checked", r.pairs_checked},
    };
    if (!r.passed) {
        j["relation"] = r.relation;
        j["message"] = r.message;
        if (r.prime) j["prime"] = *r.prime;
        if (r.n) j["n"] = *r.n;
        if (r.m) j["m"] = *r.m;
    }
    return j;
}

}  // namespace shimsign
