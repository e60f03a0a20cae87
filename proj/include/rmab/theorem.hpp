#pragma once

// Sufficient discount-factor condition for optimality of the greedy policy:
//
//     0 <= beta <= F'min / ( F'max * (1 - (1 - p11)^(n-k-1)) )
//
// F'min / F'max are the extreme per-coordinate differences of the reward
// over the belief box (by default [p01, p11]).

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>

#include "rmab/model.hpp"
#include "rmab/reward.hpp"

namespace rmab {

struct BetaBound {
    /// nullopt is the unbounded marker (every beta in [0,1] qualifies).
    std::optional<double> bound;
    double f_min = 0.0;
    double f_max = 0.0;
    std::size_t n = 0;
    std::size_t k = 0;
    double p11 = 0.0;
    int exponent = 0;  ///< n - k - 1
    double box_lo = 0.0;
    double box_hi = 1.0;

    bool unbounded() const { return !bound.has_value(); }

    /// beta <= bound, with the unbounded marker admitting everything.
    bool admits(double beta) const { return unbounded() || beta <= *bound; }
};

enum class VerdictReason { theorem, corollary_k1, corollary_kn1, condition_not_met };

inline const char* to_string(VerdictReason r) {
    switch (r) {
        case VerdictReason::theorem: return "theorem";
        case VerdictReason::corollary_k1: return "corollary-k1";
        case VerdictReason::corollary_kn1: return "corollary-kn1";
        case VerdictReason::condition_not_met: return "condition-not-met";
    }
    return "?";
}

/// `condition_not_met` means the sufficient condition is silent, not that
/// greedy is suboptimal.
struct Verdict {
    bool guaranteed_optimal = false;
    VerdictReason reason = VerdictReason::condition_not_met;
};

inline void require_valid_dimensions(std::size_t n, std::size_t k) {
    if (k < 1 || k >= n)
        throw InputError("need 1 <= k < n, got n=" + std::to_string(n) + " k=" + std::to_string(k));
}

inline BetaBound beta_bound(const StandardReward& reward, const ChannelModel& model, std::size_t n,
                            std::size_t k, double box_lo, double box_hi) {
    model.require_positively_correlated();
    require_valid_dimensions(n, k);
    if (reward.k() != k)
        throw InputError("reward is defined on " + std::to_string(reward.k()) + " channels but k=" +
                         std::to_string(k));
    const DerivativeBounds d = derivative_bounds(reward, box_lo, box_hi);
    if (d.f_max == 0.0 && d.f_min == 0.0)
        throw InputError("degenerate (constant) reward: F'max = F'min = 0, bound undefined");

    BetaBound out;
    out.f_min = d.f_min;
    out.f_max = d.f_max;
    out.n = n;
    out.k = k;
    out.p11 = model.p11;
    out.exponent = static_cast<int>(n - k - 1);
    out.box_lo = box_lo;
    out.box_hi = box_hi;
    const double denom = d.f_max * (1.0 - std::pow(1.0 - model.p11, out.exponent));
    if (denom > 0.0) out.bound = d.f_min / denom;
    return out;
}

/// Bound over the default box [p01, p11].
inline BetaBound beta_bound(const StandardReward& reward, const ChannelModel& model, std::size_t n,
                            std::size_t k) {
    return beta_bound(reward, model, n, k, model.p01, model.p11);
}

/// Corollary rules take precedence over the generic condition so the
/// reported reason names the most specific result that applies.
inline Verdict verdict(double beta, const BetaBound& bound, std::size_t n, std::size_t k,
                       const ChannelModel& model) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw InputError("beta must lie in [0,1]");
    if (model.positively_correlated()) {
        if (k + 1 == n) return {true, VerdictReason::corollary_kn1};
        if (k == 1 && bound.admits(1.0)) return {true, VerdictReason::corollary_k1};
        if (bound.admits(beta)) return {true, VerdictReason::theorem};
    }
    return {false, VerdictReason::condition_not_met};
}

}  // namespace rmab
