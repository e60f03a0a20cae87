#pragma once

// Standard immediate-reward functions on the k sensed channels.
//
// A reward that is symmetric, affine in each belief and monotone is exactly
// the multilinear extension of a non-decreasing function of the number of
// good channels, so it is stored as its level values v_0 <= ... <= v_k.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rmab/model.hpp"
#include "rmab/random.hpp"

namespace rmab {

/// Distribution of the number of good channels among independent
/// Bernoulli(beliefs[i]) channels, by iterative convolution.
inline std::vector<double> good_count_distribution(std::span<const double> beliefs) {
    std::vector<double> dist(beliefs.size() + 1, 0.0);
    dist[0] = 1.0;
    for (std::size_t i = 0; i < beliefs.size(); ++i) {
        const double w = beliefs[i];
        for (std::size_t m = i + 1; m > 0; --m) dist[m] = dist[m] * (1.0 - w) + dist[m - 1] * w;
        dist[0] *= (1.0 - w);
    }
    return dist;
}

class StandardReward {
public:
    /// Throws InputError unless levels are finite and non-decreasing with
    /// at least two entries.
    static StandardReward from_levels(std::vector<double> levels) {
        if (levels.size() < 2) throw InputError("reward needs k+1 >= 2 level values");
        for (std::size_t m = 0; m < levels.size(); ++m) {
            if (!std::isfinite(levels[m])) throw InputError("reward levels must be finite");
            if (m > 0 && levels[m] < levels[m - 1])
                throw InputError("reward levels must be non-decreasing (level " + std::to_string(m) +
                                 " < level " + std::to_string(m - 1) + ")");
        }
        return StandardReward(std::move(levels));
    }

    std::size_t k() const { return levels_.size() - 1; }
    const std::vector<double>& levels() const { return levels_; }

    /// Expected reward E[v_M], M the good count among the sensed channels.
    double eval(std::span<const double> chosen) const {
        if (chosen.size() != k())
            throw InputError("reward expects " + std::to_string(k()) + " beliefs, got " +
                             std::to_string(chosen.size()));
        const auto dist = good_count_distribution(chosen);
        double total = 0.0;
        for (std::size_t m = 0; m < dist.size(); ++m) total += dist[m] * levels_[m];
        return total;
    }

    friend bool operator==(const StandardReward&, const StandardReward&) = default;

private:
    explicit StandardReward(std::vector<double> levels) : levels_(std::move(levels)) {}
    std::vector<double> levels_;
};

inline void require_k(std::size_t k) {
    if (k < 1) throw InputError("k must be at least 1");
}

/// One unit if at least one sensed channel is good.
inline StandardReward or_reward(std::size_t k) {
    require_k(k);
    std::vector<double> v(k + 1, 1.0);
    v[0] = 0.0;
    return StandardReward::from_levels(std::move(v));
}

/// One unit if every sensed channel is good.
inline StandardReward and_reward(std::size_t k) {
    require_k(k);
    std::vector<double> v(k + 1, 0.0);
    v[k] = 1.0;
    return StandardReward::from_levels(std::move(v));
}

/// `a` per good sensed channel.
inline StandardReward sum_reward(std::size_t k, double a) {
    require_k(k);
    if (!(a > 0.0) || !std::isfinite(a)) throw InputError("sum reward weight a must be positive");
    std::vector<double> v(k + 1);
    for (std::size_t m = 0; m <= k; ++m) v[m] = a * static_cast<double>(m);
    return StandardReward::from_levels(std::move(v));
}

/// Black-box candidate reward on k beliefs, prior to validation.
struct GenericReward {
    std::size_t k = 0;
    std::function<double(std::span<const double>)> evaluator;

    double operator()(std::span<const double> w) const { return evaluator(w); }
};

inline GenericReward as_generic(const StandardReward& reward) {
    return {reward.k(), [reward](std::span<const double> w) { return reward.eval(w); }};
}

/// Multilinear extension of arbitrary level values; unlike StandardReward
/// the levels need not be monotone, which is what lets the checker reject them.
inline GenericReward generic_from_levels(std::vector<double> levels) {
    if (levels.size() < 2) throw InputError("reward needs k+1 >= 2 level values");
    const std::size_t k = levels.size() - 1;
    return {k, [levels = std::move(levels)](std::span<const double> w) {
                const auto dist = good_count_distribution(w);
                double total = 0.0;
                for (std::size_t m = 0; m < dist.size(); ++m) total += dist[m] * levels[m];
                return total;
            }};
}

/// A point where an assumption was observed to fail.
struct Witness {
    std::vector<double> point;
    std::size_t i = 0;  ///< coordinate (0-based)
    std::size_t j = 0;  ///< second coordinate for symmetry swaps
    double lhs = 0.0;
    double rhs = 0.0;
    std::string detail;
};

struct AssumptionResult {
    bool passed = true;
    std::optional<Witness> witness;
};

struct AssumptionReport {
    AssumptionResult symmetry;
    AssumptionResult affineness;
    AssumptionResult monotonicity;

    bool all_passed() const { return symmetry.passed && affineness.passed && monotonicity.passed; }
};

inline constexpr double kAssumptionTol = 1e-9;
inline constexpr std::size_t kMaxCheckK = 20;

namespace detail {

inline std::string format_point(const std::vector<double>& p) {
    std::string s = "(";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) s += ", ";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", p[i]);
        s += buf;
    }
    return s + ")";
}

inline std::optional<Witness> check_symmetry(const GenericReward& f, std::size_t samples, Rng& rng) {
    const std::size_t k = f.k;
    if (k < 2) return std::nullopt;
    auto probe = [&](std::vector<double> p, std::size_t i, std::size_t j) -> std::optional<Witness> {
        auto q = p;
        std::swap(q[i], q[j]);
        const double a = f(p), b = f(q);
        if (std::abs(a - b) > kAssumptionTol)
            return Witness{p, i, j, a, b,
                           "F" + format_point(p) + " != F" + format_point(q) + " after swapping " +
                               std::to_string(i + 1) + "," + std::to_string(j + 1)};
        return std::nullopt;
    };
    // Unit vectors catch weighted sums deterministically.
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) {
            std::vector<double> p(k, 0.0);
            p[i] = 1.0;
            if (auto w = probe(p, i, j)) return w;
        }
    for (std::size_t s = 0; s < samples; ++s) {
        std::vector<double> p(k);
        for (auto& x : p) x = rng.unit();
        const std::size_t i = rng.index(k);
        std::size_t j = rng.index(k - 1);
        if (j >= i) ++j;
        if (auto w = probe(p, std::min(i, j), std::max(i, j))) return w;
    }
    return std::nullopt;
}

inline std::optional<Witness> check_affineness(const GenericReward& f, std::size_t samples, Rng& rng) {
    const std::size_t k = f.k;
    for (std::size_t s = 0; s < samples; ++s) {
        std::vector<double> p(k);
        for (auto& x : p) x = rng.unit();
        const std::size_t i = rng.index(k);
        auto hi = p, lo = p;
        hi[i] = 1.0;
        lo[i] = 0.0;
        const double direct = f(p);
        const double interp = p[i] * f(hi) + (1.0 - p[i]) * f(lo);
        if (std::abs(direct - interp) > kAssumptionTol)
            return Witness{p, i, i, direct, interp,
                           "F" + format_point(p) + " = " + std::to_string(direct) +
                               " but interpolation in coordinate " + std::to_string(i + 1) +
                               " gives " + std::to_string(interp)};
    }
    return std::nullopt;
}

/// Exact for multi-affine F: the difference F(1,w_-i) - F(0,w_-i) is itself
/// multi-affine in w_-i, so its minimum sits on a vertex.
inline std::optional<Witness> check_monotonicity(const GenericReward& f) {
    const std::size_t k = f.k;
    const std::uint64_t vertices = std::uint64_t{1} << (k - 1);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::uint64_t mask = 0; mask < vertices; ++mask) {
            std::vector<double> p(k, 0.0);
            for (std::size_t c = 0, bit = 0; c < k; ++c) {
                if (c == i) continue;
                p[c] = (mask >> bit++) & 1U ? 1.0 : 0.0;
            }
            auto hi = p, lo = p;
            hi[i] = 1.0;
            lo[i] = 0.0;
            const double fh = f(hi), fl = f(lo);
            if (fh - fl < -kAssumptionTol)
                return Witness{lo, i, i, fh, fl,
                               "raising coordinate " + std::to_string(i + 1) + " from 0 to 1 at " +
                                   format_point(lo) + " lowers F from " + std::to_string(fl) +
                                   " to " + std::to_string(fh)};
        }
    }
    return std::nullopt;
}

inline AssumptionResult to_result(std::optional<Witness> w) {
    return {!w.has_value(), std::move(w)};
}

}  // namespace detail

/// Checks symmetry, per-coordinate affineness and monotonicity of a
/// candidate. Deterministic given the seed.
inline AssumptionReport check_assumptions(const GenericReward& candidate, std::size_t samples,
                                          std::uint64_t seed) {
    if (samples < 1) throw InputError("samples must be at least 1");
    require_k(candidate.k);
    if (candidate.k > kMaxCheckK) throw InputError("k too large for vertex enumeration");
    Rng rng(seed);
    AssumptionReport report;
    report.symmetry = detail::to_result(detail::check_symmetry(candidate, samples, rng));
    report.affineness = detail::to_result(detail::check_affineness(candidate, samples, rng));
    report.monotonicity = detail::to_result(detail::check_monotonicity(candidate));
    return report;
}

/// Converts a validated candidate into level form by evaluating it at the
/// vertices (1,...,1,0,...,0).
inline StandardReward to_levels(const GenericReward& candidate, std::size_t samples = 64,
                                std::uint64_t seed = 0) {
    const auto report = check_assumptions(candidate, samples, seed);
    if (!report.all_passed()) throw InputError("candidate reward fails the standard-reward assumptions");
    std::vector<double> levels(candidate.k + 1);
    for (std::size_t m = 0; m <= candidate.k; ++m) {
        std::vector<double> vertex(candidate.k, 0.0);
        std::fill(vertex.begin(), vertex.begin() + static_cast<std::ptrdiff_t>(m), 1.0);
        levels[m] = candidate(vertex);
    }
    return StandardReward::from_levels(std::move(levels));
}

/// Extreme per-coordinate differences F(1,w_-i) - F(0,w_-i) over a box.
struct DerivativeBounds {
    double f_min = 0.0;
    double f_max = 0.0;
    double box_lo = 0.0;
    double box_hi = 1.0;
};

/// The difference D(w_-i) = sum_m P(m good among the others)(v_{m+1}-v_m)
/// is multi-affine, so it is extremised at a vertex of [lo,hi]^{k-1}; by
/// symmetry a vertex is characterised by how many coordinates sit at `hi`.
inline DerivativeBounds derivative_bounds(const StandardReward& reward, double box_lo, double box_hi) {
    require_probability(box_lo, "box_lo");
    require_probability(box_hi, "box_hi");
    if (box_lo > box_hi) throw InputError("derivative box requires lo <= hi");
    const auto& v = reward.levels();
    const std::size_t others = reward.k() - 1;
    DerivativeBounds out{0.0, 0.0, box_lo, box_hi};
    bool first = true;
    for (std::size_t at_hi = 0; at_hi <= others; ++at_hi) {
        std::vector<double> w(others, box_lo);
        std::fill(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(at_hi), box_hi);
        const auto dist = good_count_distribution(w);
        double d = 0.0;
        for (std::size_t m = 0; m < dist.size(); ++m) d += dist[m] * (v[m + 1] - v[m]);
        if (first || d < out.f_min) out.f_min = d;
        if (first || d > out.f_max) out.f_max = d;
        first = false;
    }
    return out;
}

inline DerivativeBounds derivative_bounds(const StandardReward& reward, const ChannelModel& model) {
    return derivative_bounds(reward, std::min(model.p01, model.p11), std::max(model.p01, model.p11));
}

}  // namespace rmab
