#pragma once

// Exact finite-horizon backward induction over belief vectors.
//
// Value-to-go follows the one-step recursion
//     V(w) = max_a [ F(w_a) + beta * K(w, a) ],   V at the last slot = max_a F(w_a),
// with K the expectation of the next value over the 2^k outcomes of the
// sensed channels. Slots are 1-based; slot t of a horizon-T instance has
// T - t + 1 decisions left.

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rmab/model.hpp"
#include "rmab/reward.hpp"

namespace rmab {

/// Raised when an instance is too large to solve exactly.
class CostGuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Instance {
    ChannelModel model;
    std::size_t n = 0;
    std::size_t k = 0;
    StandardReward reward;
    double beta = 1.0;
    int horizon = 1;
    BeliefVector initial;

    void validate() const {
        if (k < 1 || k >= n)
            throw InputError("need 1 <= k < n, got n=" + std::to_string(n) + " k=" + std::to_string(k));
        if (reward.k() != k)
            throw InputError("reward is defined on " + std::to_string(reward.k()) +
                             " channels but k=" + std::to_string(k));
        if (!(beta >= 0.0 && beta <= 1.0)) throw InputError("beta must lie in [0,1]");
        if (horizon < 1) throw InputError("horizon must be a positive integer");
        if (initial.size() != n)
            throw InputError("initial belief vector has " + std::to_string(initial.size()) +
                             " entries, expected n=" + std::to_string(n));
        validate_beliefs(initial);
    }
};

struct ValueResult {
    double value = 0.0;
    Action first_action;
    std::uint64_t nodes_expanded = 0;
};

/// All k-subsets of {0..n-1} in lexicographic order.
inline std::vector<Action> all_actions(std::size_t n, std::size_t k) {
    std::vector<Action> out;
    if (k > n) return out;
    Action a(k);
    for (std::size_t i = 0; i < k; ++i) a[i] = i;
    while (true) {
        out.push_back(a);
        std::size_t i = k;
        while (i > 0 && a[i - 1] == n - k + i - 1) --i;
        if (i == 0) break;
        ++a[i - 1];
        for (std::size_t j = i; j < k; ++j) a[j] = a[j - 1] + 1;
    }
    return out;
}

inline double binomial(std::size_t n, std::size_t k) {
    double c = 1.0;
    for (std::size_t i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
    return c;
}

/// Node count of the unmemoised decision tree; the exact solver refuses
/// instances whose estimate exceeds kMaxTreeEstimate.
inline double estimated_tree_size(std::size_t n, std::size_t k, int horizon) {
    const double branching = binomial(n, k) * std::ldexp(1.0, static_cast<int>(k));
    double total = 0.0, level = 1.0;
    for (int d = 0; d < horizon; ++d) {
        total += level;
        level *= branching;
    }
    return total;
}

inline constexpr double kMaxTreeEstimate = 1e9;

inline void require_within_cost_guard(std::size_t n, std::size_t k, int horizon) {
    const double est = estimated_tree_size(n, k, horizon);
    if (est > kMaxTreeEstimate) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "instance too large for exact DP: about %.3g tree nodes (limit %.3g)", est,
                      kMaxTreeEstimate);
        throw CostGuardError(buf);
    }
}

/// Top-k of a canonical (non-increasing) belief vector.
inline Action greedy_action(const BeliefVector& canonical_beliefs, std::size_t k) {
    if (k < 1 || k > canonical_beliefs.size())
        throw InputError("greedy_action: k=" + std::to_string(k) + " out of range for n=" +
                         std::to_string(canonical_beliefs.size()));
    Action a(k);
    for (std::size_t i = 0; i < k; ++i) a[i] = i;
    return a;
}

inline std::vector<double> chosen_beliefs(const BeliefVector& beliefs, const Action& action) {
    std::vector<double> out;
    out.reserve(action.size());
    for (std::size_t i : action) out.push_back(beliefs[i]);
    return out;
}

/// Successor belief vector when the channels of `action` flagged in
/// `good_mask` (bit j <-> action[j]) were observed good. Input order kept.
template <class Dynamics>
BeliefVector successor(const BeliefVector& beliefs, const Action& action, std::uint32_t good_mask,
                       const Dynamics& dyn) {
    BeliefVector next(beliefs.size());
    for (std::size_t i = 0; i < beliefs.size(); ++i) next[i] = dyn.tau(beliefs[i]);
    for (std::size_t j = 0; j < action.size(); ++j)
        next[action[j]] = (good_mask >> j) & 1U ? dyn.after_good() : dyn.after_bad();
    return next;
}

/// Probability of the outcome `good_mask` for the sensed channels.
inline double outcome_weight(const BeliefVector& beliefs, const Action& action, std::uint32_t good_mask) {
    double w = 1.0;
    for (std::size_t j = 0; j < action.size(); ++j) {
        const double p = beliefs[action[j]];
        w *= (good_mask >> j) & 1U ? p : 1.0 - p;
    }
    return w;
}

/// Expected continuation value over the 2^k observation outcomes of
/// `action`. `weight_sum`, when given, receives the total outcome mass.
template <class Dynamics, class Continuation>
double expected_future(const BeliefVector& beliefs, const Action& action, Continuation&& continuation,
                       const Dynamics& dyn, double* weight_sum = nullptr) {
    validate_action(action, beliefs.size());
    const std::uint32_t outcomes = std::uint32_t{1} << action.size();
    double total = 0.0, mass = 0.0;
    for (std::uint32_t mask = 0; mask < outcomes; ++mask) {
        const double w = outcome_weight(beliefs, action, mask);
        mass += w;
        if (w == 0.0) continue;
        total += w * continuation(successor(beliefs, action, mask, dyn));
    }
    if (weight_sum) *weight_sum = mass;
    return total;
}

template <class Continuation>
double expected_future(const BeliefVector& beliefs, const Action& action, Continuation&& continuation,
                       const ChannelModel& model, double* weight_sum = nullptr) {
    return expected_future(beliefs, action, std::forward<Continuation>(continuation),
                           ChannelDynamics{model}, weight_sum);
}

enum class PolicyKind { optimal, greedy };

/// A policy given as an explicit rule (slot, beliefs) -> action, evaluated
/// without canonicalisation.
using ExplicitPolicy = std::function<Action(int slot, const BeliefVector& beliefs)>;

/// Exact solver for one instance. Owns its memo table, so one Solver must
/// not be shared between threads; distinct solvers are independent.
template <class Dynamics = ChannelDynamics>
class Solver {
public:
    explicit Solver(Instance inst, bool memoize = true)
        : Solver(std::move(inst), Dynamics{}, memoize, true) {}

    Solver(Instance inst, Dynamics dyn, bool memoize = true)
        : Solver(std::move(inst), std::move(dyn), memoize, false) {}

    const Instance& instance() const { return inst_; }
    const Dynamics& dynamics() const { return dyn_; }

    /// Optimal value-to-go from `slot` at the instance's initial beliefs.
    ValueResult value_optimal(int slot) { return value_optimal(slot, inst_.initial); }

    ValueResult value_optimal(int slot, const BeliefVector& beliefs) {
        const int remaining = remaining_from_slot(slot);
        check_beliefs(beliefs);
        const std::uint64_t before = nodes_;
        ++nodes_;
        ValueResult out;
        bool first = true;
        for (const Action& a : actions_) {
            const double q = q_value(PolicyKind::optimal, remaining, beliefs, a);
            // Earlier (lexicographically smaller) actions win ties.
            if (first || q > out.value + kTieTol) {
                out.value = q;
                out.first_action = a;
                first = false;
            }
        }
        out.nodes_expanded = nodes_ - before;
        return out;
    }

    /// Value-to-go of the greedy (top-k) policy from `slot`.
    ValueResult value_greedy(int slot) { return value_greedy(slot, inst_.initial); }

    ValueResult value_greedy(int slot, const BeliefVector& beliefs) {
        const int remaining = remaining_from_slot(slot);
        check_beliefs(beliefs);
        const std::uint64_t before = nodes_;
        ++nodes_;
        const Canonical c = canonicalize(beliefs);
        Action a;
        for (std::size_t j = 0; j < inst_.k; ++j) a.push_back(c.perm[j]);
        a = make_action(std::move(a));
        ValueResult out;
        out.value = q_value(PolicyKind::greedy, remaining, beliefs, a);
        out.first_action = std::move(a);
        out.nodes_expanded = nodes_ - before;
        return out;
    }

    /// Value of sensing `action` at `slot`, then following `continuation`.
    double action_value(PolicyKind continuation, int slot, const BeliefVector& beliefs, const Action& action) {
        check_beliefs(beliefs);
        validate_action(action, inst_.n);
        if (action.size() != inst_.k) throw InputError("action must contain exactly k channels");
        return q_value(continuation, remaining_from_slot(slot), beliefs, action);
    }

    /// Value of sensing the first k positions of `beliefs` at `slot` and
    /// then following `continuation`; the position-dependent value used by
    /// the exchange arguments.
    double positional_value(int slot, const BeliefVector& beliefs,
                            PolicyKind continuation = PolicyKind::optimal) {
        return action_value(continuation, slot, beliefs, first_k());
    }

    /// Continuation expectation K at `slot` for `action`.
    double future_value(PolicyKind continuation, int slot, const BeliefVector& beliefs, const Action& action) {
        const int remaining = remaining_from_slot(slot);
        if (remaining <= 1) return 0.0;
        return future(continuation, remaining, beliefs, action);
    }

    /// Evaluates an explicit policy from `slot`; no canonicalisation and no
    /// memoisation, so the policy sees beliefs in their actual order.
    double evaluate_policy(const ExplicitPolicy& policy, int slot, const BeliefVector& beliefs) {
        const int remaining = remaining_from_slot(slot);
        check_beliefs(beliefs);
        return evaluate_policy_rec(policy, slot, remaining, beliefs);
    }

    /// Canonicalised value-to-go with `remaining` decisions left.
    double value_to_go(PolicyKind kind, int remaining, const BeliefVector& beliefs) {
        const Canonical c = canonicalize(beliefs);
        if (!memoize_) return solve_canonical(kind, remaining, c.beliefs);
        MemoKey key{remaining, kind, quantize(c.beliefs)};
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        const double v = solve_canonical(kind, remaining, c.beliefs);
        memo_.emplace(std::move(key), v);
        return v;
    }

    std::uint64_t nodes_expanded() const { return nodes_; }

    /// Largest |sum of outcome weights - 1| seen at any expanded node.
    double max_weight_error() const { return max_weight_error_; }

    std::size_t memo_size() const { return memo_.size(); }

private:
    static constexpr double kTieTol = 1e-12;
    static constexpr double kQuantum = 1e12;

    Solver(Instance inst, Dynamics dyn, bool memoize, bool default_dynamics)
        : inst_(std::move(inst)), dyn_(std::move(dyn)), memoize_(memoize) {
        inst_.validate();
        if (default_dynamics) {
            if constexpr (requires(Dynamics d) { d.model; }) dyn_.model = inst_.model;
        }
        require_within_cost_guard(inst_.n, inst_.k, inst_.horizon);
        actions_ = all_actions(inst_.n, inst_.k);
    }

    struct MemoKey {
        int remaining;
        PolicyKind kind;
        std::vector<std::int64_t> beliefs;
        bool operator==(const MemoKey&) const = default;
    };

    struct MemoHash {
        std::size_t operator()(const MemoKey& key) const {
            std::uint64_t h = 1469598103934665603ULL ^ static_cast<std::uint64_t>(key.remaining * 2 +
                                                                                   static_cast<int>(key.kind));
            for (std::int64_t q : key.beliefs) {
                h ^= static_cast<std::uint64_t>(q) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
            }
            return static_cast<std::size_t>(h);
        }
    };

    static std::vector<std::int64_t> quantize(const BeliefVector& beliefs) {
        std::vector<std::int64_t> q(beliefs.size());
        for (std::size_t i = 0; i < beliefs.size(); ++i) q[i] = std::llround(beliefs[i] * kQuantum);
        return q;
    }

    Action first_k() const {
        Action a(inst_.k);
        for (std::size_t i = 0; i < inst_.k; ++i) a[i] = i;
        return a;
    }

    int remaining_from_slot(int slot) const {
        if (slot < 1 || slot > inst_.horizon)
            throw InputError("slot " + std::to_string(slot) + " outside 1.." + std::to_string(inst_.horizon));
        return inst_.horizon - slot + 1;
    }

    void check_beliefs(const BeliefVector& beliefs) const {
        if (beliefs.size() != inst_.n)
            throw InputError("belief vector has " + std::to_string(beliefs.size()) + " entries, expected " +
                             std::to_string(inst_.n));
        validate_beliefs(beliefs);
    }

    double immediate(const BeliefVector& beliefs, const Action& action) const {
        return inst_.reward.eval(chosen_beliefs(beliefs, action));
    }

    double future(PolicyKind kind, int remaining, const BeliefVector& beliefs, const Action& action) {
        double mass = 0.0;
        const double k = expected_future(
            beliefs, action, [&](const BeliefVector& next) { return value_to_go(kind, remaining - 1, next); },
            dyn_, &mass);
        max_weight_error_ = std::max(max_weight_error_, std::abs(mass - 1.0));
        return k;
    }

    double q_value(PolicyKind kind, int remaining, const BeliefVector& beliefs, const Action& action) {
        const double f = immediate(beliefs, action);
        if (remaining <= 1) return f;
        return f + inst_.beta * future(kind, remaining, beliefs, action);
    }

    double solve_canonical(PolicyKind kind, int remaining, const BeliefVector& canonical) {
        ++nodes_;
        if (kind == PolicyKind::greedy) return q_value(kind, remaining, canonical, first_k());
        double best = -std::numeric_limits<double>::infinity();
        for (const Action& a : actions_) best = std::max(best, q_value(kind, remaining, canonical, a));
        return best;
    }

    double evaluate_policy_rec(const ExplicitPolicy& policy, int slot, int remaining, const BeliefVector& beliefs) {
        ++nodes_;
        Action a = policy(slot, beliefs);
        validate_action(a, inst_.n);
        if (a.size() != inst_.k) throw InputError("explicit policy returned an action of the wrong size");
        const double f = immediate(beliefs, a);
        if (remaining <= 1) return f;
        double mass = 0.0;
        const double k = expected_future(
            beliefs, a,
            [&](const BeliefVector& next) { return evaluate_policy_rec(policy, slot + 1, remaining - 1, next); },
            dyn_, &mass);
        max_weight_error_ = std::max(max_weight_error_, std::abs(mass - 1.0));
        return f + inst_.beta * k;
    }

    Instance inst_;
    Dynamics dyn_;
    bool memoize_;
    std::vector<Action> actions_;
    std::unordered_map<MemoKey, double, MemoHash> memo_;
    std::uint64_t nodes_ = 0;
    double max_weight_error_ = 0.0;
};

/// Optimal value of `inst` from `slot`.
inline ValueResult value_optimal(const Instance& inst, int slot = 1) {
    return Solver<>(inst).value_optimal(slot);
}

/// Greedy-policy value of `inst` from `slot`.
inline ValueResult value_greedy(const Instance& inst, int slot = 1) {
    return Solver<>(inst).value_greedy(slot);
}

}  // namespace rmab
