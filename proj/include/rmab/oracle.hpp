#pragma once

// Brute-force reference evaluator. Deliberately shares nothing with the
// solver beyond the data types: the reward is evaluated by summing over all
// 2^k good/bad patterns, actions are enumerated as bitmasks, and there is no
// memoisation or canonicalisation.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rmab/dp.hpp"
#include "rmab/model.hpp"
#include "rmab/reward.hpp"

namespace rmab {

inline constexpr std::size_t kOracleMaxN = 4;
inline constexpr int kOracleMaxHorizon = 4;

/// Decisions of a policy keyed by the observation history that led to them;
/// each history entry is the good-mask over the sensed channels (bit j <->
/// j-th smallest index). Evaluating the same tree at different initial
/// beliefs is what makes the value affine in each belief.
struct PolicyTree {
    std::map<std::vector<std::uint32_t>, Action> decisions;
};

struct GreedyPolicyTag {};
struct OptimalPolicyTag {};

using OraclePolicy = std::variant<GreedyPolicyTag, OptimalPolicyTag, ExplicitPolicy, PolicyTree>;

namespace oracle_detail {

inline double literal_reward(const std::vector<double>& levels, const std::vector<double>& chosen) {
    const std::size_t k = chosen.size();
    double total = 0.0;
    for (std::uint32_t s = 0; s < (std::uint32_t{1} << k); ++s) {
        double p = 1.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < k; ++i) {
            if ((s >> i) & 1U) {
                p *= chosen[i];
                ++count;
            } else {
                p *= 1.0 - chosen[i];
            }
        }
        total += levels[count] * p;
    }
    return total;
}

inline std::vector<std::uint32_t> subsets_of_size(std::size_t n, std::size_t k) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t m = 0; m < (std::uint32_t{1} << n); ++m)
        if (static_cast<std::size_t>(__builtin_popcount(m)) == k) out.push_back(m);
    return out;
}

inline Action to_action(std::uint32_t mask, std::size_t n) {
    Action a;
    for (std::size_t i = 0; i < n; ++i)
        if ((mask >> i) & 1U) a.push_back(i);
    return a;
}

class Evaluator {
public:
    explicit Evaluator(const Instance& inst) : inst_(inst), subsets_(subsets_of_size(inst.n, inst.k)) {}

    double immediate(const BeliefVector& w, const Action& a) const {
        std::vector<double> chosen;
        for (std::size_t i : a) chosen.push_back(w[i]);
        return literal_reward(inst_.reward.levels(), chosen);
    }

    /// Greedy: maximise the immediate reward; among maximisers prefer the
    /// larger sorted chosen beliefs (so equal-F ties resolve to the top-k).
    Action greedy(const BeliefVector& w) const {
        Action best;
        double best_f = 0.0;
        std::vector<double> best_key;
        for (std::uint32_t m : subsets_) {
            Action a = to_action(m, inst_.n);
            const double f = immediate(w, a);
            std::vector<double> key;
            for (std::size_t i : a) key.push_back(w[i]);
            std::sort(key.begin(), key.end(), std::greater<>());
            if (best.empty() || f > best_f + 1e-12 || (f > best_f - 1e-12 && key > best_key)) {
                best = std::move(a);
                best_f = f;
                best_key = std::move(key);
            }
        }
        return best;
    }

    double expand(const Action& a, const BeliefVector& w, int slot, const std::vector<std::uint32_t>& history,
                  const OraclePolicy& policy) const {
        const double f = immediate(w, a);
        if (slot == inst_.horizon) return f;
        double k = 0.0;
        for (std::uint32_t good = 0; good < (std::uint32_t{1} << a.size()); ++good) {
            double p = 1.0;
            BeliefVector next(w.size());
            for (std::size_t i = 0; i < w.size(); ++i)
                next[i] = w[i] * inst_.model.p11 + (1.0 - w[i]) * inst_.model.p01;
            for (std::size_t j = 0; j < a.size(); ++j) {
                const bool g = (good >> j) & 1U;
                p *= g ? w[a[j]] : 1.0 - w[a[j]];
                next[a[j]] = g ? inst_.model.p11 : inst_.model.p01;
            }
            auto h = history;
            h.push_back(good);
            k += p * value(next, slot + 1, h, policy);
        }
        return f + inst_.beta * k;
    }

    double value(const BeliefVector& w, int slot, const std::vector<std::uint32_t>& history,
                 const OraclePolicy& policy) const {
        if (std::holds_alternative<OptimalPolicyTag>(policy)) {
            double best = 0.0;
            bool first = true;
            for (std::uint32_t m : subsets_) {
                const double q = expand(to_action(m, inst_.n), w, slot, history, policy);
                if (first || q > best) best = q;
                first = false;
            }
            return best;
        }
        Action a;
        if (std::holds_alternative<GreedyPolicyTag>(policy)) {
            a = greedy(w);
        } else if (auto* explicit_policy = std::get_if<ExplicitPolicy>(&policy)) {
            a = (*explicit_policy)(slot, w);
        } else {
            const auto& tree = std::get<PolicyTree>(policy);
            auto it = tree.decisions.find(history);
            if (it == tree.decisions.end()) throw std::logic_error("policy tree has no decision for a history");
            a = it->second;
        }
        return expand(a, w, slot, history, policy);
    }

private:
    const Instance& inst_;
    std::vector<std::uint32_t> subsets_;
};

}  // namespace oracle_detail

/// Exact value by full tree expansion from slot 1. Refuses n > 4 or T > 4.
inline double oracle_value(const Instance& inst, const OraclePolicy& policy) {
    inst.validate();
    if (inst.n > kOracleMaxN || inst.horizon > kOracleMaxHorizon)
        throw CostGuardError("oracle refuses instances with n > " + std::to_string(kOracleMaxN) +
                             " or T > " + std::to_string(kOracleMaxHorizon));
    oracle_detail::Evaluator ev(inst);
    return ev.value(inst.initial, 1, {}, policy);
}

/// Freezes the decisions `decide` makes along every reachable history from
/// `inst.initial`. `decide(slot, beliefs)` returns the action to record.
inline PolicyTree record_policy_tree(const Instance& inst, const ExplicitPolicy& decide) {
    PolicyTree tree;
    std::function<void(const BeliefVector&, int, std::vector<std::uint32_t>)> walk =
        [&](const BeliefVector& w, int slot, std::vector<std::uint32_t> history) {
            Action a = decide(slot, w);
            tree.decisions[history] = a;
            if (slot == inst.horizon) return;
            for (std::uint32_t good = 0; good < (std::uint32_t{1} << a.size()); ++good) {
                BeliefVector next(w.size());
                for (std::size_t i = 0; i < w.size(); ++i) next[i] = tau(w[i], inst.model);
                for (std::size_t j = 0; j < a.size(); ++j)
                    next[a[j]] = (good >> j) & 1U ? inst.model.p11 : inst.model.p01;
                auto h = history;
                h.push_back(good);
                walk(next, slot + 1, std::move(h));
            }
        };
    walk(inst.initial, 1, {});
    return tree;
}

/// Value of a frozen policy tree at arbitrary initial beliefs. Cheap (no
/// maximisation), so it is not subject to the oracle size guard.
inline double evaluate_policy_tree(const Instance& inst, const PolicyTree& tree) {
    inst.validate();
    oracle_detail::Evaluator ev(inst);
    return ev.value(inst.initial, 1, {}, OraclePolicy{tree});
}

}  // namespace rmab
