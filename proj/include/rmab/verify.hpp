#pragma once

// Verification harness: parameter sweeps comparing greedy and optimal
// values, the value-function property suites and the exchange-inequality
// suites, all by exact DP.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "rmab/dp.hpp"
#include "rmab/model.hpp"
#include "rmab/oracle.hpp"
#include "rmab/random.hpp"
#include "rmab/reward.hpp"
#include "rmab/theorem.hpp"

namespace rmab {

/// Gap above which greedy is reported as suboptimal.
inline constexpr double kGapThreshold = 1e-6;
inline constexpr double kMaxSweepDpCalls = 1e6;

enum class RewardKind { or_, and_, sum, levels };

inline const char* to_string(RewardKind k) {
    switch (k) {
        case RewardKind::or_: return "or";
        case RewardKind::and_: return "and";
        case RewardKind::sum: return "sum";
        case RewardKind::levels: return "levels";
    }
    return "?";
}

/// Reward description independent of k, so one spec can be applied across
/// sweep cells. For `levels`, k is implied by the level count.
struct RewardSpec {
    RewardKind kind = RewardKind::or_;
    double a = 1.0;
    std::vector<double> levels{};
    std::optional<std::size_t> k{};

    /// Short label used in CSV output.
    std::string label() const {
        std::string s = to_string(kind);
        if (kind == RewardKind::sum && a != 1.0) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.12g", a);
            s += std::string("(a=") + buf + ")";
        } else if (kind == RewardKind::levels) {
            s += "(";
            for (std::size_t i = 0; i < levels.size(); ++i) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.12g", levels[i]);
                s += (i ? ";" : "") + std::string(buf);
            }
            s += ")";
        }
        return s;
    }

    /// Whether the spec can be instantiated for `k_value` sensed channels.
    bool applies_to(std::size_t k_value) const {
        if (kind == RewardKind::levels) return levels.size() == k_value + 1;
        return !k || *k == k_value;
    }

    StandardReward build(std::size_t k_value) const {
        if (!applies_to(k_value))
            throw InputError("reward spec '" + label() + "' does not apply to k=" + std::to_string(k_value));
        switch (kind) {
            case RewardKind::or_: return or_reward(k_value);
            case RewardKind::and_: return and_reward(k_value);
            case RewardKind::sum: return sum_reward(k_value, a);
            case RewardKind::levels: return StandardReward::from_levels(levels);
        }
        throw InputError("unknown reward kind");
    }

    /// Unvalidated candidate (levels need not be monotone).
    GenericReward candidate(std::size_t k_value) const {
        if (kind == RewardKind::levels) {
            if (levels.size() != k_value + 1)
                throw InputError("levels length must be k+1");
            return generic_from_levels(levels);
        }
        return as_generic(build(k_value));
    }
};

struct SweepGrid {
    std::vector<double> p01_values;
    std::vector<double> p11_values;
    std::vector<std::size_t> n_values;
    /// Empty means every k in 1..n-1 for each n.
    std::vector<std::size_t> k_values;
    std::vector<double> beta_values;
    std::vector<int> horizons;
    std::vector<RewardSpec> rewards;
    std::size_t belief_samples_per_cell = 1;
    std::uint64_t seed = 0;
    /// Draw initial beliefs from [0,1]^n instead of [p01,p11]^n. The
    /// optimality condition says nothing about such instances.
    bool sample_outside_box = false;
    std::size_t lemma_samples = 0;
    std::size_t exchange_samples = 0;
    /// Worker threads for the sweep; 0 picks the hardware concurrency.
    unsigned threads = 0;
};

/// One (p01, p11, n, k, reward, beta, T) combination.
struct SweepCell {
    std::size_t index = 0;
    ChannelModel model;
    std::size_t n = 0;
    std::size_t k = 0;
    RewardSpec reward;
    double beta = 0.0;
    int horizon = 1;
};

inline std::string describe(const SweepCell& c) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "cell #%zu (p01=%.12g p11=%.12g n=%zu k=%zu reward=%s beta=%.12g T=%d)",
                  c.index, c.model.p01, c.model.p11, c.n, c.k, c.reward.label().c_str(), c.beta, c.horizon);
    return buf;
}

/// Expands the grid in a fixed nesting order (p01, p11, n, k, reward, beta,
/// T). Throws InputError naming the first invalid cell.
inline std::vector<SweepCell> expand_grid(const SweepGrid& grid) {
    std::vector<SweepCell> cells;
    for (double p01 : grid.p01_values)
        for (double p11 : grid.p11_values) {
            require_probability(p01, "p01");
            require_probability(p11, "p11");
            if (!(p11 > p01))
                throw InputError("grid cell with p01=" + std::to_string(p01) + " p11=" + std::to_string(p11) +
                                 " is not positively correlated (need p11 > p01)");
            for (std::size_t n : grid.n_values) {
                std::vector<std::size_t> ks = grid.k_values;
                if (ks.empty())
                    for (std::size_t k = 1; k < n; ++k) ks.push_back(k);
                for (std::size_t k : ks) {
                    if (k < 1 || k >= n)
                        throw InputError("grid cell with n=" + std::to_string(n) + " k=" + std::to_string(k) +
                                         " violates 1 <= k < n");
                    for (const RewardSpec& r : grid.rewards) {
                        if (!r.applies_to(k)) continue;
                        for (double beta : grid.beta_values) {
                            if (!(beta >= 0.0 && beta <= 1.0))
                                throw InputError("grid beta " + std::to_string(beta) + " outside [0,1]");
                            for (int T : grid.horizons) {
                                if (T < 1) throw InputError("grid horizon must be positive");
                                SweepCell c;
                                c.index = cells.size();
                                c.model = ChannelModel(p01, p11);
                                c.n = n;
                                c.k = k;
                                c.reward = r;
                                c.beta = beta;
                                c.horizon = T;
                                cells.push_back(std::move(c));
                            }
                        }
                    }
                }
            }
        }
    return cells;
}

inline BeliefVector sample_beliefs(Rng& rng, std::size_t n, const ChannelModel& model, bool outside_box) {
    BeliefVector b(n);
    for (auto& w : b) w = outside_box ? rng.unit() : rng.uniform(model.p01, model.p11);
    return b;
}

inline Instance make_instance(const SweepCell& c, BeliefVector initial) {
    return Instance{c.model, c.n, c.k, c.reward.build(c.k), c.beta, c.horizon, std::move(initial)};
}

struct GapReport {
    std::size_t cell_index = 0;
    Instance instance;
    double greedy_value = 0.0;
    double optimal_value = 0.0;
    double gap = 0.0;
    BetaBound bound;
    bool beta_exceeds_bound = false;
    /// Initial beliefs inside [p01, p11], where the condition makes its claim.
    bool initial_in_box = true;
};

inline bool beliefs_in_box(const BeliefVector& b, const ChannelModel& model) {
    return std::all_of(b.begin(), b.end(), [&](double w) { return w >= model.p01 && w <= model.p11; });
}

/// Per-cell summary: values are those of the sample with the largest gap.
struct CellResult {
    SweepCell cell;
    BeliefVector worst_initial;
    double greedy_value = 0.0;
    double optimal_value = 0.0;
    double gap = 0.0;
    double max_abs_gap = 0.0;
    BetaBound bound;
    Verdict verdict;
};

struct SweepResult {
    std::vector<CellResult> cells;
    std::vector<GapReport> reports;
    /// Reports with beta within the bound and in-box initial beliefs: each
    /// one falsifies the optimality condition.
    std::vector<GapReport> soundness_violations;
    std::uint64_t dp_calls = 0;

    bool sound() const { return soundness_violations.empty(); }
};

inline double estimated_dp_calls(const SweepGrid& grid, std::size_t cell_count) {
    return 2.0 * static_cast<double>(cell_count) * static_cast<double>(grid.belief_samples_per_cell);
}

namespace verify_detail {

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) fn(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace verify_detail

/// Greedy vs optimal on every cell and belief sample. Results come back in
/// cell order regardless of thread scheduling; each cell draws from its own
/// seed stream, so output depends only on the grid.
inline SweepResult search_counterexamples(const SweepGrid& grid) {
    const auto cells = expand_grid(grid);
    const double calls = estimated_dp_calls(grid, cells.size());
    if (calls > kMaxSweepDpCalls)
        throw CostGuardError("sweep needs an estimated " + std::to_string(static_cast<long long>(calls)) +
                             " DP calls (limit " + std::to_string(static_cast<long long>(kMaxSweepDpCalls)) + ")");
    for (const auto& c : cells) require_within_cost_guard(c.n, c.k, c.horizon);

    std::vector<CellResult> results(cells.size());
    std::vector<std::vector<GapReport>> per_cell(cells.size());
    verify_detail::parallel_for(cells.size(), grid.threads, [&](std::size_t i) {
        const SweepCell& c = cells[i];
        Rng rng(mix_seed(grid.seed, c.index));
        CellResult& out = results[i];
        out.cell = c;
        const StandardReward reward = c.reward.build(c.k);
        out.bound = beta_bound(reward, c.model, c.n, c.k);
        out.verdict = verdict(c.beta, out.bound, c.n, c.k, c.model);
        bool first = true;
        for (std::size_t s = 0; s < grid.belief_samples_per_cell; ++s) {
            Instance inst = make_instance(c, sample_beliefs(rng, c.n, c.model, grid.sample_outside_box));
            Solver<> solver(inst);
            const double opt = solver.value_optimal(1).value;
            const double greedy = solver.value_greedy(1).value;
            const double gap = opt - greedy;
            out.max_abs_gap = std::max(out.max_abs_gap, std::abs(gap));
            if (first || gap > out.gap) {
                out.gap = gap;
                out.greedy_value = greedy;
                out.optimal_value = opt;
                out.worst_initial = inst.initial;
                first = false;
            }
            if (gap > kGapThreshold) {
                const bool in_box = beliefs_in_box(inst.initial, c.model);
                per_cell[i].push_back(GapReport{c.index, std::move(inst), greedy, opt, gap, out.bound,
                                                !out.bound.admits(c.beta), in_box});
            }
        }
    });

    SweepResult result;
    result.cells = std::move(results);
    result.dp_calls = static_cast<std::uint64_t>(calls);
    for (auto& reports : per_cell)
        for (auto& r : reports) {
            if (!r.beta_exceeds_bound && r.initial_in_box) result.soundness_violations.push_back(r);
            result.reports.push_back(std::move(r));
        }
    return result;
}

/// Outcome of one named property over all samples; keeps the first witness.
struct PropertyResult {
    std::string name;
    std::size_t checks = 0;
    std::size_t failures = 0;
    /// Most adverse signed margin seen (negative means violated).
    double worst_margin = 0.0;
    std::optional<std::string> witness;

    explicit PropertyResult(std::string n = {}) : name(std::move(n)) {}

    bool passed() const { return failures == 0; }

    /// Records margin >= -tol as a pass.
    void record(double margin, double tol, const std::string& context) {
        if (checks == 0 || margin < worst_margin) worst_margin = margin;
        ++checks;
        if (margin < -tol) {
            ++failures;
            if (!witness) {
                char buf[64];
                std::snprintf(buf, sizeof buf, " (margin %.3e)", margin);
                witness = context + buf;
            }
        }
    }
};

struct SuiteReport {
    std::vector<PropertyResult> properties;
    std::size_t samples = 0;

    bool passed() const {
        return std::all_of(properties.begin(), properties.end(), [](const auto& p) { return p.passed(); });
    }

    const PropertyResult* find(const std::string& name) const {
        for (const auto& p : properties)
            if (p.name == name) return &p;
        return nullptr;
    }
};

namespace verify_detail {

inline std::string format_beliefs(const BeliefVector& b) {
    std::string s = "[";
    for (std::size_t i = 0; i < b.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", b[i]);
        s += (i ? ", " : "") + std::string(buf);
    }
    return s + "]";
}

/// Cells usable by the property suites: beta within the bound.
inline std::vector<SweepCell> admitted_cells(const SweepGrid& grid) {
    std::vector<SweepCell> out;
    for (auto& c : expand_grid(grid)) {
        const auto bound = beta_bound(c.reward.build(c.k), c.model, c.n, c.k);
        if (bound.admits(c.beta)) out.push_back(std::move(c));
    }
    return out;
}

inline std::string context(const SweepCell& c, const BeliefVector& b, const std::string& what) {
    return what + " at " + describe(c) + ", beliefs " + format_beliefs(b);
}

}  // namespace verify_detail

/// Value-function properties on cells with beta within the bound:
///   L1 symmetry in the sensed positions (and full permutation symmetry of
///      the optimal value), L2 affineness of a frozen policy tree in each
///      belief, L3 monotonicity of the optimal value in each belief,
///   L4 the conjunction, L8 symmetry of the continuation term in the
///      sensed beliefs.
/// `Dynamics` lets tests substitute broken belief dynamics.
template <class Dynamics = ChannelDynamics>
SuiteReport run_lemma_suite(const SweepGrid& grid, std::size_t samples) {
    using verify_detail::context;
    SuiteReport report;
    PropertyResult l1{"L1-symmetry"}, l1_full{"L1-full-permutation"}, l2{"L2-affine"}, l3{"L3-monotone"},
        l8{"L8-future-symmetry"};
    const auto cells = verify_detail::admitted_cells(grid);
    if (!cells.empty()) {
        Rng rng(mix_seed(grid.seed, 0x4c454d4dULL));
        for (std::size_t s = 0; s < samples; ++s) {
            const SweepCell& c = cells[rng.index(cells.size())];
            const BeliefVector b = sample_beliefs(rng, c.n, c.model, grid.sample_outside_box);
            const Instance inst = make_instance(c, b);
            Dynamics dyn{c.model};
            Solver<Dynamics> solver(inst, dyn);
            const double hi = grid.sample_outside_box ? 1.0 : c.model.p11;

            // L1: permute the sensed positions of the positional value.
            {
                BeliefVector p = b;
                for (std::size_t i = c.k; i > 1; --i) std::swap(p[i - 1], p[rng.index(i)]);
                const double d = std::abs(solver.positional_value(1, b) - solver.positional_value(1, p));
                l1.record(-d, kValueTol, context(c, b, "positional value changes under sensed-set permutation"));

                BeliefVector q = b;
                for (std::size_t i = c.n; i > 1; --i) std::swap(q[i - 1], q[rng.index(i)]);
                const double e =
                    std::abs(solver.value_optimal(1, b).value - solver.value_optimal(1, q).value);
                l1_full.record(-e, kValueTol, context(c, b, "optimal value changes under permutation"));
            }

            // L2: freeze the optimal decisions at b, then move one belief.
            {
                const PolicyTree tree = record_policy_tree(inst, [&](int slot, const BeliefVector& w) {
                    return solver.value_optimal(slot, w).first_action;
                });
                const std::size_t i = rng.index(c.n);
                auto at = [&](double x) {
                    Instance moved = inst;
                    moved.initial[i] = x;
                    return evaluate_policy_tree(moved, tree);
                };
                const double direct = at(b[i]);
                const double interp = b[i] * at(1.0) + (1.0 - b[i]) * at(0.0);
                l2.record(-std::abs(direct - interp), kValueTol,
                          context(c, b, "frozen-policy value not affine in belief " + std::to_string(i + 1)));
            }

            // L3: raise each belief within the box.
            {
                const double base = solver.value_optimal(1, b).value;
                for (std::size_t i = 0; i < c.n; ++i) {
                    BeliefVector up = b;
                    up[i] = rng.uniform(b[i], std::max(b[i], hi));
                    const double raised = solver.value_optimal(1, up).value;
                    l3.record(raised - base, kValueTol,
                              context(c, b, "raising belief " + std::to_string(i + 1) + " to " +
                                                std::to_string(up[i]) + " lowers the optimal value"));
                }
            }

            // L8: continuation term symmetric in the sensed beliefs.
            if (c.horizon >= 2) {
                Action first(c.k);
                for (std::size_t j = 0; j < c.k; ++j) first[j] = j;
                BeliefVector p = b;
                for (std::size_t i = c.k; i > 1; --i) std::swap(p[i - 1], p[rng.index(i)]);
                const double d = std::abs(solver.future_value(PolicyKind::optimal, 1, b, first) -
                                          solver.future_value(PolicyKind::optimal, 1, p, first));
                l8.record(-d, kValueTol, context(c, b, "continuation term changes under sensed-set permutation"));
            }
            ++report.samples;
        }
    }
    PropertyResult l4{"L4-standard"};
    l4.checks = l1.checks + l2.checks + l3.checks;
    l4.failures = l1.failures + l2.failures + l3.failures;
    l4.worst_margin = std::min({l1.worst_margin, l2.worst_margin, l3.worst_margin});
    l4.witness = l1.witness ? l1.witness : l2.witness ? l2.witness : l3.witness;
    report.properties = {l1, l1_full, l2, l3, l4, l8};
    return report;
}

/// Exchange inequalities on sorted belief vectors, at every slot, using the
/// positional value W (sense the first k positions, then act optimally):
///   L5 swapping adjacent unsensed entries out of order never helps,
///   L6 W(w) - W(w_n, w_1, ..., w_{n-1}) <= F'max,
///   L7 swapping across the sensed boundary never helps.
template <class Dynamics = ChannelDynamics>
SuiteReport run_exchange_suite(const SweepGrid& grid, std::size_t samples) {
    using verify_detail::context;
    SuiteReport report;
    PropertyResult l5{"L5-unsensed-exchange"}, l6{"L6-rotation-bound"}, l7{"L7-boundary-exchange"};
    const auto cells = verify_detail::admitted_cells(grid);
    if (!cells.empty()) {
        Rng rng(mix_seed(grid.seed, 0x45584348ULL));
        for (std::size_t s = 0; s < samples; ++s) {
            const SweepCell& c = cells[rng.index(cells.size())];
            BeliefVector b = sample_beliefs(rng, c.n, c.model, grid.sample_outside_box);
            std::sort(b.begin(), b.end(), std::greater<>());
            const Instance inst = make_instance(c, b);
            Solver<Dynamics> solver(inst, Dynamics{c.model});
            const BetaBound bound = beta_bound(inst.reward, c.model, c.n, c.k);
            for (int t = 1; t <= c.horizon; ++t) {
                const std::string slot = " (slot " + std::to_string(t) + ")";
                const double w = solver.positional_value(t, b);
                for (std::size_t i = c.k; i + 1 < c.n; ++i) {
                    BeliefVector sw = b;
                    std::swap(sw[i], sw[i + 1]);
                    l5.record(w - solver.positional_value(t, sw), kValueTol,
                              context(c, b, "unsensed swap " + std::to_string(i + 1) + "<->" +
                                                std::to_string(i + 2) + " increases value" + slot));
                }
                BeliefVector rot = b;
                std::rotate(rot.rbegin(), rot.rbegin() + 1, rot.rend());
                l6.record(bound.f_max - (w - solver.positional_value(t, rot)), kValueTol,
                          context(c, b, "rotation difference exceeds F'max" + slot));
                BeliefVector cross = b;
                std::swap(cross[c.k - 1], cross[c.k]);
                l7.record(w - solver.positional_value(t, cross), kValueTol,
                          context(c, b, "boundary swap increases value" + slot));
            }
            ++report.samples;
        }
    }
    report.properties = {l5, l6, l7};
    return report;
}

}  // namespace rmab
