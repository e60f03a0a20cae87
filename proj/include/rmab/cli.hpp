#pragma once

// Command implementations behind the `rmab` executable. Each command takes
// parsed arguments plus output streams and returns the process exit code,
// so the same code paths are exercised by the test suite.

#include <cctype>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rmab/dp.hpp"
#include "rmab/io.hpp"
#include "rmab/model.hpp"
#include "rmab/reward.hpp"
#include "rmab/theorem.hpp"
#include "rmab/verify.hpp"

namespace rmab::cli {

enum ExitCode : int {
    kOk = 0,
    kCheckFailed = 1,
    kInputError = 2,
    kTheoremViolation = 3,
    kCostGuard = 4,
};

struct ModelArgs {
    double p01 = 0.0;
    double p11 = 0.0;
    std::size_t n = 0;
    std::size_t k = 0;
    /// "or", "and", "sum" or a path to a reward-spec JSON file.
    std::string reward = "or";
    double a = 1.0;
    /// "lo,hi"; empty means [p01, p11].
    std::string box;
};

struct BoundArgs : ModelArgs {
    std::optional<double> beta;
};

struct CompareArgs : ModelArgs {
    double beta = 1.0;
    int horizon = 1;
    /// Comma-separated beliefs or "stationary".
    std::string initial = "stationary";
    std::string out_dir;
};

struct SweepArgs {
    std::string grid_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
};

struct CheckRewardArgs {
    std::string spec_path;
    std::size_t samples = 256;
    std::uint64_t seed = 0;
};

inline std::vector<double> parse_number_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InputError(std::string("cannot parse ") + what + " value '" + item + "'");
        }
    }
    return out;
}

inline std::pair<double, double> resolve_box(const ModelArgs& args, const ChannelModel& model) {
    if (args.box.empty()) return {model.p01, model.p11};
    const auto v = parse_number_list(args.box, "--box");
    if (v.size() != 2) throw InputError("--box expects two numbers lo,hi");
    return {v[0], v[1]};
}

inline StandardReward resolve_reward(const ModelArgs& args) {
    if (args.reward == "or") return or_reward(args.k);
    if (args.reward == "and") return and_reward(args.k);
    if (args.reward == "sum") return sum_reward(args.k, args.a);
    const RewardSpec spec = load_reward_spec(args.reward);
    if (spec.k && *spec.k != args.k)
        throw InputError("reward spec is for k=" + std::to_string(*spec.k) + " but --k is " + std::to_string(args.k));
    return spec.build(args.k);
}

inline std::string reward_label(const ModelArgs& args) {
    if (args.reward == "sum" && args.a != 1.0) return "sum(a=" + format_number(args.a) + ")";
    return args.reward;
}

inline BeliefVector resolve_initial(const CompareArgs& args, const ChannelModel& model) {
    if (args.initial == "stationary") return BeliefVector(args.n, stationary_belief(model));
    auto v = parse_number_list(args.initial, "--initial");
    if (v.size() != args.n)
        throw InputError("--initial has " + std::to_string(v.size()) + " entries, expected n=" +
                         std::to_string(args.n));
    validate_beliefs(v);
    return v;
}

namespace detail {

inline void row(std::ostream& out, const std::string& key, const std::string& value, std::size_t width = 16) {
    out << "  " << key;
    for (std::size_t i = key.size(); i < width; ++i) out << ' ';
    out << value << '\n';
}

inline std::string verdict_text(const Verdict& v) {
    return std::string(to_string(v.reason)) + (v.guaranteed_optimal ? " (greedy guaranteed optimal)" : " (not guaranteed)");
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const CostGuardError& e) {
        err << "error: " << e.what() << '\n';
        return kCostGuard;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
}

inline void open_out_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw InputError("cannot create output directory '" + dir + "': " + ec.message());
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write '" + path.string() + "'");
    f << content;
}

}  // namespace detail

/// Prints F'min, F'max and the discount bound, plus a verdict for --beta.
inline int cmd_bound(const BoundArgs& args, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const ChannelModel model(args.p01, args.p11);
        model.require_positively_correlated();
        require_valid_dimensions(args.n, args.k);
        const StandardReward reward = resolve_reward(args);
        const auto [lo, hi] = resolve_box(args, model);
        const BetaBound bound = beta_bound(reward, model, args.n, args.k, lo, hi);
        out << "discount bound\n";
        detail::row(out, "p01", format_number(model.p01));
        detail::row(out, "p11", format_number(model.p11));
        detail::row(out, "n", std::to_string(args.n));
        detail::row(out, "k", std::to_string(args.k));
        detail::row(out, "reward", reward_label(args));
        detail::row(out, "box", "[" + format_number(lo) + ", " + format_number(hi) + "]");
        detail::row(out, "F'min", format_number(bound.f_min));
        detail::row(out, "F'max", format_number(bound.f_max));
        detail::row(out, "bound", format_bound(bound));
        if (args.beta) {
            const Verdict v = verdict(*args.beta, bound, args.n, args.k, model);
            detail::row(out, "beta", format_number(*args.beta));
            detail::row(out, "verdict", detail::verdict_text(v));
        }
        return static_cast<int>(kOk);
    });
}

/// Greedy vs optimal on one instance. Exit 3 flags a gap on an instance the
/// optimality condition covers.
inline int cmd_compare(const CompareArgs& args, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const ChannelModel model(args.p01, args.p11);
        model.require_positively_correlated();
        require_valid_dimensions(args.n, args.k);
        const StandardReward reward = resolve_reward(args);
        const auto [lo, hi] = resolve_box(args, model);
        Instance inst{model, args.n, args.k, reward, args.beta, args.horizon, resolve_initial(args, model)};
        inst.validate();
        require_within_cost_guard(inst.n, inst.k, inst.horizon);

        Solver<> solver(inst);
        const ValueResult opt = solver.value_optimal(1);
        const ValueResult greedy = solver.value_greedy(1);
        const double gap = opt.value - greedy.value;
        const BetaBound bound = beta_bound(reward, model, args.n, args.k, lo, hi);
        const Verdict v = verdict(args.beta, bound, args.n, args.k, model);
        const bool in_box = beliefs_in_box(inst.initial, model);

        auto action_text = [](const Action& a) {
            std::string s = "{";
            for (std::size_t i = 0; i < a.size(); ++i) s += (i ? "," : "") + std::to_string(a[i] + 1);
            return s + "}";
        };
        out << "greedy vs optimal\n";
        detail::row(out, "initial", "[" + join_beliefs(inst.initial, ',') + "]");
        detail::row(out, "greedy value", format_number(greedy.value));
        detail::row(out, "optimal value", format_number(opt.value));
        detail::row(out, "gap", format_number(gap));
        detail::row(out, "greedy action", action_text(greedy.first_action));
        detail::row(out, "optimal action", action_text(opt.first_action));
        detail::row(out, "bound", format_bound(bound));
        detail::row(out, "verdict", detail::verdict_text(v));
        detail::row(out, "nodes expanded", std::to_string(solver.nodes_expanded()));
        if (!in_box) detail::row(out, "note", "initial beliefs outside [p01,p11]; the bound makes no claim");

        if (!args.out_dir.empty()) {
            detail::open_out_dir(args.out_dir);
            std::ostringstream csv;
            csv << kCellCsvHeader << '\n'
                << format_number(model.p01) << ',' << format_number(model.p11) << ',' << args.n << ',' << args.k << ','
                << format_number(args.beta) << ',' << args.horizon << ',' << reward_label(args) << ','
                << format_number(greedy.value) << ',' << format_number(opt.value) << ',' << format_number(gap) << ','
                << format_bound(bound) << ',' << to_string(v.reason) << '\n';
            detail::write_file(std::filesystem::path(args.out_dir) / "compare.csv", csv.str());
        }
        if (gap > kGapThreshold && v.guaranteed_optimal && in_box) {
            err << "THEOREM VIOLATION: greedy is suboptimal although the discount condition holds\n";
            return static_cast<int>(kTheoremViolation);
        }
        return static_cast<int>(kOk);
    });
}

struct SweepOutcome {
    SweepResult search;
    SuiteReport lemmas;
    SuiteReport exchange;
    std::string cells_csv;
    std::string gaps_csv;
    std::string summary_json;
};

inline SweepOutcome run_sweep(const SweepGrid& grid) {
    SweepOutcome o;
    o.search = search_counterexamples(grid);
    o.lemmas = run_lemma_suite(grid, grid.lemma_samples);
    o.exchange = run_exchange_suite(grid, grid.exchange_samples);

    std::ostringstream cells, gaps;
    write_cell_csv(cells, o.search.cells);
    write_gap_csv(gaps, o.search.reports, o.search.cells);
    o.cells_csv = cells.str();
    o.gaps_csv = gaps.str();

    double max_gap_within_bound = 0.0;
    for (const auto& c : o.search.cells)
        if (c.bound.admits(c.cell.beta)) max_gap_within_bound = std::max(max_gap_within_bound, c.max_abs_gap);
    json reports = json::array();
    for (const auto& r : o.search.reports) reports.push_back(to_json(r, o.search.cells));
    json summary{{"cells", o.search.cells.size()},
                 {"belief_samples_per_cell", grid.belief_samples_per_cell},
                 {"seed", grid.seed},
                 {"sample_outside_box", grid.sample_outside_box},
                 {"gap_reports", reports},
                 {"soundness_violations", o.search.soundness_violations.size()},
                 {"max_abs_gap_within_bound", max_gap_within_bound},
                 {"lemma_suite", to_json(o.lemmas)},
                 {"exchange_suite", to_json(o.exchange)},
                 {"clean", o.search.sound() && o.lemmas.passed() && o.exchange.passed()}};
    o.summary_json = summary.dump(2) + "\n";
    return o;
}

/// Runs the counterexample search and both suites over a grid file.
inline int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        SweepGrid grid = load_grid(args.grid_path);
        if (args.seed) grid.seed = *args.seed;
        if (args.threads) grid.threads = *args.threads;
        const SweepOutcome o = run_sweep(grid);
        if (!args.out_dir.empty()) {
            detail::open_out_dir(args.out_dir);
            const std::filesystem::path dir(args.out_dir);
            detail::write_file(dir / "cells.csv", o.cells_csv);
            detail::write_file(dir / "gaps.csv", o.gaps_csv);
            detail::write_file(dir / "summary.json", o.summary_json);
        }
        out << "sweep\n";
        detail::row(out, "cells", std::to_string(o.search.cells.size()), 22);
        detail::row(out, "gap reports", std::to_string(o.search.reports.size()), 22);
        detail::row(out, "violations", std::to_string(o.search.soundness_violations.size()), 22);
        for (const auto* suite : {&o.lemmas, &o.exchange})
            for (const auto& p : suite->properties)
                detail::row(out, p.name,
                            std::string(p.passed() ? "PASS" : "FAIL") + " (" + std::to_string(p.checks) + " checks)", 22);
        for (const auto& v : o.search.soundness_violations)
            err << "THEOREM VIOLATION: " << describe(o.search.cells.at(v.cell_index).cell) << " gap "
                << format_number(v.gap) << '\n';
        for (const auto* suite : {&o.lemmas, &o.exchange})
            for (const auto& p : suite->properties)
                if (!p.passed()) err << "PROPERTY FAILURE " << p.name << ": " << *p.witness << '\n';
        const bool clean = o.search.sound() && o.lemmas.passed() && o.exchange.passed();
        return static_cast<int>(clean ? kOk : kTheoremViolation);
    });
}

/// PASS/FAIL per assumption; exit 0 only if all three hold.
inline int cmd_check_reward(const CheckRewardArgs& args, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const RewardSpec spec = load_reward_spec(args.spec_path);
        const GenericReward candidate = spec.candidate(*spec.k);
        const AssumptionReport report = check_assumptions(candidate, args.samples, args.seed);
        auto line = [&](const char* name, const AssumptionResult& r) {
            out << "  " << name;
            for (std::size_t i = std::string(name).size(); i < 14; ++i) out << ' ';
            out << (r.passed ? "PASS" : "FAIL");
            if (r.witness) out << "  witness: " << r.witness->detail;
            out << '\n';
        };
        out << "reward assumptions (" << spec.label() << ", k=" << *spec.k << ")\n";
        line("symmetry", report.symmetry);
        line("affineness", report.affineness);
        line("monotonicity", report.monotonicity);
        return static_cast<int>(report.all_passed() ? kOk : kCheckFailed);
    });
}

}  // namespace rmab::cli
