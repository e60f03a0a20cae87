#pragma once

// File formats: reward-spec JSON, sweep-grid JSON, sweep CSV and JSON summary.

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rmab/verify.hpp"

namespace rmab {

using nlohmann::json;

/// Numbers in CSV and tables use 12 significant digits.
inline std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline std::string format_bound(const BetaBound& b) {
    return b.unbounded() ? std::string("unbounded") : format_number(*b.bound);
}

namespace io_detail {

inline void reject_unknown_fields(const json& j, std::initializer_list<const char*> allowed, const char* what) {
    if (!j.is_object()) throw InputError(std::string(what) + " must be a JSON object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) throw InputError(std::string("unknown field '") + it.key() + "' in " + what);
}

template <class T>
T get_as(const json& j, const char* field, const char* what) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw InputError(std::string("field '") + field + "' in " + what + " has the wrong type");
    }
}

inline std::size_t get_count(const json& j, const char* field, const char* what) {
    if (!j.is_number_integer() || j.get<long long>() < 0)
        throw InputError(std::string("field '") + field + "' in " + what + " must be a non-negative integer");
    return j.get<std::size_t>();
}

}  // namespace io_detail

/// {"kind": "or"|"and"|"sum"|"levels", "k": int, "a": number?, "levels": [numbers]?}
/// "k" may be omitted only inside a sweep grid, where each cell supplies it.
inline RewardSpec parse_reward_spec(const json& j, bool require_k = true) {
    using namespace io_detail;
    const char* what = "reward spec";
    if (j.is_string()) {
        if (require_k) throw InputError("reward spec must be an object with a 'k' field");
        return parse_reward_spec(json{{"kind", j}}, false);
    }
    reject_unknown_fields(j, {"kind", "k", "a", "levels"}, what);
    if (!j.contains("kind") || !j["kind"].is_string()) throw InputError("reward spec needs a string 'kind'");
    const std::string kind = j["kind"].get<std::string>();
    RewardSpec spec;
    if (kind == "or") spec.kind = RewardKind::or_;
    else if (kind == "and") spec.kind = RewardKind::and_;
    else if (kind == "sum") spec.kind = RewardKind::sum;
    else if (kind == "levels") spec.kind = RewardKind::levels;
    else throw InputError("unknown reward kind '" + kind + "'");

    if (j.contains("k")) {
        spec.k = get_count(j["k"], "k", what);
        if (*spec.k < 1) throw InputError("reward spec 'k' must be at least 1");
    } else if (require_k) {
        throw InputError("reward spec needs 'k'");
    }
    if (j.contains("a")) {
        if (spec.kind != RewardKind::sum) throw InputError("field 'a' is only valid for kind 'sum'");
        spec.a = get_as<double>(j["a"], "a", what);
        if (!(spec.a > 0.0)) throw InputError("sum reward weight 'a' must be positive");
    }
    if (spec.kind == RewardKind::levels) {
        if (!j.contains("levels")) throw InputError("kind 'levels' needs a 'levels' array");
        spec.levels = get_as<std::vector<double>>(j["levels"], "levels", what);
        if (spec.levels.size() < 2) throw InputError("'levels' needs at least two values");
        if (spec.k && spec.levels.size() != *spec.k + 1)
            throw InputError("'levels' has " + std::to_string(spec.levels.size()) + " values but k+1 = " +
                             std::to_string(*spec.k + 1));
        if (!spec.k) spec.k = spec.levels.size() - 1;
    } else if (j.contains("levels")) {
        throw InputError("field 'levels' is only valid for kind 'levels'");
    }
    return spec;
}

inline RewardSpec load_reward_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open reward spec '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw InputError("reward spec '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_reward_spec(j);
}

/// Grid JSON; every field optional, lists default to empty (an empty grid).
inline SweepGrid parse_grid(const json& j) {
    using namespace io_detail;
    const char* what = "sweep grid";
    reject_unknown_fields(j,
                          {"p01_values", "p11_values", "n_values", "k_values", "beta_values", "horizons", "rewards",
                           "belief_samples_per_cell", "seed", "sample_outside_box", "lemma_samples",
                           "exchange_samples", "threads"},
                          what);
    SweepGrid g;
    if (j.contains("p01_values")) g.p01_values = get_as<std::vector<double>>(j["p01_values"], "p01_values", what);
    if (j.contains("p11_values")) g.p11_values = get_as<std::vector<double>>(j["p11_values"], "p11_values", what);
    if (j.contains("n_values")) g.n_values = get_as<std::vector<std::size_t>>(j["n_values"], "n_values", what);
    if (j.contains("k_values")) g.k_values = get_as<std::vector<std::size_t>>(j["k_values"], "k_values", what);
    if (j.contains("beta_values")) g.beta_values = get_as<std::vector<double>>(j["beta_values"], "beta_values", what);
    if (j.contains("horizons")) g.horizons = get_as<std::vector<int>>(j["horizons"], "horizons", what);
    if (j.contains("rewards")) {
        if (!j["rewards"].is_array()) throw InputError("field 'rewards' must be an array");
        for (const auto& r : j["rewards"]) g.rewards.push_back(parse_reward_spec(r, false));
    }
    if (j.contains("belief_samples_per_cell"))
        g.belief_samples_per_cell = get_count(j["belief_samples_per_cell"], "belief_samples_per_cell", what);
    if (j.contains("seed")) g.seed = get_count(j["seed"], "seed", what);
    if (j.contains("sample_outside_box"))
        g.sample_outside_box = get_as<bool>(j["sample_outside_box"], "sample_outside_box", what);
    if (j.contains("lemma_samples")) g.lemma_samples = get_count(j["lemma_samples"], "lemma_samples", what);
    if (j.contains("exchange_samples"))
        g.exchange_samples = get_count(j["exchange_samples"], "exchange_samples", what);
    if (j.contains("threads")) g.threads = static_cast<unsigned>(get_count(j["threads"], "threads", what));
    return g;
}

inline SweepGrid load_grid(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open grid file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw InputError("grid file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_grid(j);
}

inline constexpr const char* kCellCsvHeader =
    "p01,p11,n,k,beta,T,reward,greedy_value,optimal_value,gap,bound,verdict";

inline void write_cell_csv(std::ostream& out, const std::vector<CellResult>& cells) {
    out << kCellCsvHeader << '\n';
    for (const auto& r : cells) {
        const auto& c = r.cell;
        out << format_number(c.model.p01) << ',' << format_number(c.model.p11) << ',' << c.n << ',' << c.k << ','
            << format_number(c.beta) << ',' << c.horizon << ',' << c.reward.label() << ','
            << format_number(r.greedy_value) << ',' << format_number(r.optimal_value) << ','
            << format_number(r.gap) << ',' << format_bound(r.bound) << ',' << to_string(r.verdict.reason) << '\n';
    }
}

inline std::string join_beliefs(const BeliefVector& b, char sep = ';') {
    std::string s;
    for (std::size_t i = 0; i < b.size(); ++i) s += (i ? std::string(1, sep) : "") + format_number(b[i]);
    return s;
}

inline constexpr const char* kGapCsvHeader =
    "p01,p11,n,k,beta,T,reward,initial,greedy_value,optimal_value,gap,bound,beta_exceeds_bound,initial_in_box";

inline void write_gap_csv(std::ostream& out, const std::vector<GapReport>& reports, const std::vector<CellResult>& cells) {
    out << kGapCsvHeader << '\n';
    for (const auto& r : reports) {
        const auto& inst = r.instance;
        out << format_number(inst.model.p01) << ',' << format_number(inst.model.p11) << ',' << inst.n << ','
            << inst.k << ',' << format_number(inst.beta) << ',' << inst.horizon << ','
            << cells.at(r.cell_index).cell.reward.label() << ',' << join_beliefs(inst.initial) << ','
            << format_number(r.greedy_value) << ',' << format_number(r.optimal_value) << ','
            << format_number(r.gap) << ',' << format_bound(r.bound) << ',' << (r.beta_exceeds_bound ? "true" : "false")
            << ',' << (r.initial_in_box ? "true" : "false") << '\n';
    }
}

inline json to_json(const PropertyResult& p) {
    json j{{"name", p.name}, {"checks", p.checks}, {"failures", p.failures}, {"passed", p.passed()},
           {"worst_margin", p.worst_margin}};
    j["witness"] = p.witness ? json(*p.witness) : json(nullptr);
    return j;
}

inline json to_json(const SuiteReport& s) {
    json props = json::array();
    for (const auto& p : s.properties) props.push_back(to_json(p));
    return {{"samples", s.samples}, {"passed", s.passed()}, {"properties", props}};
}

inline json to_json(const GapReport& r, const std::vector<CellResult>& cells) {
    const auto& inst = r.instance;
    return {{"cell", r.cell_index},
            {"p01", inst.model.p01},
            {"p11", inst.model.p11},
            {"n", inst.n},
            {"k", inst.k},
            {"beta", inst.beta},
            {"T", inst.horizon},
            {"reward", cells.at(r.cell_index).cell.reward.label()},
            {"initial", inst.initial},
            {"greedy_value", r.greedy_value},
            {"optimal_value", r.optimal_value},
            {"gap", r.gap},
            {"bound", r.bound.unbounded() ? json("unbounded") : json(*r.bound.bound)},
            {"beta_exceeds_bound", r.beta_exceeds_bound},
            {"initial_in_box", r.initial_in_box}};
}

}  // namespace rmab
