#pragma once

// Two-state i.i.d. Markov channels and the belief (information state)
// dynamics of the sensing problem.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rmab {

/// Raised for malformed arguments (out-of-range probabilities, bad indices,
/// arity mismatches). The CLI maps it to exit code 2.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Absolute tolerance for value equality assertions.
inline constexpr double kValueTol = 1e-9;

inline bool is_probability(double x) { return x >= 0.0 && x <= 1.0; }

inline void require_probability(double x, const char* what) {
    if (!is_probability(x))
        throw InputError(std::string(what) + " must lie in [0,1], got " + std::to_string(x));
}

/// Transition probabilities shared by every channel.
struct ChannelModel {
    double p01 = 0.0;  ///< bad -> good
    double p11 = 0.0;  ///< good -> good

    ChannelModel() = default;
    ChannelModel(double p01_, double p11_) : p01(p01_), p11(p11_) {
        require_probability(p01, "p01");
        require_probability(p11, "p11");
    }

    /// Theorem machinery applies only to positively correlated channels.
    bool positively_correlated() const { return p11 > p01; }

    void require_positively_correlated() const {
        if (!positively_correlated())
            throw InputError("channel model must be positively correlated (p11 > p01), got p01=" +
                             std::to_string(p01) + " p11=" + std::to_string(p11));
    }

    friend bool operator==(const ChannelModel&, const ChannelModel&) = default;
};

using BeliefVector = std::vector<double>;

/// Sorted set of distinct 0-based channel indices.
using Action = std::vector<std::size_t>;

/// Subset of an action's channels that were observed in the good state.
struct Observation {
    std::vector<std::size_t> good;
};

/// One-step evolution of an unobserved channel's belief.
inline double tau(double omega, const ChannelModel& model) {
    return omega * model.p11 + (1.0 - omega) * model.p01;
}

/// Belief dynamics parameterised by the model; the DP and verification code
/// is templated on this so alternative (e.g. deliberately broken) dynamics
/// can be plugged in by tests.
struct ChannelDynamics {
    ChannelModel model;

    double tau(double omega) const { return rmab::tau(omega, model); }
    double after_good() const { return model.p11; }
    double after_bad() const { return model.p01; }
};

inline void validate_beliefs(const BeliefVector& beliefs) {
    for (double w : beliefs) require_probability(w, "belief");
}

inline void validate_action(const Action& action, std::size_t n) {
    for (std::size_t i = 0; i < action.size(); ++i) {
        if (action[i] >= n)
            throw InputError("action index " + std::to_string(action[i]) + " out of range for n=" +
                             std::to_string(n));
        if (i > 0 && action[i] <= action[i - 1])
            throw InputError("action indices must be strictly increasing");
    }
}

/// Builds a sorted action from arbitrary distinct indices.
inline Action make_action(std::vector<std::size_t> indices) {
    std::sort(indices.begin(), indices.end());
    if (std::adjacent_find(indices.begin(), indices.end()) != indices.end())
        throw InputError("action contains duplicate channel indices");
    return indices;
}

/// Bayes update of the full belief vector after sensing `action` and
/// observing `obs`. The result keeps the input order.
template <class Dynamics>
BeliefVector bayes_update(const BeliefVector& beliefs, const Action& action,
                          const Observation& obs, const Dynamics& dyn) {
    validate_action(action, beliefs.size());
    for (std::size_t g : obs.good) {
        if (!std::binary_search(action.begin(), action.end(), g))
            throw InputError("observed-good channel " + std::to_string(g) +
                             " is not part of the action");
    }
    BeliefVector next(beliefs.size());
    for (std::size_t i = 0; i < beliefs.size(); ++i) next[i] = dyn.tau(beliefs[i]);
    for (std::size_t i : action) next[i] = dyn.after_bad();
    for (std::size_t g : obs.good) next[g] = dyn.after_good();
    return next;
}

inline BeliefVector bayes_update(const BeliefVector& beliefs, const Action& action,
                                 const Observation& obs, const ChannelModel& model) {
    return bayes_update(beliefs, action, obs, ChannelDynamics{model});
}

struct Canonical {
    BeliefVector beliefs;
    /// perm[j] = original index of the entry now at position j.
    std::vector<std::size_t> perm;
};

/// Stable non-increasing sort.
inline Canonical canonicalize(const BeliefVector& beliefs) {
    Canonical out;
    out.perm.resize(beliefs.size());
    std::iota(out.perm.begin(), out.perm.end(), std::size_t{0});
    std::stable_sort(out.perm.begin(), out.perm.end(),
                     [&](std::size_t a, std::size_t b) { return beliefs[a] > beliefs[b]; });
    out.beliefs.reserve(beliefs.size());
    for (std::size_t j : out.perm) out.beliefs.push_back(beliefs[j]);
    return out;
}

inline bool is_canonical(const BeliefVector& beliefs) {
    return std::is_sorted(beliefs.begin(), beliefs.end(), std::greater<>());
}

/// Fixed point of tau; the natural prior when nothing is known.
inline double stationary_belief(const ChannelModel& model) {
    const double denom = model.p01 + (1.0 - model.p11);
    if (denom <= 0.0) throw InputError("no unique stationary belief (p01=0, p11=1)");
    return model.p01 / denom;
}

}  // namespace rmab
