#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "xrl/core.hpp"
#include "xrl/table.hpp"

namespace xrl {

/// The three ways of obtaining a probability of success for a (state, action)
/// pair. They trade storage against fidelity:
///   memory        - counts over an episodic transition log (the baseline),
///   learning      - a success-probability table trained alongside Q,
///   introspection - a closed-form transform of the Q-value itself.
enum class Method { memory, learning, introspection };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::memory: return "memory";
        case Method::learning: return "learning";
        case Method::introspection: return "introspection";
    }
    return "?";
}

/// Success flag: 1 exactly on the transition that completes the task,
/// 0 everywhere else (including aversive endings).
inline double success_flag(const StepOutcome& out) {
    return out.terminal_kind == TerminalKind::goal ? 1.0 : 0.0;
}

/// Episodic memory of transited (state, action) pairs.
///
/// Keeps the full transition log for the life of the agent (this is the
/// storage the method pays for), per-pair visit counts, and per-pair
/// success-credited counts. When an episode ends at the goal, every
/// occurrence recorded during that episode is credited once, so a pair
/// visited twice in one successful episode gains two credits and the
/// success ratio stays in [0, 1].
class EpisodicMemory {
 public:
    EpisodicMemory(int state_count, int action_count)
        : states_(state_count), actions_(action_count),
          total_(static_cast<std::size_t>(state_count) * action_count, 0),
          success_(static_cast<std::size_t>(state_count) * action_count, 0) {}

    void begin_episode() { episode_start_ = log_.size(); }

    void record(int s, ActionId a) {
        log_.emplace_back(s, a);
        total_[offset(s, a)] += 1;
    }

    void finalize(EpisodeOutcome outcome) {
        if (outcome == EpisodeOutcome::success) {
            for (std::size_t i = episode_start_; i < log_.size(); ++i)
                success_[offset(log_[i].first, log_[i].second)] += 1;
        }
        episode_start_ = log_.size();
    }

    /// Empirical probability of success: credited visits over total visits.
    /// Unvisited pairs report 0 (no evidence of success).
    double prob(int s, ActionId a) const {
        const auto idx = offset(s, a);
        if (total_[idx] == 0) return 0.0;
        return static_cast<double>(success_[idx]) / static_cast<double>(total_[idx]);
    }

    std::int64_t total_count(int s, ActionId a) const { return total_[offset(s, a)]; }
    std::int64_t success_count(int s, ActionId a) const { return success_[offset(s, a)]; }

    /// Size of the transition log; grows with every recorded step.
    std::int64_t recorded_transitions() const { return static_cast<std::int64_t>(log_.size()); }

    int current_episode_entries() const { return static_cast<int>(log_.size() - episode_start_); }

    int state_count() const { return states_; }
    int action_count() const { return actions_; }

 private:
    std::size_t offset(int s, ActionId a) const {
        if (s < 0 || s >= states_ || a < 0 || a >= actions_)
            throw std::out_of_range("EpisodicMemory: bad state/action index");
        return static_cast<std::size_t>(s) * actions_ + a;
    }

    int states_;
    int actions_;
    std::vector<std::pair<int, ActionId>> log_;
    std::size_t episode_start_ = 0;
    std::vector<std::int64_t> total_;
    std::vector<std::int64_t> success_;
};

/// Temporal-difference update of a success-probability table:
///   P(s,a) <- P(s,a) + alpha * [phi + P(s',a') - P(s,a)]
/// No discount appears: the sum of future success flags is tracked in full.
/// P(s',a') reads as 0 when s' is terminal. Starting from zeros and feeding
/// phi = 1 only on goal transitions (whose next read is 0) keeps every entry
/// in [0, 1].
inline void p_update(PTable& p, int s, ActionId a, double phi,
                     StateId s_next, ActionId a_next, double alpha) {
    if (!std::isfinite(phi) || !std::isfinite(alpha))
        throw std::invalid_argument("p_update: non-finite input");
    const double bootstrap = s_next.is_terminal() ? 0.0 : p.at(s_next.index(), a_next);
    double& cell = p.at(s, a);
    cell += alpha * (phi + bootstrap - cell);
}

/// Parameters of the introspective Q-to-probability transform.
struct IntrospectionParams {
    double terminal_reward = 1.0;  // reward received on successful completion
    double sigma = 0.0;            // environment stochasticity level
    double gamma = 0.9;

    void validate() const {
        if (!(terminal_reward > 0.0))
            throw std::invalid_argument("IntrospectionParams: terminal_reward must be positive");
        if (sigma < 0.0 || sigma > 1.0)
            throw std::invalid_argument("IntrospectionParams: sigma must be in [0,1]");
        if (!(gamma > 0.0 && gamma < 1.0))
            throw std::invalid_argument("IntrospectionParams: gamma must be in (0,1)");
    }
};

/// Estimated distance to the terminal reward, in actions, read off a
/// converged Q-value through Q ~= R_T * gamma^n:
///   n = log(q / r_terminal) / log(gamma)
/// Only defined for q > 0; callers map non-positive q to probability 0.
inline double estimated_distance(double q, double r_terminal, double gamma) {
    if (!(r_terminal > 0.0)) throw std::invalid_argument("estimated_distance: r_terminal <= 0");
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("estimated_distance: gamma out of (0,1)");
    if (!(q > 0.0)) throw std::domain_error("estimated_distance: undefined for q <= 0");
    return std::log(q / r_terminal) / std::log(gamma);
}

/// Unclamped introspective estimate,
///   (1 - sigma) * (0.5 * log10(q / R_T) + 1),
/// equal for q > 0 to (1 - sigma) * (n / (2 * log_gamma(10)) + 1) with n the
/// estimated distance; the base change removes gamma from the expression.
inline double introspect_raw(double q, const IntrospectionParams& params) {
    params.validate();
    if (!(q > 0.0)) throw std::domain_error("introspect_raw: undefined for q <= 0");
    return (1.0 - params.sigma) * (0.5 * std::log10(q / params.terminal_reward) + 1.0);
}

/// Probability of success estimated directly from a Q-value: the raw
/// transform rectified into [0, 1]. Non-positive Q-values (the log is
/// undefined there) report 0, consistent with the lower clamp.
inline double introspect(double q, const IntrospectionParams& params) {
    params.validate();
    if (!(q > 0.0)) return 0.0;
    return std::clamp(introspect_raw(q, params), 0.0, 1.0);
}

/// Final per-pair estimates of one method, used by explanation rendering
/// and artifact export.
struct MethodEstimates {
    Method method;
    StateActionTable values;
};

inline StateActionTable memory_estimates(const EpisodicMemory& m) {
    StateActionTable t(m.state_count(), m.action_count());
    for (int s = 0; s < m.state_count(); ++s)
        for (ActionId a = 0; a < m.action_count(); ++a) t.at(s, a) = m.prob(s, a);
    return t;
}

inline StateActionTable introspection_estimates(const QTable& q, const IntrospectionParams& params) {
    StateActionTable t(q.state_count(), q.action_count());
    for (int s = 0; s < q.state_count(); ++s)
        for (ActionId a = 0; a < q.action_count(); ++a) t.at(s, a) = introspect(q.at(s, a), params);
    return t;
}

}  // namespace xrl
