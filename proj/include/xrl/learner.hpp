#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "xrl/core.hpp"
#include "xrl/rng.hpp"
#include "xrl/table.hpp"

namespace xrl {

/// One SARSA temporal-difference update:
///   Q(s,a) <- Q(s,a) + alpha * [r + gamma * Q(s',a') - Q(s,a)]
/// The bootstrap term Q(s',a') reads as 0 when s' is terminal, so converged
/// values at terminal-adjacent pairs equal the terminal reward.
inline void sarsa_update(QTable& q, int s, ActionId a, double reward,
                         StateId s_next, ActionId a_next, double alpha, double gamma) {
    if (!std::isfinite(reward) || !std::isfinite(alpha) || !std::isfinite(gamma))
        throw std::invalid_argument("sarsa_update: non-finite input");
    const double bootstrap = s_next.is_terminal() ? 0.0 : q.at(s_next.index(), a_next);
    double& cell = q.at(s, a);
    cell += alpha * (reward + gamma * bootstrap - cell);
}

/// Boltzmann selection probabilities for one state row:
///   p(a) = exp(Q(s,a)/tau) / sum_i exp(Q(s,a_i)/tau)
/// Stabilized by max subtraction; the distribution is unchanged by it.
inline std::vector<double> softmax_probabilities(std::span<const double> row, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("softmax: tau must be positive");
    double mx = row[0];
    for (double v : row) mx = std::max(mx, v);
    std::vector<double> p(row.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) {
        p[i] = std::exp((row[i] - mx) / tau);
        sum += p[i];
    }
    for (double& v : p) v /= sum;
    return p;
}

inline ActionId softmax_select(const QTable& q, int s, double tau, Rng& rng) {
    const auto p = softmax_probabilities(q.row(s), tau);
    const double u = rng.uniform01();
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        cum += p[i];
        if (u < cum) return static_cast<ActionId>(i);
    }
    return static_cast<ActionId>(p.size() - 1);
}

/// Uniform random action with probability epsilon, otherwise greedy
/// (lowest index on ties).
inline ActionId epsilon_greedy_select(const QTable& q, int s, double epsilon, Rng& rng) {
    if (epsilon < 0.0 || epsilon > 1.0)
        throw std::invalid_argument("epsilon_greedy: epsilon must be in [0,1]");
    if (rng.uniform01() < epsilon) return rng.uniform_int(q.action_count());
    return q.argmax_action(s);
}

// Selector objects plugged into the episode loop. end_episode() lets a
// selector update per-episode schedules (epsilon decay).

struct SoftmaxSelector {
    double tau;

    ActionId operator()(const QTable& q, int s, Rng& rng) const {
        return softmax_select(q, s, tau, rng);
    }
    void end_episode() {}
};

struct EpsilonGreedySelector {
    double epsilon;
    double decay;
    double floor = 0.01;

    ActionId operator()(const QTable& q, int s, Rng& rng) const {
        return epsilon_greedy_select(q, s, epsilon, rng);
    }
    void end_episode() { epsilon = std::max(floor, epsilon * decay); }
};

/// Fixed stochastic policy, one probability row per state. Ignores Q;
/// used for frozen-policy evaluation runs.
struct FixedPolicySelector {
    std::vector<std::vector<double>> probs;

    ActionId operator()(const QTable&, int s, Rng& rng) const {
        const auto& row = probs.at(static_cast<std::size_t>(s));
        const double u = rng.uniform01();
        double cum = 0.0;
        for (std::size_t i = 0; i + 1 < row.size(); ++i) {
            cum += row[i];
            if (u < cum) return static_cast<ActionId>(i);
        }
        return static_cast<ActionId>(row.size() - 1);
    }
    void end_episode() {}
};

}  // namespace xrl
