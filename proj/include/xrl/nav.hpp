#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "xrl/core.hpp"
#include "xrl/linalg.hpp"
#include "xrl/rng.hpp"
#include "xrl/table.hpp"

namespace xrl::nav {

inline constexpr int kStateCount = 6;   // rooms 0..5
inline constexpr int kActionCount = 3;

inline constexpr ActionId kLeft = 0;   // a_L: move through the left door
inline constexpr ActionId kRight = 1;  // a_R: move through the right door
inline constexpr ActionId kStay = 2;   // a_S: stay in the same room

/// Raw per-(room, action) target of the six-room layout. Rooms 1..4 each
/// have exactly one exit that leaves the level (absorbing failure); the two
/// paths 0-1-3 and 0-2-4 are mirror images; room 5 holds the goal.
/// Values: 0..5 = room, -1 = goal, -2 = leaves the level.
inline constexpr int kTargets[kStateCount][kActionCount] = {
    //  a_L  a_R  a_S
    {1, 2, 0},    // room 0
    {-2, 3, 1},   // room 1
    {4, -2, 2},   // room 2
    {-2, 5, 3},   // room 3
    {5, -2, 4},   // room 4
    {-1, -1, -1}, // room 5: the goal room itself
};

inline std::string state_name(int room) { return "s" + std::to_string(room); }

inline const char* action_name(ActionId a) {
    switch (a) {
        case kLeft: return "a_L";
        case kRight: return "a_R";
        case kStay: return "a_S";
    }
    throw std::out_of_range("nav::action_name: bad action");
}

/// Resolves a raw table target to the state actually reached. Reaching room 5
/// completes the task, so any transition whose target is room 5 (or the goal
/// marker on the room-5 row itself) ends at the goal terminal.
inline StateId resolve_target(int raw) {
    if (raw == -2) return StateId::aversive();
    if (raw == -1 || raw == 5) return StateId::goal();
    return StateId::index(raw);
}

inline StateId intended_state(int room, ActionId a) {
    if (room < 0 || room >= kStateCount) throw std::out_of_range("nav: bad room");
    if (a < 0 || a >= kActionCount) throw std::out_of_range("nav: bad action");
    return resolve_target(kTargets[room][a]);
}

/// Reward attached to the state a transition reaches: +1 for completing the
/// task, -1 for leaving the level, 0 for interior moves.
inline double reward_for(StateId reached) {
    if (reached.is_goal()) return 1.0;
    if (reached.is_aversive()) return -1.0;
    return 0.0;
}

/// Exact outcome distribution of executing `a` from `room` under
/// stochasticity `sigma`: the intended state with probability 1 - sigma,
/// otherwise uniformly one of the states the other two actions would reach.
inline std::vector<std::pair<StateId, double>> outcome_distribution(int room, ActionId a,
                                                                    double sigma) {
    if (sigma < 0.0 || sigma > 1.0) throw std::invalid_argument("nav: sigma must be in [0,1]");
    std::vector<std::pair<StateId, double>> dist;
    auto add = [&dist](StateId s, double p) {
        if (p <= 0.0) return;
        for (auto& [state, prob] : dist)
            if (state == s) {
                prob += p;
                return;
            }
        dist.emplace_back(s, p);
    };
    add(intended_state(room, a), 1.0 - sigma);
    for (ActionId other = 0; other < kActionCount; ++other)
        if (other != a) add(intended_state(room, other), sigma / 2.0);
    return dist;
}

/// Six-room navigation task. Transitions are pure given (state, action,
/// sigma) and the caller-supplied generator, so instances are freely
/// shareable; one per agent is the normal arrangement.
class NavEnv {
 public:
    explicit NavEnv(double sigma = 0.0) : sigma_(sigma) {
        if (sigma < 0.0 || sigma > 1.0) throw std::invalid_argument("NavEnv: sigma must be in [0,1]");
    }

    int state_count() const { return kStateCount; }
    int action_count() const { return kActionCount; }
    int initial_state() const { return 0; }
    double sigma() const { return sigma_; }

    void begin_episode() {}

    StepOutcome step(int room, ActionId a, Rng& rng) const {
        if (room < 0 || room >= kStateCount) throw std::out_of_range("NavEnv::step: bad state");
        if (a < 0 || a >= kActionCount) throw std::out_of_range("NavEnv::step: bad action");

        StateId reached = intended_state(room, a);
        if (sigma_ > 0.0) {
            const double u = rng.uniform01();
            if (u >= 1.0 - sigma_) {
                // redirect to one of the other two actions' outcomes
                const ActionId first = (a == 0) ? 1 : 0;
                const ActionId second = (a == 2) ? 1 : 2;
                const bool pick_second = u >= 1.0 - sigma_ / 2.0;
                reached = intended_state(room, pick_second ? second : first);
            }
        }

        StepOutcome out;
        out.next_state = reached;
        out.reward = reward_for(reached);
        out.terminal_kind = reached.is_goal() ? TerminalKind::goal
                          : reached.is_aversive() ? TerminalKind::aversive
                                                  : TerminalKind::none;
        return out;
    }

    std::string state_label(int s) const { return state_name(s); }
    std::string action_label(ActionId a) const { return action_name(a); }

 private:
    double sigma_;
};

/// A stochastic policy over the six rooms: probs[s][a].
using NavPolicy = std::array<std::array<double, kActionCount>, kStateCount>;

inline NavPolicy uniform_policy() {
    NavPolicy p{};
    for (auto& row : p) row = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    return p;
}

/// The deterministic shortest-path policy (right path; the left path is its
/// mirror and equally short).
inline NavPolicy greedy_shortest_path_policy() {
    NavPolicy p{};
    auto det = [&p](int s, ActionId a) { p[s] = {}; p[s][a] = 1.0; };
    det(0, kRight);
    det(1, kRight);
    det(2, kLeft);
    det(3, kRight);
    det(4, kLeft);
    det(5, kStay);  // never acted from; row kept for shape
    return p;
}

/// Probability of absorption at the goal when `a` is executed from `s` and
/// the given policy is followed afterwards, for every (state, action).
/// Computed by solving the linear absorption system of the induced Markov
/// chain; the solve is verified to a residual of 1e-10.
inline StateActionTable exact_success_probability(const NavPolicy& policy, double sigma) {
    constexpr int n = 5;  // unknowns: success probability from rooms 0..4
    for (int s = 0; s < n; ++s) {
        double sum = 0.0;
        for (double v : policy[s]) {
            if (v < 0.0) throw std::invalid_argument("exact_success_probability: negative probability");
            sum += v;
        }
        if (std::fabs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("exact_success_probability: policy row does not sum to 1");
    }

    // v_s = sum_a pi(a|s) * sum_out P(out) * value(out), value(goal)=1,
    // value(aversive)=0, value(room r)=v_r. Rearranged to (I - M) v = b.
    std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
    std::vector<double> b(n, 0.0);
    for (int s = 0; s < n; ++s) {
        m[static_cast<std::size_t>(s) * n + s] = 1.0;
        for (ActionId a = 0; a < kActionCount; ++a) {
            const double pa = policy[s][a];
            if (pa == 0.0) continue;
            for (const auto& [state, prob] : outcome_distribution(s, a, sigma)) {
                if (state.is_goal())
                    b[s] += pa * prob;
                else if (!state.is_aversive())
                    m[static_cast<std::size_t>(s) * n + state.index()] -= pa * prob;
            }
        }
    }
    const std::vector<double> m_copy = m;
    const std::vector<double> b_copy = b;
    const std::vector<double> v = solve_linear(std::move(m), std::move(b), n);

    for (int r = 0; r < n; ++r) {
        double lhs = 0.0;
        for (int c = 0; c < n; ++c) lhs += m_copy[static_cast<std::size_t>(r) * n + c] * v[c];
        if (std::fabs(lhs - b_copy[r]) > 1e-10)
            throw std::runtime_error("exact_success_probability: residual too large");
    }

    auto value_of = [&v](StateId s) {
        if (s.is_goal()) return 1.0;
        if (s.is_aversive()) return 0.0;
        return v[static_cast<std::size_t>(s.index())];
    };

    StateActionTable table(kStateCount, kActionCount);
    for (int s = 0; s < n; ++s)
        for (ActionId a = 0; a < kActionCount; ++a) {
            double p = 0.0;
            for (const auto& [state, prob] : outcome_distribution(s, a, sigma))
                p += prob * value_of(state);
            table.at(s, a) = p;
        }
    for (ActionId a = 0; a < kActionCount; ++a) table.at(5, a) = 1.0;  // acting from the goal room
    return table;
}

/// The transition design as JSON, for documentation and verification.
inline std::string transition_table_json() {
    auto target_text = [](int raw) -> std::string {
        if (raw == -2) return "\"aversive\"";
        if (raw == -1) return "\"goal\"";
        return "\"" + state_name(raw) + "\"";
    };
    std::string out = "{";
    for (int s = 0; s < kStateCount; ++s) {
        out += "\"" + state_name(s) + "\":{";
        for (ActionId a = 0; a < kActionCount; ++a) {
            out += "\"" + std::string(action_name(a)) + "\":" + target_text(kTargets[s][a]);
            if (a + 1 < kActionCount) out += ",";
        }
        out += "}";
        if (s + 1 < kStateCount) out += ",";
    }
    out += "}";
    return out;
}

}  // namespace xrl::nav
