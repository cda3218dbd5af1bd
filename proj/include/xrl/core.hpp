#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace xrl {

/// Index of an action within an environment's action set.
using ActionId = int;

enum class TerminalKind { none, goal, aversive };

/// A discrete state: either a regular state index or one of the two
/// distinguished absorbing markers. The markers never appear as the source
/// of a transition; episodes end the moment one is reached.
class StateId {
 public:
    static constexpr StateId index(int i) { return StateId(i); }
    static constexpr StateId goal() { return StateId(kGoal); }
    static constexpr StateId aversive() { return StateId(kAversive); }

    constexpr bool is_goal() const { return code_ == kGoal; }
    constexpr bool is_aversive() const { return code_ == kAversive; }
    constexpr bool is_terminal() const { return code_ < 0; }

    /// Regular state index; throws on terminal markers.
    constexpr int index() const {
        if (is_terminal()) throw std::logic_error("StateId: terminal marker has no index");
        return code_;
    }

    constexpr bool operator==(const StateId&) const = default;

 private:
    explicit constexpr StateId(int code) : code_(code) {}

    static constexpr int kGoal = -1;
    static constexpr int kAversive = -2;

    int code_;
};

/// Result of executing one action.
struct StepOutcome {
    StateId next_state = StateId::index(0);
    double reward = 0.0;
    TerminalKind terminal_kind = TerminalKind::none;
};

/// One executed (state, action, reward) step. The source state is always a
/// regular state, hence a plain index.
struct Transition {
    int state = 0;
    ActionId action = 0;
    double reward = 0.0;
};

enum class EpisodeOutcome { success, failure };

struct Episode {
    std::vector<Transition> transitions;
    EpisodeOutcome outcome = EpisodeOutcome::failure;

    int length() const { return static_cast<int>(transitions.size()); }

    double total_reward() const {
        double sum = 0.0;
        for (const auto& t : transitions) sum += t.reward;
        return sum;
    }
};

}  // namespace xrl
