#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "xrl/core.hpp"
#include "xrl/rng.hpp"

namespace xrl::sort {

// Arm positions. Center first so the initial configuration encodes to 0.
inline constexpr int kArmCenter = 0;
inline constexpr int kArmLeft = 1;
inline constexpr int kArmRight = 2;

// Pad contents.
inline constexpr int kHoldNone = 0;
inline constexpr int kHoldClassA = 1;  // class A belongs on the left table
inline constexpr int kHoldClassB = 2;  // class B belongs on the right table

inline constexpr ActionId kGrab = 0;
inline constexpr ActionId kDrop = 1;
inline constexpr ActionId kMoveRight = 2;
inline constexpr ActionId kMoveLeft = 3;

inline constexpr int kActionCount = 4;
inline constexpr int kObjectsPerClass = 3;

/// Symbolic state of the sorting task. The step counter drives the
/// late-episode penalty but is excluded from the state index.
struct SortState {
    int arm = kArmCenter;
    int holding = kHoldNone;
    std::array<int, 2> remaining = {kObjectsPerClass, kObjectsPerClass};
    int sorted_ok = 0;
    int step = 0;

    bool operator==(const SortState& o) const {
        return arm == o.arm && holding == o.holding && remaining == o.remaining &&
               sorted_ok == o.sorted_ok;  // step intentionally ignored
    }
};

// Dense index bound of (arm, holding, taken_a, taken_b, sorted_ok):
// 3 * 3 * 4 * 4 * 7.
inline constexpr int kStateCount = 1008;

/// Bijective dense encoding. Ordering: arm (center, left, right), holding
/// (none, A, B), objects taken per class (3 - remaining), objects sorted.
/// The initial configuration maps to index 0.
inline int state_index(const SortState& s) {
    if (s.arm < 0 || s.arm > 2 || s.holding < 0 || s.holding > 2 ||
        s.remaining[0] < 0 || s.remaining[0] > 3 || s.remaining[1] < 0 || s.remaining[1] > 3 ||
        s.sorted_ok < 0 || s.sorted_ok > 6)
        throw std::out_of_range("sort::state_index: field out of range");
    const int taken_a = kObjectsPerClass - s.remaining[0];
    const int taken_b = kObjectsPerClass - s.remaining[1];
    return (((s.arm * 3 + s.holding) * 4 + taken_a) * 4 + taken_b) * 7 + s.sorted_ok;
}

inline SortState state_from_index(int index) {
    if (index < 0 || index >= kStateCount) throw std::out_of_range("sort::state_from_index: bad index");
    SortState s;
    s.sorted_ok = index % 7;
    index /= 7;
    s.remaining[1] = kObjectsPerClass - index % 4;
    index /= 4;
    s.remaining[0] = kObjectsPerClass - index % 4;
    index /= 4;
    s.holding = index % 3;
    s.arm = index / 3;
    return s;
}

struct SortStepResult {
    SortState next;
    double reward = 0.0;
    TerminalKind kind = TerminalKind::none;
};

/// One action of the sorting task.
///
/// grab picks an object off the central table when the arm is over it and
/// the pad is free; the class is drawn uniformly among classes that still
/// have objects (they lie at random positions). drop over a side table sorts
/// the held object when the side matches its class (+0.4, or +1 and task
/// completion for the sixth) and ends the episode with -1 when it does not.
/// A correct drop leaves the arm back over the central table for the next
/// pick. Moves shift the arm one slot and saturate at the ends. Everything
/// else (grab with a full pad or away from the center, drop with an empty
/// pad or over the center) only consumes the step. Every step past the 18th
/// costs an additional -0.01 on top of any event reward.
inline SortStepResult sort_apply(const SortState& state, ActionId action, Rng& rng) {
    if (action < 0 || action >= kActionCount) throw std::out_of_range("sort_apply: bad action");
    if (state.sorted_ok >= 2 * kObjectsPerClass)
        throw std::logic_error("sort_apply: acting from a completed task");

    SortStepResult r;
    r.next = state;
    r.next.step = state.step + 1;

    switch (action) {
        case kGrab:
            if (state.arm == kArmCenter && state.holding == kHoldNone &&
                state.remaining[0] + state.remaining[1] > 0) {
                int cls;
                if (state.remaining[0] > 0 && state.remaining[1] > 0)
                    cls = rng.uniform01() < 0.5 ? 0 : 1;
                else
                    cls = state.remaining[0] > 0 ? 0 : 1;
                r.next.remaining[cls] -= 1;
                r.next.holding = cls == 0 ? kHoldClassA : kHoldClassB;
            }
            break;
        case kDrop:
            if (state.holding != kHoldNone && state.arm != kArmCenter) {
                const bool correct = (state.holding == kHoldClassA && state.arm == kArmLeft) ||
                                     (state.holding == kHoldClassB && state.arm == kArmRight);
                if (correct) {
                    r.next.holding = kHoldNone;
                    r.next.sorted_ok += 1;
                    if (r.next.sorted_ok == 2 * kObjectsPerClass) {
                        r.reward = 1.0;
                        r.kind = TerminalKind::goal;
                    } else {
                        r.reward = 0.4;
                        r.next.arm = kArmCenter;
                    }
                } else {
                    r.reward = -1.0;
                    r.kind = TerminalKind::aversive;
                }
            }
            break;
        case kMoveRight:
            r.next.arm = state.arm == kArmLeft ? kArmCenter
                         : state.arm == kArmCenter ? kArmRight
                                                   : kArmRight;
            break;
        case kMoveLeft:
            r.next.arm = state.arm == kArmRight ? kArmCenter
                         : state.arm == kArmCenter ? kArmLeft
                                                   : kArmLeft;
            break;
    }

    if (r.next.step > 18) r.reward -= 0.01;
    return r;
}

inline std::string action_name(ActionId a) {
    switch (a) {
        case kGrab: return "grab";
        case kDrop: return "drop";
        case kMoveRight: return "move_right";
        case kMoveLeft: return "move_left";
    }
    throw std::out_of_range("sort::action_name: bad action");
}

inline std::string state_name(int index) { return "s" + std::to_string(index); }

inline std::string describe_state(const SortState& s) {
    static const char* arm_names[] = {"center", "left", "right"};
    static const char* hold_names[] = {"nothing", "a class-A object", "a class-B object"};
    return std::string("arm over ") + arm_names[s.arm] + ", holding " + hold_names[s.holding] +
           ", remaining " + std::to_string(s.remaining[0]) + "A/" + std::to_string(s.remaining[1]) +
           "B, sorted " + std::to_string(s.sorted_ok);
}

/// The sorting task exposed through dense state indices. Keeps the episode
/// step counter (it is part of the reward, not of the state index), so one
/// instance belongs to one agent.
class SortEnv {
 public:
    int state_count() const { return kStateCount; }
    int action_count() const { return kActionCount; }
    int initial_state() const { return 0; }

    void begin_episode() { steps_taken_ = 0; }

    StepOutcome step(int s_index, ActionId a, Rng& rng) {
        SortState st = state_from_index(s_index);
        st.step = steps_taken_;
        const SortStepResult res = sort_apply(st, a, rng);
        steps_taken_ = res.next.step;

        StepOutcome out;
        out.reward = res.reward;
        out.terminal_kind = res.kind;
        out.next_state = res.kind == TerminalKind::goal ? StateId::goal()
                       : res.kind == TerminalKind::aversive ? StateId::aversive()
                                                            : StateId::index(state_index(res.next));
        return out;
    }

    std::string state_label(int s) const { return state_name(s); }
    std::string action_label(ActionId a) const { return action_name(a); }

 private:
    int steps_taken_ = 0;
};

}  // namespace xrl::sort
