#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "xrl/core.hpp"

namespace xrl {

/// Dense state x action table of reals. Shape is fixed at construction;
/// used both for action values (Q) and learned success probabilities (P).
class StateActionTable {
 public:
    StateActionTable() = default;

    StateActionTable(int state_count, int action_count, double init = 0.0)
        : states_(state_count), actions_(action_count),
          values_(static_cast<std::size_t>(state_count) * action_count, init) {
        if (state_count <= 0 || action_count <= 0)
            throw std::invalid_argument("StateActionTable: counts must be positive");
    }

    int state_count() const { return states_; }
    int action_count() const { return actions_; }

    double at(int s, ActionId a) const { return values_[offset(s, a)]; }
    double& at(int s, ActionId a) { return values_[offset(s, a)]; }

    std::span<const double> row(int s) const {
        check_state(s);
        return {values_.data() + static_cast<std::size_t>(s) * actions_,
                static_cast<std::size_t>(actions_)};
    }

    /// Greedy action for a state; ties break to the lowest action index.
    ActionId argmax_action(int s) const {
        auto r = row(s);
        ActionId best = 0;
        for (ActionId a = 1; a < actions_; ++a)
            if (r[a] > r[best]) best = a;
        return best;
    }

    bool all_finite() const {
        for (double v : values_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    bool operator==(const StateActionTable&) const = default;

 private:
    std::size_t offset(int s, ActionId a) const {
        check_state(s);
        if (a < 0 || a >= actions_) throw std::out_of_range("StateActionTable: bad action index");
        return static_cast<std::size_t>(s) * actions_ + a;
    }

    void check_state(int s) const {
        if (s < 0 || s >= states_) throw std::out_of_range("StateActionTable: bad state index");
    }

    int states_ = 0;
    int actions_ = 0;
    std::vector<double> values_;
};

using QTable = StateActionTable;
using PTable = StateActionTable;

}  // namespace xrl
