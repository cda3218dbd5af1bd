#pragma once

#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "xrl/core.hpp"
#include "xrl/explainers.hpp"
#include "xrl/nav.hpp"
#include "xrl/sort.hpp"

namespace xrl {

enum class QueryKind { why, why_not, compare };

struct ExplanationQuery {
    QueryKind kind = QueryKind::why;
    int state = 0;
    std::optional<ActionId> action;  // absent for compare
    std::vector<Method> methods;     // rendering follows this order; first is primary
};

/// Phrasing hooks for one environment: how states and actions read in a
/// sentence.
struct EnvText {
    int action_count = 0;
    std::string (*state_name)(int) = nullptr;
    std::string (*action_infinitive)(ActionId) = nullptr;  // "move to the right"
    std::string (*action_gerund)(ActionId) = nullptr;      // "moving to the right"
};

namespace detail {

inline std::string nav_infinitive(ActionId a) {
    switch (a) {
        case nav::kLeft: return "move to the left";
        case nav::kRight: return "move to the right";
        case nav::kStay: return "stay in the same room";
    }
    throw std::out_of_range("nav action");
}

inline std::string nav_gerund(ActionId a) {
    switch (a) {
        case nav::kLeft: return "moving to the left";
        case nav::kRight: return "moving to the right";
        case nav::kStay: return "staying in the same room";
    }
    throw std::out_of_range("nav action");
}

inline std::string sort_infinitive(ActionId a) {
    switch (a) {
        case sort::kGrab: return "grab an object";
        case sort::kDrop: return "drop the object";
        case sort::kMoveRight: return "move to the right";
        case sort::kMoveLeft: return "move to the left";
    }
    throw std::out_of_range("sort action");
}

inline std::string sort_gerund(ActionId a) {
    switch (a) {
        case sort::kGrab: return "grabbing an object";
        case sort::kDrop: return "dropping the object";
        case sort::kMoveRight: return "moving to the right";
        case sort::kMoveLeft: return "moving to the left";
    }
    throw std::out_of_range("sort action");
}

}  // namespace detail

inline EnvText nav_text() {
    return {nav::kActionCount, &nav::state_name, &detail::nav_infinitive, &detail::nav_gerund};
}

inline EnvText sort_text() {
    return {sort::kActionCount, &sort::state_name, &detail::sort_infinitive, &detail::sort_gerund};
}

/// One probability quoted in an explanation.
struct CitedValue {
    Method method;
    ActionId action = 0;
    double probability = 0.0;
    bool is_top_choice = false;  // whether `action` is this method's argmax
};

/// A rendered explanation. Every percentage appearing in the text is one of
/// the cited probabilities formatted to two decimals; no number in the text
/// comes from anywhere else.
struct Explanation {
    std::string text;
    std::vector<CitedValue> cited;
    ActionId chosen_action = 0;
};

/// "48.09" style rendering of a probability as a percentage.
inline std::string format_pct(double probability) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", probability * 100.0);
    return buf;
}

namespace detail {

inline const char* method_phrase(Method m) {
    switch (m) {
        case Method::memory: return "memory-based, observed";
        case Method::learning: return "learning-based, estimated";
        case Method::introspection: return "introspection-based, estimated";
    }
    return "?";
}

inline void check_query(const std::vector<MethodEstimates>& estimates, int state,
                        std::optional<ActionId> action, const EnvText& text) {
    if (estimates.empty()) throw std::invalid_argument("explain: no estimates supplied");
    for (const auto& e : estimates) {
        if (state < 0 || state >= e.values.state_count())
            throw std::out_of_range("explain: unknown state");
        if (action && (*action < 0 || *action >= e.values.action_count()))
            throw std::out_of_range("explain: unknown action");
        if (e.values.action_count() != text.action_count)
            throw std::invalid_argument("explain: estimates do not match the environment");
    }
}

/// "12.34% (memory-based, observed), 56.78% (learning-based, estimated) ..."
inline std::string cite_list(const std::vector<MethodEstimates>& estimates, int state,
                             ActionId action, std::vector<CitedValue>& cited) {
    std::string out;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        const auto& e = estimates[i];
        const double p = e.values.at(state, action);
        cited.push_back({e.method, action, p, e.values.argmax_action(state) == action});
        if (i > 0) out += (i + 1 == estimates.size()) ? " and " : ", ";
        out += format_pct(p) + "% (" + method_phrase(e.method) + ")";
    }
    return out;
}

}  // namespace detail

/// Why was `action` taken in `state`: quotes the probability of success
/// under each requested method, the first method naming the agent's choice.
inline Explanation explain_why(const std::vector<MethodEstimates>& estimates, int state,
                               ActionId action, const EnvText& text) {
    detail::check_query(estimates, state, action, text);
    Explanation ex;
    ex.chosen_action = action;
    ex.text = "In state " + text.state_name(state) + ", I chose to " +
              text.action_infinitive(action) + " because it has a probability of success of " +
              detail::cite_list(estimates, state, action, ex.cited) + ".";
    for (const auto& e : estimates) {
        const ActionId top = e.values.argmax_action(state);
        if (top != action)
            ex.text += " Note: under the " + std::string(method_name(e.method)) + " estimate, " +
                       text.action_gerund(top) + " ranks higher.";
    }
    return ex;
}

/// Why was `action` rejected in `state`: quotes its probability under each
/// requested method compared against the action the primary (first) method
/// prefers. Asking about the preferred action itself gets a correction
/// instead of a counterfactual.
inline Explanation explain_why_not(const std::vector<MethodEstimates>& estimates, int state,
                                   ActionId action, const EnvText& text) {
    detail::check_query(estimates, state, action, text);
    const auto& primary = estimates.front();
    const ActionId best = primary.values.argmax_action(state);

    Explanation ex;
    ex.chosen_action = best;
    if (best == action) {
        ex.text = "In state " + text.state_name(state) + ", " + text.action_gerund(action) +
                  " is actually my preferred action: it has a probability of success of " +
                  detail::cite_list(estimates, state, action, ex.cited) + ".";
        return ex;
    }

    ex.text = "In state " + text.state_name(state) + ", I did not choose to " +
              text.action_infinitive(action) + " because it has only a probability of success of " +
              detail::cite_list(estimates, state, action, ex.cited);
    const double best_p = primary.values.at(state, best);
    ex.cited.push_back({primary.method, best, best_p, true});
    ex.text += ", compared to " + format_pct(best_p) + "% for " + text.action_gerund(best) + ".";
    return ex;
}

/// Lists every action's probability of success under the primary method and
/// names the best one (ties go to the lowest action index and are said so).
inline Explanation explain_compare(const std::vector<MethodEstimates>& estimates, int state,
                                   const EnvText& text) {
    detail::check_query(estimates, state, std::nullopt, text);
    const auto& primary = estimates.front();
    const ActionId best = primary.values.argmax_action(state);

    Explanation ex;
    ex.chosen_action = best;
    ex.text = "In state " + text.state_name(state) + ", the probabilities of success are ";
    for (ActionId a = 0; a < text.action_count; ++a) {
        const double p = primary.values.at(state, a);
        ex.cited.push_back({primary.method, a, p, a == best});
        if (a > 0) ex.text += (a + 1 == text.action_count) ? " and " : ", ";
        ex.text += format_pct(p) + "% for " + text.action_gerund(a);
    }
    ex.text += " (" + std::string(method_name(primary.method)) + "-based). I chose to " +
               text.action_infinitive(best) +
               " because it had the biggest probability of successfully finishing the task.";

    bool tied = false;
    for (ActionId a = 0; a < text.action_count; ++a)
        if (a != best && primary.values.at(state, a) == primary.values.at(state, best)) tied = true;
    if (tied) ex.text += " The top actions are tied; I kept the lowest-indexed one.";
    return ex;
}

inline Explanation explain(const std::vector<MethodEstimates>& estimates,
                           const ExplanationQuery& query, const EnvText& text) {
    switch (query.kind) {
        case QueryKind::why:
            if (!query.action) throw std::invalid_argument("why: action required");
            return explain_why(estimates, query.state, *query.action, text);
        case QueryKind::why_not:
            if (!query.action) throw std::invalid_argument("why_not: action required");
            return explain_why_not(estimates, query.state, *query.action, text);
        case QueryKind::compare:
            return explain_compare(estimates, query.state, text);
    }
    throw std::logic_error("explain: bad query kind");
}

}  // namespace xrl
