#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "xrl/core.hpp"
#include "xrl/errors.hpp"
#include "xrl/explainers.hpp"
#include "xrl/learner.hpp"
#include "xrl/nav.hpp"
#include "xrl/rng.hpp"
#include "xrl/sort.hpp"
#include "xrl/table.hpp"

namespace xrl {

enum class EnvKind { navigation, sorting };
enum class SelectionKind { softmax, epsilon_greedy };

/// Which (state, action) pairs get a per-episode trace: every pair of the
/// environment, or only the actions of the initial state. Navigation runs
/// default to all (any state can then be queried without re-running); the
/// sorting state space is large enough that only the initial state is traced
/// by default.
enum class TrackKind { all, initial };

/// Everything a training run depends on. Replaying a config (seed included)
/// reproduces the artifacts bit for bit.
struct ExperimentConfig {
    EnvKind env = EnvKind::navigation;
    double alpha = 0.3;
    double gamma = 0.9;
    double tau = 0.25;
    double epsilon_start = 1.0;
    double epsilon_decay = 0.9995;
    double sigma = 0.0;
    int episodes = 300;
    int agents = 20;
    std::uint64_t seed = 1;
    SelectionKind selection = SelectionKind::softmax;
    int step_cap = 0;  // 0 = per-environment default
    std::vector<Method> methods = {Method::memory, Method::learning, Method::introspection};
    std::optional<TrackKind> track;  // unset = per-environment default

    int effective_step_cap() const {
        if (step_cap > 0) return step_cap;
        return env == EnvKind::navigation ? 500 : 100;
    }

    TrackKind effective_track() const {
        if (track) return *track;
        return env == EnvKind::navigation ? TrackKind::all : TrackKind::initial;
    }

    bool method_enabled(Method m) const {
        return std::find(methods.begin(), methods.end(), m) != methods.end();
    }

    void validate() const {
        if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must be in (0,1]");
        if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must be in (0,1]");
        if (!(tau > 0.0)) throw ConfigError("tau must be positive");
        if (!(epsilon_start > 0.0 && epsilon_start <= 1.0))
            throw ConfigError("epsilon must be in (0,1]");
        if (!(epsilon_decay > 0.0 && epsilon_decay <= 1.0))
            throw ConfigError("epsilon_decay must be in (0,1]");
        if (sigma < 0.0 || sigma > 1.0) throw ConfigError("sigma must be in [0,1]");
        if (episodes <= 0) throw ConfigError("episodes must be positive");
        if (agents <= 0) throw ConfigError("agents must be positive");
        if (step_cap < 0) throw ConfigError("step_cap must be positive");
        if (methods.empty()) throw ConfigError("at least one method must be enabled");
        if (env == EnvKind::sorting && sigma != 0.0)
            throw ConfigError("sigma applies to the navigation task only; use sigma=0 for sorting");
        if (method_enabled(Method::introspection) && gamma >= 1.0)
            throw ConfigError("introspection requires gamma < 1");
    }
};

struct EpisodeSummary {
    EpisodeOutcome outcome = EpisodeOutcome::failure;
    int length = 0;
    double total_reward = 0.0;
};

/// Per-episode series of one quantity at one (state, action) pair.
/// `method` is one of the estimator names or "q" for raw action values.
struct Trace {
    std::string method;
    int state = 0;
    ActionId action = 0;
    std::vector<double> values;
};

/// Persistent storage footprint of each estimator, in table cells or log
/// entries. The memory method's log grows with every executed step, the
/// learned table is fixed at state_count x action_count, and the
/// introspective transform stores nothing.
struct MemoryCounters {
    std::int64_t memory_cells = 0;
    std::int64_t learning_cells = 0;
    std::int64_t introspection_cells = 0;
};

struct AgentArtifacts {
    std::vector<EpisodeSummary> episode_log;
    std::vector<Trace> traces;
    MemoryCounters counters;
    QTable q;
    std::optional<PTable> p;
    std::optional<EpisodicMemory> memory;

    const Trace* find_trace(const std::string& method, int state, ActionId action) const {
        for (const auto& t : traces)
            if (t.method == method && t.state == state && t.action == action) return &t;
        return nullptr;
    }
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<AgentArtifacts> agents;
    double wall_seconds = 0.0;
};

struct SarsaParams {
    double alpha;
    double gamma;
};

struct EstimatorHooks {
    EpisodicMemory* memory = nullptr;
    PTable* ptable = nullptr;
};

/// Runs one episode: repeatedly act, record the transition, pick the next
/// action, apply the SARSA update and (when enabled) the success-probability
/// update, until a terminal state or the step cap. Ending on the cap is an
/// ordinary failure, not an error.
template <typename Env, typename Selector>
Episode run_episode(Env& env, QTable& q, Selector& select, const SarsaParams& sarsa,
                    const EstimatorHooks& hooks, Rng& rng, int step_cap) {
    env.begin_episode();
    if (hooks.memory) hooks.memory->begin_episode();

    Episode episode;
    int s = env.initial_state();
    ActionId a = select(q, s, rng);

    for (int step = 0; step < step_cap; ++step) {
        const StepOutcome out = env.step(s, a, rng);
        if (hooks.memory) hooks.memory->record(s, a);

        const bool terminal = out.terminal_kind != TerminalKind::none;
        ActionId a_next = 0;
        if (!terminal) a_next = select(q, out.next_state.index(), rng);

        sarsa_update(q, s, a, out.reward, out.next_state, a_next, sarsa.alpha, sarsa.gamma);
        if (hooks.ptable)
            p_update(*hooks.ptable, s, a, success_flag(out), out.next_state, a_next, sarsa.alpha);

        episode.transitions.push_back({s, a, out.reward});
        if (terminal) {
            episode.outcome = out.terminal_kind == TerminalKind::goal ? EpisodeOutcome::success
                                                                      : EpisodeOutcome::failure;
            break;
        }
        s = out.next_state.index();
        a = a_next;
    }

    if (hooks.memory) hooks.memory->finalize(episode.outcome);
    return episode;
}

inline std::vector<std::pair<int, ActionId>> tracked_pairs(const ExperimentConfig& cfg) {
    const int states = cfg.env == EnvKind::navigation ? nav::kStateCount : sort::kStateCount;
    const int actions = cfg.env == EnvKind::navigation ? nav::kActionCount : sort::kActionCount;
    std::vector<std::pair<int, ActionId>> pairs;
    if (cfg.effective_track() == TrackKind::all) {
        pairs.reserve(static_cast<std::size_t>(states) * actions);
        for (int s = 0; s < states; ++s)
            for (ActionId a = 0; a < actions; ++a) pairs.emplace_back(s, a);
    } else {
        for (ActionId a = 0; a < actions; ++a) pairs.emplace_back(0, a);
    }
    return pairs;
}

namespace detail {

template <typename Env, typename Selector>
AgentArtifacts run_agent_impl(const ExperimentConfig& cfg, Env env, Selector select, Rng rng) {
    const auto pairs = tracked_pairs(cfg);
    const bool use_memory = cfg.method_enabled(Method::memory);
    const bool use_learning = cfg.method_enabled(Method::learning);
    const bool use_introspection = cfg.method_enabled(Method::introspection);

    AgentArtifacts art;
    art.q = QTable(env.state_count(), env.action_count());
    if (use_learning) art.p = PTable(env.state_count(), env.action_count());
    if (use_memory) art.memory = EpisodicMemory(env.state_count(), env.action_count());

    IntrospectionParams intro;
    intro.terminal_reward = 1.0;
    intro.sigma = cfg.sigma;
    intro.gamma = cfg.gamma;

    // one trace per tracked pair and recorded quantity, "q" always included
    std::vector<std::string> methods;
    if (use_memory) methods.emplace_back(method_name(Method::memory));
    if (use_learning) methods.emplace_back(method_name(Method::learning));
    if (use_introspection) methods.emplace_back(method_name(Method::introspection));
    methods.emplace_back("q");
    for (const auto& m : methods)
        for (const auto& [s, a] : pairs) {
            Trace t;
            t.method = m;
            t.state = s;
            t.action = a;
            t.values.reserve(static_cast<std::size_t>(cfg.episodes));
            art.traces.push_back(std::move(t));
        }
    auto trace_block = [&](const std::string& m) -> Trace* {
        for (auto& t : art.traces)
            if (t.method == m) return &t;
        return nullptr;
    };
    Trace* memory_block = use_memory ? trace_block("memory") : nullptr;
    Trace* learning_block = use_learning ? trace_block("learning") : nullptr;
    Trace* introspection_block = use_introspection ? trace_block("introspection") : nullptr;
    Trace* q_block = trace_block("q");

    EstimatorHooks hooks;
    if (art.memory) hooks.memory = &*art.memory;
    if (art.p) hooks.ptable = &*art.p;

    const SarsaParams sarsa{cfg.alpha, cfg.gamma};
    const int cap = cfg.effective_step_cap();

    for (int ep = 0; ep < cfg.episodes; ++ep) {
        const Episode episode = run_episode(env, art.q, select, sarsa, hooks, rng, cap);
        select.end_episode();
        art.episode_log.push_back({episode.outcome, episode.length(), episode.total_reward()});

        // estimates sampled after the episode's final update, memory
        // crediting included
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const auto [s, a] = pairs[i];
            if (memory_block) memory_block[i].values.push_back(art.memory->prob(s, a));
            if (learning_block) learning_block[i].values.push_back(art.p->at(s, a));
            if (introspection_block)
                introspection_block[i].values.push_back(introspect(art.q.at(s, a), intro));
            q_block[i].values.push_back(art.q.at(s, a));
        }
    }

    art.counters.memory_cells = art.memory ? art.memory->recorded_transitions() : 0;
    art.counters.learning_cells =
        art.p ? static_cast<std::int64_t>(env.state_count()) * env.action_count() : 0;
    art.counters.introspection_cells = 0;
    return art;
}

template <typename Env>
AgentArtifacts run_agent_env(const ExperimentConfig& cfg, Env env, std::uint64_t agent_index) {
    Rng rng(cfg.seed, agent_index);
    if (cfg.selection == SelectionKind::softmax)
        return run_agent_impl(cfg, std::move(env), SoftmaxSelector{cfg.tau}, std::move(rng));
    return run_agent_impl(cfg, std::move(env),
                          EpsilonGreedySelector{cfg.epsilon_start, cfg.epsilon_decay},
                          std::move(rng));
}

}  // namespace detail

/// Trains one agent with its own derived random stream.
inline AgentArtifacts run_agent(const ExperimentConfig& cfg, int agent_index) {
    if (cfg.env == EnvKind::navigation)
        return detail::run_agent_env(cfg, nav::NavEnv(cfg.sigma),
                                     static_cast<std::uint64_t>(agent_index));
    return detail::run_agent_env(cfg, sort::SortEnv(), static_cast<std::uint64_t>(agent_index));
}

/// Trains cfg.agents independent agents and collects their artifacts.
/// Agents are independent, so they may run on up to `threads` workers
/// (0 = hardware concurrency); the result does not depend on the thread
/// count, only on the seed.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, int threads = 0) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();

    ExperimentResult result;
    result.config = cfg;
    result.agents.resize(static_cast<std::size_t>(cfg.agents));

    if (threads <= 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        threads = hw == 0 ? 1 : static_cast<int>(hw);
    }
    threads = std::min(threads, cfg.agents);

    if (threads <= 1) {
        for (int i = 0; i < cfg.agents; ++i) result.agents[static_cast<std::size_t>(i)] = run_agent(cfg, i);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int w = 0; w < threads; ++w)
            pool.emplace_back([&] {
                for (int i = next.fetch_add(1); i < cfg.agents; i = next.fetch_add(1))
                    result.agents[static_cast<std::size_t>(i)] = run_agent(cfg, i);
            });
        for (auto& th : pool) th.join();
    }

    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

/// Per-agent final estimate tables of one method.
inline StateActionTable final_estimates(const AgentArtifacts& agent, Method m, double sigma,
                                        double gamma) {
    switch (m) {
        case Method::memory:
            if (!agent.memory) throw DataMismatchError("memory method not part of this run");
            return memory_estimates(*agent.memory);
        case Method::learning:
            if (!agent.p) throw DataMismatchError("learning method not part of this run");
            return *agent.p;
        case Method::introspection: {
            IntrospectionParams params;
            params.sigma = sigma;
            params.gamma = gamma;
            return introspection_estimates(agent.q, params);
        }
    }
    throw std::logic_error("final_estimates: bad method");
}

/// Mean of a per-agent table across all agents.
inline StateActionTable mean_final_estimates(const ExperimentResult& result, Method m) {
    StateActionTable sum;
    for (std::size_t i = 0; i < result.agents.size(); ++i) {
        StateActionTable t =
            final_estimates(result.agents[i], m, result.config.sigma, result.config.gamma);
        if (i == 0) {
            sum = std::move(t);
        } else {
            for (int s = 0; s < sum.state_count(); ++s)
                for (ActionId a = 0; a < sum.action_count(); ++a) sum.at(s, a) += t.at(s, a);
        }
    }
    for (int s = 0; s < sum.state_count(); ++s)
        for (ActionId a = 0; a < sum.action_count(); ++a)
            sum.at(s, a) /= static_cast<double>(result.agents.size());
    return sum;
}

inline StateActionTable mean_final_q(const ExperimentResult& result) {
    StateActionTable sum = result.agents.front().q;
    for (std::size_t i = 1; i < result.agents.size(); ++i)
        for (int s = 0; s < sum.state_count(); ++s)
            for (ActionId a = 0; a < sum.action_count(); ++a)
                sum.at(s, a) += result.agents[i].q.at(s, a);
    for (int s = 0; s < sum.state_count(); ++s)
        for (ActionId a = 0; a < sum.action_count(); ++a)
            sum.at(s, a) /= static_cast<double>(result.agents.size());
    return sum;
}

}  // namespace xrl
