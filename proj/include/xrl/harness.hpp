#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "xrl/analysis.hpp"
#include "xrl/config.hpp"
#include "xrl/csv.hpp"
#include "xrl/errors.hpp"
#include "xrl/experiment.hpp"
#include "xrl/narrate.hpp"
#include "xrl/svg.hpp"

namespace xrl {

inline constexpr const char* kVersionTag = "0.1.0";

// stream tag offset that keeps the control-noise generator disjoint from the
// per-agent training streams
inline constexpr std::uint64_t kNoiseStreamBase = 0x100000000ULL;

struct RunManifest {
    ExperimentConfig config;
    std::vector<std::string> artifact_paths;
    double duration_seconds = 0.0;
    std::string version = kVersionTag;
};

namespace harness_detail {

inline std::vector<std::string> action_labels(EnvKind env) {
    std::vector<std::string> out;
    if (env == EnvKind::navigation)
        for (ActionId a = 0; a < nav::kActionCount; ++a) out.push_back(nav::action_name(a));
    else
        for (ActionId a = 0; a < sort::kActionCount; ++a) out.push_back(sort::action_name(a));
    return out;
}

inline std::string (*state_labeler(EnvKind env))(int) {
    return env == EnvKind::navigation ? &nav::state_name : &sort::state_name;
}

inline nlohmann::json table_to_json(const StateActionTable& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (int s = 0; s < t.state_count(); ++s) {
        nlohmann::json row = nlohmann::json::array();
        for (ActionId a = 0; a < t.action_count(); ++a) row.push_back(t.at(s, a));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline StateActionTable table_from_json(const nlohmann::json& rows) {
    const int states = static_cast<int>(rows.size());
    const int actions = static_cast<int>(rows.at(0).size());
    StateActionTable t(states, actions);
    for (int s = 0; s < states; ++s)
        for (ActionId a = 0; a < actions; ++a)
            t.at(s, a) = rows.at(static_cast<std::size_t>(s)).at(static_cast<std::size_t>(a)).get<double>();
    return t;
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    return {
        {"env", env_kind_name(cfg.env)},
        {"alpha", cfg.alpha},
        {"gamma", cfg.gamma},
        {"tau", cfg.tau},
        {"epsilon", cfg.epsilon_start},
        {"epsilon_decay", cfg.epsilon_decay},
        {"sigma", cfg.sigma},
        {"episodes", cfg.episodes},
        {"agents", cfg.agents},
        {"seed", cfg.seed},
        {"selection", selection_name(cfg.selection)},
        {"step_cap", cfg.effective_step_cap()},
        {"methods", methods_to_string(cfg.methods)},
        {"track", track_kind_name(cfg.effective_track())},
    };
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    cfg.env = env_kind_from(j.at("env").get<std::string>());
    cfg.alpha = j.at("alpha").get<double>();
    cfg.gamma = j.at("gamma").get<double>();
    cfg.tau = j.at("tau").get<double>();
    cfg.epsilon_start = j.at("epsilon").get<double>();
    cfg.epsilon_decay = j.at("epsilon_decay").get<double>();
    cfg.sigma = j.at("sigma").get<double>();
    cfg.episodes = j.at("episodes").get<int>();
    cfg.agents = j.at("agents").get<int>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.selection = selection_from(j.at("selection").get<std::string>());
    cfg.step_cap = j.at("step_cap").get<int>();
    cfg.methods = methods_from_string(j.at("methods").get<std::string>());
    cfg.track = track_kind_from(j.at("track").get<std::string>());
    cfg.validate();
    return cfg;
}

inline nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataMismatchError(path + ": " + e.what());
    }
    return j;
}

}  // namespace harness_detail

/// Runs the configured experiment and writes the run artifacts into out_dir:
/// traces.csv, qtable.csv, ptable.csv (when the learning method is enabled)
/// and summary.json (config echo, final estimate tables averaged over
/// agents, storage counters, per-agent training stats).
inline RunManifest cmd_train(const std::string& config_path, const std::string& out_dir,
                             int threads = 0) {
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentConfig cfg = load_config_file(config_path);

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());

    const ExperimentResult result = run_experiment(cfg, threads);

    RunManifest manifest;
    manifest.config = cfg;

    const auto join = [&out_dir](const char* name) {
        return (std::filesystem::path(out_dir) / name).string();
    };
    const auto labels = harness_detail::action_labels(cfg.env);
    auto state_label = harness_detail::state_labeler(cfg.env);

    write_traces_csv(join("traces.csv"), result);
    manifest.artifact_paths.push_back(join("traces.csv"));

    write_table_csv(join("qtable.csv"), mean_final_q(result), labels, state_label);
    manifest.artifact_paths.push_back(join("qtable.csv"));

    if (cfg.method_enabled(Method::learning)) {
        write_table_csv(join("ptable.csv"), mean_final_estimates(result, Method::learning), labels,
                        state_label);
        manifest.artifact_paths.push_back(join("ptable.csv"));
    }

    nlohmann::json summary;
    summary["version"] = kVersionTag;
    summary["config"] = harness_detail::config_to_json(cfg);

    nlohmann::json counters;
    nlohmann::json memory_cells = nlohmann::json::array();
    for (const auto& agent : result.agents) memory_cells.push_back(agent.counters.memory_cells);
    counters["memory_cells_per_agent"] = memory_cells;
    counters["learning_cells"] = result.agents.front().counters.learning_cells;
    counters["introspection_cells"] = result.agents.front().counters.introspection_cells;
    summary["counters"] = counters;

    nlohmann::json training;
    nlohmann::json success_rates = nlohmann::json::array();
    nlohmann::json last_returns = nlohmann::json::array();
    for (const auto& agent : result.agents) {
        int successes = 0;
        for (const auto& e : agent.episode_log) successes += e.outcome == EpisodeOutcome::success;
        success_rates.push_back(static_cast<double>(successes) / agent.episode_log.size());
        const std::size_t tail = std::min<std::size_t>(50, agent.episode_log.size());
        double sum = 0.0;
        for (std::size_t i = agent.episode_log.size() - tail; i < agent.episode_log.size(); ++i)
            sum += agent.episode_log[i].total_reward;
        last_returns.push_back(sum / static_cast<double>(tail));
    }
    training["success_rate_per_agent"] = success_rates;
    training["mean_return_last_50_per_agent"] = last_returns;
    summary["training"] = training;

    nlohmann::json finals;
    for (Method m : cfg.methods)
        finals[method_name(m)] = harness_detail::table_to_json(mean_final_estimates(result, m));
    finals["q"] = harness_detail::table_to_json(mean_final_q(result));
    summary["final_estimates"] = finals;

    nlohmann::json envj;
    envj["name"] = env_kind_name(cfg.env);
    envj["states"] = cfg.env == EnvKind::navigation ? nav::kStateCount : sort::kStateCount;
    envj["actions"] = labels;
    if (cfg.env == EnvKind::navigation)
        envj["transitions"] = nlohmann::json::parse(nav::transition_table_json());
    summary["environment"] = envj;

    manifest.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    summary["duration_seconds"] = manifest.duration_seconds;

    {
        std::ofstream out(join("summary.json"), std::ios::binary);
        if (!out) throw IoError("cannot write summary.json");
        out << summary.dump(2) << '\n';
        if (!out) throw IoError("failed while writing summary.json");
    }
    manifest.artifact_paths.push_back(join("summary.json"));

    for (const auto& p : manifest.artifact_paths)
        if (!std::filesystem::exists(p)) throw IoError("artifact missing after run: " + p);
    return manifest;
}

/// Everything the analyzer derives from one run directory.
struct RunAnalysis {
    std::string name;
    ExperimentConfig config;
    std::vector<std::string> action_labels;
    // mean traces at the initial state: method name -> one series per action
    std::vector<std::pair<std::string, std::vector<Series>>> mean_traces;
    std::vector<Series> q_traces;  // raw action values, charts only
    MseTable mse;                       // vs the memory baseline, mean traces
    std::optional<MseTable> mse_per_agent;  // per-agent MSE averaged over agents
    std::optional<CorrelationMatrix> correlation;
};

struct AnalyzeOptions {
    bool per_agent_mse = false;
    bool write_svg = true;
};

namespace harness_detail {

inline char method_letter(const std::string& method) {
    if (method == "memory") return 'm';
    if (method == "learning") return 'l';
    if (method == "introspection") return 'p';
    if (method == "noisy") return 'n';
    return '?';
}

inline char action_letter(EnvKind env, ActionId a) {
    if (env == EnvKind::navigation) {
        constexpr char letters[] = {'L', 'R', 'S'};
        return letters[a];
    }
    constexpr char letters[] = {'G', 'D', 'R', 'L'};  // grab, drop, move_right, move_left
    return letters[a];
}

inline RunAnalysis analyze_run(const std::string& run_dir, bool per_agent_mse) {
    const auto dir = std::filesystem::path(run_dir);
    const nlohmann::json summary = load_json((dir / "summary.json").string());
    RunAnalysis an;
    an.name = dir.filename().empty() ? dir.parent_path().filename().string()
                                     : dir.filename().string();
    an.config = config_from_json(summary.at("config"));
    an.action_labels = action_labels(an.config.env);

    const TracesFile traces = read_traces_csv((dir / "traces.csv").string());
    if (traces.episodes != an.config.episodes || traces.agents != an.config.agents)
        throw DataMismatchError(run_dir + ": traces.csv does not match the config");

    const int initial_state = 0;
    const int actions = static_cast<int>(an.action_labels.size());

    std::vector<std::string> methods;
    for (Method m : an.config.methods) methods.emplace_back(method_name(m));

    for (const auto& method : methods) {
        std::vector<Series> per_action;
        for (ActionId a = 0; a < actions; ++a)
            per_action.push_back(mean_trace(traces.series_for(method, initial_state, a)));
        an.mean_traces.emplace_back(method, std::move(per_action));
    }
    for (ActionId a = 0; a < actions; ++a)
        an.q_traces.push_back(mean_trace(traces.series_for("q", initial_state, a)));

    // control signal: the memory baseline under multiplicative noise
    const auto memory_it = std::find(methods.begin(), methods.end(), "memory");
    if (memory_it != methods.end()) {
        const auto& memory_traces = an.mean_traces[static_cast<std::size_t>(memory_it - methods.begin())].second;
        std::vector<Series> noisy;
        for (ActionId a = 0; a < actions; ++a) {
            Rng rng(an.config.seed, kNoiseStreamBase + static_cast<std::uint64_t>(a));
            noisy.push_back(noisy_control(memory_traces[static_cast<std::size_t>(a)], rng));
        }
        an.mean_traces.emplace_back("noisy", std::move(noisy));

        std::vector<std::pair<std::string, std::vector<Series>>> others;
        for (const auto& [method, series] : an.mean_traces)
            if (method != "memory") others.emplace_back(method, series);
        an.mse = mse_table(memory_traces, others, an.action_labels);

        if (per_agent_mse) {
            MseTable pa;
            pa.action_labels = an.action_labels;
            for (const auto& method : methods) {
                if (method == "memory") continue;
                MseRow row;
                row.method = method;
                for (ActionId a = 0; a < actions; ++a) {
                    const auto& xs = traces.series_for(method, initial_state, a);
                    const auto& bs = traces.series_for("memory", initial_state, a);
                    double sum = 0.0;
                    for (std::size_t agent = 0; agent < xs.size(); ++agent)
                        sum += mse(xs[agent], bs[agent]);
                    row.values.push_back(sum / static_cast<double>(xs.size()));
                }
                pa.rows.push_back(std::move(row));
            }
            an.mse_per_agent = std::move(pa);
        }
    }

    if (an.mean_traces.size() * actions >= 2) {
        std::vector<std::pair<std::string, Series>> labeled;
        for (const auto& [method, series] : an.mean_traces)
            for (ActionId a = 0; a < actions; ++a)
                labeled.emplace_back(std::string(1, action_letter(an.config.env, a)) +
                                         method_letter(method),
                                     series[static_cast<std::size_t>(a)]);
        an.correlation = correlation_matrix(labeled);
    }
    return an;
}

inline std::string format_optional(const std::optional<double>& v) {
    if (!v) return "NA";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", *v);
    return buf;
}

inline void append_report(std::ostringstream& out, const RunAnalysis& an) {
    out << "run: " << an.name << "\n"
        << "  env=" << env_kind_name(an.config.env) << " sigma=" << an.config.sigma
        << " episodes=" << an.config.episodes << " agents=" << an.config.agents
        << " seed=" << an.config.seed << "\n\n";

    if (!an.mse.rows.empty()) {
        out << "  MSE against the memory-based baseline (mean traces, initial state)\n";
        out << "    method          ";
        for (const auto& a : an.mse.action_labels) {
            for (std::size_t i = a.size(); i < 12; ++i) out << ' ';
            out << a;
        }
        out << "\n";
        for (const auto& row : an.mse.rows) {
            out << "    " << row.method;
            for (std::size_t i = row.method.size(); i < 16; ++i) out << ' ';
            for (double v : row.values) {
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%12.4f", v);
                out << buf;
            }
            out << "\n";
        }
        out << "\n";
    }

    if (an.correlation) {
        out << "  Pearson correlation of mean traces (initial state; action letter + method letter)\n";
        out << "        ";
        for (const auto& l : an.correlation->labels) out << "     " << l;
        out << "\n";
        for (std::size_t r = 0; r < an.correlation->labels.size(); ++r) {
            out << "    " << an.correlation->labels[r] << " ";
            for (std::size_t c = 0; c < an.correlation->labels.size(); ++c) {
                const auto v = format_optional(an.correlation->values[r][c]);
                for (std::size_t i = v.size(); i < 7; ++i) out << ' ';
                out << v;
            }
            out << "\n";
        }
        out << "\n";
    }
}

}  // namespace harness_detail

/// Analyzes one or more completed run directories: per-run MSE tables
/// against the memory baseline, correlation matrices across methods and the
/// noisy control, a text report, and SVG charts of the mean traces. All runs
/// must have the same episode count. Outputs go to out_dir (default: the
/// first run directory).
inline std::vector<std::string> cmd_analyze(const std::vector<std::string>& run_dirs,
                                            std::string out_dir = "",
                                            const AnalyzeOptions& options = {}) {
    if (run_dirs.empty()) throw ConfigError("analyze: need at least one run directory");
    if (out_dir.empty()) out_dir = run_dirs.front();
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());

    std::vector<RunAnalysis> runs;
    for (const auto& dir : run_dirs)
        runs.push_back(harness_detail::analyze_run(dir, options.per_agent_mse));

    for (const auto& run : runs)
        if (run.config.episodes != runs.front().config.episodes)
            throw DataMismatchError("analyze: runs have different episode counts (" +
                                    std::to_string(run.config.episodes) + " vs " +
                                    std::to_string(runs.front().config.episodes) + ")");

    std::vector<std::string> written;
    const auto join = [&out_dir](const std::string& name) {
        return (std::filesystem::path(out_dir) / name).string();
    };

    {
        std::ofstream out(join("mse_table.csv"), std::ios::binary);
        if (!out) throw IoError("cannot write mse_table.csv");
        out << "run,method";
        for (const auto& a : runs.front().action_labels) out << ',' << a;
        out << '\n';
        for (const auto& run : runs)
            for (const auto& row : run.mse.rows) {
                out << run.name << ',' << row.method;
                for (double v : row.values) out << ',' << detail::format_value(v);
                out << '\n';
            }
        written.push_back(join("mse_table.csv"));
    }

    if (options.per_agent_mse) {
        std::ofstream out(join("mse_table_per_agent.csv"), std::ios::binary);
        if (!out) throw IoError("cannot write mse_table_per_agent.csv");
        out << "run,method";
        for (const auto& a : runs.front().action_labels) out << ',' << a;
        out << '\n';
        for (const auto& run : runs) {
            if (!run.mse_per_agent) continue;
            for (const auto& row : run.mse_per_agent->rows) {
                out << run.name << ',' << row.method;
                for (double v : row.values) out << ',' << detail::format_value(v);
                out << '\n';
            }
        }
        written.push_back(join("mse_table_per_agent.csv"));
    }

    {
        std::ofstream out(join("correlation_matrix.csv"), std::ios::binary);
        if (!out) throw IoError("cannot write correlation_matrix.csv");
        out << "run,label";
        // labels are identical across runs sharing an env; take the widest set
        const CorrelationMatrix* widest = nullptr;
        for (const auto& run : runs)
            if (run.correlation && (!widest || run.correlation->labels.size() > widest->labels.size()))
                widest = &*run.correlation;
        if (widest)
            for (const auto& l : widest->labels) out << ',' << l;
        out << '\n';
        for (const auto& run : runs) {
            if (!run.correlation) continue;
            for (std::size_t r = 0; r < run.correlation->labels.size(); ++r) {
                out << run.name << ',' << run.correlation->labels[r];
                for (std::size_t c = 0; c < run.correlation->labels.size(); ++c) {
                    const auto& v = run.correlation->values[r][c];
                    out << ',' << (v ? detail::format_value(*v) : "NA");
                }
                out << '\n';
            }
        }
        written.push_back(join("correlation_matrix.csv"));
    }

    {
        std::ostringstream report;
        report << "success-probability run report\n"
               << "===============================\n\n";
        for (const auto& run : runs) harness_detail::append_report(report, run);
        std::ofstream out(join("report.txt"), std::ios::binary);
        if (!out) throw IoError("cannot write report.txt");
        out << report.str();
        written.push_back(join("report.txt"));
    }

    if (options.write_svg) {
        for (const auto& run : runs) {
            const bool smooth = run.config.env == EnvKind::sorting && run.config.episodes >= 15;
            auto chart_of = [&](const std::vector<Series>& series) {
                std::vector<ChartSeries> chart;
                for (std::size_t a = 0; a < series.size(); ++a)
                    chart.push_back({run.action_labels[a],
                                     smooth ? savgol(series[a], 15, 3) : series[a]});
                return chart;
            };
            for (const auto& [method, series] : run.mean_traces) {
                const std::string title = run.name + ": " + method + "-based estimate" +
                                          (smooth ? " (smoothed)" : "");
                const std::string path = join(run.name + "_" + method + ".svg");
                write_svg_chart(path, title, chart_of(series));
                written.push_back(path);
            }
            const std::string q_path = join(run.name + "_q.svg");
            write_svg_chart(q_path, run.name + ": action values" + (smooth ? " (smoothed)" : ""),
                            chart_of(run.q_traces), "episode", "action value");
            written.push_back(q_path);
        }
    }
    return written;
}

/// Renders the analysis report for one or more runs without writing files.
inline std::string cmd_report(const std::vector<std::string>& run_dirs) {
    if (run_dirs.empty()) throw ConfigError("report: need at least one run directory");
    std::vector<RunAnalysis> runs;
    for (const auto& dir : run_dirs) runs.push_back(harness_detail::analyze_run(dir, false));
    for (const auto& run : runs)
        if (run.config.episodes != runs.front().config.episodes)
            throw DataMismatchError("report: runs have different episode counts");
    std::ostringstream report;
    report << "success-probability run report\n"
           << "===============================\n\n";
    for (const auto& run : runs) harness_detail::append_report(report, run);
    return report.str();
}

namespace harness_detail {

inline int parse_state_name(const std::string& name, EnvKind env) {
    const int count = env == EnvKind::navigation ? nav::kStateCount : sort::kStateCount;
    std::string digits = name;
    if (!digits.empty() && digits[0] == 's') digits = digits.substr(1);
    try {
        std::size_t pos = 0;
        const int v = std::stoi(digits, &pos);
        if (pos != digits.size() || v < 0 || v >= count) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("unknown state '" + name + "'");
    }
}

inline ActionId parse_action_name(const std::string& name, EnvKind env) {
    const auto labels = action_labels(env);
    for (std::size_t a = 0; a < labels.size(); ++a)
        if (labels[a] == name) return static_cast<ActionId>(a);
    throw ConfigError("unknown action '" + name + "'");
}

inline QueryKind query_kind_from(const std::string& s) {
    if (s == "why") return QueryKind::why;
    if (s == "why_not") return QueryKind::why_not;
    if (s == "compare") return QueryKind::compare;
    throw ConfigError("unknown explanation kind '" + s + "' (expected why, why_not or compare)");
}

}  // namespace harness_detail

/// Builds an explanation from the final estimates stored in a run directory.
/// `methods` restricts and orders the quoted methods; empty means every
/// method of the run, memory (the observed baseline) first.
inline Explanation cmd_explain(const std::string& run_dir, const std::string& kind,
                               const std::string& state_name,
                               const std::string& action_name = "",
                               std::vector<Method> methods = {}) {
    const auto dir = std::filesystem::path(run_dir);
    const nlohmann::json summary = harness_detail::load_json((dir / "summary.json").string());
    const ExperimentConfig cfg = harness_detail::config_from_json(summary.at("config"));

    if (methods.empty()) methods = cfg.methods;
    std::vector<MethodEstimates> estimates;
    for (Method m : methods) {
        if (!cfg.method_enabled(m))
            throw ConfigError(std::string("method '") + method_name(m) + "' was not part of this run");
        estimates.push_back(
            {m, harness_detail::table_from_json(summary.at("final_estimates").at(method_name(m)))});
    }

    ExplanationQuery query;
    query.kind = harness_detail::query_kind_from(kind);
    query.state = harness_detail::parse_state_name(state_name, cfg.env);
    if (query.kind != QueryKind::compare) {
        if (action_name.empty()) throw ConfigError(kind + ": an action name is required");
        query.action = harness_detail::parse_action_name(action_name, cfg.env);
    } else if (!action_name.empty()) {
        throw ConfigError("compare: no action name expected");
    }
    query.methods = methods;

    const EnvText text = cfg.env == EnvKind::navigation ? nav_text() : sort_text();
    try {
        return explain(estimates, query, text);
    } catch (const std::out_of_range& e) {
        throw ConfigError(e.what());
    }
}

inline nlohmann::json explanation_to_json(const Explanation& ex, const ExplanationQuery& query,
                                          EnvKind env) {
    const auto labels = harness_detail::action_labels(env);
    nlohmann::json cited = nlohmann::json::array();
    for (const auto& c : ex.cited)
        cited.push_back({{"method", method_name(c.method)},
                         {"action", labels[static_cast<std::size_t>(c.action)]},
                         {"probability", c.probability},
                         {"is_top_choice", c.is_top_choice}});
    nlohmann::json q;
    q["kind"] = query.kind == QueryKind::why ? "why"
                : query.kind == QueryKind::why_not ? "why_not"
                                                   : "compare";
    q["state"] = query.state;
    if (query.action) q["action"] = labels[static_cast<std::size_t>(*query.action)];
    return {{"query", q},
            {"chosen_action", labels[static_cast<std::size_t>(ex.chosen_action)]},
            {"cited_probabilities", cited},
            {"text", ex.text}};
}

}  // namespace xrl
