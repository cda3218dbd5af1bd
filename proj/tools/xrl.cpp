// Command-line harness: train agents, analyze finished runs, render
// goal-driven explanations from their artifacts.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xrl/xrl.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitDataMismatch = 4;

int thread_cap_from_env() {
    const char* raw = std::getenv("XPLAIN_RL_THREADS");
    if (!raw) return 0;
    try {
        const int v = std::stoi(raw);
        return v > 0 ? v : 0;
    } catch (const std::exception&) {
        return 0;
    }
}

std::vector<xrl::Method> parse_methods_arg(const std::string& arg) {
    if (arg.empty()) return {};
    return xrl::methods_from_string(arg);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"goal-driven success-probability explanations for tabular agents"};
    app.require_subcommand(1);

    // train
    std::string config_path, out_dir;
    auto* train = app.add_subcommand("train", "run a training experiment and write its artifacts");
    train->add_option("config", config_path, "key=value config file")->required();
    train->add_option("out_dir", out_dir, "output directory for the run artifacts")->required();

    // analyze
    std::vector<std::string> run_dirs;
    std::string analyze_out;
    bool per_agent_mse = false;
    bool no_svg = false;
    auto* analyze = app.add_subcommand("analyze", "compute MSE/correlation reports and charts");
    analyze->add_option("run_dir", run_dirs, "completed run directories")->required();
    analyze->add_option("--out", analyze_out, "output directory (default: first run dir)");
    analyze->add_flag("--per-agent-mse", per_agent_mse, "also compute MSE per agent before averaging");
    analyze->add_flag("--no-svg", no_svg, "skip SVG chart output");

    // explain
    std::string explain_dir, explain_kind, state_name, action_name, methods_arg;
    bool as_json = false;
    auto* explain = app.add_subcommand("explain", "answer why / why_not / compare for a state");
    explain->add_option("run_dir", explain_dir, "completed run directory")->required();
    explain->add_option("kind", explain_kind, "why, why_not or compare")->required();
    explain->add_option("state", state_name, "state name, e.g. s1")->required();
    explain->add_option("action", action_name, "action name, e.g. a_R (why/why_not only)");
    explain->add_option("--methods", methods_arg, "comma list of methods to quote");
    explain->add_flag("--json", as_json, "emit JSON instead of plain text");

    // report
    std::vector<std::string> report_dirs;
    auto* report = app.add_subcommand("report", "print the analysis report without writing files");
    report->add_option("run_dir", report_dirs, "completed run directories")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*train) {
            const xrl::RunManifest manifest = xrl::cmd_train(config_path, out_dir, thread_cap_from_env());
            std::cout << "run complete in " << manifest.duration_seconds << " s (version "
                      << manifest.version << ")\n";
            for (const auto& p : manifest.artifact_paths) std::cout << "  " << p << "\n";
        } else if (*analyze) {
            xrl::AnalyzeOptions options;
            options.per_agent_mse = per_agent_mse;
            options.write_svg = !no_svg;
            const auto written = xrl::cmd_analyze(run_dirs, analyze_out, options);
            for (const auto& p : written) std::cout << "  " << p << "\n";
        } else if (*explain) {
            const auto methods = parse_methods_arg(methods_arg);
            const xrl::Explanation ex =
                xrl::cmd_explain(explain_dir, explain_kind, state_name, action_name, methods);
            if (as_json) {
                const auto summary = xrl::harness_detail::load_json(
                    (std::filesystem::path(explain_dir) / "summary.json").string());
                const auto cfg = xrl::harness_detail::config_from_json(summary.at("config"));
                xrl::ExplanationQuery query;
                query.kind = xrl::harness_detail::query_kind_from(explain_kind);
                query.state = xrl::harness_detail::parse_state_name(state_name, cfg.env);
                if (query.kind != xrl::QueryKind::compare)
                    query.action = xrl::harness_detail::parse_action_name(action_name, cfg.env);
                std::cout << xrl::explanation_to_json(ex, query, cfg.env).dump(2) << "\n";
            } else {
                std::cout << ex.text << "\n";
            }
        } else if (*report) {
            std::cout << xrl::cmd_report(report_dirs);
        }
    } catch (const xrl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const xrl::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const xrl::DataMismatchError& e) {
        std::cerr << "data mismatch: " << e.what() << "\n";
        return kExitDataMismatch;
    }
    return 0;
}
