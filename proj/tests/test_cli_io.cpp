#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "xrl/xrl.hpp"

using namespace xrl;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "xrl_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string write_config(const fs::path& dir, const std::string& content) {
    const fs::path path = dir / "run.cfg";
    std::ofstream out(path);
    out << content;
    return path.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("config parsing") {
    SUBCASE("full key set with comments") {
        const ExperimentConfig cfg = parse_config_text(
            "# nav run\n"
            "env = navigation\n"
            "alpha=0.3\n"
            "gamma=0.9\n"
            "tau=0.25\n"
            "sigma=0.1\n"
            "episodes=300\n"
            "agents=20\n"
            "seed=42\n"
            "selection=softmax\n"
            "methods=memory,learning,introspection\n"
            "\n");
        CHECK(cfg.env == EnvKind::navigation);
        CHECK(cfg.sigma == 0.1);
        CHECK(cfg.seed == 42);
        CHECK(cfg.effective_step_cap() == 500);
        CHECK(cfg.effective_track() == TrackKind::all);
        CHECK(cfg.methods.size() == 3);
    }

    SUBCASE("sorting defaults") {
        const ExperimentConfig cfg = parse_config_text("env=sorting\nselection=epsilon_greedy\n");
        CHECK(cfg.effective_step_cap() == 100);
        CHECK(cfg.effective_track() == TrackKind::initial);
    }

    SUBCASE("diagnostics carry the line number") {
        try {
            parse_config_text("env=navigation\nbogus_key=1\n");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(e.line() == 2);
            CHECK(std::string(e.what()).find("bogus_key") != std::string::npos);
        }
        CHECK_THROWS_AS(parse_config_text("alpha=fast\n"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("no equals sign\n"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("env=mars\n"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("agents=0\n"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("methods=\n"), ConfigError);
    }

    SUBCASE("canonical text round-trips") {
        ExperimentConfig cfg;
        cfg.sigma = 0.1;
        cfg.seed = 9001;
        cfg.methods = {Method::memory, Method::introspection};
        const std::string text = config_to_text(cfg);
        const ExperimentConfig back = parse_config_text(text);
        CHECK(config_to_text(back) == text);
    }

    SUBCASE("missing file is an io error") {
        CHECK_THROWS_AS(load_config_file("/nonexistent/path.cfg"), IoError);
    }
}

TEST_CASE("train writes the artifact set and a faithful summary") {
    const fs::path dir = fresh_dir("train");
    const std::string cfg_path = write_config(
        dir, "env=navigation\nepisodes=40\nagents=3\nseed=5\nsigma=0.1\n");
    const RunManifest manifest = cmd_train(cfg_path, (dir / "run").string());

    REQUIRE(manifest.artifact_paths.size() == 4);
    for (const auto& p : manifest.artifact_paths) CHECK(fs::exists(p));
    CHECK(fs::exists(dir / "run" / "traces.csv"));
    CHECK(fs::exists(dir / "run" / "qtable.csv"));
    CHECK(fs::exists(dir / "run" / "ptable.csv"));
    CHECK(fs::exists(dir / "run" / "summary.json"));

    SUBCASE("summary.json reconstructs the exact configuration") {
        const auto summary = harness_detail::load_json((dir / "run" / "summary.json").string());
        const ExperimentConfig cfg = harness_detail::config_from_json(summary.at("config"));
        CHECK(cfg.env == EnvKind::navigation);
        CHECK(cfg.episodes == 40);
        CHECK(cfg.agents == 3);
        CHECK(cfg.seed == 5);
        CHECK(cfg.sigma == 0.1);
        CHECK(cfg.alpha == 0.3);
        CHECK(config_to_text(cfg) == config_to_text(parse_config_text(slurp(cfg_path))));
        CHECK(summary.at("environment").at("transitions").contains("s0"));
    }

    SUBCASE("traces.csv has the documented schema and probability bounds") {
        std::ifstream in(dir / "run" / "traces.csv");
        std::string header;
        std::getline(in, header);
        CHECK(header == "agent,episode,state,action,method,value");
        const TracesFile traces = read_traces_csv((dir / "run" / "traces.csv").string());
        CHECK(traces.agents == 3);
        CHECK(traces.episodes == 40);
        CHECK(traces.has("memory", 0, 0));
        CHECK(traces.has("q", 0, 0));  // raw action values ship alongside
        for (const auto& [key, series] : traces.per_agent) {
            if (std::get<0>(key) == "q") continue;  // q rows are unconstrained
            for (const auto& s : series)
                for (double v : s) {
                    CHECK(v >= 0.0);
                    CHECK(v <= 1.0);
                }
        }
    }

    SUBCASE("ptable.csv is omitted when the learning method is disabled") {
        const std::string no_learning = write_config(
            dir, "env=navigation\nepisodes=5\nagents=1\nmethods=memory,introspection\n");
        const RunManifest m2 = cmd_train(no_learning, (dir / "run2").string());
        CHECK(m2.artifact_paths.size() == 3);
        CHECK_FALSE(fs::exists(dir / "run2" / "ptable.csv"));
    }
}

TEST_CASE("reruns of the same config and seed are byte-identical") {
    const fs::path dir = fresh_dir("rerun");
    const std::string cfg_path =
        write_config(dir, "env=navigation\nepisodes=30\nagents=2\nseed=77\nsigma=0.1\n");
    cmd_train(cfg_path, (dir / "a").string());
    cmd_train(cfg_path, (dir / "b").string());
    CHECK(slurp((dir / "a" / "traces.csv").string()) == slurp((dir / "b" / "traces.csv").string()));
    CHECK(slurp((dir / "a" / "qtable.csv").string()) == slurp((dir / "b" / "qtable.csv").string()));
}

TEST_CASE("analyze produces reports and catches misaligned runs") {
    const fs::path dir = fresh_dir("analyze");
    const std::string cfg_path =
        write_config(dir, "env=navigation\nepisodes=60\nagents=4\nseed=13\n");
    cmd_train(cfg_path, (dir / "run").string());

    SUBCASE("single run") {
        const auto written = cmd_analyze({(dir / "run").string()});
        CHECK(fs::exists(dir / "run" / "mse_table.csv"));
        CHECK(fs::exists(dir / "run" / "correlation_matrix.csv"));
        CHECK(fs::exists(dir / "run" / "report.txt"));
        int svg = 0;
        for (const auto& p : written) svg += p.size() > 4 && p.substr(p.size() - 4) == ".svg";
        CHECK(svg == 5);  // memory, learning, introspection, noisy, q

        const std::string mse_csv = slurp((dir / "run" / "mse_table.csv").string());
        CHECK(mse_csv.find("run,method,a_L,a_R,a_S") == 0);
        CHECK(mse_csv.find("learning") != std::string::npos);
        CHECK(mse_csv.find("noisy") != std::string::npos);

        const std::string report = slurp((dir / "run" / "report.txt").string());
        CHECK(report.find("MSE against the memory-based baseline") != std::string::npos);
        CHECK(report.find("Lm") != std::string::npos);
    }

    SUBCASE("per-agent MSE variant behind its flag") {
        AnalyzeOptions options;
        options.per_agent_mse = true;
        options.write_svg = false;
        cmd_analyze({(dir / "run").string()}, (dir / "out").string(), options);
        CHECK(fs::exists(dir / "out" / "mse_table_per_agent.csv"));
    }

    SUBCASE("episode-count mismatch is an explicit alignment error") {
        const std::string other =
            write_config(dir, "env=navigation\nepisodes=61\nagents=4\nseed=13\n");
        cmd_train(other, (dir / "run_other").string());
        CHECK_THROWS_AS(cmd_analyze({(dir / "run").string(), (dir / "run_other").string()},
                                    (dir / "out2").string()),
                        DataMismatchError);
    }

    SUBCASE("missing run directory is an io error") {
        CHECK_THROWS_AS(cmd_analyze({(dir / "missing").string()}), IoError);
    }

    SUBCASE("report renders without writing") {
        const std::string text = cmd_report({(dir / "run").string()});
        CHECK(text.find("run: run") != std::string::npos);
        CHECK(text.find("Pearson correlation") != std::string::npos);
    }
}

TEST_CASE("single-method runs restrict the correlation matrix") {
    const fs::path dir = fresh_dir("single_method");
    const std::string cfg_path = write_config(
        dir, "env=navigation\nepisodes=40\nagents=2\nseed=3\nmethods=introspection\n");
    cmd_train(cfg_path, (dir / "run").string());
    AnalyzeOptions options;
    options.write_svg = false;
    cmd_analyze({(dir / "run").string()}, "", options);
    const std::string corr = slurp((dir / "run" / "correlation_matrix.csv").string());
    CHECK(corr.find("Lp") != std::string::npos);
    CHECK(corr.find("Lm") == std::string::npos);  // no memory traces in this run
    CHECK(corr.find("Ln") == std::string::npos);  // noisy control needs the baseline
}

TEST_CASE("explain answers from stored artifacts") {
    const fs::path dir = fresh_dir("explain");
    const std::string cfg_path =
        write_config(dir, "env=navigation\nepisodes=120\nagents=4\nseed=19\nsigma=0.1\n");
    cmd_train(cfg_path, (dir / "run").string());
    const std::string run = (dir / "run").string();

    SUBCASE("why produces the sentence with one value per method") {
        const Explanation ex = cmd_explain(run, "why", "s1", "a_R");
        CHECK(ex.text.find("In state s1, I chose to move to the right") != std::string::npos);
        CHECK(ex.cited.size() == 3);
    }

    SUBCASE("why_not produces the counterfactual") {
        const Explanation ex = cmd_explain(run, "why_not", "s1", "a_L");
        CHECK(ex.text.find("did not choose") != std::string::npos);
        CHECK(ex.text.find("compared to") != std::string::npos);
    }

    SUBCASE("compare lists the three actions") {
        const Explanation ex = cmd_explain(run, "compare", "s0");
        CHECK(ex.cited.size() == 3);
        CHECK(ex.text.find("probabilities of success are") != std::string::npos);
    }

    SUBCASE("method restriction") {
        const Explanation ex = cmd_explain(run, "why", "s1", "a_R", {Method::introspection});
        CHECK(ex.cited.size() == 1);
        CHECK(ex.text.find("introspection-based") != std::string::npos);
    }

    SUBCASE("unknown names are config errors") {
        CHECK_THROWS_AS(cmd_explain(run, "why", "s9", "a_R"), ConfigError);
        CHECK_THROWS_AS(cmd_explain(run, "why", "s1", "a_Q"), ConfigError);
        CHECK_THROWS_AS(cmd_explain(run, "how", "s1", "a_R"), ConfigError);
        CHECK_THROWS_AS(cmd_explain(run, "why", "s1"), ConfigError);
        CHECK_THROWS_AS(cmd_explain(run, "compare", "s1", "a_R"), ConfigError);
    }

    SUBCASE("json rendering carries the cited values") {
        const Explanation ex = cmd_explain(run, "why", "s1", "a_R");
        ExplanationQuery query;
        query.kind = QueryKind::why;
        query.state = 1;
        query.action = nav::kRight;
        const auto j = explanation_to_json(ex, query, EnvKind::navigation);
        CHECK(j.at("query").at("kind") == "why");
        CHECK(j.at("cited_probabilities").size() == ex.cited.size());
        CHECK(j.at("text") == ex.text);
    }
}
