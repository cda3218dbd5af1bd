#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "xrl/errors.hpp"
#include "xrl/experiment.hpp"

namespace xrl {

inline const char* env_kind_name(EnvKind e) {
    return e == EnvKind::navigation ? "navigation" : "sorting";
}

inline EnvKind env_kind_from(const std::string& s, int line = 0) {
    if (s == "navigation" || s == "nav") return EnvKind::navigation;
    if (s == "sorting" || s == "sort") return EnvKind::sorting;
    throw ConfigError("unknown env '" + s + "' (expected navigation or sorting)", line);
}

inline const char* selection_name(SelectionKind s) {
    return s == SelectionKind::softmax ? "softmax" : "epsilon_greedy";
}

inline SelectionKind selection_from(const std::string& s, int line = 0) {
    if (s == "softmax") return SelectionKind::softmax;
    if (s == "epsilon_greedy") return SelectionKind::epsilon_greedy;
    throw ConfigError("unknown selection '" + s + "' (expected softmax or epsilon_greedy)", line);
}

inline const char* track_kind_name(TrackKind t) { return t == TrackKind::all ? "all" : "initial"; }

inline TrackKind track_kind_from(const std::string& s, int line = 0) {
    if (s == "all") return TrackKind::all;
    if (s == "initial") return TrackKind::initial;
    throw ConfigError("unknown track '" + s + "' (expected all or initial)", line);
}

inline Method method_from(const std::string& s, int line = 0) {
    if (s == "memory") return Method::memory;
    if (s == "learning") return Method::learning;
    if (s == "introspection") return Method::introspection;
    throw ConfigError("unknown method '" + s + "'", line);
}

inline std::string methods_to_string(const std::vector<Method>& methods) {
    std::string out;
    for (std::size_t i = 0; i < methods.size(); ++i) {
        if (i > 0) out += ",";
        out += method_name(methods[i]);
    }
    return out;
}

inline std::vector<Method> methods_from_string(const std::string& s, int line = 0) {
    std::vector<Method> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        const Method m = method_from(item, line);
        bool seen = false;
        for (Method have : out) seen = seen || have == m;
        if (!seen) out.push_back(m);
    }
    if (out.empty()) throw ConfigError("methods list is empty", line);
    return out;
}

namespace detail {

inline std::string trim(std::string_view v) {
    std::size_t b = 0, e = v.size();
    while (b < e && std::isspace(static_cast<unsigned char>(v[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(v[e - 1]))) --e;
    return std::string(v.substr(b, e - b));
}

inline double parse_double(const std::string& value, const std::string& key, int line) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return d;
    } catch (const std::exception&) {
        throw ConfigError("value of '" + key + "' is not a number: '" + value + "'", line);
    }
}

inline long long parse_int(const std::string& value, const std::string& key, int line) {
    try {
        std::size_t pos = 0;
        const long long d = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return d;
    } catch (const std::exception&) {
        throw ConfigError("value of '" + key + "' is not an integer: '" + value + "'", line);
    }
}

}  // namespace detail

/// Parses the flat key=value run configuration. Blank lines and lines
/// starting with '#' are ignored; unknown keys and malformed values are
/// reported with their line number. The parsed config is validated.
inline ExperimentConfig parse_config_text(const std::string& content) {
    ExperimentConfig cfg;
    std::istringstream in(content);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string sline = detail::trim(raw);
        if (sline.empty() || sline[0] == '#') continue;
        const auto eq = sline.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key=value, got '" + sline + "'", line_no);
        const std::string key = detail::trim(sline.substr(0, eq));
        const std::string value = detail::trim(sline.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key", line_no);

        if (key == "env") cfg.env = env_kind_from(value, line_no);
        else if (key == "alpha") cfg.alpha = detail::parse_double(value, key, line_no);
        else if (key == "gamma") cfg.gamma = detail::parse_double(value, key, line_no);
        else if (key == "tau") cfg.tau = detail::parse_double(value, key, line_no);
        else if (key == "epsilon") cfg.epsilon_start = detail::parse_double(value, key, line_no);
        else if (key == "epsilon_decay") cfg.epsilon_decay = detail::parse_double(value, key, line_no);
        else if (key == "sigma") cfg.sigma = detail::parse_double(value, key, line_no);
        else if (key == "episodes") cfg.episodes = static_cast<int>(detail::parse_int(value, key, line_no));
        else if (key == "agents") cfg.agents = static_cast<int>(detail::parse_int(value, key, line_no));
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(detail::parse_int(value, key, line_no));
        else if (key == "selection") cfg.selection = selection_from(value, line_no);
        else if (key == "step_cap") cfg.step_cap = static_cast<int>(detail::parse_int(value, key, line_no));
        else if (key == "methods") cfg.methods = methods_from_string(value, line_no);
        else if (key == "track") cfg.track = track_kind_from(value, line_no);
        else throw ConfigError("unknown key '" + key + "'", line_no);
    }
    cfg.validate();
    return cfg;
}

inline ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

/// Diff-friendly echo of a config, parseable back by parse_config_text.
inline std::string config_to_text(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    out << "env=" << env_kind_name(cfg.env) << "\n"
        << "alpha=" << cfg.alpha << "\n"
        << "gamma=" << cfg.gamma << "\n"
        << "tau=" << cfg.tau << "\n"
        << "epsilon=" << cfg.epsilon_start << "\n"
        << "epsilon_decay=" << cfg.epsilon_decay << "\n"
        << "sigma=" << cfg.sigma << "\n"
        << "episodes=" << cfg.episodes << "\n"
        << "agents=" << cfg.agents << "\n"
        << "seed=" << cfg.seed << "\n"
        << "selection=" << selection_name(cfg.selection) << "\n"
        << "step_cap=" << cfg.effective_step_cap() << "\n"
        << "methods=" << methods_to_string(cfg.methods) << "\n"
        << "track=" << track_kind_name(cfg.effective_track()) << "\n";
    return out.str();
}

}  // namespace xrl
