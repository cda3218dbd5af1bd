#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "xrl/analysis.hpp"
#include "xrl/errors.hpp"
#include "xrl/experiment.hpp"

namespace xrl {

namespace detail {

inline std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace detail

/// traces.csv: one row per (agent, episode, state, action, method) sample.
/// Probability methods stay within [0,1]; "q" rows carry raw action values.
inline void write_traces_csv(const std::string& path, const ExperimentResult& result) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << "agent,episode,state,action,method,value\n";
    for (std::size_t agent = 0; agent < result.agents.size(); ++agent)
        for (const auto& trace : result.agents[agent].traces)
            for (std::size_t ep = 0; ep < trace.values.size(); ++ep)
                out << agent << ',' << ep << ',' << trace.state << ',' << trace.action << ','
                    << trace.method << ',' << detail::format_value(trace.values[ep]) << '\n';
    if (!out) throw IoError("failed while writing " + path);
}

/// Parsed traces file: per (method, state, action), one series per agent.
struct TracesFile {
    int agents = 0;
    int episodes = 0;
    std::map<std::tuple<std::string, int, int>, std::vector<Series>> per_agent;

    const std::vector<Series>& series_for(const std::string& method, int state, ActionId action) const {
        const auto it = per_agent.find({method, state, action});
        if (it == per_agent.end())
            throw DataMismatchError("traces file lacks method=" + method + " state=" +
                                    std::to_string(state) + " action=" + std::to_string(action));
        return it->second;
    }

    bool has(const std::string& method, int state, ActionId action) const {
        return per_agent.count({method, state, action}) > 0;
    }
};

inline TracesFile read_traces_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataMismatchError(path + ": empty file");
    if (line == "agent,episode,state,action,method,value\r")
        line.pop_back();
    if (line != "agent,episode,state,action,method,value")
        throw DataMismatchError(path + ": unexpected header '" + line + "'");

    TracesFile file;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string field;
        int agent, episode, state, action;
        std::string method;
        double value;
        try {
            std::getline(row, field, ',');
            agent = std::stoi(field);
            std::getline(row, field, ',');
            episode = std::stoi(field);
            std::getline(row, field, ',');
            state = std::stoi(field);
            std::getline(row, field, ',');
            action = std::stoi(field);
            std::getline(row, method, ',');
            std::getline(row, field, ',');
            value = std::stod(field);
        } catch (const std::exception&) {
            throw DataMismatchError(path + ": malformed row at line " + std::to_string(line_no));
        }
        auto& agents_series = file.per_agent[{method, state, action}];
        if (agent >= static_cast<int>(agents_series.size()))
            agents_series.resize(static_cast<std::size_t>(agent) + 1);
        if (episode != static_cast<int>(agents_series[static_cast<std::size_t>(agent)].size()))
            throw DataMismatchError(path + ": episodes out of order at line " + std::to_string(line_no));
        agents_series[static_cast<std::size_t>(agent)].push_back(value);
        file.agents = std::max(file.agents, agent + 1);
        file.episodes = std::max(file.episodes, episode + 1);
    }

    for (const auto& [key, series] : file.per_agent) {
        if (static_cast<int>(series.size()) != file.agents)
            throw DataMismatchError(path + ": agent count differs between traces");
        for (const auto& s : series)
            if (static_cast<int>(s.size()) != file.episodes)
                throw DataMismatchError(path + ": episode count differs between traces");
    }
    return file;
}

/// State x action table as CSV: one row per state, one column per action.
inline void write_table_csv(const std::string& path, const StateActionTable& table,
                            const std::vector<std::string>& action_labels,
                            std::string (*state_label)(int)) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << "state";
    for (const auto& a : action_labels) out << ',' << a;
    out << '\n';
    for (int s = 0; s < table.state_count(); ++s) {
        out << state_label(s);
        for (ActionId a = 0; a < table.action_count(); ++a)
            out << ',' << detail::format_value(table.at(s, a));
        out << '\n';
    }
    if (!out) throw IoError("failed while writing " + path);
}

}  // namespace xrl
