#include "spotter/rl.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace spotter {

void q_update(TabularLearner &learner, StateId s, PrimitiveAction a, double reward,
              StateId s_next) {
    double bootstrap = greedy_value(learner, s_next);
    QRow &row = learner.q[s]; // creates a zero row on first touch
    double &entry = row[static_cast<int>(a)];
    entry += learner.alpha * (reward + learner.gamma * bootstrap - entry);
    learner.visited.insert(s);
    learner.visited.insert(s_next);
}

double greedy_value(const TabularLearner &learner, StateId s) {
    auto it = learner.q.find(s);
    if (it == learner.q.end())
        return 0.0;
    return *std::max_element(it->second.begin(), it->second.end());
}

PrimitiveAction greedy_action(const QTable &q, StateId s) {
    auto it = q.find(s);
    if (it == q.end())
        return static_cast<PrimitiveAction>(0);
    const QRow &row = it->second;
    int best = 0;
    for (int a = 1; a < kNumActions; ++a)
        if (row[a] > row[best])
            best = a;
    return static_cast<PrimitiveAction>(best);
}

PrimitiveAction select_action(const TabularLearner &learner, StateId s, double eps,
                              Rng &rng) {
    if (rng.next_real() < eps)
        return static_cast<PrimitiveAction>(rng.next_below(kNumActions));
    return greedy_action(learner.q, s);
}

double epsilon(const EpsSchedule &schedule, int t) {
    double lambda = -std::log(0.01) / static_cast<double>(schedule.horizon);
    return schedule.eps_min +
           (schedule.eps_max - schedule.eps_min) * std::exp(-lambda * t);
}

namespace {

std::string literal_token(const Literal &lit) {
    std::string out = lit.positive ? "+" : "-";
    out += lit.fluent.predicate;
    for (const std::string &arg : lit.fluent.args) {
        out += ",";
        out += arg;
    }
    return out;
}

Literal parse_literal_token(const std::string &token) {
    if (token.size() < 2 || (token[0] != '+' && token[0] != '-'))
        throw std::runtime_error("bad literal token '" + token + "'");
    bool positive = token[0] == '+';
    std::vector<std::string> parts;
    std::string current;
    for (std::size_t i = 1; i <= token.size(); ++i) {
        if (i == token.size() || token[i] == ',') {
            parts.push_back(current);
            current.clear();
        } else {
            current += token[i];
        }
    }
    std::string predicate = parts.front();
    parts.erase(parts.begin());
    return Literal(Fluent(predicate, parts), positive);
}

} // namespace

void save_qtable(const TabularLearner &learner, const StateKeyInterner &interner,
                 const std::string &path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write q-table to " + path);
    char buffer[64];

    out << "qtable 1\n";
    std::snprintf(buffer, sizeof buffer, "%.17g", learner.alpha);
    out << "alpha " << buffer << "\n";
    std::snprintf(buffer, sizeof buffer, "%.17g", learner.gamma);
    out << "gamma " << buffer << "\n";
    if (learner.subgoal) {
        out << "subgoal";
        for (const Literal &lit : learner.subgoal->literals())
            out << " " << literal_token(lit);
        out << "\n";
    } else {
        out << "subgoal none\n";
    }

    std::vector<std::string> visited;
    visited.reserve(learner.visited.size());
    for (StateId id : learner.visited)
        visited.push_back(interner.key(id));
    std::sort(visited.begin(), visited.end());
    out << "visited " << visited.size() << "\n";
    for (const std::string &key : visited)
        out << key << "\n";

    std::vector<std::pair<std::string, const QRow *>> entries;
    entries.reserve(learner.q.size());
    for (const auto &[id, row] : learner.q)
        entries.emplace_back(interner.key(id), &row);
    std::sort(entries.begin(), entries.end());
    out << "entries " << entries.size() << "\n";
    for (const auto &[key, row] : entries) {
        out << key;
        for (double v : *row) {
            std::snprintf(buffer, sizeof buffer, "%.17g", v);
            out << "\t" << buffer;
        }
        out << "\n";
    }
}

LoadedQTable load_qtable(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot read q-table from " + path);
    LoadedQTable loaded;

    std::string line, word;
    std::getline(in, line);
    if (line != "qtable 1")
        throw std::runtime_error(path + ": not a q-table file");

    in >> word >> loaded.alpha;
    in >> word >> loaded.gamma;
    in >> word; // "subgoal"
    std::getline(in, line);
    {
        std::istringstream tokens(line);
        std::vector<Literal> lits;
        bool none = false;
        while (tokens >> word) {
            if (word == "none") {
                none = true;
                break;
            }
            lits.push_back(parse_literal_token(word));
        }
        if (!none && !lits.empty())
            loaded.subgoal = PartialFluentState(lits);
    }

    std::size_t count = 0;
    in >> word >> count;
    std::getline(in, line);
    for (std::size_t i = 0; i < count; ++i) {
        std::getline(in, line);
        loaded.visited.push_back(line);
    }

    in >> word >> count;
    std::getline(in, line);
    for (std::size_t i = 0; i < count; ++i) {
        std::getline(in, line);
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error(path + ": malformed q entry");
        std::string key = line.substr(0, tab);
        QRow row{};
        std::istringstream values(line.substr(tab + 1));
        for (double &v : row)
            values >> v;
        loaded.entries.emplace_back(std::move(key), row);
    }
    return loaded;
}

} // namespace spotter
