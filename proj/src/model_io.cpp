#include "detkit/model_io.hpp"

#include <array>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace detkit {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::string strip_comment(const std::string& line) {
    auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

struct Builder {
    std::vector<std::string> states;
    std::map<std::string, int> state_ids;
    std::vector<Event> events;
    std::map<std::string, int> event_ids;
    std::vector<std::string> initial_names;
    std::vector<std::string> controllable_names;
    std::vector<std::string> faulty_names;
    std::vector<std::array<std::string, 3>> trans;
    std::vector<std::string> alphabet_extra;
    bool saw_initial = false;

    void add_state(const std::string& name, int line) {
        if (state_ids.count(name)) throw ParseError(line, "duplicate state '" + name + "'");
        state_ids[name] = static_cast<int>(states.size());
        states.push_back(name);
    }

    void add_event(const std::string& decl, int line) {
        auto colon = decl.find(':');
        if (colon == std::string::npos || colon == 0 || colon + 1 == decl.size())
            throw ParseError(line, "event must be written name:label, got '" + decl + "'");
        std::string name = decl.substr(0, colon);
        std::string label = decl.substr(colon + 1);
        if (event_ids.count(name)) throw ParseError(line, "duplicate event '" + name + "'");
        Event e;
        e.name = name;
        e.label = (label == kEpsilonSpelling) ? "" : label;
        event_ids[name] = static_cast<int>(events.size());
        events.push_back(std::move(e));
    }

    ParsedModel finish() {
        ParsedModel out;
        out.fsa.states = states;
        out.fsa.events = events;
        for (const std::string& name : controllable_names) {
            auto it = event_ids.find(name);
            if (it == event_ids.end()) throw ModelError("undeclared event '" + name + "' in controllable:");
            out.fsa.events[it->second].controllable = true;
        }
        for (const std::string& name : faulty_names) {
            auto it = event_ids.find(name);
            if (it == event_ids.end()) throw ModelError("undeclared event '" + name + "' in faulty:");
            out.fsa.events[it->second].faulty = true;
        }
        for (const std::string& name : initial_names) {
            auto it = state_ids.find(name);
            if (it == state_ids.end()) throw ModelError("undeclared state '" + name + "'");
            out.fsa.initial.push_back(it->second);
        }
        for (const auto& [src, ev, dst] : trans) {
            auto s = state_ids.find(src);
            if (s == state_ids.end()) throw ModelError("undeclared state '" + src + "'");
            auto e = event_ids.find(ev);
            if (e == event_ids.end()) throw ModelError("undeclared event '" + ev + "'");
            auto d = state_ids.find(dst);
            if (d == state_ids.end()) throw ModelError("undeclared state '" + dst + "'");
            out.fsa.transitions.push_back({s->second, e->second, d->second});
        }
        std::set<std::string> used;
        for (const Event& e : out.fsa.events)
            if (e.observable()) used.insert(e.label);
        for (const std::string& sym : alphabet_extra)
            if (!used.count(sym)) out.fsa.extra_alphabet.push_back(sym);
        out.fsa.normalize();
        out.fsa.validate();
        if (out.fsa.initial.empty()) out.warnings.push_back("empty initial set");
        return out;
    }
};

}  // namespace

ParsedModel parse_model_text(const std::string& text) {
    Builder b;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = strip_comment(raw);
        auto tokens = tokenize(line);
        if (tokens.empty()) continue;
        std::string key = tokens.front();
        if (key.back() != ':')
            throw ParseError(lineno, "expected a 'key:' directive, got '" + key + "'");
        key.pop_back();
        std::vector<std::string> args(tokens.begin() + 1, tokens.end());
        try {
            if (key == "states") {
                for (const auto& s : args) b.add_state(s, lineno);
            } else if (key == "initial") {
                b.saw_initial = true;
                b.initial_names.insert(b.initial_names.end(), args.begin(), args.end());
            } else if (key == "events") {
                for (const auto& e : args) b.add_event(e, lineno);
            } else if (key == "controllable") {
                b.controllable_names.insert(b.controllable_names.end(), args.begin(), args.end());
            } else if (key == "faulty") {
                b.faulty_names.insert(b.faulty_names.end(), args.begin(), args.end());
            } else if (key == "alphabet") {
                b.alphabet_extra.insert(b.alphabet_extra.end(), args.begin(), args.end());
            } else if (key == "trans") {
                if (args.size() != 3)
                    throw ParseError(lineno, "trans expects 'src event dst'");
                b.trans.push_back({args[0], args[1], args[2]});
            } else {
                throw ParseError(lineno, "unknown directive '" + key + ":'");
            }
        } catch (const ParseError&) {
            throw;
        } catch (const ModelError& err) {
            throw ParseError(lineno, err.what());
        }
    }
    return b.finish();
}

ParsedModel parse_model_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& err) {
        throw ParseError(1, std::string("invalid JSON: ") + err.what());
    }
    Builder b;
    auto list = [&](const char* key) {
        std::vector<std::string> out;
        if (!j.contains(key)) return out;
        for (const auto& item : j.at(key)) out.push_back(item.get<std::string>());
        return out;
    };
    try {
        for (const auto& s : list("states")) b.add_state(s, 1);
        for (const auto& e : list("events")) b.add_event(e, 1);
        b.initial_names = list("initial");
        b.saw_initial = j.contains("initial");
        b.controllable_names = list("controllable");
        b.faulty_names = list("faulty");
        b.alphabet_extra = list("alphabet");
        if (j.contains("trans")) {
            for (const auto& item : j.at("trans")) {
                std::vector<std::string> parts;
                if (item.is_string())
                    parts = tokenize(item.get<std::string>());
                else
                    for (const auto& p : item) parts.push_back(p.get<std::string>());
                if (parts.size() != 3) throw ParseError(1, "trans entry expects 'src event dst'");
                b.trans.push_back({parts[0], parts[1], parts[2]});
            }
        }
    } catch (const nlohmann::json::exception& err) {
        throw ParseError(1, std::string("malformed model JSON: ") + err.what());
    }
    return b.finish();
}

ParsedModel parse_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    bool json = path.size() > 5 && path.compare(path.size() - 5, 5, ".json") == 0;
    return json ? parse_model_json(buf.str()) : parse_model_text(buf.str());
}

std::string serialize_model(const Fsa& a) {
    std::ostringstream out;
    out << "states:";
    for (const auto& s : a.states) out << ' ' << s;
    out << "\ninitial:";
    for (int s : a.initial) out << ' ' << a.states[s];
    out << "\nevents:";
    for (const Event& e : a.events)
        out << ' ' << e.name << ':' << (e.observable() ? e.label : kEpsilonSpelling);
    out << "\ncontrollable:";
    for (const Event& e : a.events)
        if (e.controllable) out << ' ' << e.name;
    out << "\nfaulty:";
    for (const Event& e : a.events)
        if (e.faulty) out << ' ' << e.name;
    if (!a.extra_alphabet.empty()) {
        out << "\nalphabet:";
        for (const auto& sym : a.extra_alphabet) out << ' ' << sym;
    }
    out << '\n';
    for (const Transition& t : a.transitions)
        out << "trans: " << a.states[t.src] << ' ' << a.events[t.event].name << ' '
            << a.states[t.dst] << '\n';
    return out.str();
}

std::string serialize_model_json(const Fsa& a) {
    nlohmann::json j;
    j["states"] = a.states;
    j["initial"] = nlohmann::json::array();
    for (int s : a.initial) j["initial"].push_back(a.states[s]);
    j["events"] = nlohmann::json::array();
    for (const Event& e : a.events)
        j["events"].push_back(e.name + ":" + (e.observable() ? e.label : kEpsilonSpelling));
    j["controllable"] = nlohmann::json::array();
    j["faulty"] = nlohmann::json::array();
    for (const Event& e : a.events) {
        if (e.controllable) j["controllable"].push_back(e.name);
        if (e.faulty) j["faulty"].push_back(e.name);
    }
    j["alphabet"] = a.extra_alphabet;
    j["trans"] = nlohmann::json::array();
    for (const Transition& t : a.transitions)
        j["trans"].push_back(a.states[t.src] + " " + a.events[t.event].name + " " + a.states[t.dst]);
    return j.dump(2);
}

namespace {

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

}  // namespace

std::string to_dot(const Fsa& a) {
    std::ostringstream out;
    out << "digraph fsa {\n  rankdir=LR;\n  node [shape=circle];\n";
    for (size_t i = 0; i < a.initial.size(); ++i)
        out << "  __init" << i << " [shape=point, style=invis];\n";
    for (int s = 0; s < a.num_states(); ++s)
        out << "  q" << s << " [label=\"" << dot_escape(a.states[s]) << "\"];\n";
    for (size_t i = 0; i < a.initial.size(); ++i)
        out << "  __init" << i << " -> q" << a.initial[i] << ";\n";
    for (const Transition& t : a.transitions) {
        const Event& e = a.events[t.event];
        out << "  q" << t.src << " -> q" << t.dst << " [label=\"" << dot_escape(e.name) << "("
            << dot_escape(e.observable() ? e.label : kEpsilonSpelling) << ")\"];\n";
    }
    out << "}\n";
    return out.str();
}

std::vector<std::pair<std::string, std::string>> parse_spec_pairs(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        auto tokens = tokenize(strip_comment(raw));
        if (tokens.empty()) continue;
        if (tokens.size() != 2) throw ParseError(lineno, "spec line expects two state names");
        out.emplace_back(tokens[0], tokens[1]);
    }
    return out;
}

}  // namespace detkit
