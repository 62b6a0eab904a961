#include "detkit/fsa.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace detkit {

int Fsa::state_index(const std::string& name) const {
    for (int i = 0; i < num_states(); ++i)
        if (states[i] == name) return i;
    return -1;
}

int Fsa::event_index(const std::string& name) const {
    for (int i = 0; i < num_events(); ++i)
        if (events[i].name == name) return i;
    return -1;
}

std::vector<std::string> Fsa::alphabet() const {
    std::set<std::string> symbols(extra_alphabet.begin(), extra_alphabet.end());
    for (const Event& e : events)
        if (e.observable()) symbols.insert(e.label);
    return {symbols.begin(), symbols.end()};
}

bool Fsa::has_symbol(const std::string& symbol) const {
    if (symbol.empty()) return false;
    for (const Event& e : events)
        if (e.label == symbol) return true;
    return std::find(extra_alphabet.begin(), extra_alphabet.end(), symbol) != extra_alphabet.end();
}

void Fsa::normalize() {
    std::sort(initial.begin(), initial.end());
    initial.erase(std::unique(initial.begin(), initial.end()), initial.end());
    std::sort(transitions.begin(), transitions.end());
    transitions.erase(std::unique(transitions.begin(), transitions.end()), transitions.end());
}

void Fsa::validate() const {
    std::set<std::string> seen;
    for (const std::string& s : states)
        if (!seen.insert(s).second) throw ModelError("duplicate state '" + s + "'");
    seen.clear();
    for (const Event& e : events)
        if (!seen.insert(e.name).second) throw ModelError("duplicate event '" + e.name + "'");
    for (int s : initial)
        if (s < 0 || s >= num_states()) throw ModelError("initial state index out of range");
    for (const Transition& t : transitions) {
        if (t.src < 0 || t.src >= num_states() || t.dst < 0 || t.dst >= num_states())
            throw ModelError("transition endpoint out of range");
        if (t.event < 0 || t.event >= num_events())
            throw ModelError("transition event out of range");
    }
    if (!std::is_sorted(initial.begin(), initial.end()))
        throw ModelError("initial set not normalized");
    if (std::adjacent_find(transitions.begin(), transitions.end()) != transitions.end())
        throw ModelError("duplicate transition");
}

Fsa remove_transitions(const Fsa& a, const std::vector<Transition>& disabled) {
    Fsa out = a;
    std::set<Transition> gone(disabled.begin(), disabled.end());
    std::erase_if(out.transitions, [&](const Transition& t) { return gone.count(t) > 0; });
    return out;
}

std::vector<Transition> controllable_transitions(const Fsa& a) {
    std::vector<Transition> out;
    for (const Transition& t : a.transitions)
        if (a.events[t.event].controllable) out.push_back(t);
    return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::vector<int>> successor_lists(const Fsa& a) {
    std::vector<std::vector<int>> succ(a.num_states());
    for (const Transition& t : a.transitions) succ[t.src].push_back(t.dst);
    return succ;
}

}  // namespace

std::vector<char> reachable_mask(const Fsa& a) {
    std::vector<char> seen(a.num_states(), 0);
    std::vector<int> stack;
    for (int s : a.initial) {
        if (!seen[s]) {
            seen[s] = 1;
            stack.push_back(s);
        }
    }
    auto succ = successor_lists(a);
    while (!stack.empty()) {
        int x = stack.back();
        stack.pop_back();
        for (int y : succ[x]) {
            if (!seen[y]) {
                seen[y] = 1;
                stack.push_back(y);
            }
        }
    }
    return seen;
}

Fsa accessible_part(const Fsa& a) {
    std::vector<char> keep = reachable_mask(a);
    std::vector<int> remap(a.num_states(), -1);
    Fsa out;
    out.events = a.events;
    out.extra_alphabet = a.extra_alphabet;
    for (int i = 0; i < a.num_states(); ++i) {
        if (keep[i]) {
            remap[i] = out.num_states();
            out.states.push_back(a.states[i]);
        }
    }
    for (int s : a.initial) out.initial.push_back(remap[s]);
    for (const Transition& t : a.transitions)
        if (keep[t.src] && keep[t.dst]) out.transitions.push_back({remap[t.src], t.event, remap[t.dst]});
    out.normalize();
    return out;
}

SccDecomposition scc_decomposition(const Fsa& a) {
    const int n = a.num_states();
    auto succ = successor_lists(a);

    // iterative Tarjan
    SccDecomposition out;
    out.component_of.assign(n, -1);
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<char> on_stack(n, 0);
    std::vector<int> stack;
    int next_index = 0;

    struct Frame {
        int v;
        size_t child;
    };
    for (int root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        std::vector<Frame> call{{root, 0}};
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!call.empty()) {
            Frame& f = call.back();
            if (f.child < succ[f.v].size()) {
                int w = succ[f.v][f.child++];
                if (index[w] == -1) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
            } else {
                if (low[f.v] == index[f.v]) {
                    std::vector<int> comp;
                    int w;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        on_stack[w] = 0;
                        out.component_of[w] = static_cast<int>(out.components.size());
                        comp.push_back(w);
                    } while (w != f.v);
                    std::sort(comp.begin(), comp.end());
                    out.components.push_back(std::move(comp));
                }
                int v = f.v;
                call.pop_back();
                if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
            }
        }
    }

    std::set<std::pair<int, int>> dag;
    for (const Transition& t : a.transitions) {
        int cs = out.component_of[t.src], cd = out.component_of[t.dst];
        if (cs != cd) dag.insert({cs, cd});
    }
    out.dag_edges.assign(dag.begin(), dag.end());
    return out;
}

std::vector<int> states_in_observable_cycles(const Fsa& a) {
    std::vector<char> reach = reachable_mask(a);
    SccDecomposition scc = scc_decomposition(a);
    std::vector<char> obs_comp(scc.components.size(), 0);
    for (const Transition& t : a.transitions) {
        if (!reach[t.src] || !reach[t.dst]) continue;
        if (scc.component_of[t.src] == scc.component_of[t.dst] && a.events[t.event].observable())
            obs_comp[scc.component_of[t.src]] = 1;
    }
    std::vector<int> out;
    for (int s = 0; s < a.num_states(); ++s)
        if (reach[s] && obs_comp[scc.component_of[s]]) out.push_back(s);
    return out;
}

Assumption1Report check_assumption1(const Fsa& a) {
    std::vector<char> reach = reachable_mask(a);
    Assumption1Report report;

    std::vector<char> has_out(a.num_states(), 0);
    for (const Transition& t : a.transitions) has_out[t.src] = 1;
    report.deadlock_free = true;
    for (int s = 0; s < a.num_states(); ++s)
        if (reach[s] && !has_out[s]) report.deadlock_free = false;

    // prompt: no reachable state lies on a cycle of unobservable transitions
    Fsa eps_only = a;
    std::erase_if(eps_only.transitions,
                  [&](const Transition& t) { return a.events[t.event].observable(); });
    SccDecomposition scc = scc_decomposition(eps_only);
    std::vector<char> cyclic(scc.components.size(), 0);
    for (const Transition& t : eps_only.transitions)
        if (scc.component_of[t.src] == scc.component_of[t.dst]) cyclic[scc.component_of[t.src]] = 1;
    report.prompt = true;
    for (int s = 0; s < a.num_states(); ++s)
        if (reach[s] && cyclic[scc.component_of[s]]) report.prompt = false;
    return report;
}

}  // namespace detkit
