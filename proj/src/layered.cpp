#include "layered.hpp"

#include <queue>
#include <set>

namespace detkit::internal {

namespace {

void sort_unique(std::vector<int>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::vector<int> scc_of_edges(int n, const std::vector<std::pair<int, int>>& edges,
                              std::vector<std::vector<int>>& out_adj) {
    out_adj.assign(n, {});
    for (const auto& [u, v] : edges) out_adj[u].push_back(v);
    for (auto& row : out_adj) sort_unique(row);

    std::vector<int> comp(n, -1), index(n, -1), low(n, 0), stack;
    std::vector<char> on_stack(n, 0);
    int next_index = 0, comp_count = 0;
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
            if (f.child < out_adj[f.v].size()) {
                int w = out_adj[f.v][f.child++];
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
                    int w;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        on_stack[w] = 0;
                        comp[w] = comp_count;
                    } while (w != f.v);
                    ++comp_count;
                }
                int v = f.v;
                call.pop_back();
                if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
            }
        }
    }
    return comp;
}

}  // namespace

CcGraph::CcGraph(const ConcurrentComposition& comp) : cc(&comp), n(comp.num_states()) {
    std::map<std::pair<int, int>, char> has_obs;
    for (int i = 0; i < static_cast<int>(comp.transitions.size()); ++i) {
        const PairTransition& t = comp.transitions[i];
        std::pair<int, int> key{t.src, t.dst};
        if (comp.is_sync(t.event)) {
            has_obs[key] = 1;
            rep_obs.emplace(key, i);
        } else {
            has_obs.emplace(key, 0);
            rep_eps.emplace(key, i);
        }
    }
    obs_out.assign(n, {});
    obs_in.assign(n, {});
    eps_out.assign(n, {});
    eps_in.assign(n, {});
    any_out.assign(n, {});
    any_in.assign(n, {});
    std::vector<std::pair<int, int>> edges;
    for (const auto& [edge, obs] : has_obs) {
        auto [p, q] = edge;
        edges.push_back(edge);
        any_out[p].push_back(q);
        any_in[q].push_back(p);
        if (obs) {
            obs_out[p].push_back(q);
            obs_in[q].push_back(p);
        } else {
            eps_out[p].push_back(q);
            eps_in[q].push_back(p);
        }
    }
    for (auto* lists : {&obs_out, &obs_in, &eps_out, &eps_in, &any_out, &any_in})
        for (auto& row : *lists) sort_unique(row);

    std::vector<std::vector<int>> adj;
    scc_of = scc_of_edges(n, edges, adj);
    obs_cycle.assign(n, 0);
    std::vector<char> comp_obs(n, 0);
    for (const auto& [edge, obs] : has_obs)
        if (obs && scc_of[edge.first] == scc_of[edge.second]) comp_obs[scc_of[edge.first]] = 1;
    for (int p = 0; p < n; ++p) obs_cycle[p] = comp_obs[scc_of[p]];
}

Mask make_mask(int n, const std::vector<int>& members) {
    Mask m(n, 0);
    for (int s : members) m[s] = 1;
    return m;
}

std::vector<int> mask_members(const Mask& mask) {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(mask.size()); ++i)
        if (mask[i]) out.push_back(i);
    return out;
}

bool mask_empty(const Mask& mask) {
    return std::find(mask.begin(), mask.end(), char(1)) == mask.end();
}

Mask pred_star(const std::vector<std::vector<int>>& in_lists, Mask seed) {
    std::vector<int> stack = mask_members(seed);
    while (!stack.empty()) {
        int q = stack.back();
        stack.pop_back();
        for (int p : in_lists[q])
            if (!seed[p]) {
                seed[p] = 1;
                stack.push_back(p);
            }
    }
    return seed;
}

Mask obs_pred(const CcGraph& g, const Mask& target) {
    Mask out(g.n, 0);
    for (int q = 0; q < g.n; ++q)
        if (target[q])
            for (int p : g.obs_in[q]) out[p] = 1;
    return out;
}

Mask forward_star(const std::vector<std::vector<int>>& out_lists, Mask seed) {
    std::vector<int> stack = mask_members(seed);
    while (!stack.empty()) {
        int p = stack.back();
        stack.pop_back();
        for (int q : out_lists[p])
            if (!seed[q]) {
                seed[q] = 1;
                stack.push_back(q);
            }
    }
    return seed;
}

namespace {

int rep_transition(const CcGraph& g, int from, int to, bool observable) {
    const auto& reps = observable ? g.rep_obs : g.rep_eps;
    return reps.at({from, to});
}

}  // namespace

std::vector<PathStep> bfs_path(const CcGraph& g, const std::vector<int>& seeds,
                               const Mask& target, EdgeClass edge_class) {
    const auto& out = edge_class == EdgeClass::Any ? g.any_out
                      : edge_class == EdgeClass::Eps ? g.eps_out
                                                     : g.obs_out;
    std::vector<int> parent(g.n, -2);
    std::queue<int> queue;
    for (int s : seeds)
        if (parent[s] == -2) {
            parent[s] = -1;
            queue.push(s);
        }
    int found = -1;
    for (int s : seeds)
        if (target[s]) {
            found = s;
            break;
        }
    while (found == -1 && !queue.empty()) {
        int p = queue.front();
        queue.pop();
        for (int q : out[p]) {
            if (parent[q] != -2) continue;
            parent[q] = p;
            if (target[q]) {
                found = q;
                break;
            }
            queue.push(q);
        }
    }
    std::vector<PathStep> path;
    if (found == -1) return path;  // caller guarantees reachability; defensive empty
    for (int q = found; parent[q] != -1; q = parent[q]) {
        int p = parent[q];
        bool use_eps = edge_class == EdgeClass::Eps ||
                       (edge_class == EdgeClass::Any && g.rep_eps.count({p, q}) > 0);
        path.push_back({p, rep_transition(g, p, q, !use_eps), q});
    }
    std::reverse(path.begin(), path.end());
    return path;
}

std::vector<PathStep> one_symbol_path(const CcGraph& g, int from, const Mask& target) {
    Mask hop = obs_pred(g, target);
    std::vector<PathStep> path;
    if (!hop[from]) {
        path = bfs_path(g, {from}, hop, EdgeClass::Eps);
        if (path.empty()) return {};
    }
    int at = path.empty() ? from : path.back().to;
    for (int q : g.obs_out[at]) {
        if (target[q]) {
            path.push_back({at, rep_transition(g, at, q, true), q});
            return path;
        }
    }
    return {};  // not reachable in one symbol
}

std::vector<PathStep> first_obs_path(const CcGraph& g, int from, const Mask& target) {
    Mask landing = pred_star(g.any_in, target);
    for (int q : g.obs_out[from]) {
        if (!landing[q]) continue;
        std::vector<PathStep> path{{from, rep_transition(g, from, q, true), q}};
        auto rest = bfs_path(g, {q}, target, EdgeClass::Any);
        path.insert(path.end(), rest.begin(), rest.end());
        return path;
    }
    return {};
}

std::vector<PathStep> obs_somewhere_path(const CcGraph& g, int from, const Mask& target) {
    // BFS over (state, seen-an-observable) pairs
    auto id = [&](int state, int seen) { return state * 2 + seen; };
    std::vector<int> parent_code(2 * g.n, -2);
    std::vector<PathStep> parent_step(2 * g.n);
    std::queue<int> queue;
    parent_code[id(from, 0)] = -1;
    queue.push(id(from, 0));
    int found = -1;
    while (found == -1 && !queue.empty()) {
        int code = queue.front();
        queue.pop();
        int p = code / 2, seen = code % 2;
        for (int q : g.any_out[p]) {
            for (int via_obs = 0; via_obs <= 1 && found == -1; ++via_obs) {
                if (via_obs && !g.rep_obs.count({p, q})) continue;
                if (!via_obs && !g.rep_eps.count({p, q})) continue;
                int ncode = id(q, seen || via_obs);
                if (parent_code[ncode] != -2) continue;
                parent_code[ncode] = code;
                parent_step[ncode] = {p, rep_transition(g, p, q, via_obs != 0), q};
                if ((seen || via_obs) && target[q]) {
                    found = ncode;
                    break;
                }
                queue.push(ncode);
            }
            if (found != -1) break;
        }
    }
    std::vector<PathStep> path;
    if (found == -1) return path;
    for (int code = found; parent_code[code] != -1; code = parent_code[code])
        path.push_back(parent_step[code]);
    std::reverse(path.begin(), path.end());
    return path;
}

std::vector<PathStep> obs_cycle_path(const CcGraph& g, int at) {
    int comp = g.scc_of[at];
    Mask in_comp(g.n, 0);
    for (int p = 0; p < g.n; ++p) in_comp[p] = g.scc_of[p] == comp;
    // restrict adjacency to the component
    CcGraph restricted = g;  // cheap enough at desk scale; prune lists
    for (int p = 0; p < g.n; ++p) {
        if (!in_comp[p]) {
            restricted.any_out[p].clear();
            restricted.obs_out[p].clear();
            restricted.eps_out[p].clear();
            restricted.any_in[p].clear();
            restricted.obs_in[p].clear();
            restricted.eps_in[p].clear();
            continue;
        }
        auto prune = [&](std::vector<int>& row) {
            std::erase_if(row, [&](int q) { return !in_comp[q]; });
        };
        prune(restricted.any_out[p]);
        prune(restricted.obs_out[p]);
        prune(restricted.eps_out[p]);
        prune(restricted.any_in[p]);
        prune(restricted.obs_in[p]);
        prune(restricted.eps_in[p]);
    }
    for (int u = 0; u < g.n; ++u) {
        if (!in_comp[u]) continue;
        for (int v : restricted.obs_out[u]) {
            // cycle: at ->* u -obs-> v ->* at, all inside the component
            auto head = bfs_path(restricted, {at}, make_mask(g.n, {u}), EdgeClass::Any);
            if (head.empty() && at != u) continue;
            std::vector<PathStep> path = head;
            path.push_back({u, rep_transition(g, u, v, true), v});
            if (v != at) {
                auto tail = bfs_path(restricted, {v}, make_mask(g.n, {at}), EdgeClass::Any);
                if (tail.empty()) continue;
                path.insert(path.end(), tail.begin(), tail.end());
            }
            return path;
        }
    }
    return {};
}

// -- source-automaton helpers -------------------------------------------------

SGraph::SGraph(const Fsa& fsa) : a(&fsa) {
    int n = fsa.num_states();
    out.assign(n, {});
    in.assign(n, {});
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < static_cast<int>(fsa.transitions.size()); ++i) {
        const Transition& t = fsa.transitions[i];
        std::pair<int, int> key{t.src, t.dst};
        rep_any.emplace(key, i);
        if (fsa.events[t.event].observable()) rep_obs.emplace(key, i);
        out[t.src].push_back(t.dst);
        in[t.dst].push_back(t.src);
        edges.push_back(key);
    }
    for (auto* lists : {&out, &in})
        for (auto& row : *lists) sort_unique(row);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    std::vector<std::vector<int>> adj;
    scc_of = scc_of_edges(n, edges, adj);
    obs_cycle.assign(n, 0);
    std::vector<char> comp_obs(n, 0);
    for (const auto& [key, idx] : rep_obs)
        if (scc_of[key.first] == scc_of[key.second]) comp_obs[scc_of[key.first]] = 1;
    for (int s = 0; s < n; ++s) obs_cycle[s] = comp_obs[scc_of[s]];
}

std::vector<Transition> s_bfs_path(const SGraph& g, int from, const Mask& target) {
    int n = g.a->num_states();
    std::vector<int> parent(n, -2);
    std::queue<int> queue;
    parent[from] = -1;
    queue.push(from);
    int found = target[from] ? from : -1;
    while (found == -1 && !queue.empty()) {
        int p = queue.front();
        queue.pop();
        for (int q : g.out[p]) {
            if (parent[q] != -2) continue;
            parent[q] = p;
            if (target[q]) {
                found = q;
                break;
            }
            queue.push(q);
        }
    }
    std::vector<Transition> path;
    if (found == -1) return path;
    for (int q = found; parent[q] != -1; q = parent[q])
        path.push_back(g.a->transitions[g.rep_any.at({parent[q], q})]);
    std::reverse(path.begin(), path.end());
    return path;
}

std::vector<Transition> s_obs_cycle(const SGraph& g, int at) {
    int comp = g.scc_of[at];
    int n = g.a->num_states();
    SGraph restricted = g;
    for (int p = 0; p < n; ++p) {
        auto prune = [&](std::vector<int>& row) {
            std::erase_if(row, [&](int q) { return g.scc_of[q] != comp; });
        };
        if (g.scc_of[p] != comp) {
            restricted.out[p].clear();
            restricted.in[p].clear();
        } else {
            prune(restricted.out[p]);
            prune(restricted.in[p]);
        }
    }
    for (const auto& [key, idx] : g.rep_obs) {
        auto [u, v] = key;
        if (g.scc_of[u] != comp || g.scc_of[v] != comp) continue;
        std::vector<Transition> path;
        if (u != at) {
            auto head = s_bfs_path(restricted, at, make_mask(n, {u}));
            if (head.empty()) continue;
            path = head;
        }
        path.push_back(g.a->transitions[idx]);
        if (v != at) {
            auto tail = s_bfs_path(restricted, v, make_mask(n, {at}));
            if (tail.empty()) continue;
            path.insert(path.end(), tail.begin(), tail.end());
        }
        return path;
    }
    return {};
}

}  // namespace detkit::internal
