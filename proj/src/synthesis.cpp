#include "detkit/synthesis.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

#include "layered.hpp"

namespace detkit {

using internal::CcGraph;
using internal::Mask;

namespace {

struct GraphParams {
    int k1;
    int k2;
    Flavor flavor;
};

GraphParams graph_params(const Fsa& a, const SynthesisTarget& t) {
    switch (t.kind) {
        case PropertyKind::OmegaKDelayed:
            return {k1_bound_for_delayed(a), t.delay, Flavor::Omega};
        case PropertyKind::StarKDelayed:
            return {k1_bound_for_delayed(a), t.delay, Flavor::Star};
        case PropertyKind::OmegaK1K2:
            return {t.k1, t.k2, Flavor::Omega};
        case PropertyKind::StarK1K2:
            return {t.k1, t.k2, Flavor::Star};
        default:
            throw ModelError("synthesis supports omega/star k-delayed and (k1,k2) targets");
    }
}

}  // namespace

Verdict verify_target(const Fsa& a, const SynthesisTarget& target) {
    switch (target.kind) {
        case PropertyKind::OmegaKDelayed: return verify_omega_k_delayed(a, target.delay);
        case PropertyKind::StarKDelayed: return verify_star_k_delayed(a, target.delay);
        case PropertyKind::OmegaK1K2: return verify_omega_k1k2(a, target.k1, target.k2);
        case PropertyKind::StarK1K2: return verify_star_k1k2(a, target.k1, target.k2);
        default:
            throw ModelError("synthesis supports omega/star k-delayed and (k1,k2) targets");
    }
}

bool feasibility(const Fsa& a, const SynthesisTarget& target) {
    Fsa residual = remove_transitions(a, controllable_transitions(a));
    return verify_target(residual, target).holds;
}

// ---------------------------------------------------------------------------
// layered witness graph, Steps 1-8

std::vector<std::pair<int, int>> LayeredWitnessGraph::marked_pairs(int layer) const {
    std::set<std::pair<int, int>> out;
    for (const LwgNode& node : nodes)
        if (!node.single && node.layer == layer && node.marked && node.state >= 0)
            out.insert(pair_cache[node.state]);
    return {out.begin(), out.end()};
}

bool LayeredWitnessGraph::has_violation_path() const {
    std::vector<std::vector<int>> succ(nodes.size());
    for (const LwgEdge& e : edges) succ[e.from].push_back(e.to);
    std::vector<char> seen(nodes.size(), 0);
    std::vector<int> stack;
    for (int s : sources) {
        seen[s] = 1;
        stack.push_back(s);
    }
    std::vector<char> sink(nodes.size(), 0);
    for (int s : sinks) sink[s] = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        if (sink[v]) return true;
        for (int w : succ[v])
            if (!seen[w]) {
                seen[w] = 1;
                stack.push_back(w);
            }
    }
    for (int s : sources)
        if (sink[s]) return true;
    return false;
}

namespace {

struct GraphBuilder {
    const Fsa& a;
    ConcurrentComposition cc;
    int k1, k2;
    bool omega;
    LayeredWitnessGraph out;

    // dedup key: (layer, single, state, seen_obs, post_obs)
    std::map<std::tuple<int, bool, int, bool, bool>, int> ids;

    GraphBuilder(const Fsa& fsa, int k1_, int k2_, bool omega_)
        : a(fsa), cc(concurrent_composition(fsa)), k1(k1_), k2(k2_), omega(omega_) {
        out.k1 = k1;
        out.k2 = k2;
        out.omega = omega;
        out.pair_cache = cc.states;
    }

    int node(int layer, bool single, int state, bool seen_obs, bool post_obs) {
        auto key = std::make_tuple(layer, single, state, seen_obs, post_obs);
        auto [it, inserted] = ids.emplace(key, static_cast<int>(out.nodes.size()));
        if (inserted) {
            LwgNode n;
            n.layer = layer;
            n.single = single;
            n.state = state;
            n.seen_obs = seen_obs;
            n.post_obs = post_obs;
            out.nodes.push_back(n);
        }
        return it->second;
    }

    int find_node(int layer, bool single, int state, bool seen_obs, bool post_obs) const {
        auto it = ids.find(std::make_tuple(layer, single, state, seen_obs, post_obs));
        return it == ids.end() ? -1 : it->second;
    }

    void pair_edge(int from, int to, const PairTransition& t) {
        LwgEdge e;
        e.from = from;
        e.to = to;
        e.single = false;
        e.pair_event = cc.events[t.event];
        auto [sl, sr] = cc.states[t.src];
        auto [dl, dr] = cc.states[t.dst];
        switch (e.pair_event.kind) {
            case PairEventKind::Sync:
                e.originals.push_back({sl, e.pair_event.left, dl});
                e.originals.push_back({sr, e.pair_event.right, dr});
                break;
            case PairEventKind::LeftEps:
                e.originals.push_back({sl, e.pair_event.left, dl});
                break;
            case PairEventKind::RightEps:
                e.originals.push_back({sr, e.pair_event.right, dr});
                break;
        }
        std::sort(e.originals.begin(), e.originals.end());
        e.originals.erase(std::unique(e.originals.begin(), e.originals.end()), e.originals.end());
        for (const Transition& o : e.originals)
            if (a.events[o.event].controllable) e.controllable.push_back(o);
        out.edges.push_back(std::move(e));
    }

    void single_edge(int from, int to, const Transition& t) {
        LwgEdge e;
        e.from = from;
        e.to = to;
        e.single = true;
        e.source_event = t.event;
        e.originals.push_back(t);
        if (a.events[t.event].controllable) e.controllable.push_back(t);
        out.edges.push_back(std::move(e));
    }

    std::vector<std::vector<int>> pair_out;  // cc adjacency: transition indices per source

    void index_cc() {
        pair_out.assign(cc.num_states(), {});
        for (int i = 0; i < static_cast<int>(cc.transitions.size()); ++i)
            pair_out[cc.transitions[i].src].push_back(i);
    }

    std::vector<int> first_layer_marks() {
        std::vector<int> marks;
        if (k1 == 0) {
            // every accessible pair, distinct-component pairs marked
            for (int p = 0; p < cc.num_states(); ++p) node(0, false, p, false, false);
            for (const PairTransition& t : cc.transitions)
                pair_edge(find_node(0, false, t.src, false, false),
                          find_node(0, false, t.dst, false, false), t);
            for (int p = 0; p < cc.num_states(); ++p) {
                int id = find_node(0, false, p, false, false);
                auto [l, r] = cc.states[p];
                out.nodes[id].marked = l != r;
                if (out.nodes[id].marked) marks.push_back(id);
            }
            for (int p : cc.initial) {
                int id = find_node(0, false, p, false, false);
                out.nodes[id].initial = true;
                out.sources.push_back(id);
            }
            return marks;
        }
        // observable-history tracking: sequences in (T')^+ \ (T'_eps)^+
        std::queue<int> queue;
        for (int p : cc.initial) {
            int id = node(1, false, p, false, false);
            out.nodes[id].initial = true;
            out.sources.push_back(id);
            queue.push(id);
        }
        std::set<int> expanded;
        while (!queue.empty()) {
            int id = queue.front();
            queue.pop();
            if (!expanded.insert(id).second) continue;
            LwgNode n = out.nodes[id];
            for (int ti : pair_out[n.state]) {
                const PairTransition& t = cc.transitions[ti];
                bool seen = n.seen_obs || cc.is_sync(t.event);
                int nid = node(1, false, t.dst, seen, false);
                pair_edge(id, nid, t);
                if (!expanded.count(nid)) queue.push(nid);
            }
        }
        for (int id = 0; id < static_cast<int>(out.nodes.size()); ++id) {
            LwgNode& n = out.nodes[id];
            if (n.layer != 1 || n.single) continue;
            auto [l, r] = cc.states[n.state];
            n.marked = n.seen_obs && (k1 > 1 || l != r);
            if (n.marked) marks.push_back(id);
        }
        return marks;
    }

    std::vector<int> sigma_plus_layer(int layer, const std::vector<int>& prev_marks) {
        // entered by an observable event, then closed under everything
        std::queue<int> queue;
        for (int mark : prev_marks) {
            int p = out.nodes[mark].state;
            for (int ti : pair_out[p]) {
                const PairTransition& t = cc.transitions[ti];
                if (!cc.is_sync(t.event)) continue;
                int nid = node(layer, false, t.dst, false, false);
                pair_edge(mark, nid, t);
                queue.push(nid);
            }
        }
        std::set<int> expanded;
        while (!queue.empty()) {
            int id = queue.front();
            queue.pop();
            if (!expanded.insert(id).second) continue;
            for (int ti : pair_out[out.nodes[id].state]) {
                const PairTransition& t = cc.transitions[ti];
                int nid = node(layer, false, t.dst, false, false);
                pair_edge(id, nid, t);
                if (!expanded.count(nid)) queue.push(nid);
            }
        }
        std::vector<int> marks;
        for (int id = 0; id < static_cast<int>(out.nodes.size()); ++id) {
            LwgNode& n = out.nodes[id];
            if (n.layer != layer || n.single) continue;
            auto [l, r] = cc.states[n.state];
            n.marked = layer < k1 || l != r;
            if (n.marked) marks.push_back(id);
        }
        return marks;
    }

    std::vector<int> one_symbol_layer(int layer, const std::vector<int>& prev_marks) {
        // unobservable closure, then exactly one observable event
        std::queue<int> queue;
        auto expand_from = [&](int from_id, int p) {
            for (int ti : pair_out[p]) {
                const PairTransition& t = cc.transitions[ti];
                if (cc.is_sync(t.event)) {
                    int nid = node(layer, false, t.dst, false, true);
                    pair_edge(from_id, nid, t);
                } else {
                    int nid = node(layer, false, t.dst, false, false);
                    pair_edge(from_id, nid, t);
                    queue.push(nid);
                }
            }
        };
        for (int mark : prev_marks) expand_from(mark, out.nodes[mark].state);
        std::set<int> expanded;
        while (!queue.empty()) {
            int id = queue.front();
            queue.pop();
            if (!expanded.insert(id).second) continue;
            expand_from(id, out.nodes[id].state);
        }
        std::vector<int> marks;
        for (int id = 0; id < static_cast<int>(out.nodes.size()); ++id) {
            LwgNode& n = out.nodes[id];
            if (n.layer != layer || n.single || !n.post_obs) continue;
            n.marked = true;
            marks.push_back(id);
        }
        return marks;
    }

    void build() {
        index_cc();
        std::vector<int> marks = first_layer_marks();
        for (int i = 2; i <= k1; ++i) marks = sigma_plus_layer(i, marks);
        for (int i = k1 + 1; i <= k1 + k2; ++i) marks = one_symbol_layer(i, marks);
        const int top = std::max(std::min(1, k1), k1 + k2);

        std::vector<char> keep(out.nodes.size(), 1);

        if (omega) {
            internal::SGraph sg(a);
            Mask cyc = internal::make_mask(a.num_states(), states_in_observable_cycles(a));
            Mask reach_cyc = internal::pred_star(sg.in, cyc);

            std::set<int> tops;  // X_{1+k1+k2}
            for (int mark : marks) {
                auto [l, r] = cc.states[out.nodes[mark].state];
                if (reach_cyc[l]) tops.insert(l);
                if (reach_cyc[r]) tops.insert(r);
            }
            // single-state layer: paths from the top states to observable cycles
            Mask fwd = internal::forward_star(sg.out,
                                              internal::make_mask(a.num_states(),
                                                                  {tops.begin(), tops.end()}));
            Mask bwd = internal::pred_star(sg.in, cyc);
            const int single_layer = k1 + k2 + 1;
            for (int s = 0; s < a.num_states(); ++s) {
                if (!(fwd[s] && bwd[s])) continue;
                int id = node(single_layer, true, s, false, false);
                out.nodes[id].marked = cyc[s] != 0;
                out.nodes[id].initial = tops.count(s) > 0;
                if (out.nodes[id].initial) out.single_initial.push_back(id);
                if (out.nodes[id].marked) out.sinks.push_back(id);
            }
            for (const Transition& t : a.transitions) {
                int from = find_node(single_layer, true, t.src, false, false);
                int to = find_node(single_layer, true, t.dst, false, false);
                if (from >= 0 && to >= 0) single_edge(from, to, t);
            }
            // bridge marks whose component is a live top state
            for (int mark : marks) {
                auto [l, r] = cc.states[out.nodes[mark].state];
                for (int s : {l, r}) {
                    int to = find_node(single_layer, true, s, false, false);
                    if (tops.count(s) && to >= 0) {
                        LwgEdge bridge;
                        bridge.from = mark;
                        bridge.to = to;
                        bridge.single = true;
                        out.edges.push_back(std::move(bridge));
                    }
                }
            }
            // Step 7 pruning of the top pair layer
            for (int id = 0; id < static_cast<int>(out.nodes.size()); ++id) {
                const LwgNode& n = out.nodes[id];
                if (n.single || n.layer != top) continue;
                auto [l, r] = cc.states[n.state];
                if (!tops.count(l) && !tops.count(r)) keep[id] = 0;
            }
        } else {
            for (int mark : marks) out.sinks.push_back(mark);
        }

        // Step 8: drop pair-layer states that cannot reach the top layer
        std::vector<std::vector<int>> pred(out.nodes.size());
        for (const LwgEdge& e : out.edges)
            if (!out.nodes[e.from].single && !out.nodes[e.to].single)
                pred[e.to].push_back(e.from);
        std::vector<char> reaches_top(out.nodes.size(), 0);
        std::vector<int> stack;
        for (int id = 0; id < static_cast<int>(out.nodes.size()); ++id)
            if (!out.nodes[id].single && out.nodes[id].layer == top && keep[id]) {
                reaches_top[id] = 1;
                stack.push_back(id);
            }
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int u : pred[v])
                if (!reaches_top[u] && keep[u]) {
                    reaches_top[u] = 1;
                    stack.push_back(u);
                }
        }
        for (int id = 0; id < static_cast<int>(out.nodes.size()); ++id)
            if (!out.nodes[id].single && !reaches_top[id]) keep[id] = 0;

        // compact the graph
        std::vector<int> remap(out.nodes.size(), -1);
        LayeredWitnessGraph pruned;
        pruned.k1 = k1;
        pruned.k2 = k2;
        pruned.omega = omega;
        pruned.pair_cache = out.pair_cache;
        for (int id = 0; id < static_cast<int>(out.nodes.size()); ++id) {
            if (!keep[id]) continue;
            remap[id] = static_cast<int>(pruned.nodes.size());
            pruned.nodes.push_back(out.nodes[id]);
        }
        for (const LwgEdge& e : out.edges) {
            if (remap[e.from] < 0 || remap[e.to] < 0) continue;
            LwgEdge copy = e;
            copy.from = remap[e.from];
            copy.to = remap[e.to];
            pruned.edges.push_back(std::move(copy));
        }
        auto filter_ids = [&](const std::vector<int>& in) {
            std::vector<int> kept;
            for (int id : in)
                if (remap[id] >= 0) kept.push_back(remap[id]);
            return kept;
        };
        pruned.sources = filter_ids(out.sources);
        pruned.sinks = filter_ids(out.sinks);
        pruned.single_initial = filter_ids(out.single_initial);
        out = std::move(pruned);
    }
};

}  // namespace

LayeredWitnessGraph build_layered_witness_graph(const Fsa& a, int k1, int k2, Flavor flavor) {
    a.validate();
    GraphBuilder builder(a, k1, k2, flavor == Flavor::Omega);
    builder.build();
    return std::move(builder.out);
}

// ---------------------------------------------------------------------------
// step 9: min-cut over the layered graph, then re-verify

namespace {

constexpr long long kInf = 1LL << 40;

struct FlowNet {
    struct Arc {
        int to;
        long long cap;
        int rev;
        int lwg_edge;
    };
    std::vector<std::vector<Arc>> adj;

    explicit FlowNet(int n) : adj(n) {}

    void add(int u, int v, long long cap, int lwg_edge) {
        adj[u].push_back({v, cap, static_cast<int>(adj[v].size()), lwg_edge});
        adj[v].push_back({u, 0, static_cast<int>(adj[u].size()) - 1, -1});
    }

    long long max_flow(int s, int t) {
        long long flow = 0;
        while (true) {
            std::vector<int> prev_node(adj.size(), -1), prev_arc(adj.size(), -1);
            std::queue<int> queue;
            queue.push(s);
            prev_node[s] = s;
            while (!queue.empty() && prev_node[t] == -1) {
                int u = queue.front();
                queue.pop();
                for (int i = 0; i < static_cast<int>(adj[u].size()); ++i) {
                    const Arc& arc = adj[u][i];
                    if (arc.cap <= 0 || prev_node[arc.to] != -1) continue;
                    prev_node[arc.to] = u;
                    prev_arc[arc.to] = i;
                    queue.push(arc.to);
                }
            }
            if (prev_node[t] == -1) break;
            long long push = kInf * 4;
            for (int v = t; v != s; v = prev_node[v])
                push = std::min(push, adj[prev_node[v]][prev_arc[v]].cap);
            for (int v = t; v != s; v = prev_node[v]) {
                Arc& arc = adj[prev_node[v]][prev_arc[v]];
                arc.cap -= push;
                adj[arc.to][arc.rev].cap += push;
            }
            flow += push;
            if (flow >= kInf) break;  // saturated by uncuttable edges
        }
        return flow;
    }

    std::vector<char> source_side(int s) const {
        std::vector<char> seen(adj.size(), 0);
        std::vector<int> stack{s};
        seen[s] = 1;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (const Arc& arc : adj[u])
                if (arc.cap > 0 && !seen[arc.to]) {
                    seen[arc.to] = 1;
                    stack.push_back(arc.to);
                }
        }
        return seen;
    }
};

/// Cut transitions from the layered graph, or nullopt when every cut is
/// saturated by uncontrollable edges.
std::optional<std::vector<Transition>> min_cut_transitions(const LayeredWitnessGraph& g) {
    if (g.sources.empty() || g.sinks.empty()) return std::vector<Transition>{};
    int n = static_cast<int>(g.nodes.size());
    FlowNet net(n + 2);
    int source = n, sink = n + 1;
    for (int s : g.sources) net.add(source, s, kInf, -1);
    for (int s : g.sinks) net.add(s, sink, kInf, -1);
    for (int i = 0; i < static_cast<int>(g.edges.size()); ++i) {
        const LwgEdge& e = g.edges[i];
        net.add(e.from, e.to, e.controllable.empty() ? kInf : 1, i);
    }
    long long flow = net.max_flow(source, sink);
    if (flow >= kInf) return std::nullopt;
    std::vector<char> side = net.source_side(source);
    std::set<Transition> picked;
    for (int u = 0; u < n + 2; ++u) {
        for (const auto& arc : net.adj[u]) {
            if (arc.lwg_edge < 0) continue;
            if (side[u] && !side[arc.to] && arc.cap == 0) {
                const LwgEdge& e = g.edges[arc.lwg_edge];
                if (!e.controllable.empty()) picked.insert(e.controllable.front());
            }
        }
    }
    return std::vector<Transition>(picked.begin(), picked.end());
}

/// Fallback: the first controllable transition on the graph, scanning layers
/// from the top down.
std::optional<Transition> fallback_pick(const LayeredWitnessGraph& g,
                                        const std::set<Transition>& already) {
    int max_layer = 0;
    for (const LwgNode& n : g.nodes) max_layer = std::max(max_layer, n.layer);
    for (int layer = max_layer; layer >= 0; --layer) {
        std::set<Transition> candidates;
        for (const LwgEdge& e : g.edges) {
            if (g.nodes[e.from].layer != layer) continue;
            for (const Transition& t : e.controllable)
                if (!already.count(t)) candidates.insert(t);
        }
        if (!candidates.empty()) return *candidates.begin();
    }
    return std::nullopt;
}

}  // namespace

SynthesisPlan synthesize(const Fsa& a, const SynthesisTarget& target) {
    a.validate();
    SynthesisPlan plan;
    plan.residual = a;
    plan.verified = verify_target(a, target);
    if (plan.verified.holds) {
        plan.feasible = true;
        return plan;
    }
    if (!feasibility(a, target)) {
        plan.feasible = false;
        return plan;
    }
    GraphParams params = graph_params(a, target);

    std::set<Transition> disabled;
    const int limit = static_cast<int>(controllable_transitions(a).size()) + 2;
    for (int iter = 0; iter < limit; ++iter) {
        plan.iterations = iter + 1;
        LayeredWitnessGraph graph =
            build_layered_witness_graph(plan.residual, params.k1, params.k2, params.flavor);
        auto cut = min_cut_transitions(graph);
        bool progressed = false;
        if (cut) {
            for (const Transition& t : *cut) progressed |= disabled.insert(t).second;
        }
        if (!progressed) {
            plan.used_fallback = true;
            auto pick = fallback_pick(graph, disabled);
            if (pick) {
                disabled.insert(*pick);
            } else {
                for (const Transition& t : controllable_transitions(a)) disabled.insert(t);
            }
        }
        plan.residual = remove_transitions(a, {disabled.begin(), disabled.end()});
        plan.verified = verify_target(plan.residual, target);
        if (plan.verified.holds) {
            plan.feasible = true;
            plan.disabled.assign(disabled.begin(), disabled.end());
            return plan;
        }
    }
    // feasibility promised success; disabling everything controllable must work
    plan.used_fallback = true;
    for (const Transition& t : controllable_transitions(a)) disabled.insert(t);
    plan.residual = remove_transitions(a, {disabled.begin(), disabled.end()});
    plan.verified = verify_target(plan.residual, target);
    plan.feasible = plan.verified.holds;
    plan.disabled.assign(disabled.begin(), disabled.end());
    return plan;
}

SynthesisPlan exhaustive_minimum_plan(const Fsa& a, const SynthesisTarget& target, int cap) {
    a.validate();
    std::vector<Transition> pool = controllable_transitions(a);
    if (static_cast<int>(pool.size()) > cap)
        throw ModelError("exhaustive search cap exceeded: " + std::to_string(pool.size()) + " > " +
                         std::to_string(cap));

    const int n = static_cast<int>(pool.size());
    for (int size = 0; size <= n; ++size) {
        std::vector<int> idx(size);
        for (int i = 0; i < size; ++i) idx[i] = i;
        while (true) {
            std::vector<Transition> subset;
            for (int i : idx) subset.push_back(pool[i]);
            Fsa residual = remove_transitions(a, subset);
            Verdict verdict = verify_target(residual, target);
            if (verdict.holds) {
                SynthesisPlan plan;
                plan.feasible = true;
                plan.disabled = subset;
                plan.residual = std::move(residual);
                plan.verified = std::move(verdict);
                return plan;
            }
            // next combination in lexicographic order
            int pos = size - 1;
            while (pos >= 0 && idx[pos] == n - size + pos) --pos;
            if (pos < 0) break;
            ++idx[pos];
            for (int i = pos + 1; i < size; ++i) idx[i] = idx[i - 1] + 1;
        }
    }
    SynthesisPlan plan;
    plan.feasible = false;
    plan.residual = remove_transitions(a, pool);
    plan.verified = verify_target(plan.residual, target);
    return plan;
}

}  // namespace detkit
