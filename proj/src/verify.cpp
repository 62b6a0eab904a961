#include "detkit/verify.hpp"

#include <algorithm>
#include <map>
#include <queue>

#include "layered.hpp"

namespace detkit {

using internal::CcGraph;
using internal::EdgeClass;
using internal::Mask;
using internal::PathStep;
using internal::SGraph;

std::string property_name(PropertyKind kind) {
    switch (kind) {
        case PropertyKind::OmegaKDelayed: return "omega-k-delayed";
        case PropertyKind::StarKDelayed: return "star-k-delayed";
        case PropertyKind::OmegaK1K2: return "omega-k1k2";
        case PropertyKind::StarK1K2: return "star-k1k2";
        case PropertyKind::OmegaK1K2D: return "omega-k1k2-d";
        case PropertyKind::StarK1K2D: return "star-k1k2-d";
        case PropertyKind::Diagnosable: return "diagnosable";
    }
    return "?";
}

void Specification::normalize() {
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
}

void Specification::validate(const Fsa& a) const {
    for (const auto& [x, y] : pairs) {
        if (x < 0 || y < 0 || x >= a.num_states() || y >= a.num_states())
            throw ModelError("specification pair out of range");
        if (x == y)
            throw ModelError("reflexive specification pair (" + a.states[x] + "," + a.states[x] +
                             ")");
    }
}

bool Specification::matches(int left, int right) const {
    return std::binary_search(pairs.begin(), pairs.end(), std::make_pair(left, right)) ||
           std::binary_search(pairs.begin(), pairs.end(), std::make_pair(right, left));
}

int effective_delay_bound(const Fsa& a, int delay) {
    return std::min<long long>(delay, 1LL * a.num_states() * a.num_states());
}

int k1_bound_for_delayed(const Fsa& a) { return a.num_states() * a.num_states(); }

namespace {

std::vector<std::pair<int, int>> mask_pairs(const ConcurrentComposition& cc, const Mask& m) {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < cc.num_states(); ++i)
        if (m[i]) out.push_back(cc.states[i]);
    std::sort(out.begin(), out.end());
    return out;
}

int min_pair_member(const ConcurrentComposition& cc, const Mask& m) {
    int best = -1;
    for (int i = 0; i < cc.num_states(); ++i) {
        if (!m[i]) continue;
        if (best == -1 || cc.states[i] < cc.states[best]) best = i;
    }
    return best;
}

/// Cycle-reach data on the source automaton for the omega-flavored notions.
struct OmegaData {
    std::vector<int> cycle_states;  // states on a cycle with nonempty label sequence
    Mask cycle_mask;                // over S states
    Mask reach_cycle;               // states from which such a cycle is reachable
};

OmegaData omega_data(const Fsa& a, const SGraph& sg) {
    OmegaData d;
    d.cycle_states = states_in_observable_cycles(a);
    d.cycle_mask = internal::make_mask(a.num_states(), d.cycle_states);
    d.reach_cycle = internal::pred_star(sg.in, d.cycle_mask);
    return d;
}

Mask top_mask(const ConcurrentComposition& cc, bool omega, const OmegaData& od) {
    Mask top(cc.num_states(), 1);
    if (omega)
        for (int i = 0; i < cc.num_states(); ++i)
            top[i] = od.reach_cycle[cc.states[i].first] || od.reach_cycle[cc.states[i].second];
    return top;
}

WitnessSegment to_segment(const ConcurrentComposition& cc, const std::string& role,
                          const std::vector<PathStep>& steps) {
    WitnessSegment seg{role, {}};
    for (const PathStep& s : steps) {
        const PairTransition& t = cc.transitions[s.transition];
        seg.steps.push_back({cc.states[t.src], cc.events[t.event], cc.states[t.dst]});
    }
    return seg;
}

Witness mirrored(Witness w) {
    auto flip_pair = [](std::pair<int, int> p) { return std::make_pair(p.second, p.first); };
    auto flip_event = [](PairEvent e) {
        switch (e.kind) {
            case PairEventKind::Sync: return PairEvent{PairEventKind::Sync, e.right, e.left};
            case PairEventKind::LeftEps: return PairEvent{PairEventKind::RightEps, -1, e.left};
            case PairEventKind::RightEps: return PairEvent{PairEventKind::LeftEps, e.right, -1};
        }
        return e;
    };
    for (WitnessSegment& seg : w.segments)
        for (WitnessStep& step : seg.steps) {
            step.from = flip_pair(step.from);
            step.to = flip_pair(step.to);
            step.event = flip_event(step.event);
        }
    w.ambiguity = flip_pair(w.ambiguity);
    return w;
}

void attach_omega_extension(const SGraph& sg, const OmegaData& od, Witness& w,
                            std::pair<int, int> end) {
    if (!od.reach_cycle[end.first]) {
        w = mirrored(w);
        end = {end.second, end.first};
    }
    OmegaExtension ext;
    ext.path = internal::s_bfs_path(sg, end.first, od.cycle_mask);
    int anchor = ext.path.empty() ? end.first : ext.path.back().dst;
    ext.cycle = internal::s_obs_cycle(sg, anchor);
    w.omega = std::move(ext);
}

// -------------------------------------------------------------------------
// K-delayed strong detectability, conditions (8)/(9): a pumpable cycle with
// nonempty label, a reachable distinct-component pair, K one-symbol layers,
// and for the omega flavor a label-infinite continuation of the left run.

Verdict delayed_engine(const Fsa& a, int delay, bool omega) {
    Verdict v;
    v.query.kind = omega ? PropertyKind::OmegaKDelayed : PropertyKind::StarKDelayed;
    v.query.delay = delay;
    a.validate();

    const int bound = effective_delay_bound(a, delay);
    ConcurrentComposition cc = concurrent_composition(a);
    CcGraph g(cc);
    SGraph sg(a);
    OmegaData od = omega_data(a, sg);

    Mask top = top_mask(cc, omega, od);
    if (omega)
        v.layers.single_layer = {{"X_" + std::to_string(4 + bound), od.cycle_states}};

    std::map<int, Mask> layer;
    layer[3 + bound] = top;
    if (bound > 0)
        v.layers.pair_layers.push_back({"X'_" + std::to_string(3 + bound), mask_pairs(cc, top)});
    for (int i = 2 + bound; i >= 4; --i) {
        layer[i] = internal::one_symbol_pred(g, layer.at(i + 1));
        v.layers.pair_layers.push_back({"X'_" + std::to_string(i), mask_pairs(cc, layer[i])});
    }

    Mask x3 = bound == 0 ? top : internal::one_symbol_pred(g, layer.at(4));
    for (int p = 0; p < cc.num_states(); ++p)
        if (cc.states[p].first == cc.states[p].second) x3[p] = 0;
    layer[3] = x3;
    v.layers.pair_layers.push_back({"X'_3", mask_pairs(cc, x3)});

    Mask x2 = internal::pred_star(g.any_in, x3);
    for (int p = 0; p < cc.num_states(); ++p) x2[p] = x2[p] && g.obs_cycle[p];
    layer[2] = x2;
    v.layers.pair_layers.push_back({"X'_2", mask_pairs(cc, x2)});

    v.holds = internal::mask_empty(x2);
    if (v.holds) return v;

    // witness: prefix to the pump state, the pump cycle, the reach to the
    // ambiguity pair, then one layer per delayed symbol
    Witness w;
    int pump = min_pair_member(cc, x2);
    w.segments.push_back(
        to_segment(cc, "prefix", internal::bfs_path(g, cc.initial, internal::make_mask(g.n, {pump}),
                                                    EdgeClass::Any)));
    w.segments.push_back(to_segment(cc, "pump", internal::obs_cycle_path(g, pump)));
    auto reach = internal::bfs_path(g, {pump}, x3, EdgeClass::Any);
    int at = reach.empty() ? pump : reach.back().to;
    w.segments.push_back(to_segment(cc, "reach", reach));
    w.ambiguity = cc.states[at];
    for (int i = 4; i <= 3 + bound; ++i) {
        auto step = internal::one_symbol_path(g, at, layer.at(i));
        at = step.empty() ? at : step.back().to;
        w.segments.push_back(to_segment(cc, "delay", step));
    }
    if (omega) attach_omega_extension(sg, od, w, cc.states[at]);
    v.witness = std::move(w);
    return v;
}

// -------------------------------------------------------------------------
// (k1,k2)-detectability, conditions (10)-(13): k1 nonempty-label layers from
// the initial pairs, the distinct-component (and specification) filter, k2
// one-symbol layers, and the omega continuation.

Verdict k1k2_engine(const Fsa& a, int k1, int k2, bool omega,
                    const std::optional<Specification>& spec) {
    Verdict v;
    v.query.kind = spec ? (omega ? PropertyKind::OmegaK1K2D : PropertyKind::StarK1K2D)
                        : (omega ? PropertyKind::OmegaK1K2 : PropertyKind::StarK1K2);
    v.query.k1 = k1;
    v.query.k2 = k2;
    v.query.spec = spec;
    a.validate();
    if (spec) spec->validate(a);

    ConcurrentComposition cc = concurrent_composition(a);
    CcGraph g(cc);
    SGraph sg(a);
    OmegaData od = omega_data(a, sg);

    Mask top = top_mask(cc, omega, od);
    if (omega)
        v.layers.single_layer = {{"X_" + std::to_string(1 + k1 + k2), od.cycle_states}};

    std::map<int, Mask> layer;
    layer[k1 + k2] = top;
    if (k2 > 0)
        v.layers.pair_layers.push_back({"X'_" + std::to_string(k1 + k2), mask_pairs(cc, top)});
    for (int i = k1 + k2 - 1; i >= k1 + 1; --i) {
        layer[i] = internal::one_symbol_pred(g, layer.at(i + 1));
        v.layers.pair_layers.push_back({"X'_" + std::to_string(i), mask_pairs(cc, layer[i])});
    }

    Mask amb = k2 == 0 ? top : internal::one_symbol_pred(g, layer.at(k1 + 1));
    for (int p = 0; p < cc.num_states(); ++p) {
        auto [l, r] = cc.states[p];
        if (l == r) amb[p] = 0;
        if (spec && !spec->matches(l, r)) amb[p] = 0;
    }
    layer[k1] = amb;
    v.layers.pair_layers.push_back({"X'_" + std::to_string(k1), mask_pairs(cc, amb)});

    Mask decision;
    if (k1 == 0) {
        // |sigma1| >= 0 puts no constraint on the prefix: any accessible pair
        // with distinct components that supports the k2 layers violates
        decision = amb;
    } else {
        for (int i = k1 - 1; i >= 1; --i) {
            layer[i] = internal::first_obs_pred(g, layer.at(i + 1));
            v.layers.pair_layers.push_back({"X'_" + std::to_string(i), mask_pairs(cc, layer[i])});
        }
        Mask init = internal::make_mask(g.n, cc.initial);
        Mask ok = internal::obs_somewhere_pred(g, layer.at(1));
        decision.assign(g.n, 0);
        for (int p = 0; p < g.n; ++p) decision[p] = init[p] && ok[p];
        v.layers.pair_layers.push_back({"Xbar'_0", mask_pairs(cc, decision)});
    }

    v.holds = internal::mask_empty(decision);
    if (v.holds) return v;

    Witness w;
    int at;
    if (k1 == 0) {
        at = min_pair_member(cc, decision);
        w.segments.push_back(to_segment(
            cc, "prefix",
            internal::bfs_path(g, cc.initial, internal::make_mask(g.n, {at}), EdgeClass::Any)));
    } else {
        int start = min_pair_member(cc, decision);
        auto seg = internal::obs_somewhere_path(g, start, layer.at(1));
        at = seg.empty() ? start : seg.back().to;
        w.segments.push_back(to_segment(cc, "prefix", seg));
        for (int i = 1; i < k1; ++i) {
            auto step = internal::first_obs_path(g, at, layer.at(i + 1));
            at = step.empty() ? at : step.back().to;
            w.segments.push_back(to_segment(cc, "prefix", step));
        }
    }
    w.ambiguity = cc.states[at];
    for (int i = k1 + 1; i <= k1 + k2; ++i) {
        auto step = internal::one_symbol_path(g, at, layer.at(i));
        at = step.empty() ? at : step.back().to;
        w.segments.push_back(to_segment(cc, "delay", step));
    }
    if (omega) attach_omega_extension(sg, od, w, cc.states[at]);
    v.witness = std::move(w);
    return v;
}

}  // namespace

Verdict verify_omega_k_delayed(const Fsa& a, int delay) { return delayed_engine(a, delay, true); }
Verdict verify_star_k_delayed(const Fsa& a, int delay) { return delayed_engine(a, delay, false); }

Verdict verify_omega_k1k2(const Fsa& a, int k1, int k2) {
    return k1k2_engine(a, k1, k2, true, std::nullopt);
}
Verdict verify_star_k1k2(const Fsa& a, int k1, int k2) {
    return k1k2_engine(a, k1, k2, false, std::nullopt);
}
Verdict verify_omega_k1k2_d(const Fsa& a, int k1, int k2, const Specification& spec) {
    Specification s = spec;
    s.normalize();
    return k1k2_engine(a, k1, k2, true, s);
}
Verdict verify_star_k1k2_d(const Fsa& a, int k1, int k2, const Specification& spec) {
    Specification s = spec;
    s.normalize();
    return k1k2_engine(a, k1, k2, false, s);
}

// -------------------------------------------------------------------------
// diagnosability via CC^tn, condition (14): a rooted run whose left
// component has produced a faulty event, continuing to a cycle that is not
// made of right-only unobservable moves.

Verdict verify_diagnosable(const Fsa& a) {
    Verdict v;
    v.query.kind = PropertyKind::Diagnosable;
    a.validate();

    ConcurrentComposition cc = diag_composition(a);
    CcGraph g(cc);

    auto left_faulty = [&](const PairEvent& e) {
        return (e.kind == PairEventKind::Sync || e.kind == PairEventKind::LeftEps) &&
               a.events[e.left].faulty;
    };
    auto advances_left = [&](const PairEvent& e) { return e.kind != PairEventKind::RightEps; };

    Mask after_fault(g.n, 0);
    for (const PairTransition& t : cc.transitions)
        if (left_faulty(cc.events[t.event])) after_fault[t.dst] = 1;
    after_fault = internal::forward_star(g.any_out, after_fault);

    std::vector<char> comp_advances(g.n, 0);
    for (const PairTransition& t : cc.transitions)
        if (advances_left(cc.events[t.event]) && g.scc_of[t.src] == g.scc_of[t.dst])
            comp_advances[g.scc_of[t.src]] = 1;

    Mask bad(g.n, 0);
    for (int p = 0; p < g.n; ++p) bad[p] = after_fault[p] && comp_advances[g.scc_of[p]];

    v.holds = internal::mask_empty(bad);
    if (v.holds) return v;

    // witness: rooted prefix ending with a left-faulty event, a connecting
    // run, and a cycle containing a left-advancing pair event
    int anchor = min_pair_member(cc, bad);
    Mask anchor_reach = internal::pred_star(g.any_in, internal::make_mask(g.n, {anchor}));
    int fault_index = -1;
    for (int i = 0; i < static_cast<int>(cc.transitions.size()); ++i) {
        const PairTransition& t = cc.transitions[i];
        if (left_faulty(cc.events[t.event]) && anchor_reach[t.dst]) {
            fault_index = i;
            break;
        }
    }
    const PairTransition& ft = cc.transitions[fault_index];
    Witness w;
    auto prefix = internal::bfs_path(g, cc.initial, internal::make_mask(g.n, {ft.src}),
                                     EdgeClass::Any);
    WitnessSegment fault_seg = to_segment(cc, "fault-prefix", prefix);
    fault_seg.steps.push_back({cc.states[ft.src], cc.events[ft.event], cc.states[ft.dst]});
    w.segments.push_back(std::move(fault_seg));
    w.ambiguity = cc.states[ft.dst];
    w.segments.push_back(to_segment(
        cc, "reach",
        internal::bfs_path(g, {ft.dst}, internal::make_mask(g.n, {anchor}), EdgeClass::Any)));

    // cycle at the anchor with >= 1 left-advancing event
    int comp = g.scc_of[anchor];
    std::vector<PathStep> cycle;
    for (int i = 0; i < static_cast<int>(cc.transitions.size()) && cycle.empty(); ++i) {
        const PairTransition& t = cc.transitions[i];
        if (!advances_left(cc.events[t.event])) continue;
        if (g.scc_of[t.src] != comp || g.scc_of[t.dst] != comp) continue;
        std::vector<PathStep> path;
        if (t.src != anchor) {
            // any path between two states of one SCC stays inside the SCC
            auto head = internal::bfs_path(g, {anchor}, internal::make_mask(g.n, {t.src}),
                                           EdgeClass::Any);
            if (head.empty()) continue;
            path = head;
        }
        path.push_back({t.src, i, t.dst});
        if (t.dst != anchor) {
            auto tail = internal::bfs_path(g, {t.dst}, internal::make_mask(g.n, {anchor}),
                                           EdgeClass::Any);
            if (tail.empty()) continue;
            path.insert(path.end(), tail.begin(), tail.end());
        }
        cycle = std::move(path);
    }
    w.segments.push_back(to_segment(cc, "cycle", cycle));
    v.witness = std::move(w);
    return v;
}

Verdict verify_property(const Fsa& a, const PropertyQuery& query) {
    switch (query.kind) {
        case PropertyKind::OmegaKDelayed: return verify_omega_k_delayed(a, query.delay);
        case PropertyKind::StarKDelayed: return verify_star_k_delayed(a, query.delay);
        case PropertyKind::OmegaK1K2: return verify_omega_k1k2(a, query.k1, query.k2);
        case PropertyKind::StarK1K2: return verify_star_k1k2(a, query.k1, query.k2);
        case PropertyKind::OmegaK1K2D:
            if (!query.spec) throw ModelError("omega-k1k2-d requires a specification");
            return verify_omega_k1k2_d(a, query.k1, query.k2, *query.spec);
        case PropertyKind::StarK1K2D:
            if (!query.spec) throw ModelError("star-k1k2-d requires a specification");
            return verify_star_k1k2_d(a, query.k1, query.k2, *query.spec);
        case PropertyKind::Diagnosable: return verify_diagnosable(a);
    }
    throw ModelError("unknown property");
}

}  // namespace detkit
