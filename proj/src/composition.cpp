#include "detkit/composition.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

namespace detkit {

int ConcurrentComposition::state_id(int left, int right) const {
    if (full_state_space) {
        if (left < 0 || right < 0 || left >= source_states || right >= source_states) return -1;
        return left * source_states + right;
    }
    for (int i = 0; i < num_states(); ++i)
        if (states[i].first == left && states[i].second == right) return i;
    return -1;
}

namespace {

struct SourceAdjacency {
    // per state: observable transitions grouped by label, and unobservable ones
    std::vector<std::map<std::string, std::vector<std::pair<int, int>>>> obs;  // (event, dst)
    std::vector<std::vector<std::pair<int, int>>> eps;

    SourceAdjacency(const Fsa& a, bool right_normal_only, bool right_side) {
        obs.resize(a.num_states());
        eps.resize(a.num_states());
        for (const Transition& t : a.transitions) {
            const Event& e = a.events[t.event];
            if (right_side && right_normal_only && e.faulty) continue;
            if (e.observable())
                obs[t.src][e.label].emplace_back(t.event, t.dst);
            else
                eps[t.src].emplace_back(t.event, t.dst);
        }
    }
};

struct RawTransition {
    std::pair<int, int> src;
    PairEvent event;
    std::pair<int, int> dst;
};

ConcurrentComposition build(const Fsa& a, CompositionVariant variant, bool full) {
    const bool normal_right = variant == CompositionVariant::DiagTn;
    SourceAdjacency left(a, false, false);
    SourceAdjacency right(a, normal_right, true);

    ConcurrentComposition cc;
    cc.variant = variant;
    cc.full_state_space = full;
    cc.source_states = a.num_states();

    std::vector<std::pair<int, int>> worklist;
    std::map<std::pair<int, int>, int> ids;
    auto intern = [&](std::pair<int, int> p) {
        auto [it, inserted] = ids.emplace(p, static_cast<int>(cc.states.size()));
        if (inserted) {
            cc.states.push_back(p);
            worklist.push_back(p);
        }
        return it->second;
    };

    if (full) {
        for (int l = 0; l < a.num_states(); ++l)
            for (int r = 0; r < a.num_states(); ++r) intern({l, r});
    } else {
        for (int l : a.initial)
            for (int r : a.initial) intern({l, r});
    }
    for (int l : a.initial)
        for (int r : a.initial) cc.initial.push_back(ids.at({l, r}));
    std::sort(cc.initial.begin(), cc.initial.end());
    cc.initial.erase(std::unique(cc.initial.begin(), cc.initial.end()), cc.initial.end());

    std::vector<RawTransition> raw;
    size_t cursor = 0;
    while (cursor < worklist.size()) {
        auto [l, r] = worklist[cursor++];
        for (const auto& [label, lts] : left.obs[l]) {
            auto it = right.obs[r].find(label);
            if (it == right.obs[r].end()) continue;
            for (const auto& [le, ld] : lts)
                for (const auto& [re, rd] : it->second) {
                    intern({ld, rd});
                    raw.push_back({{l, r}, {PairEventKind::Sync, le, re}, {ld, rd}});
                }
        }
        for (const auto& [le, ld] : left.eps[l]) {
            intern({ld, r});
            raw.push_back({{l, r}, {PairEventKind::LeftEps, le, -1}, {ld, r}});
        }
        for (const auto& [re, rd] : right.eps[r]) {
            intern({l, rd});
            raw.push_back({{l, r}, {PairEventKind::RightEps, -1, re}, {l, rd}});
        }
    }

    std::set<PairEvent> event_set;
    if (full) {
        // complete pair-event set straight from the definition
        for (int e1 = 0; e1 < a.num_events(); ++e1) {
            const Event& ev1 = a.events[e1];
            if (ev1.observable()) {
                for (int e2 = 0; e2 < a.num_events(); ++e2) {
                    const Event& ev2 = a.events[e2];
                    if (!ev2.observable() || ev2.label != ev1.label) continue;
                    if (normal_right && ev2.faulty) continue;
                    event_set.insert({PairEventKind::Sync, e1, e2});
                }
            } else {
                event_set.insert({PairEventKind::LeftEps, e1, -1});
                if (!normal_right || !ev1.faulty)
                    event_set.insert({PairEventKind::RightEps, -1, e1});
            }
        }
    } else {
        for (const RawTransition& t : raw) event_set.insert(t.event);
    }
    cc.events.assign(event_set.begin(), event_set.end());

    std::map<PairEvent, int> event_ids;
    for (int i = 0; i < static_cast<int>(cc.events.size()); ++i) event_ids[cc.events[i]] = i;

    std::set<PairTransition> tset;
    for (const RawTransition& t : raw)
        tset.insert({ids.at(t.src), event_ids.at(t.event), ids.at(t.dst)});
    cc.transitions.assign(tset.begin(), tset.end());
    return cc;
}

}  // namespace

ConcurrentComposition concurrent_composition(const Fsa& a, bool full_state_space) {
    return build(a, CompositionVariant::Standard, full_state_space);
}

ConcurrentComposition diag_composition(const Fsa& a, bool full_state_space) {
    return build(a, CompositionVariant::DiagTn, full_state_space);
}

ObservationAutomaton observation_automaton(const Fsa& a) {
    ObservationAutomaton obs;
    obs.num_states = a.num_states();
    obs.initial = a.initial;
    std::map<std::pair<int, int>, bool> seen;  // (src,dst) -> any observable event
    for (const Transition& t : a.transitions) {
        bool& any_obs = seen[{t.src, t.dst}];
        any_obs = any_obs || a.events[t.event].observable();
    }
    for (const auto& [edge, any_obs] : seen)
        obs.edges.push_back({edge.first, edge.second, any_obs});
    std::sort(obs.edges.begin(), obs.edges.end());
    return obs;
}

std::string pair_state_name(const Fsa& a, std::pair<int, int> pair) {
    return "(" + a.states[pair.first] + "," + a.states[pair.second] + ")";
}

std::string pair_event_name(const Fsa& a, const PairEvent& event) {
    auto side = [&](int e) {
        return e < 0 ? std::string(kEpsilonSpelling) : a.events[e].name;
    };
    return "(" + side(event.left) + "," + side(event.right) + ")";
}

Fsa composition_to_fsa(const Fsa& a, const ConcurrentComposition& cc) {
    Fsa out;
    for (const auto& pair : cc.states) out.states.push_back(pair_state_name(a, pair));
    for (const PairEvent& pe : cc.events) {
        Event e;
        e.name = pair_event_name(a, pe);
        e.label = pe.kind == PairEventKind::Sync ? a.events[pe.left].label : "";
        out.events.push_back(std::move(e));
    }
    out.initial = cc.initial;
    for (const PairTransition& t : cc.transitions)
        out.transitions.push_back({t.src, t.event, t.dst});
    out.normalize();
    return out;
}

Fsa observation_to_fsa(const Fsa& a, const ObservationAutomaton& obs) {
    Fsa out;
    for (int s = 0; s < obs.num_states; ++s) out.states.push_back(a.states[s]);
    out.events.push_back({"ehat", "ehat", false, false});
    out.events.push_back({"eps", "", false, false});
    out.initial = obs.initial;
    for (const ObsEdge& e : obs.edges)
        out.transitions.push_back({e.src, e.observable ? 0 : 1, e.dst});
    out.normalize();
    return out;
}

}  // namespace detkit
