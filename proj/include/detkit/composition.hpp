#pragma once

#include <string>
#include <utility>
#include <vector>

#include "detkit/fsa.hpp"

namespace detkit {

enum class PairEventKind { Sync, LeftEps, RightEps };

/// Event of the concurrent composition: either two label-sharing observable
/// events fired together, or one unobservable event on a single side.
struct PairEvent {
    PairEventKind kind = PairEventKind::Sync;
    int left = -1;   // source event index, -1 for the silent side
    int right = -1;

    friend auto operator<=>(const PairEvent&, const PairEvent&) = default;
};

struct PairTransition {
    int src = 0;
    int event = 0;
    int dst = 0;

    friend auto operator<=>(const PairTransition&, const PairTransition&) = default;
};

enum class CompositionVariant { Standard, DiagTn };

/// Product automaton over state pairs, synchronizing the two copies on equal
/// output labels. Runs of this automaton are exactly the pairs of runs of the
/// source automaton that produce the same label sequence; in the DiagTn
/// variant the right copy is restricted to normal events.
struct ConcurrentComposition {
    CompositionVariant variant = CompositionVariant::Standard;
    bool full_state_space = false;
    int source_states = 0;

    std::vector<std::pair<int, int>> states;  // pair-state id -> (left, right)
    std::vector<int> initial;                 // sorted pair-state ids
    std::vector<PairEvent> events;            // sorted by (kind, left, right)
    std::vector<PairTransition> transitions;  // sorted, set-collapsed

    int num_states() const { return static_cast<int>(states.size()); }
    int state_id(int left, int right) const;

    bool is_sync(int event) const { return events[event].kind == PairEventKind::Sync; }
};

/// CC_A(S). By default only pairs reachable from the initial pairs are
/// materialized; `full_state_space` forces all |X|^2 pairs and the complete
/// pair-event set.
ConcurrentComposition concurrent_composition(const Fsa& a, bool full_state_space = false);

/// CC^tn(S): left component ranges over all runs, right component only over
/// runs of normal events with the same label sequence.
ConcurrentComposition diag_composition(const Fsa& a, bool full_state_space = false);

struct ObsEdge {
    int src = 0;
    int dst = 0;
    bool observable = false;

    friend auto operator<=>(const ObsEdge&, const ObsEdge&) = default;
};

/// Two-letter abstraction of the transition structure: an edge is observable
/// when some observable event realizes it, and silent only when every event
/// realizing it is unobservable.
struct ObservationAutomaton {
    int num_states = 0;
    std::vector<int> initial;
    std::vector<ObsEdge> edges;  // sorted
};

ObservationAutomaton observation_automaton(const Fsa& a);

std::string pair_state_name(const Fsa& a, std::pair<int, int> pair);
std::string pair_event_name(const Fsa& a, const PairEvent& event);

/// Re-expresses a composition as a plain automaton with canonical pair names,
/// for serialization and DOT export.
Fsa composition_to_fsa(const Fsa& a, const ConcurrentComposition& cc);

/// Observation automaton as a plain automaton with events `ehat` / `eps`.
Fsa observation_to_fsa(const Fsa& a, const ObservationAutomaton& obs);

}  // namespace detkit
