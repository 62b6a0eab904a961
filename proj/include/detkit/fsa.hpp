#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace detkit {

/// Reserved spelling of the empty output label in model files.
inline constexpr const char* kEpsilonSpelling = "eps";

struct Event {
    std::string name;
    std::string label;  // empty = unobservable
    bool controllable = false;
    bool faulty = false;

    bool observable() const { return !label.empty(); }

    friend bool operator==(const Event&, const Event&) = default;
};

struct Transition {
    int src = 0;
    int event = 0;
    int dst = 0;

    friend auto operator<=>(const Transition&, const Transition&) = default;
};

class ModelError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Labeled finite-state automaton over dense state/event indices.
///
/// The transition relation may be nondeterministic and may contain deadlock
/// states; nothing here assumes deadlock-freeness or promptness.
struct Fsa {
    std::vector<std::string> states;
    std::vector<Event> events;
    std::vector<int> initial;                 // sorted, unique
    std::vector<Transition> transitions;      // sorted, unique
    std::vector<std::string> extra_alphabet;  // declared output symbols unused by any event

    int num_states() const { return static_cast<int>(states.size()); }
    int num_events() const { return static_cast<int>(events.size()); }

    int state_index(const std::string& name) const;
    int event_index(const std::string& name) const;

    /// Output alphabet: labels of observable events plus declared extras, sorted.
    std::vector<std::string> alphabet() const;

    bool has_symbol(const std::string& symbol) const;

    void normalize();       // sort + dedup initial and transitions
    void validate() const;  // throws ModelError when an invariant is broken

    friend bool operator==(const Fsa&, const Fsa&) = default;
};

/// Copy of `a` without the given transitions (events stay declared).
Fsa remove_transitions(const Fsa& a, const std::vector<Transition>& disabled);

/// Transitions whose event is controllable, in sorted order.
std::vector<Transition> controllable_transitions(const Fsa& a);

// ---------------------------------------------------------------------------
// shared graph primitives

std::vector<char> reachable_mask(const Fsa& a);

/// Sub-automaton induced by the states reachable from the initial set.
Fsa accessible_part(const Fsa& a);

struct SccDecomposition {
    std::vector<int> component_of;               // state -> component id
    std::vector<std::vector<int>> components;    // listed in reverse topological order
    std::vector<std::pair<int, int>> dag_edges;  // deduped edges between components
};

SccDecomposition scc_decomposition(const Fsa& a);

/// States of the reachable part whose SCC contains at least one observable
/// transition, i.e. states lying on a cycle with a nonempty label sequence.
std::vector<int> states_in_observable_cycles(const Fsa& a);

struct Assumption1Report {
    bool deadlock_free = false;
    bool prompt = false;
};

/// Diagnostic only; no algorithm in this library requires either property.
Assumption1Report check_assumption1(const Fsa& a);

}  // namespace detkit
