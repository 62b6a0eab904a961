#pragma once

#include <optional>
#include <string>
#include <vector>

#include "detkit/fsa.hpp"
#include "detkit/verify.hpp"

namespace detkit {

/// Enforceable targets; the delayed notions are run through the
/// omega/star-(|X|^2, K) reduction.
struct SynthesisTarget {
    PropertyKind kind = PropertyKind::OmegaK1K2;
    int delay = 0;  // K for the delayed notions
    int k1 = 0;
    int k2 = 0;
};

Verdict verify_target(const Fsa& a, const SynthesisTarget& target);

/// Does disabling every controllable transition enforce the target? By
/// monotonicity this decides whether any disabling set exists at all.
bool feasibility(const Fsa& a, const SynthesisTarget& target);

// layered witness graph -------------------------------------------------------

struct LwgNode {
    int layer = 0;          // 0 .. k1+k2 pair layers; k1+k2+1 = the single-state layer
    bool single = false;    // node over a source state instead of a pair state
    int state = -1;         // pair-state id, or source-state id for single nodes
    bool seen_obs = false;  // first layer only: an observable event occurred already
    bool post_obs = false;  // one-symbol layers: position after the layer's observable
    bool marked = false;
    bool initial = false;   // entry node (initial pair copy / single-layer initial)
};

struct LwgEdge {
    int from = -1;
    int to = -1;
    bool single = false;             // edge of the single-state layer
    PairEvent pair_event;            // when !single
    int source_event = -1;          // when single
    std::vector<Transition> originals;      // underlying source transitions
    std::vector<Transition> controllable;   // the controllable ones among them
};

struct LayeredWitnessGraph {
    int k1 = 0;
    int k2 = 0;
    bool omega = false;
    std::vector<LwgNode> nodes;
    std::vector<LwgEdge> edges;
    std::vector<int> sources;        // entry nodes of the first layer
    std::vector<int> sinks;          // top-layer marks (star) / single marks (omega)
    std::vector<int> single_initial; // omega only
    std::vector<std::pair<int, int>> pair_cache;  // pair-state id -> source state pair

    std::vector<std::pair<int, int>> marked_pairs(int layer) const;
    bool has_violation_path() const;  // some source reaches some sink
};

/// Steps 1-8: per-layer semiautomata over renamed states collecting every
/// violating transition sequence, with the unreachable remainder pruned.
LayeredWitnessGraph build_layered_witness_graph(const Fsa& a, int k1, int k2, Flavor flavor);

// plans ----------------------------------------------------------------------

struct SynthesisPlan {
    bool feasible = false;
    std::vector<Transition> disabled;  // sorted
    Fsa residual;
    Verdict verified;
    int iterations = 0;
    bool used_fallback = false;
};

/// Min-cut over the layered witness graph, re-verified and iterated until the
/// target holds on the residual automaton.
SynthesisPlan synthesize(const Fsa& a, const SynthesisTarget& target);

/// Smallest-cardinality disabling set by subset enumeration; ties broken
/// lexicographically by transition ids. Exact baseline for the heuristic.
SynthesisPlan exhaustive_minimum_plan(const Fsa& a, const SynthesisTarget& target, int cap = 12);

}  // namespace detkit
