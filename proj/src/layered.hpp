#pragma once

// Internal machinery shared by the layered verification algorithms and the
// synthesis layer-graph builder. Everything operates on the accessible part
// of a concurrent composition, viewed through its observation abstraction:
// a collapsed edge p->q is observable when some sync pair event realizes it
// and silent when only unobservable pair events do.

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

#include "detkit/composition.hpp"
#include "detkit/fsa.hpp"

namespace detkit::internal {

using Mask = std::vector<char>;

struct CcGraph {
    const ConcurrentComposition* cc = nullptr;
    int n = 0;
    std::vector<std::vector<int>> obs_out, obs_in;  // collapsed observable edges
    std::vector<std::vector<int>> eps_out, eps_in;  // collapsed silent edges (no parallel sync)
    std::vector<std::vector<int>> any_out, any_in;
    std::map<std::pair<int, int>, int> rep_obs;  // (p,q) -> first sync transition index
    std::map<std::pair<int, int>, int> rep_eps;  // (p,q) -> first eps-kind transition index
    Mask obs_cycle;  // pair states whose SCC contains an observable edge
    std::vector<int> scc_of;

    explicit CcGraph(const ConcurrentComposition& comp);
};

Mask make_mask(int n, const std::vector<int>& members);
std::vector<int> mask_members(const Mask& mask);
bool mask_empty(const Mask& mask);

/// Backward closure over the given in-lists, seed included.
Mask pred_star(const std::vector<std::vector<int>>& in_lists, Mask seed);

/// {p : some observable edge p->q lands in `target`}.
Mask obs_pred(const CcGraph& g, const Mask& target);

/// One-symbol step of the layered conditions: unobservable moves followed by
/// exactly one observable edge into `target`.
inline Mask one_symbol_pred(const CcGraph& g, const Mask& target) {
    return pred_star(g.eps_in, obs_pred(g, target));
}

/// Step for the nonempty-label segments: an observable edge first, then
/// arbitrary moves into `target`.
inline Mask first_obs_pred(const CcGraph& g, const Mask& target) {
    return obs_pred(g, pred_star(g.any_in, target));
}

/// {p : some path from p into `target` contains at least one observable edge}.
inline Mask obs_somewhere_pred(const CcGraph& g, const Mask& target) {
    return pred_star(g.any_in, obs_pred(g, pred_star(g.any_in, target)));
}

Mask forward_star(const std::vector<std::vector<int>>& out_lists, Mask seed);

// -- witness-path reconstruction (all BFS orders are fixed by dense ids) ----

enum class EdgeClass { Any, Eps, Obs };

struct PathStep {
    int from = -1;
    int transition = -1;  // index into cc->transitions
    int to = -1;
};

/// Shortest path from any seed to any target state over the chosen edge
/// class; empty when a seed is already a target.
std::vector<PathStep> bfs_path(const CcGraph& g, const std::vector<int>& seeds,
                               const Mask& target, EdgeClass edge_class);

/// Unobservable moves then one observable edge into `target`.
std::vector<PathStep> one_symbol_path(const CcGraph& g, int from, const Mask& target);

/// One observable edge, then arbitrary moves into `target`.
std::vector<PathStep> first_obs_path(const CcGraph& g, int from, const Mask& target);

/// Path from `from` into `target` containing at least one observable edge.
std::vector<PathStep> obs_somewhere_path(const CcGraph& g, int from, const Mask& target);

/// Cycle at `at` (inside its SCC) containing at least one observable edge.
std::vector<PathStep> obs_cycle_path(const CcGraph& g, int at);

// -- the same helpers over the source automaton ------------------------------

struct SGraph {
    const Fsa* a = nullptr;
    std::vector<std::vector<int>> out, in;
    std::map<std::pair<int, int>, int> rep_any;  // first transition on the edge
    std::map<std::pair<int, int>, int> rep_obs;  // first observable transition
    std::vector<int> scc_of;
    Mask obs_cycle;

    explicit SGraph(const Fsa& fsa);
};

std::vector<Transition> s_bfs_path(const SGraph& g, int from, const Mask& target);
std::vector<Transition> s_obs_cycle(const SGraph& g, int at);

}  // namespace detkit::internal
