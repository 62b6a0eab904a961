#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "detkit/composition.hpp"
#include "detkit/fsa.hpp"

namespace detkit {

enum class PropertyKind {
    OmegaKDelayed,
    StarKDelayed,
    OmegaK1K2,
    StarK1K2,
    OmegaK1K2D,
    StarK1K2D,
    Diagnosable,
};

enum class Flavor { Omega, Star };

std::string property_name(PropertyKind kind);

/// Crucial state pairs that must never occur together in one delayed
/// estimate. Required irreflexive.
struct Specification {
    std::vector<std::pair<int, int>> pairs;  // sorted, unique

    void normalize();
    void validate(const Fsa& a) const;  // throws ModelError on a diagonal pair
    bool matches(int left, int right) const;  // ordered or swapped membership
};

struct PropertyQuery {
    PropertyKind kind = PropertyKind::OmegaKDelayed;
    int delay = 0;  // K for the delayed notions
    int k1 = 0;
    int k2 = 0;
    std::optional<Specification> spec;
};

struct WitnessStep {
    std::pair<int, int> from;
    PairEvent event;
    std::pair<int, int> to;
};

struct WitnessSegment {
    std::string role;
    std::vector<WitnessStep> steps;
};

struct OmegaExtension {
    std::vector<Transition> path;   // from the witness endpoint's left component
    std::vector<Transition> cycle;  // cycle with at least one observable event
};

/// Violating layered transition sequence through the concurrent composition.
struct Witness {
    std::vector<WitnessSegment> segments;
    std::pair<int, int> ambiguity{-1, -1};
    std::optional<OmegaExtension> omega;
};

/// One named layer: either pair states of Acc(Obs(CC_A(S))) or single states.
struct LayerSets {
    std::optional<std::pair<std::string, std::vector<int>>> single_layer;
    std::vector<std::pair<std::string, std::vector<std::pair<int, int>>>> pair_layers;
};

struct Verdict {
    PropertyQuery query;
    bool holds = false;
    LayerSets layers;
    std::optional<Witness> witness;
};

// delayed strong detectability -----------------------------------------------

/// Corollary bound: both delayed verifiers clamp K to min(K, |X|^2) before
/// layering; the verdict is unchanged.
int effective_delay_bound(const Fsa& a, int delay);

Verdict verify_omega_k_delayed(const Fsa& a, int delay);
Verdict verify_star_k_delayed(const Fsa& a, int delay);

// (k1,k2)-detectability --------------------------------------------------------

Verdict verify_omega_k1k2(const Fsa& a, int k1, int k2);
Verdict verify_star_k1k2(const Fsa& a, int k1, int k2);
Verdict verify_omega_k1k2_d(const Fsa& a, int k1, int k2, const Specification& spec);
Verdict verify_star_k1k2_d(const Fsa& a, int k1, int k2, const Specification& spec);

/// |X|^2: omega-K-delayed detectability holds iff omega-(|X|^2,K) does.
int k1_bound_for_delayed(const Fsa& a);

// diagnosability ----------------------------------------------------------------

Verdict verify_diagnosable(const Fsa& a);

/// Dispatch on a property query (spec required for the D-variants).
Verdict verify_property(const Fsa& a, const PropertyQuery& query);

}  // namespace detkit
