#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "detkit/fsa.hpp"
#include "detkit/verify.hpp"

namespace detkit {

/// Brute-force semantic deciders. They evaluate the defining quantifiers of
/// each property directly on the subset dynamics of the automaton; they exist
/// to certify the structural algorithms at desk scale, not to perform.

struct OracleResult {
    bool holds = false;
    bool bounded_only = false;  // depth was below the derived witness bound

    explicit operator bool() const { return holds; }
};

/// Witness-length bound derived from the layered conditions.
int recommended_oracle_depth(const Fsa& a, int delay);

OracleResult oracle_omega_k_delayed(const Fsa& a, int delay, int depth);
OracleResult oracle_star_k_delayed(const Fsa& a, int delay, int depth);

OracleResult oracle_k1k2(const Fsa& a, int k1, int k2, Flavor flavor,
                         const std::optional<Specification>& spec, int depth);

/// The two equivalent phrasings of diagnosability: one bound for every fault
/// trace, or a per-trace bound.
enum class DiagnosisDefinition { UniformBound, PerTraceBound };

OracleResult oracle_diagnosable(const Fsa& a, int depth,
                                DiagnosisDefinition definition = DiagnosisDefinition::UniformBound);

// random instances ------------------------------------------------------------

struct RandomFsaConfig {
    int max_states = 5;
    int max_events = 6;
    int max_unobservable = 2;
    int max_labels = 3;
    std::uint64_t seed = 1;
};

Fsa random_fsa(const RandomFsaConfig& config);

Specification random_irreflexive_spec(const Fsa& a, std::uint64_t seed, int max_pairs = 3);

// cross-validation campaign ----------------------------------------------------

struct CampaignConfig {
    int instances = 500;
    int max_states = 5;
    int max_events = 6;
    int max_unobservable = 2;
    std::uint64_t seed = 1;
    int specs_per_instance = 3;
    int threads = 0;  // 0 = pick from hardware
};

struct CampaignDisagreement {
    int instance = 0;
    std::string property;
    bool structural = false;
    bool oracle = false;
    std::string model;  // serialized instance for reproduction
};

struct CampaignReport {
    int instances = 0;
    long long checks = 0;
    std::vector<CampaignDisagreement> disagreements;

    bool clean() const { return disagreements.empty(); }
};

CampaignReport run_campaign(const CampaignConfig& config);

}  // namespace detkit
