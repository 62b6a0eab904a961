#pragma once

#include <string>

#include "detkit/fsa.hpp"
#include "detkit/oracle.hpp"
#include "detkit/synthesis.hpp"
#include "detkit/verify.hpp"

namespace detkit {

/// Stable JSON renderings (sorted keys, dense-id order) for golden-file tests.
std::string layers_json(const Fsa& a, const Verdict& verdict);
std::string verdict_json(const Fsa& a, const Verdict& verdict);
std::string witness_json(const Fsa& a, const Witness& witness);
std::string plan_json(const Fsa& a, const SynthesisPlan& plan);
std::string campaign_json(const CampaignReport& report);

}  // namespace detkit
