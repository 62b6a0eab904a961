#include "detkit/json_out.hpp"

#include "detkit/composition.hpp"
#include "detkit/model_io.hpp"
#include "json.hpp"

namespace detkit {

namespace {

using nlohmann::json;  // std::map-backed: object keys come out sorted

json pair_list(const Fsa& a, const std::vector<std::pair<int, int>>& pairs) {
    json out = json::array();
    for (const auto& [l, r] : pairs) out.push_back({a.states[l], a.states[r]});
    return out;
}

json layers_value(const Fsa& a, const Verdict& verdict) {
    json layers = json::object();
    if (verdict.layers.single_layer) {
        json names = json::array();
        for (int s : verdict.layers.single_layer->second) names.push_back(a.states[s]);
        layers[verdict.layers.single_layer->first] = names;
    }
    for (const auto& [name, pairs] : verdict.layers.pair_layers)
        layers[name] = pair_list(a, pairs);
    return layers;
}

json transition_value(const Fsa& a, const Transition& t) {
    return json::array({a.states[t.src], a.events[t.event].name, a.states[t.dst]});
}

json witness_value(const Fsa& a, const Witness& w) {
    json out;
    out["ambiguity"] = {a.states[w.ambiguity.first], a.states[w.ambiguity.second]};
    json segments = json::array();
    for (const WitnessSegment& seg : w.segments) {
        json steps = json::array();
        for (const WitnessStep& step : seg.steps) {
            steps.push_back({{"event", pair_event_name(a, step.event)},
                             {"from", {a.states[step.from.first], a.states[step.from.second]}},
                             {"to", {a.states[step.to.first], a.states[step.to.second]}}});
        }
        segments.push_back({{"role", seg.role}, {"steps", steps}});
    }
    out["segments"] = segments;
    if (w.omega) {
        json ext;
        ext["path"] = json::array();
        for (const Transition& t : w.omega->path) ext["path"].push_back(transition_value(a, t));
        ext["cycle"] = json::array();
        for (const Transition& t : w.omega->cycle) ext["cycle"].push_back(transition_value(a, t));
        out["omega_extension"] = ext;
    }
    return out;
}

json query_value(const Fsa& a, const PropertyQuery& q) {
    json out;
    out["property"] = property_name(q.kind);
    switch (q.kind) {
        case PropertyKind::OmegaKDelayed:
        case PropertyKind::StarKDelayed:
            out["k"] = q.delay;
            break;
        case PropertyKind::OmegaK1K2:
        case PropertyKind::StarK1K2:
        case PropertyKind::OmegaK1K2D:
        case PropertyKind::StarK1K2D:
            out["k1"] = q.k1;
            out["k2"] = q.k2;
            break;
        case PropertyKind::Diagnosable:
            break;
    }
    if (q.spec) out["spec"] = pair_list(a, q.spec->pairs);
    return out;
}

}  // namespace

std::string layers_json(const Fsa& a, const Verdict& verdict) {
    return layers_value(a, verdict).dump(2);
}

std::string verdict_json(const Fsa& a, const Verdict& verdict) {
    json out;
    out["query"] = query_value(a, verdict.query);
    out["holds"] = verdict.holds;
    out["layers"] = layers_value(a, verdict);
    if (verdict.witness) out["witness"] = witness_value(a, *verdict.witness);
    return out.dump(2);
}

std::string witness_json(const Fsa& a, const Witness& witness) {
    return witness_value(a, witness).dump(2);
}

std::string plan_json(const Fsa& a, const SynthesisPlan& plan) {
    json out;
    out["feasible"] = plan.feasible;
    out["disabled"] = json::array();
    for (const Transition& t : plan.disabled) out["disabled"].push_back(transition_value(a, t));
    out["iterations"] = plan.iterations;
    out["used_fallback"] = plan.used_fallback;
    out["residual"] = serialize_model(plan.residual);
    out["verified_holds"] = plan.verified.holds;
    return out.dump(2);
}

std::string campaign_json(const CampaignReport& report) {
    json out;
    out["instances"] = report.instances;
    out["checks"] = report.checks;
    out["disagreements"] = json::array();
    for (const CampaignDisagreement& d : report.disagreements)
        out["disagreements"].push_back({{"instance", d.instance},
                                        {"property", d.property},
                                        {"structural", d.structural},
                                        {"oracle", d.oracle},
                                        {"model", d.model}});
    return out.dump(2);
}

}  // namespace detkit
