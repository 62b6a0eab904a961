#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "detkit/composition.hpp"
#include "detkit/estimate.hpp"
#include "detkit/json_out.hpp"
#include "detkit/model_io.hpp"
#include "detkit/oracle.hpp"
#include "detkit/synthesis.hpp"
#include "detkit/verify.hpp"

namespace {

constexpr int kExitHolds = 0;
constexpr int kExitFails = 1;
constexpr int kExitError = 2;
constexpr int kMaxOracleDepth = 10000;

bool g_json_errors = false;

int fail_usage(const std::string& message) {
    if (g_json_errors)
        std::cout << "{\"error\": \"" << message << "\"}\n";
    std::cerr << "detkit: " << message << "\n";
    return kExitError;
}

detkit::Fsa load_model(const std::string& path) {
    detkit::ParsedModel parsed = detkit::parse_model_file(path);
    for (const std::string& w : parsed.warnings) std::cerr << "warning: " << w << "\n";
    return parsed.fsa;
}

detkit::Specification load_spec(const detkit::Fsa& a, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw detkit::ModelError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    detkit::Specification spec;
    for (const auto& [x, y] : detkit::parse_spec_pairs(buf.str())) {
        int xi = a.state_index(x);
        int yi = a.state_index(y);
        if (xi < 0) throw detkit::ModelError("undeclared state '" + x + "' in spec");
        if (yi < 0) throw detkit::ModelError("undeclared state '" + y + "' in spec");
        spec.pairs.emplace_back(xi, yi);
    }
    spec.normalize();
    spec.validate(a);
    return spec;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw detkit::ModelError("cannot write '" + path + "'");
    out << content;
}

struct PropertyArgs {
    std::string property;
    int k = 0;
    int k1 = 0;
    int k2 = 0;
    std::string spec_path;
};

std::optional<detkit::PropertyQuery> to_query(const detkit::Fsa& a, const PropertyArgs& args,
                                              std::string& error) {
    detkit::PropertyQuery q;
    if (args.property == "omega-k-delayed" || args.property == "star-k-delayed") {
        q.kind = args.property[0] == 'o' ? detkit::PropertyKind::OmegaKDelayed
                                         : detkit::PropertyKind::StarKDelayed;
        q.delay = args.k;
    } else if (args.property == "omega-k1k2" || args.property == "star-k1k2") {
        q.kind = args.property[0] == 'o' ? detkit::PropertyKind::OmegaK1K2
                                         : detkit::PropertyKind::StarK1K2;
        q.k1 = args.k1;
        q.k2 = args.k2;
    } else if (args.property == "omega-k1k2-d" || args.property == "star-k1k2-d") {
        q.kind = args.property[0] == 'o' ? detkit::PropertyKind::OmegaK1K2D
                                         : detkit::PropertyKind::StarK1K2D;
        q.k1 = args.k1;
        q.k2 = args.k2;
        if (args.spec_path.empty()) {
            error = "--spec is required for the D-variants";
            return std::nullopt;
        }
        q.spec = load_spec(a, args.spec_path);
    } else if (args.property == "diagnosable") {
        q.kind = detkit::PropertyKind::Diagnosable;
    } else {
        error = "unknown property '" + args.property + "'";
        return std::nullopt;
    }
    if (!args.spec_path.empty() && q.kind != detkit::PropertyKind::OmegaK1K2D &&
        q.kind != detkit::PropertyKind::StarK1K2D) {
        error = "--spec is only valid with the D-variants";
        return std::nullopt;
    }
    return q;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"detkit: delayed detectability and diagnosability of labeled automata"};
    app.set_version_flag("--version", "detkit 0.1.0");
    app.require_subcommand(1);
    app.add_flag("--error-json", g_json_errors, "also print errors as a JSON object on stdout");

    // verify ------------------------------------------------------------
    auto* verify = app.add_subcommand("verify", "decide a detectability/diagnosability property");
    PropertyArgs vargs;
    std::string v_model, v_witness;
    bool v_layers = false;
    verify->add_option("--property", vargs.property, "property to decide")->required();
    verify->add_option("--k", vargs.k, "delay K");
    verify->add_option("--k1", vargs.k1, "prefix bound k1");
    verify->add_option("--k2", vargs.k2, "delay bound k2");
    verify->add_option("--spec", vargs.spec_path, "specification file (one 'x y' pair per line)");
    verify->add_option("model", v_model, "model file")->required();
    verify->add_option("--witness", v_witness, "write the violation witness as JSON");
    verify->add_flag("--layers", v_layers, "dump the layer sets as JSON");

    // compose -----------------------------------------------------------
    auto* compose = app.add_subcommand("compose", "emit a composition of the model");
    std::string c_kind = "cc", c_model, c_dot;
    compose->add_option("--kind", c_kind, "cc | obs | cc-tn")->required();
    compose->add_option("model", c_model, "model file")->required();
    compose->add_option("--dot", c_dot, "also write DOT to this path");

    // synthesize ----------------------------------------------------------
    auto* synth = app.add_subcommand("synthesize", "compute a disabling set enforcing a property");
    PropertyArgs sargs;
    std::string s_model, s_out;
    bool s_exact = false;
    synth->add_option("--property", sargs.property, "target property")->required();
    synth->add_option("--k", sargs.k, "delay K");
    synth->add_option("--k1", sargs.k1, "prefix bound k1");
    synth->add_option("--k2", sargs.k2, "delay bound k2");
    synth->add_option("model", s_model, "model file")->required();
    synth->add_option("--out", s_out, "write the plan as JSON");
    synth->add_flag("--exact", s_exact, "exhaustive minimum plan instead of the min-cut heuristic");

    // oracle --------------------------------------------------------------
    auto* oracle = app.add_subcommand("oracle", "brute-force semantic decision at desk scale");
    PropertyArgs oargs;
    std::string o_model;
    int o_depth = -1;
    oracle->add_option("--property", oargs.property, "property to decide")->required();
    oracle->add_option("--k", oargs.k, "delay K");
    oracle->add_option("--k1", oargs.k1, "prefix bound k1");
    oracle->add_option("--k2", oargs.k2, "delay bound k2");
    oracle->add_option("--spec", oargs.spec_path, "specification file");
    oracle->add_option("--depth", o_depth, "enumeration depth (default: derived bound)");
    oracle->add_option("model", o_model, "model file")->required();

    // campaign --------------------------------------------------------------
    auto* campaign = app.add_subcommand("campaign", "oracle-vs-verifier cross-validation");
    detkit::CampaignConfig cc_config;
    campaign->add_option("--instances", cc_config.instances, "number of random instances");
    campaign->add_option("--states", cc_config.max_states, "max states per instance");
    campaign->add_option("--events", cc_config.max_events, "max events per instance");
    campaign->add_option("--seed", cc_config.seed, "random seed");
    campaign->add_option("--threads", cc_config.threads, "worker threads (0 = auto)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*verify) {
            detkit::Fsa model = load_model(v_model);
            std::string error;
            auto query = to_query(model, vargs, error);
            if (!query) return fail_usage(error);
            detkit::Verdict verdict = detkit::verify_property(model, *query);
            if (v_layers) std::cout << detkit::layers_json(model, verdict) << "\n";
            if (!v_witness.empty() && verdict.witness)
                write_file(v_witness, detkit::witness_json(model, *verdict.witness));
            std::cout << detkit::property_name(query->kind) << ": "
                      << (verdict.holds ? "holds" : "fails") << "\n";
            return verdict.holds ? kExitHolds : kExitFails;
        }
        if (*compose) {
            detkit::Fsa model = load_model(c_model);
            detkit::Fsa result;
            if (c_kind == "cc")
                result = detkit::composition_to_fsa(model, detkit::concurrent_composition(model));
            else if (c_kind == "cc-tn")
                result = detkit::composition_to_fsa(model, detkit::diag_composition(model));
            else if (c_kind == "obs")
                result = detkit::observation_to_fsa(model, detkit::observation_automaton(model));
            else
                return fail_usage("unknown composition kind '" + c_kind + "'");
            std::cout << detkit::serialize_model(result);
            if (!c_dot.empty()) write_file(c_dot, detkit::to_dot(result));
            return kExitHolds;
        }
        if (*synth) {
            detkit::Fsa model = load_model(s_model);
            detkit::SynthesisTarget target;
            if (sargs.property == "omega-k-delayed" || sargs.property == "star-k-delayed") {
                target.kind = sargs.property[0] == 'o' ? detkit::PropertyKind::OmegaKDelayed
                                                       : detkit::PropertyKind::StarKDelayed;
                target.delay = sargs.k;
            } else if (sargs.property == "omega-k1k2" || sargs.property == "star-k1k2") {
                target.kind = sargs.property[0] == 'o' ? detkit::PropertyKind::OmegaK1K2
                                                       : detkit::PropertyKind::StarK1K2;
                target.k1 = sargs.k1;
                target.k2 = sargs.k2;
            } else {
                return fail_usage("unknown synthesis target '" + sargs.property + "'");
            }
            detkit::SynthesisPlan plan = s_exact ? detkit::exhaustive_minimum_plan(model, target)
                                                 : detkit::synthesize(model, target);
            std::string rendered = detkit::plan_json(model, plan);
            if (!s_out.empty()) write_file(s_out, rendered);
            std::cout << rendered << "\n";
            return plan.feasible ? kExitHolds : kExitFails;
        }
        if (*oracle) {
            detkit::Fsa model = load_model(o_model);
            std::string error;
            auto query = to_query(model, oargs, error);
            if (!query) return fail_usage(error);
            int depth = o_depth >= 0
                            ? o_depth
                            : detkit::recommended_oracle_depth(
                                  model, std::max(query->delay, query->k2));
            if (depth > kMaxOracleDepth)
                return fail_usage("--depth exceeds the CLI cap of 10000");
            detkit::OracleResult result;
            switch (query->kind) {
                case detkit::PropertyKind::OmegaKDelayed:
                    result = detkit::oracle_omega_k_delayed(model, query->delay, depth);
                    break;
                case detkit::PropertyKind::StarKDelayed:
                    result = detkit::oracle_star_k_delayed(model, query->delay, depth);
                    break;
                case detkit::PropertyKind::OmegaK1K2:
                case detkit::PropertyKind::OmegaK1K2D:
                    result = detkit::oracle_k1k2(model, query->k1, query->k2,
                                                 detkit::Flavor::Omega, query->spec, depth);
                    break;
                case detkit::PropertyKind::StarK1K2:
                case detkit::PropertyKind::StarK1K2D:
                    result = detkit::oracle_k1k2(model, query->k1, query->k2,
                                                 detkit::Flavor::Star, query->spec, depth);
                    break;
                case detkit::PropertyKind::Diagnosable:
                    result = detkit::oracle_diagnosable(model, depth);
                    break;
            }
            std::cout << detkit::property_name(query->kind) << ": "
                      << (result.holds ? "holds" : "fails")
                      << (result.bounded_only ? " (bounded-only)" : "") << "\n";
            return result.holds ? kExitHolds : kExitFails;
        }
        if (*campaign) {
            auto start = std::chrono::steady_clock::now();
            detkit::CampaignReport report = detkit::run_campaign(cc_config);
            auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                               std::chrono::steady_clock::now() - start)
                               .count();
            std::cout << detkit::campaign_json(report) << "\n";
            std::cerr << "campaign: " << report.checks << " checks over " << report.instances
                      << " instances in " << elapsed << " ms, "
                      << report.disagreements.size() << " disagreements\n";
            return report.clean() ? kExitHolds : kExitFails;
        }
    } catch (const detkit::ModelError& err) {
        return fail_usage(err.what());
    } catch (const std::exception& err) {
        return fail_usage(err.what());
    }
    return fail_usage("no subcommand");
}
