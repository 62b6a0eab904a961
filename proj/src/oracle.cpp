#include "detkit/oracle.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <thread>

#include "detkit/estimate.hpp"
#include "detkit/model_io.hpp"

namespace detkit {

namespace {

using Bits = std::uint64_t;

constexpr int kOracleStateLimit = 20;

void check_scale(const Fsa& a) {
    if (a.num_states() > kOracleStateLimit)
        throw ModelError("oracle is a desk-scale certifier (state limit " +
                         std::to_string(kOracleStateLimit) + ")");
}

struct SubsetDynamics {
    const Fsa* a;
    int n;
    std::vector<std::string> labels;  // labels actually used by observable events
    std::vector<Bits> eps_succ;       // per state: one unobservable step
    std::vector<std::vector<Bits>> label_succ;  // per label, per state
    Bits reach_cycle = 0;             // states from which an observable cycle is reachable

    explicit SubsetDynamics(const Fsa& fsa) : a(&fsa), n(fsa.num_states()) {
        std::set<std::string> used;
        for (const Event& e : fsa.events)
            if (e.observable()) used.insert(e.label);
        labels.assign(used.begin(), used.end());
        eps_succ.assign(n, 0);
        label_succ.assign(labels.size(), std::vector<Bits>(n, 0));
        for (const Transition& t : fsa.transitions) {
            const Event& e = fsa.events[t.event];
            if (e.observable()) {
                int li = static_cast<int>(
                    std::lower_bound(labels.begin(), labels.end(), e.label) - labels.begin());
                label_succ[li][t.src] |= Bits{1} << t.dst;
            } else {
                eps_succ[t.src] |= Bits{1} << t.dst;
            }
        }
        Bits cyc = 0;
        for (int s : states_in_observable_cycles(fsa)) cyc |= Bits{1} << s;
        // backward closure over all transitions
        Bits cur = cyc;
        bool grew = true;
        while (grew) {
            grew = false;
            for (const Transition& t : fsa.transitions) {
                Bits bit = Bits{1} << t.src;
                if ((cur >> t.dst & 1) && !(cur & bit)) {
                    cur |= bit;
                    grew = true;
                }
            }
        }
        reach_cycle = cur;
    }

    Bits eps_closure(Bits set) const {
        Bits cur = set;
        bool grew = true;
        while (grew) {
            grew = false;
            Bits next = cur;
            for (int s = 0; s < n; ++s)
                if (cur >> s & 1) next |= eps_succ[s];
            if (next != cur) {
                cur = next;
                grew = true;
            }
        }
        return cur;
    }

    Bits move(Bits set, int label_index) const {
        Bits out = 0;
        for (int s = 0; s < n; ++s)
            if (set >> s & 1) out |= label_succ[label_index][s];
        return out;
    }

    Bits step(Bits set, int label_index) const { return eps_closure(move(set, label_index)); }

    Bits initial_estimate() const {
        Bits init = 0;
        for (int s : a->initial) init |= Bits{1} << s;
        return eps_closure(init);
    }
};

int popcount(Bits b) { return static_cast<int>(__builtin_popcountll(b)); }

/// All estimates reachable together with a saturating count of observed
/// symbols: (A, min(|sigma1|, cap)).
std::vector<std::pair<Bits, int>> reachable_capped(const SubsetDynamics& dyn, int cap) {
    std::map<std::pair<Bits, int>, char> seen;
    std::queue<std::pair<Bits, int>> queue;
    auto push = [&](Bits set, int c) {
        if (set == 0) return;
        auto key = std::make_pair(set, c);
        if (seen.emplace(key, 1).second) queue.push(key);
    };
    push(dyn.initial_estimate(), 0);
    while (!queue.empty()) {
        auto [set, c] = queue.front();
        queue.pop();
        for (size_t li = 0; li < dyn.labels.size(); ++li)
            push(dyn.step(set, static_cast<int>(li)), std::min(c + 1, cap));
    }
    std::vector<std::pair<Bits, int>> out;
    for (const auto& [key, _] : seen) out.push_back(key);
    return out;
}

/// Does some continuation word of exactly `len` symbols witness a violation
/// from estimate `set`? `ambiguous` receives, per enumerated word, the subset
/// of `set` that can generate the word.
template <typename Check>
bool search_suffix(const SubsetDynamics& dyn, Bits set, int len, const Check& violates) {
    // per boundary candidate x: the positions reachable while generating the
    // suffix enumerated so far; plus the joint evolution for the omega check
    struct Node {
        std::vector<Bits> per_state;  // aligned with `candidates`
        Bits joint;
        int depth;
    };
    std::vector<int> candidates;
    for (int s = 0; s < dyn.n; ++s)
        if (set >> s & 1) candidates.push_back(s);

    Node root;
    for (int s : candidates) root.per_state.push_back(dyn.eps_closure(Bits{1} << s));
    root.joint = set;
    root.depth = 0;

    std::vector<Node> stack{root};
    while (!stack.empty()) {
        Node node = std::move(stack.back());
        stack.pop_back();
        if (node.depth == len) {
            Bits ambiguous = 0;
            for (size_t i = 0; i < candidates.size(); ++i)
                if (len == 0 || node.per_state[i] != 0) ambiguous |= Bits{1} << candidates[i];
            if (violates(ambiguous, node.joint)) return true;
            continue;
        }
        for (size_t li = 0; li < dyn.labels.size(); ++li) {
            Node next;
            next.depth = node.depth + 1;
            next.joint = dyn.step(node.joint, static_cast<int>(li));
            bool alive = false;
            next.per_state.resize(candidates.size());
            for (size_t i = 0; i < candidates.size(); ++i) {
                next.per_state[i] = dyn.step(node.per_state[i], static_cast<int>(li));
                alive = alive || next.per_state[i] != 0;
            }
            if (alive) stack.push_back(std::move(next));
        }
    }
    return false;
}

OracleResult delayed_oracle(const Fsa& a, int delay, int depth, bool omega) {
    check_scale(a);
    a.validate();
    SubsetDynamics dyn(a);
    const long long n = a.num_states();
    long long pump = omega ? n * n * n + 1 : n * n + 1;
    int cap = static_cast<int>(std::min<long long>(pump, depth));
    OracleResult res;
    res.bounded_only = depth < recommended_oracle_depth(a, delay);

    auto violates = [&](Bits ambiguous, Bits joint) {
        if (popcount(ambiguous) < 2) return false;
        if (omega && (joint & dyn.reach_cycle) == 0) return false;
        return true;
    };
    bool violated = false;
    for (const auto& [set, c] : reachable_capped(dyn, cap)) {
        if (c < cap) continue;  // need arbitrarily long prefixes
        if (search_suffix(dyn, set, delay, violates)) {
            violated = true;
            break;
        }
    }
    res.holds = !violated;
    return res;
}

}  // namespace

int recommended_oracle_depth(const Fsa& a, int delay) {
    return a.num_states() * a.num_states() * (delay + 3);
}

OracleResult oracle_omega_k_delayed(const Fsa& a, int delay, int depth) {
    return delayed_oracle(a, delay, depth, true);
}

OracleResult oracle_star_k_delayed(const Fsa& a, int delay, int depth) {
    return delayed_oracle(a, delay, depth, false);
}

OracleResult oracle_k1k2(const Fsa& a, int k1, int k2, Flavor flavor,
                         const std::optional<Specification>& spec, int depth) {
    check_scale(a);
    a.validate();
    if (spec) spec->validate(a);
    SubsetDynamics dyn(a);
    const bool omega = flavor == Flavor::Omega;
    OracleResult res;
    res.bounded_only = depth < recommended_oracle_depth(a, k2);

    auto violates = [&](Bits ambiguous, Bits joint) {
        if (omega && (joint & dyn.reach_cycle) == 0) return false;
        if (spec) {
            for (const auto& [x, y] : spec->pairs)
                if ((ambiguous >> x & 1) && (ambiguous >> y & 1)) return true;
            return false;
        }
        return popcount(ambiguous) >= 2;
    };
    bool violated = false;
    for (const auto& [set, c] : reachable_capped(dyn, k1)) {
        if (c < k1) continue;
        if (search_suffix(dyn, set, k2, violates)) {
            violated = true;
            break;
        }
    }
    res.holds = !violated;
    return res;
}

// ---------------------------------------------------------------------------
// diagnosability: search for a fault run whose continuation can be pumped
// while some fault-free run keeps producing the same label sequence

namespace {

struct DiagDynamics {
    const Fsa* a;
    int n;
    std::vector<std::string> labels;
    std::vector<Bits> normal_eps_succ;
    std::vector<std::vector<Bits>> normal_label_succ;

    explicit DiagDynamics(const Fsa& fsa) : a(&fsa), n(fsa.num_states()) {
        std::set<std::string> used;
        for (const Event& e : fsa.events)
            if (e.observable()) used.insert(e.label);
        labels.assign(used.begin(), used.end());
        normal_eps_succ.assign(n, 0);
        normal_label_succ.assign(labels.size(), std::vector<Bits>(n, 0));
        for (const Transition& t : fsa.transitions) {
            const Event& e = fsa.events[t.event];
            if (e.faulty) continue;
            if (e.observable()) {
                int li = static_cast<int>(
                    std::lower_bound(labels.begin(), labels.end(), e.label) - labels.begin());
                normal_label_succ[li][t.src] |= Bits{1} << t.dst;
            } else {
                normal_eps_succ[t.src] |= Bits{1} << t.dst;
            }
        }
    }

    Bits closure(Bits set) const {
        Bits cur = set;
        bool grew = true;
        while (grew) {
            grew = false;
            Bits next = cur;
            for (int s = 0; s < n; ++s)
                if (cur >> s & 1) next |= normal_eps_succ[s];
            if (next != cur) {
                cur = next;
                grew = true;
            }
        }
        return cur;
    }

    Bits step(Bits set, int li) const {
        Bits moved = 0;
        for (int s = 0; s < n; ++s)
            if (set >> s & 1) moved |= normal_label_succ[li][s];
        return closure(moved);
    }
};

struct DiagNode {
    int state;
    bool fault;
    Bits matching;  // normal-run estimate for the labels produced so far
    bool symbolful; // whether any symbol has been produced yet

    friend auto operator<=>(const DiagNode&, const DiagNode&) = default;
};

struct DiagGraph {
    std::vector<DiagNode> nodes;
    std::map<DiagNode, int> ids;
    std::vector<std::vector<int>> succ;
    std::vector<int> start;
    bool strict_silent_witness = false;  // some nonempty fault-free silent run exists

    int intern(const DiagNode& node) {
        auto [it, inserted] = ids.emplace(node, static_cast<int>(nodes.size()));
        if (inserted) {
            nodes.push_back(node);
            succ.emplace_back();
        }
        return it->second;
    }

    bool witness_ok(const DiagNode& node) const {
        return node.symbolful ? node.matching != 0 : strict_silent_witness;
    }
};

DiagGraph build_diag_graph(const Fsa& a) {
    DiagDynamics dyn(a);
    DiagGraph g;

    Bits init = 0;
    for (int s : a.initial) init |= Bits{1} << s;
    Bits c0 = dyn.closure(init);

    // nonempty fault-free unobservable runs from the initial set
    Bits strict = 0;
    for (const Transition& t : a.transitions) {
        const Event& e = a.events[t.event];
        if (!e.faulty && !e.observable() && (c0 >> t.src & 1)) strict |= Bits{1} << t.dst;
    }
    g.strict_silent_witness = dyn.closure(strict) != 0;

    std::queue<int> queue;
    for (int s : a.initial) {
        int id = g.intern({s, false, c0, false});
        queue.push(id);
    }
    std::vector<char> expanded;
    while (!queue.empty()) {
        int id = queue.front();
        queue.pop();
        if (static_cast<int>(expanded.size()) <= id) expanded.resize(g.nodes.size(), 0);
        if (expanded[id]) continue;
        expanded[id] = 1;
        DiagNode node = g.nodes[id];
        for (const Transition& t : a.transitions) {
            if (t.src != node.state) continue;
            const Event& e = a.events[t.event];
            DiagNode next;
            next.state = t.dst;
            next.fault = node.fault || e.faulty;
            if (e.observable()) {
                int li = static_cast<int>(
                    std::lower_bound(dyn.labels.begin(), dyn.labels.end(), e.label) -
                    dyn.labels.begin());
                next.matching = dyn.step(node.matching, li);
                next.symbolful = true;
            } else {
                next.matching = node.matching;
                next.symbolful = node.symbolful;
            }
            int nid = g.intern(next);
            g.succ[id].push_back(nid);
            if (static_cast<int>(expanded.size()) <= nid) expanded.resize(g.nodes.size(), 0);
            if (!expanded[nid]) queue.push(nid);
        }
    }
    for (int s : a.initial) g.start.push_back(g.ids.at({s, false, c0, false}));
    return g;
}

std::vector<int> graph_scc(const std::vector<std::vector<int>>& succ) {
    int n = static_cast<int>(succ.size());
    std::vector<int> comp(n, -1), index(n, -1), low(n, 0), stack;
    std::vector<char> on_stack(n, 0);
    int next_index = 0, count = 0;
    struct Frame {
        int v;
        size_t child;
    };
    for (int root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        std::vector<Frame> call{{root, 0}};
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!call.empty()) {
            Frame& f = call.back();
            if (f.child < succ[f.v].size()) {
                int w = succ[f.v][f.child++];
                if (index[w] == -1) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
            } else {
                if (low[f.v] == index[f.v]) {
                    int w;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        on_stack[w] = 0;
                        comp[w] = count;
                    } while (w != f.v);
                    ++count;
                }
                int v = f.v;
                call.pop_back();
                if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
            }
        }
    }
    return comp;
}

}  // namespace

OracleResult oracle_diagnosable(const Fsa& a, int depth, DiagnosisDefinition definition) {
    check_scale(a);
    a.validate();
    DiagGraph g = build_diag_graph(a);
    OracleResult res;
    res.bounded_only = depth < recommended_oracle_depth(a, 0);

    std::vector<int> comp = graph_scc(g.succ);
    int n = static_cast<int>(g.nodes.size());
    std::vector<char> cyclic(n, 0);
    for (int v = 0; v < n; ++v)
        for (int w : g.succ[v])
            if (comp[v] == comp[w]) cyclic[comp[v]] = 1;

    auto pumpable = [&](int v) { return cyclic[comp[v]] && g.nodes[v].fault && g.witness_ok(g.nodes[v]); };

    if (definition == DiagnosisDefinition::UniformBound) {
        // every node in the graph is reachable by construction
        for (int v = 0; v < n; ++v)
            if (pumpable(v)) {
                res.holds = false;
                return res;
            }
        res.holds = true;
        return res;
    }

    // per-trace phrasing: some fault node reaches a pumpable node
    std::vector<char> can_pump(n, 0);
    for (int v = 0; v < n; ++v) can_pump[v] = pumpable(v);
    bool grew = true;
    while (grew) {
        grew = false;
        for (int v = 0; v < n; ++v) {
            if (can_pump[v]) continue;
            for (int w : g.succ[v])
                if (can_pump[w]) {
                    can_pump[v] = 1;
                    grew = true;
                    break;
                }
        }
    }
    for (int v = 0; v < n; ++v)
        if (g.nodes[v].fault && can_pump[v]) {
            res.holds = false;
            return res;
        }
    res.holds = true;
    return res;
}

// ---------------------------------------------------------------------------
// random instances and the cross-validation campaign

namespace {

struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed ^ 0x9e3779b97f4a7c15ULL) {}

    std::uint64_t next() {  // splitmix64: identical on every platform
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    int below(int n) { return n <= 1 ? 0 : static_cast<int>(next() % n); }
    bool chance(int percent) { return below(100) < percent; }
};

}  // namespace

Fsa random_fsa(const RandomFsaConfig& config) {
    Rng rng(config.seed);
    Fsa a;
    int n = 2 + rng.below(std::max(1, config.max_states - 1));
    int m = 2 + rng.below(std::max(1, config.max_events - 1));
    int unobservable = rng.below(std::min(config.max_unobservable, m) + 1);

    for (int s = 0; s < n; ++s) a.states.push_back("s" + std::to_string(s));
    static const char* kLabels[] = {"a", "b", "c", "d", "e", "f"};
    for (int e = 0; e < m; ++e) {
        Event ev;
        ev.name = "t" + std::to_string(e + 1);
        ev.label = e < unobservable ? "" : kLabels[rng.below(std::min(config.max_labels, 6))];
        ev.controllable = rng.chance(40);
        ev.faulty = rng.chance(25);
        a.events.push_back(std::move(ev));
    }
    for (int s = 0; s < n; ++s)
        if (rng.chance(30)) a.initial.push_back(s);
    if (a.initial.empty()) a.initial.push_back(rng.below(n));

    int want = n + rng.below(n + 2 * m);
    for (int i = 0; i < want; ++i)
        a.transitions.push_back({rng.below(n), rng.below(m), rng.below(n)});
    a.normalize();
    a.validate();
    return a;
}

Specification random_irreflexive_spec(const Fsa& a, std::uint64_t seed, int max_pairs) {
    Rng rng(seed);
    Specification spec;
    int n = a.num_states();
    if (n < 2) return spec;
    int want = 1 + rng.below(max_pairs);
    for (int i = 0; i < want; ++i) {
        int x = rng.below(n);
        int y = rng.below(n);
        if (x == y) y = (y + 1) % n;
        spec.pairs.emplace_back(x, y);
    }
    spec.normalize();
    return spec;
}

namespace {

void run_instance(const CampaignConfig& config, int index, std::vector<CampaignDisagreement>& out,
                  long long& checks) {
    RandomFsaConfig rc;
    rc.max_states = config.max_states;
    rc.max_events = config.max_events;
    rc.max_unobservable = config.max_unobservable;
    rc.seed = config.seed + static_cast<std::uint64_t>(index) * 0x100000001b3ULL;
    Fsa a = random_fsa(rc);

    auto record = [&](const std::string& property, bool structural, bool oracle) {
        ++checks;
        if (structural != oracle)
            out.push_back({index, property, structural, oracle, serialize_model(a)});
    };

    for (int k = 0; k <= 2; ++k) {
        int depth = recommended_oracle_depth(a, k);
        record("omega-" + std::to_string(k) + "-delayed", verify_omega_k_delayed(a, k).holds,
               oracle_omega_k_delayed(a, k, depth).holds);
        record("star-" + std::to_string(k) + "-delayed", verify_star_k_delayed(a, k).holds,
               oracle_star_k_delayed(a, k, depth).holds);
    }
    for (int k1 = 0; k1 <= 2; ++k1)
        for (int k2 = 0; k2 <= 2; ++k2) {
            int depth = recommended_oracle_depth(a, k2);
            std::string suffix = "(" + std::to_string(k1) + "," + std::to_string(k2) + ")";
            record("omega-" + suffix, verify_omega_k1k2(a, k1, k2).holds,
                   oracle_k1k2(a, k1, k2, Flavor::Omega, std::nullopt, depth).holds);
            record("star-" + suffix, verify_star_k1k2(a, k1, k2).holds,
                   oracle_k1k2(a, k1, k2, Flavor::Star, std::nullopt, depth).holds);
        }
    for (int s = 0; s < config.specs_per_instance; ++s) {
        Specification spec = random_irreflexive_spec(a, rc.seed + 17 * (s + 1));
        for (int k1 = 0; k1 <= 2; ++k1)
            for (int k2 = 0; k2 <= 2; ++k2) {
                int depth = recommended_oracle_depth(a, k2);
                std::string suffix = "-d(" + std::to_string(k1) + "," + std::to_string(k2) +
                                     ";spec" + std::to_string(s) + ")";
                record("omega" + suffix, verify_omega_k1k2_d(a, k1, k2, spec).holds,
                       oracle_k1k2(a, k1, k2, Flavor::Omega, spec, depth).holds);
                record("star" + suffix, verify_star_k1k2_d(a, k1, k2, spec).holds,
                       oracle_k1k2(a, k1, k2, Flavor::Star, spec, depth).holds);
            }
    }
    record("diagnosable", verify_diagnosable(a).holds,
           oracle_diagnosable(a, recommended_oracle_depth(a, 0)).holds);
}

}  // namespace

CampaignReport run_campaign(const CampaignConfig& config) {
    CampaignReport report;
    report.instances = config.instances;

    int threads = config.threads;
    if (threads <= 0)
        threads = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    threads = std::min<int>(threads, std::max(1, config.instances));

    std::vector<std::vector<CampaignDisagreement>> results(threads);
    std::vector<long long> counts(threads, 0);
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            for (int i = w; i < config.instances; i += threads)
                run_instance(config, i, results[w], counts[w]);
        });
    }
    for (auto& t : pool) t.join();

    for (int w = 0; w < threads; ++w) report.checks += counts[w];
    for (auto& chunk : results)
        report.disagreements.insert(report.disagreements.end(), chunk.begin(), chunk.end());
    std::sort(report.disagreements.begin(), report.disagreements.end(),
              [](const CampaignDisagreement& a, const CampaignDisagreement& b) {
                  return std::tie(a.instance, a.property) < std::tie(b.instance, b.property);
              });
    return report;
}

}  // namespace detkit
