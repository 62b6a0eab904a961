#include "detkit/estimate.hpp"

#include <algorithm>

namespace detkit {

namespace {

void check_word(const Fsa& a, const Word& sigma) {
    for (const std::string& symbol : sigma)
        if (!a.has_symbol(symbol)) throw UnknownSymbolError(symbol);
}

std::vector<int> sorted_unique(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

}  // namespace

std::vector<int> eps_closure(const Fsa& a, std::vector<int> from) {
    std::vector<char> seen(a.num_states(), 0);
    std::vector<int> stack;
    for (int s : from)
        if (!seen[s]) {
            seen[s] = 1;
            stack.push_back(s);
        }
    while (!stack.empty()) {
        int x = stack.back();
        stack.pop_back();
        for (const Transition& t : a.transitions)
            if (t.src == x && !a.events[t.event].observable() && !seen[t.dst]) {
                seen[t.dst] = 1;
                stack.push_back(t.dst);
            }
    }
    std::vector<int> out;
    for (int s = 0; s < a.num_states(); ++s)
        if (seen[s]) out.push_back(s);
    return out;
}

std::vector<int> eps_plus(const Fsa& a, const std::vector<int>& from) {
    std::vector<int> first;
    for (const Transition& t : a.transitions)
        if (!a.events[t.event].observable() &&
            std::binary_search(from.begin(), from.end(), t.src))
            first.push_back(t.dst);
    return eps_closure(a, sorted_unique(std::move(first)));
}

std::vector<int> observable_step(const Fsa& a, const std::vector<int>& from,
                                 const std::string& symbol) {
    std::vector<int> out;
    for (const Transition& t : a.transitions)
        if (a.events[t.event].label == symbol &&
            std::binary_search(from.begin(), from.end(), t.src))
            out.push_back(t.dst);
    return sorted_unique(std::move(out));
}

StateEstimate state_estimate(const Fsa& a, const Word& sigma) {
    check_word(a, sigma);
    std::vector<int> cur = eps_closure(a, a.initial);
    for (const std::string& symbol : sigma)
        cur = eps_closure(a, observable_step(a, cur, symbol));
    return {std::move(cur), sigma, {}};
}

std::vector<int> can_generate(const Fsa& a, const Word& sigma) {
    check_word(a, sigma);
    std::vector<int> cur(a.num_states());
    for (int s = 0; s < a.num_states(); ++s) cur[s] = s;
    // process the word backwards: pre-image of an observable step, then of
    // any number of unobservable ones
    for (auto it = sigma.rbegin(); it != sigma.rend(); ++it) {
        std::vector<int> pre;
        for (const Transition& t : a.transitions)
            if (a.events[t.event].label == *it &&
                std::binary_search(cur.begin(), cur.end(), t.dst))
                pre.push_back(t.src);
        pre = sorted_unique(std::move(pre));
        std::vector<char> seen(a.num_states(), 0);
        std::vector<int> stack = pre;
        for (int s : pre) seen[s] = 1;
        while (!stack.empty()) {
            int x = stack.back();
            stack.pop_back();
            for (const Transition& t : a.transitions)
                if (t.dst == x && !a.events[t.event].observable() && !seen[t.src]) {
                    seen[t.src] = 1;
                    stack.push_back(t.src);
                }
        }
        cur.clear();
        for (int s = 0; s < a.num_states(); ++s)
            if (seen[s]) cur.push_back(s);
    }
    return cur;
}

StateEstimate delayed_state_estimate(const Fsa& a, const Word& sigma1, const Word& sigma2) {
    StateEstimate after = state_estimate(a, sigma1);
    std::vector<int> continuing = can_generate(a, sigma2);
    std::vector<int> both;
    std::set_intersection(after.states.begin(), after.states.end(), continuing.begin(),
                          continuing.end(), std::back_inserter(both));
    return {std::move(both), sigma1, sigma2};
}

}  // namespace detkit
