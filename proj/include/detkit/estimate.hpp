#pragma once

#include <string>
#include <vector>

#include "detkit/fsa.hpp"

namespace detkit {

/// Observed word over the output alphabet.
using Word = std::vector<std::string>;

class UnknownSymbolError : public ModelError {
  public:
    explicit UnknownSymbolError(const std::string& symbol)
        : ModelError("symbol not in alphabet: '" + symbol + "'") {}
};

struct StateEstimate {
    std::vector<int> states;  // sorted
    Word prefix_label;
    Word suffix_label;

    friend bool operator==(const StateEstimate&, const StateEstimate&) = default;
};

/// Forward closure under unobservable events, including `from` itself.
std::vector<int> eps_closure(const Fsa& a, std::vector<int> from);

/// Targets of at least one unobservable step, closed under further ones.
std::vector<int> eps_plus(const Fsa& a, const std::vector<int>& from);

/// One observable step: targets of events labeled `symbol`.
std::vector<int> observable_step(const Fsa& a, const std::vector<int>& from,
                                 const std::string& symbol);

/// Current-state estimate: the states the system can be in right after
/// `sigma` has been observed. For the empty word this is the initial set
/// together with everything reachable from it by unobservable sequences.
StateEstimate state_estimate(const Fsa& a, const Word& sigma);

/// States from which some run emits exactly `sigma`; every state for the
/// empty word.
std::vector<int> can_generate(const Fsa& a, const Word& sigma);

/// Delayed estimate: states occupied right after `sigma1` given that
/// `sigma2` was subsequently observed. Coincides with state_estimate when
/// `sigma2` is empty.
StateEstimate delayed_state_estimate(const Fsa& a, const Word& sigma1, const Word& sigma2);

}  // namespace detkit
