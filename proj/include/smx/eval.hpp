#pragma once

#include <functional>
#include <vector>

#include "smx/env.hpp"
#include "smx/policy.hpp"

namespace smx {

// Per-state closures over the prior policy and value estimate. Must be pure
// and safe to call from several workers at once.
using PriorFn = std::function<PolicyDistribution(const EnvState&)>;
using ValueFn = std::function<double(const EnvState&)>;

struct Evaluation {
  std::vector<PolicyDistribution> priors;
  std::vector<double> values;
};

// Batched prior/value evaluation. The planners gather all states that need
// evaluating at a step into one call so a network backend can run them as a
// single batched forward pass.
using EvalFn = std::function<void(const std::vector<const EnvState*>&, Evaluation&)>;

// Wraps per-state closures into the batched interface.
EvalFn make_eval(PriorFn prior, ValueFn value);

}  // namespace smx
