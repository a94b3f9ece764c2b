#include "smx/eval.hpp"

namespace smx {

EvalFn make_eval(PriorFn prior, ValueFn value) {
  return [prior = std::move(prior), value = std::move(value)](
             const std::vector<const EnvState*>& states, Evaluation& out) {
    out.priors.clear();
    out.values.clear();
    out.priors.reserve(states.size());
    out.values.reserve(states.size());
    for (const EnvState* s : states) {
      out.priors.push_back(prior(*s));
      out.values.push_back(value(*s));
    }
  };
}

}  // namespace smx
