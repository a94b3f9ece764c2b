#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "smx/env.hpp"
#include "smx/eval.hpp"

namespace smx {

// One exhaustively enumerated rollout. Replaying `actions` through the env
// from states[0] reproduces `states` and `total_reward` exactly.
struct TrajectoryRecord {
  std::vector<Action> actions;
  std::vector<EnvState> states;  // actions.size() + 1 entries
  double total_reward = 0.0;
  double bootstrap = 0.0;  // value at the final state, 0 when terminal
  double log_prior = 0.0;
};

// Exhaustive depth-h enumeration honoring terminal absorption; branches stop
// at done states. Requires a discrete action space and A^h <= 1e6.
std::vector<TrajectoryRecord> enumerate_trajectories(const Env& env, const EnvState& root, int h,
                                                     const PriorFn& prior, const ValueFn& value);

// Exact first-action marginal of the tilted trajectory distribution
// p(tau) proportional to prior(tau) * exp(sum of rewards + bootstrap value).
// This is the distribution the planner's prior-weighted update estimates.
std::vector<double> exact_posterior_marginal(const Env& env, const EnvState& root, int h,
                                             const PriorFn& prior, const ValueFn& value);

// Value table over the reachable (time-free) state space.
class ValueTable {
 public:
  double at(const EnvState& state) const;  // done states are 0; unknown states throw
  std::size_t size() const { return values_.size(); }
  ValueFn as_fn() const;

  static std::string key(const EnvState& state);

  std::unordered_map<std::string, double> values_;
};

// Optimal state values by value iteration to sup-norm < 1e-10 over the
// states reachable from `roots` (time limit ignored). gamma in (0, 1].
ValueTable exact_state_values(const Env& env, double gamma, const std::vector<EnvState>& roots);

// Policy evaluation of a fixed policy over the same reachable space.
ValueTable policy_state_values(const Env& env, double gamma, const PriorFn& policy,
                               const std::vector<EnvState>& roots);

// Half the L1 distance between two same-size categoricals.
double tv_distance(std::span<const double> p, std::span<const double> q);

// Breadth-first reachability check: is any solved state reachable from root?
bool solvable(const Env& env, const EnvState& root, std::size_t max_states = 1000000);

}  // namespace smx
