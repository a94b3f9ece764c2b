#include "smx/oracle.hpp"

#include <cmath>
#include <cstring>
#include <deque>
#include <limits>
#include <stdexcept>

namespace smx {

namespace {

double pow_int(double base, int exp) {
  double out = 1.0;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

void check_enumeration_budget(const Env& env, int h) {
  if (env.action_space().kind != ActionSpace::Kind::Discrete)
    throw std::invalid_argument("oracle: enumeration needs a discrete action space");
  const double estimate = pow_int(static_cast<double>(env.action_space().count), h);
  if (estimate > 1e6) {
    throw std::invalid_argument("oracle: enumeration budget exceeded, about " +
                                std::to_string(estimate) + " trajectories");
  }
}

struct EnumFrame {
  EnvState state;
  std::vector<Action> actions;
  std::vector<EnvState> states;
  double reward = 0.0;
  double log_prior = 0.0;
};

EnvState canonical(const EnvState& s) {
  EnvState c = s;
  c.t = 0;
  c.truncated = false;
  return c;
}

}  // namespace

std::vector<TrajectoryRecord> enumerate_trajectories(const Env& env, const EnvState& root, int h,
                                                     const PriorFn& prior, const ValueFn& value) {
  if (h < 0) throw std::invalid_argument("oracle: negative horizon");
  check_enumeration_budget(env, h);

  std::vector<TrajectoryRecord> out;
  const int num_actions = env.action_space().count;

  // Depth-first expansion; a branch closes at a done state or at depth h.
  std::vector<EnumFrame> stack;
  stack.push_back({root, {}, {root}, 0.0, 0.0});
  while (!stack.empty()) {
    EnumFrame frame = std::move(stack.back());
    stack.pop_back();

    if (frame.state.done || static_cast<int>(frame.actions.size()) == h) {
      TrajectoryRecord rec;
      rec.actions = std::move(frame.actions);
      rec.states = std::move(frame.states);
      rec.total_reward = frame.reward;
      rec.bootstrap = frame.state.done ? 0.0 : value(frame.state);
      rec.log_prior = frame.log_prior;
      out.push_back(std::move(rec));
      continue;
    }

    const PolicyDistribution dist = prior(frame.state);
    for (int a = num_actions - 1; a >= 0; --a) {
      const Action action{a, {}};
      const double p = dist.probs[static_cast<std::size_t>(a)];
      EnumFrame next = frame;
      const StepResult sr = env.step(next.state, action);
      next.state = sr.next;
      next.actions.push_back(action);
      next.states.push_back(sr.next);
      next.reward += sr.reward;
      next.log_prior += p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
      stack.push_back(std::move(next));
    }
  }
  return out;
}

std::vector<double> exact_posterior_marginal(const Env& env, const EnvState& root, int h,
                                             const PriorFn& prior, const ValueFn& value) {
  if (root.done) throw std::invalid_argument("oracle: posterior of a terminal root");
  const auto records = enumerate_trajectories(env, root, h, prior, value);

  // Tilt in log-space with a common max subtracted for stability.
  double lmax = -std::numeric_limits<double>::infinity();
  for (const auto& rec : records) {
    lmax = std::max(lmax, rec.log_prior + rec.total_reward + rec.bootstrap);
  }
  std::vector<double> marginal(static_cast<std::size_t>(env.action_space().count), 0.0);
  double total = 0.0;
  for (const auto& rec : records) {
    const double w = std::exp(rec.log_prior + rec.total_reward + rec.bootstrap - lmax);
    marginal[static_cast<std::size_t>(rec.actions.front().index)] += w;
    total += w;
  }
  for (double& m : marginal) m /= total;
  return marginal;
}

std::string ValueTable::key(const EnvState& state) {
  std::string k;
  k.reserve(state.idata.size() * sizeof(int) + 1);
  k.push_back(state.done ? '1' : '0');
  const char* bytes = reinterpret_cast<const char*>(state.idata.data());
  k.append(bytes, bytes + state.idata.size() * sizeof(int));
  return k;
}

double ValueTable::at(const EnvState& state) const {
  if (state.done) return 0.0;
  const auto it = values_.find(key(state));
  if (it == values_.end()) throw std::invalid_argument("value table: unknown state");
  return it->second;
}

ValueFn ValueTable::as_fn() const {
  return [this](const EnvState& s) { return at(s); };
}

namespace {

struct StateSpace {
  std::vector<EnvState> states;                       // non-terminal states
  std::vector<std::vector<int>> next;                 // successor index, -1 terminal
  std::vector<std::vector<double>> reward;            // transition rewards
  std::unordered_map<std::string, int> index;
};

StateSpace enumerate_states(const Env& env, const std::vector<EnvState>& roots,
                            std::size_t max_states) {
  if (!env.enumerable()) throw std::invalid_argument("oracle: environment is not enumerable");
  if (roots.empty()) throw std::invalid_argument("oracle: no enumeration roots");
  const int num_actions = env.action_space().count;

  StateSpace space;
  std::deque<EnvState> frontier;
  auto visit = [&](const EnvState& s) -> int {
    if (s.done) return -1;
    const std::string k = ValueTable::key(s);
    const auto it = space.index.find(k);
    if (it != space.index.end()) return it->second;
    const int id = static_cast<int>(space.states.size());
    if (space.states.size() >= max_states)
      throw std::invalid_argument("oracle: state budget exceeded");
    space.index.emplace(k, id);
    space.states.push_back(s);
    frontier.push_back(s);
    return id;
  };

  for (const auto& root : roots) visit(canonical(root));
  while (!frontier.empty()) {
    const EnvState s = frontier.front();
    frontier.pop_front();
    const int id = space.index.at(ValueTable::key(s));
    if (static_cast<int>(space.next.size()) <= id) {
      space.next.resize(static_cast<std::size_t>(id) + 1);
      space.reward.resize(static_cast<std::size_t>(id) + 1);
    }
    auto& nx = space.next[static_cast<std::size_t>(id)];
    auto& rw = space.reward[static_cast<std::size_t>(id)];
    nx.assign(static_cast<std::size_t>(num_actions), -1);
    rw.assign(static_cast<std::size_t>(num_actions), 0.0);
    for (int a = 0; a < num_actions; ++a) {
      const StepResult sr = env.step_dynamics(s, Action{a, {}});
      nx[static_cast<std::size_t>(a)] = visit(canonical(sr.next));
      rw[static_cast<std::size_t>(a)] = sr.reward;
    }
  }
  space.next.resize(space.states.size());
  space.reward.resize(space.states.size());
  return space;
}

ValueTable table_from(const StateSpace& space, const std::vector<double>& v) {
  ValueTable table;
  for (std::size_t i = 0; i < space.states.size(); ++i) {
    table.values_.emplace(ValueTable::key(space.states[i]), v[i]);
  }
  return table;
}

}  // namespace

ValueTable exact_state_values(const Env& env, double gamma, const std::vector<EnvState>& roots) {
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw std::invalid_argument("oracle: gamma must be in (0, 1]");
  const StateSpace space = enumerate_states(env, roots, 1000000);
  const int num_actions = env.action_space().count;

  std::vector<double> v(space.states.size(), 0.0);
  std::vector<double> v_new(space.states.size(), 0.0);
  for (int sweep = 0; sweep < 1000000; ++sweep) {
    double sup = 0.0;
    for (std::size_t i = 0; i < space.states.size(); ++i) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < num_actions; ++a) {
        const int j = space.next[i][static_cast<std::size_t>(a)];
        const double q = space.reward[i][static_cast<std::size_t>(a)] +
                         (j >= 0 ? gamma * v[static_cast<std::size_t>(j)] : 0.0);
        best = std::max(best, q);
      }
      v_new[i] = best;
      sup = std::max(sup, std::abs(v_new[i] - v[i]));
    }
    v.swap(v_new);
    if (sup < 1e-10) return table_from(space, v);
  }
  throw std::runtime_error("oracle: value iteration did not converge");
}

ValueTable policy_state_values(const Env& env, double gamma, const PriorFn& policy,
                               const std::vector<EnvState>& roots) {
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw std::invalid_argument("oracle: gamma must be in (0, 1]");
  const StateSpace space = enumerate_states(env, roots, 1000000);
  const int num_actions = env.action_space().count;

  std::vector<std::vector<double>> pi(space.states.size());
  for (std::size_t i = 0; i < space.states.size(); ++i) {
    const PolicyDistribution d = policy(space.states[i]);
    if (d.kind != PolicyDistribution::Kind::Categorical ||
        static_cast<int>(d.probs.size()) != num_actions)
      throw std::invalid_argument("oracle: policy evaluation needs a categorical policy");
    pi[i] = d.probs;
  }

  std::vector<double> v(space.states.size(), 0.0);
  std::vector<double> v_new(space.states.size(), 0.0);
  for (int sweep = 0; sweep < 1000000; ++sweep) {
    double sup = 0.0;
    for (std::size_t i = 0; i < space.states.size(); ++i) {
      double acc = 0.0;
      for (int a = 0; a < num_actions; ++a) {
        const int j = space.next[i][static_cast<std::size_t>(a)];
        acc += pi[i][static_cast<std::size_t>(a)] *
               (space.reward[i][static_cast<std::size_t>(a)] +
                (j >= 0 ? gamma * v[static_cast<std::size_t>(j)] : 0.0));
      }
      v_new[i] = acc;
      sup = std::max(sup, std::abs(v_new[i] - v[i]));
    }
    v.swap(v_new);
    if (sup < 1e-10) return table_from(space, v);
  }
  throw std::runtime_error("oracle: policy evaluation did not converge");
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("tv_distance: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] - q[i]);
  return 0.5 * acc;
}

bool solvable(const Env& env, const EnvState& root, std::size_t max_states) {
  if (!env.enumerable()) throw std::invalid_argument("oracle: environment is not enumerable");
  if (env.solved(root)) return true;
  const int num_actions = env.action_space().count;

  std::unordered_map<std::string, bool> seen;
  std::deque<EnvState> frontier;
  seen.emplace(ValueTable::key(canonical(root)), true);
  frontier.push_back(canonical(root));
  while (!frontier.empty()) {
    const EnvState s = frontier.front();
    frontier.pop_front();
    for (int a = 0; a < num_actions; ++a) {
      const StepResult sr = env.step_dynamics(s, Action{a, {}});
      if (env.solved(sr.next)) return true;
      if (sr.next.done) continue;
      const EnvState c = canonical(sr.next);
      const std::string k = ValueTable::key(c);
      if (seen.count(k)) continue;
      if (seen.size() >= max_states) return false;
      seen.emplace(k, true);
      frontier.push_back(c);
    }
  }
  return false;
}

}  // namespace smx
