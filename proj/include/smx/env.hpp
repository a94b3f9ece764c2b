#pragma once

#include <memory>
#include <string>
#include <vector>

#include "smx/policy.hpp"
#include "smx/rng.hpp"

namespace smx {

struct ActionSpace {
  enum class Kind { Discrete, Continuous };
  Kind kind = Kind::Discrete;
  int count = 0;  // discrete action count
  int dim = 0;    // continuous dimension, bounds [-1, 1]^dim
};

// Env-specific packed state plus bookkeeping. t counts steps since reset;
// truncated marks a done that came from the horizon limit rather than a
// true terminal.
struct EnvState {
  std::vector<int> idata;
  std::vector<double> rdata;
  int t = 0;
  bool done = false;
  bool truncated = false;

  friend bool operator==(const EnvState&, const EnvState&) = default;
};

struct StepResult {
  EnvState next;
  double reward = 0.0;
  bool done = false;
};

// Deterministic perfect-model environment: stepping and observing are pure
// functions, terminal states absorb with reward 0. Immutable after
// construction, safe to share across workers.
class Env {
 public:
  virtual ~Env() = default;

  virtual std::string id() const = 0;
  virtual ActionSpace action_space() const = 0;
  virtual int observation_dim() const = 0;
  virtual int horizon_limit() const = 0;

  // Draws an initial state from the environment's seeded start distribution.
  virtual EnvState reset(RngStream& rng) const = 0;

  // One transition including horizon-limit truncation bookkeeping.
  StepResult step(const EnvState& state, const Action& action) const;

  // The same transition with the time limit ignored. The oracles use this to
  // treat the MDP as stationary; absorbing behaviour is preserved.
  StepResult step_dynamics(const EnvState& state, const Action& action) const;

  virtual std::vector<double> observe(const EnvState& state) const = 0;

  virtual bool solved(const EnvState& state) const { return false; }

  // True when the (time-free) state space is discrete and small enough to
  // enumerate; required by the brute-force oracles.
  virtual bool enumerable() const { return false; }

  // Representative start states covering the reachable space, for value
  // tables. Empty when instance-specific roots must be supplied explicitly.
  virtual std::vector<EnvState> enumeration_roots() const { return {}; }

  // Parses a JSON state literal (per-env schema, see README).
  virtual EnvState parse_state(const std::string& literal) const;

  virtual std::string describe(const EnvState& state) const;

 protected:
  // Pure dynamics: called on non-terminal states only, sets next.done and
  // reward for true terminals, never touches t/truncated.
  virtual StepResult transition(const EnvState& state, const Action& action) const = 0;
};

// Environment family id plus difficulty parameters. horizon_limit 0 means
// the family default.
struct EnvSpec {
  std::string id = "chain";
  int horizon_limit = 0;

  // chain
  int length = 7;

  // gridpush
  int size = 5;
  int boxes = 1;
  int shuffle_min = 2;
  int shuffle_max = 8;
  double completion_bonus = 10.0;

  // permpuzzle
  int elements = 8;
  int scramble_min = 1;
  int scramble_max = 4;

  // pointmass
  double dt = 0.1;

  friend bool operator==(const EnvSpec&, const EnvSpec&) = default;
};

std::unique_ptr<Env> make_env(const EnvSpec& spec);

// Decorator multiplying every reward by a fixed factor. Used by the
// reward-scale invariance tests.
class ScaledRewardEnv : public Env {
 public:
  ScaledRewardEnv(const Env& base, double scale) : base_(base), scale_(scale) {}

  std::string id() const override { return base_.id(); }
  ActionSpace action_space() const override { return base_.action_space(); }
  int observation_dim() const override { return base_.observation_dim(); }
  int horizon_limit() const override { return base_.horizon_limit(); }
  EnvState reset(RngStream& rng) const override { return base_.reset(rng); }
  std::vector<double> observe(const EnvState& s) const override { return base_.observe(s); }
  bool solved(const EnvState& s) const override { return base_.solved(s); }
  bool enumerable() const override { return base_.enumerable(); }
  std::vector<EnvState> enumeration_roots() const override { return base_.enumeration_roots(); }

 protected:
  StepResult transition(const EnvState& s, const Action& a) const override {
    StepResult r = base_.step_dynamics(s, a);
    r.reward *= scale_;
    return r;
  }

 private:
  const Env& base_;
  double scale_;
};

}  // namespace smx
