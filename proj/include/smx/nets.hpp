#pragma once

#include <span>
#include <string>
#include <vector>

#include "smx/env.hpp"
#include "smx/policy.hpp"
#include "smx/rng.hpp"

namespace smx {

// Raised when training hits non-finite numbers; the driver halts with
// diagnostics and preserves the last checkpoint.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// sign(x) * ln(|x| + 1); compresses large targets so one critic setup works
// across reward scales.
double symlog(double x);
// Inverse: sign(y) * (exp(|y|) - 1).
double symexp(double y);

// Symmetric bin support for the distributional value head. Centers are
// uniform in symlog space on [-symlog(vmax), +symlog(vmax)].
struct ValueBins {
  int count = 64;
  double vmax = 500.0;

  double limit() const { return symlog(vmax); }
  double center(int i) const;

  friend bool operator==(const ValueBins&, const ValueBins&) = default;
};

// Interpolated mass on the two bins bracketing symlog(v); values beyond the
// support clip to the edge bin.
std::vector<double> two_hot_encode(double v, const ValueBins& bins);
// symexp of the bin-center expectation. probs must sum to 1 within 1e-6.
double two_hot_decode(std::span<const double> probs, const ValueBins& bins);

struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;  // row-major

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}
  double* row(int r) { return a.data() + static_cast<std::size_t>(r) * cols; }
  const double* row(int r) const { return a.data() + static_cast<std::size_t>(r) * cols; }
};

struct Layer {
  Matrix w;  // out x in
  std::vector<double> b;
};

struct NetArch {
  int obs_dim = 0;
  std::vector<int> hidden = {256, 256};
  ActionSpace action_space;
  ValueBins bins;

  int policy_out() const {
    return action_space.kind == ActionSpace::Kind::Discrete ? action_space.count
                                                            : action_space.dim;
  }
  friend bool operator==(const NetArch&, const NetArch&) = default;
};

// MLP torso with SiLU activations plus a policy head (categorical logits or
// gaussian mean with a state-independent learnable log-stddev) and a bin-
// logit value head.
struct NetParams {
  NetArch arch;
  std::vector<Layer> torso;
  Layer policy_head;
  Layer value_head;
  std::vector<double> log_std;  // continuous action spaces only

  std::size_t param_count() const;
  bool finite() const;
};

// Orthogonal-style init for hidden layers, near-zero heads so the initial
// policy is uniform and the initial value is 0.
NetParams init_network(const NetArch& arch, RngStream& rng);

// Activations kept from a batched forward pass for the backward pass.
struct ForwardTrace {
  int n = 0;
  std::vector<std::vector<double>> acts;  // acts[0] = input, then per-layer outputs
  std::vector<std::vector<double>> pre;   // per-layer pre-activations
  std::vector<double> policy_out;         // n x policy_out()
  std::vector<double> value_logits;       // n x bins.count
};

// Batched forward pass over n observations (row-major n x obs_dim).
void net_forward(const NetParams& p, std::span<const double> obs, int n, ForwardTrace& trace);

PolicyDistribution policy_from_trace(const NetParams& p, const ForwardTrace& trace, int row,
                                     double temperature = 1.0);
std::vector<double> value_probs_from_trace(const NetParams& p, const ForwardTrace& trace, int row);
double value_from_trace(const NetParams& p, const ForwardTrace& trace, int row);

// Single-observation conveniences.
PolicyDistribution policy_forward(const NetParams& p, std::span<const double> obs,
                                  double temperature = 1.0);
std::pair<std::vector<double>, double> value_forward(const NetParams& p,
                                                     std::span<const double> obs);

// Gradient buffer, same shapes as NetParams.
struct Grad {
  std::vector<Layer> torso;
  Layer policy_head;
  Layer value_head;
  std::vector<double> log_std;

  void zero();
  double squared_norm() const;
};

Grad make_grad(const NetArch& arch);

// Backward pass from head-output gradients, accumulated into g.
// d_policy: n x policy_out() (may be empty), d_value: n x bins.count (may be
// empty), d_log_std: dim (continuous only, may be empty).
void net_backward(const NetParams& p, const ForwardTrace& trace, std::span<const double> d_policy,
                  std::span<const double> d_value, std::span<const double> d_log_std, Grad& g);

// Adaptive-moment optimizer state; beta1 0.9, beta2 0.999, eps 1e-8,
// bias-corrected.
struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  long step = 0;
};

AdamState make_adam_state(const NetParams& p);
// Throws TrainingError on non-finite gradients or parameters.
void adam_update(NetParams& p, const Grad& g, AdamState& state, double lr = 3e-4);

// Running observation normalizer; updated while collecting, frozen during
// evaluation.
struct ObsNormalizer {
  bool enabled = false;
  std::vector<double> mean;
  std::vector<double> m2;
  double count = 0.0;

  void init(int dim, bool on);
  void update(std::span<const double> obs);
  std::vector<double> apply(std::span<const double> obs) const;
};

}  // namespace smx
