#include "smx/nets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "smx/core.hpp"

namespace smx {

double symlog(double x) { return x >= 0.0 ? std::log(x + 1.0) : -std::log(-x + 1.0); }

double symexp(double y) { return y >= 0.0 ? std::exp(y) - 1.0 : -(std::exp(-y) - 1.0); }

double ValueBins::center(int i) const {
  const double b = limit();
  if (count == 1) return 0.0;
  return -b + 2.0 * b * static_cast<double>(i) / static_cast<double>(count - 1);
}

std::vector<double> two_hot_encode(double v, const ValueBins& bins) {
  if (!std::isfinite(v)) throw std::invalid_argument("two_hot_encode: non-finite value");
  const double b = bins.limit();
  const double y = std::clamp(symlog(v), -b, b);
  std::vector<double> out(static_cast<std::size_t>(bins.count), 0.0);
  if (bins.count == 1) {
    out[0] = 1.0;
    return out;
  }
  const double width = 2.0 * b / static_cast<double>(bins.count - 1);
  const double pos = (y + b) / width;
  int lo = static_cast<int>(std::floor(pos));
  lo = std::clamp(lo, 0, bins.count - 2);
  const double frac = std::clamp(pos - lo, 0.0, 1.0);
  out[static_cast<std::size_t>(lo)] = 1.0 - frac;
  out[static_cast<std::size_t>(lo) + 1] = frac;
  return out;
}

double two_hot_decode(std::span<const double> probs, const ValueBins& bins) {
  if (static_cast<int>(probs.size()) != bins.count)
    throw std::invalid_argument("two_hot_decode: size mismatch");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw std::invalid_argument("two_hot_decode: negative mass");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSampleTol)
    throw std::invalid_argument("two_hot_decode: probabilities not normalised");
  double acc = 0.0;
  for (int i = 0; i < bins.count; ++i) acc += probs[static_cast<std::size_t>(i)] * bins.center(i);
  return symexp(acc);
}

namespace {

inline double silu(double x) { return x / (1.0 + std::exp(-x)); }

inline double silu_grad(double x) {
  const double s = 1.0 / (1.0 + std::exp(-x));
  return s * (1.0 + x * (1.0 - s));
}

// y[n x out] = x[n x in] * W^T + b
void linear_forward(const Layer& layer, std::span<const double> x, int n,
                    std::vector<double>& y) {
  const int in = layer.w.cols;
  const int out = layer.w.rows;
  y.assign(static_cast<std::size_t>(n) * out, 0.0);
  for (int r = 0; r < n; ++r) {
    const double* xi = x.data() + static_cast<std::size_t>(r) * in;
    double* yo = y.data() + static_cast<std::size_t>(r) * out;
    for (int o = 0; o < out; ++o) {
      const double* w = layer.w.row(o);
      double acc = layer.b[static_cast<std::size_t>(o)];
      for (int i = 0; i < in; ++i) acc += w[i] * xi[i];
      yo[o] = acc;
    }
  }
}

// Accumulates dW += dy^T x, db += sum(dy), and writes dx = dy W (dx may be
// empty to skip input gradients).
void linear_backward(const Layer& layer, std::span<const double> x, std::span<const double> dy,
                     int n, Layer& glayer, std::vector<double>* dx) {
  const int in = layer.w.cols;
  const int out = layer.w.rows;
  if (dx) dx->assign(static_cast<std::size_t>(n) * in, 0.0);
  for (int r = 0; r < n; ++r) {
    const double* xi = x.data() + static_cast<std::size_t>(r) * in;
    const double* dyo = dy.data() + static_cast<std::size_t>(r) * out;
    double* dxi = dx ? dx->data() + static_cast<std::size_t>(r) * in : nullptr;
    for (int o = 0; o < out; ++o) {
      const double g = dyo[o];
      if (g == 0.0) continue;
      glayer.b[static_cast<std::size_t>(o)] += g;
      double* gw = glayer.w.row(o);
      const double* w = layer.w.row(o);
      for (int i = 0; i < in; ++i) {
        gw[i] += g * xi[i];
        if (dxi) dxi[i] += g * w[i];
      }
    }
  }
}

// Orthogonal-style init: gaussian matrix, Gram-Schmidt along the shorter
// dimension, scaled by gain.
void orthogonal_init(Matrix& w, double gain, RngStream& rng) {
  const bool wide = w.rows <= w.cols;
  const int nvec = wide ? w.rows : w.cols;
  const int dim = wide ? w.cols : w.rows;
  std::vector<std::vector<double>> basis(static_cast<std::size_t>(nvec));
  for (auto& v : basis) {
    v.resize(static_cast<std::size_t>(dim));
    for (double& e : v) e = rng.normal();
  }
  for (int k = 0; k < nvec; ++k) {
    auto& v = basis[static_cast<std::size_t>(k)];
    for (int j = 0; j < k; ++j) {
      const auto& u = basis[static_cast<std::size_t>(j)];
      double dot = 0.0;
      for (int i = 0; i < dim; ++i)
        dot += v[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(i)];
      for (int i = 0; i < dim; ++i) v[static_cast<std::size_t>(i)] -= dot * u[static_cast<std::size_t>(i)];
    }
    double norm = 0.0;
    for (double e : v) norm += e * e;
    norm = std::sqrt(std::max(norm, 1e-12));
    for (double& e : v) e /= norm;
  }
  for (int r = 0; r < w.rows; ++r) {
    for (int c = 0; c < w.cols; ++c) {
      const double e = wide ? basis[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]
                            : basis[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)];
      w.row(r)[c] = gain * e;
    }
  }
}

Layer make_layer(int out, int in) {
  Layer l;
  l.w = Matrix(out, in);
  l.b.assign(static_cast<std::size_t>(out), 0.0);
  return l;
}

template <typename Params, typename Fn>
void for_each_array(Params& p, Fn&& fn) {
  for (auto& layer : p.torso) {
    fn(layer.w.a);
    fn(layer.b);
  }
  fn(p.policy_head.w.a);
  fn(p.policy_head.b);
  fn(p.value_head.w.a);
  fn(p.value_head.b);
  if (!p.log_std.empty()) fn(p.log_std);
}

constexpr double kStddevFloor = 1e-3;

}  // namespace

std::size_t NetParams::param_count() const {
  std::size_t n = 0;
  for_each_array(*const_cast<NetParams*>(this),
                 [&n](const std::vector<double>& a) { n += a.size(); });
  return n;
}

bool NetParams::finite() const {
  bool ok = true;
  for_each_array(*const_cast<NetParams*>(this), [&ok](const std::vector<double>& a) {
    for (double v : a) ok = ok && std::isfinite(v);
  });
  return ok;
}

NetParams init_network(const NetArch& arch, RngStream& rng) {
  if (arch.obs_dim <= 0) throw std::invalid_argument("init_network: bad observation dim");
  if (arch.hidden.empty()) throw std::invalid_argument("init_network: no hidden layers");
  NetParams p;
  p.arch = arch;
  int in = arch.obs_dim;
  for (int h : arch.hidden) {
    Layer l = make_layer(h, in);
    orthogonal_init(l.w, std::sqrt(2.0), rng);
    p.torso.push_back(std::move(l));
    in = h;
  }
  p.policy_head = make_layer(arch.policy_out(), in);
  orthogonal_init(p.policy_head.w, 0.01, rng);
  p.value_head = make_layer(arch.bins.count, in);
  orthogonal_init(p.value_head.w, 0.01, rng);
  if (arch.action_space.kind == ActionSpace::Kind::Continuous) {
    p.log_std.assign(static_cast<std::size_t>(arch.action_space.dim), std::log(0.5));
  }
  return p;
}

void net_forward(const NetParams& p, std::span<const double> obs, int n, ForwardTrace& trace) {
  if (static_cast<std::size_t>(n) * p.arch.obs_dim != obs.size())
    throw std::invalid_argument("net_forward: observation batch has wrong size");
  for (double v : obs) {
    if (!std::isfinite(v)) throw std::invalid_argument("net_forward: non-finite observation");
  }
  trace.n = n;
  trace.acts.assign(p.torso.size() + 1, {});
  trace.pre.assign(p.torso.size(), {});
  trace.acts[0].assign(obs.begin(), obs.end());

  for (std::size_t l = 0; l < p.torso.size(); ++l) {
    auto& pre = trace.pre[l];
    linear_forward(p.torso[l], trace.acts[l], n, pre);
    auto& act = trace.acts[l + 1];
    act.resize(pre.size());
    for (std::size_t i = 0; i < pre.size(); ++i) act[i] = silu(pre[i]);
  }
  linear_forward(p.policy_head, trace.acts.back(), n, trace.policy_out);
  linear_forward(p.value_head, trace.acts.back(), n, trace.value_logits);
}

PolicyDistribution policy_from_trace(const NetParams& p, const ForwardTrace& trace, int row,
                                     double temperature) {
  const int out = p.arch.policy_out();
  const double* logits = trace.policy_out.data() + static_cast<std::size_t>(row) * out;
  if (p.arch.action_space.kind == ActionSpace::Kind::Discrete) {
    if (!(temperature > 0.0)) throw std::invalid_argument("policy temperature must be > 0");
    return PolicyDistribution::categorical(
        softmax_temp(std::span<const double>(logits, static_cast<std::size_t>(out)), temperature));
  }
  std::vector<double> mean(logits, logits + out);
  std::vector<double> stddev(static_cast<std::size_t>(out));
  for (int i = 0; i < out; ++i) {
    stddev[static_cast<std::size_t>(i)] =
        std::max(std::exp(p.log_std[static_cast<std::size_t>(i)]), kStddevFloor);
  }
  return PolicyDistribution::gaussian(std::move(mean), std::move(stddev));
}

std::vector<double> value_probs_from_trace(const NetParams& p, const ForwardTrace& trace,
                                           int row) {
  const int k = p.arch.bins.count;
  const double* logits = trace.value_logits.data() + static_cast<std::size_t>(row) * k;
  return softmax_temp(std::span<const double>(logits, static_cast<std::size_t>(k)), 1.0);
}

double value_from_trace(const NetParams& p, const ForwardTrace& trace, int row) {
  return two_hot_decode(value_probs_from_trace(p, trace, row), p.arch.bins);
}

PolicyDistribution policy_forward(const NetParams& p, std::span<const double> obs,
                                  double temperature) {
  ForwardTrace trace;
  net_forward(p, obs, 1, trace);
  return policy_from_trace(p, trace, 0, temperature);
}

std::pair<std::vector<double>, double> value_forward(const NetParams& p,
                                                     std::span<const double> obs) {
  ForwardTrace trace;
  net_forward(p, obs, 1, trace);
  auto probs = value_probs_from_trace(p, trace, 0);
  const double v = two_hot_decode(probs, p.arch.bins);
  return {std::move(probs), v};
}

void Grad::zero() {
  for_each_array(*this, [](std::vector<double>& a) { std::fill(a.begin(), a.end(), 0.0); });
}

double Grad::squared_norm() const {
  double acc = 0.0;
  for_each_array(*const_cast<Grad*>(this), [&acc](const std::vector<double>& a) {
    for (double v : a) acc += v * v;
  });
  return acc;
}

Grad make_grad(const NetArch& arch) {
  Grad g;
  int in = arch.obs_dim;
  for (int h : arch.hidden) {
    g.torso.push_back(make_layer(h, in));
    in = h;
  }
  g.policy_head = make_layer(arch.policy_out(), in);
  g.value_head = make_layer(arch.bins.count, in);
  if (arch.action_space.kind == ActionSpace::Kind::Continuous) {
    g.log_std.assign(static_cast<std::size_t>(arch.action_space.dim), 0.0);
  }
  return g;
}

void net_backward(const NetParams& p, const ForwardTrace& trace, std::span<const double> d_policy,
                  std::span<const double> d_value, std::span<const double> d_log_std, Grad& g) {
  const int n = trace.n;
  const std::size_t width = trace.acts.back().size() / static_cast<std::size_t>(n);
  std::vector<double> d_act(static_cast<std::size_t>(n) * width, 0.0);
  std::vector<double> dx;

  if (!d_policy.empty()) {
    linear_backward(p.policy_head, trace.acts.back(), d_policy, n, g.policy_head, &dx);
    for (std::size_t i = 0; i < d_act.size(); ++i) d_act[i] += dx[i];
  }
  if (!d_value.empty()) {
    linear_backward(p.value_head, trace.acts.back(), d_value, n, g.value_head, &dx);
    for (std::size_t i = 0; i < d_act.size(); ++i) d_act[i] += dx[i];
  }
  if (!d_log_std.empty()) {
    for (std::size_t i = 0; i < d_log_std.size(); ++i) g.log_std[i] += d_log_std[i];
  }

  // Walk the torso backwards through the stored pre-activations.
  for (std::size_t l = p.torso.size(); l-- > 0;) {
    const auto& pre = trace.pre[l];
    for (std::size_t i = 0; i < pre.size(); ++i) d_act[i] *= silu_grad(pre[i]);
    const bool need_dx = l > 0;
    linear_backward(p.torso[l], trace.acts[l], d_act, n, g.torso[l], need_dx ? &dx : nullptr);
    if (need_dx) d_act = dx;
  }
}

AdamState make_adam_state(const NetParams& p) {
  AdamState s;
  for_each_array(*const_cast<NetParams*>(&p), [&s](const std::vector<double>& a) {
    s.m.emplace_back(a.size(), 0.0);
    s.v.emplace_back(a.size(), 0.0);
  });
  return s;
}

void adam_update(NetParams& p, const Grad& g, AdamState& state, double lr) {
  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  constexpr double eps = 1e-8;

  std::vector<const std::vector<double>*> grads;
  for_each_array(*const_cast<Grad*>(&g),
                 [&grads](const std::vector<double>& a) { grads.push_back(&a); });
  for (const auto* arr : grads) {
    for (double v : *arr) {
      if (!std::isfinite(v)) throw TrainingError("adam_update: non-finite gradient");
    }
  }

  ++state.step;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));

  std::size_t slot = 0;
  for_each_array(p, [&](std::vector<double>& a) {
    const std::vector<double>& grad = *grads[slot];
    std::vector<double>& m = state.m[slot];
    std::vector<double>& v = state.v[slot];
    for (std::size_t i = 0; i < a.size(); ++i) {
      m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
      v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
      a[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
      if (!std::isfinite(a[i])) throw TrainingError("adam_update: non-finite parameter");
    }
    ++slot;
  });
}

void ObsNormalizer::init(int dim, bool on) {
  enabled = on;
  mean.assign(static_cast<std::size_t>(dim), 0.0);
  m2.assign(static_cast<std::size_t>(dim), 0.0);
  count = 0.0;
}

void ObsNormalizer::update(std::span<const double> obs) {
  if (!enabled) return;
  count += 1.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double delta = obs[i] - mean[i];
    mean[i] += delta / count;
    m2[i] += delta * (obs[i] - mean[i]);
  }
}

std::vector<double> ObsNormalizer::apply(std::span<const double> obs) const {
  std::vector<double> out(obs.begin(), obs.end());
  if (!enabled || count < 2.0) return out;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double var = m2[i] / count;
    out[i] = (out[i] - mean[i]) / std::sqrt(var + 1e-8);
  }
  return out;
}

}  // namespace smx
