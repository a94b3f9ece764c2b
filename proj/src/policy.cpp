#include "smx/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "smx/core.hpp"

namespace smx {

PolicyDistribution PolicyDistribution::categorical(std::vector<double> probs) {
  PolicyDistribution d;
  d.kind = Kind::Categorical;
  d.probs = std::move(probs);
  d.validate();
  return d;
}

PolicyDistribution PolicyDistribution::gaussian(std::vector<double> mean,
                                                std::vector<double> stddev) {
  PolicyDistribution d;
  d.kind = Kind::Gaussian;
  d.mean = std::move(mean);
  d.stddev = std::move(stddev);
  d.validate();
  return d;
}

PolicyDistribution PolicyDistribution::empirical(std::vector<Action> atoms,
                                                 std::vector<double> masses) {
  PolicyDistribution d;
  d.kind = Kind::Empirical;
  d.atoms = std::move(atoms);
  d.masses = std::move(masses);
  d.validate();
  return d;
}

void PolicyDistribution::validate() const {
  switch (kind) {
    case Kind::Categorical: {
      if (probs.empty()) throw std::invalid_argument("categorical: empty");
      double sum = 0.0;
      for (double p : probs) {
        if (!(p >= 0.0) || !std::isfinite(p))
          throw std::invalid_argument("categorical: invalid mass");
        sum += p;
      }
      if (std::abs(sum - 1.0) > kProbTol)
        throw std::invalid_argument("categorical: masses must sum to 1");
      return;
    }
    case Kind::Gaussian: {
      if (mean.empty() || mean.size() != stddev.size())
        throw std::invalid_argument("gaussian: bad shape");
      for (double s : stddev) {
        if (!(s > 0.0) || !std::isfinite(s))
          throw std::invalid_argument("gaussian: stddev must be strictly positive");
      }
      for (double m : mean) {
        if (!std::isfinite(m)) throw std::invalid_argument("gaussian: non-finite mean");
      }
      return;
    }
    case Kind::Empirical: {
      if (atoms.empty() || atoms.size() != masses.size())
        throw std::invalid_argument("empirical: bad shape");
      double sum = 0.0;
      for (double m : masses) {
        if (!(m >= 0.0) || !std::isfinite(m))
          throw std::invalid_argument("empirical: invalid mass");
        sum += m;
      }
      if (std::abs(sum - 1.0) > kProbTol)
        throw std::invalid_argument("empirical: masses must sum to 1");
      return;
    }
  }
  throw std::invalid_argument("policy distribution: unknown kind");
}

Action PolicyDistribution::sample(RngStream& rng) const {
  switch (kind) {
    case Kind::Categorical:
      return Action{sample_categorical(probs, rng), {}};
    case Kind::Gaussian: {
      Action a;
      a.box.resize(mean.size());
      for (std::size_t i = 0; i < mean.size(); ++i) {
        a.box[i] = mean[i] + stddev[i] * rng.normal();
      }
      return a;
    }
    case Kind::Empirical:
      return atoms[static_cast<std::size_t>(sample_categorical(masses, rng))];
  }
  throw std::invalid_argument("policy distribution: unknown kind");
}

Action PolicyDistribution::mode() const {
  switch (kind) {
    case Kind::Categorical: {
      const auto it = std::max_element(probs.begin(), probs.end());
      return Action{static_cast<int>(it - probs.begin()), {}};
    }
    case Kind::Gaussian:
      return Action{0, mean};
    case Kind::Empirical: {
      const auto it = std::max_element(masses.begin(), masses.end());
      return atoms[static_cast<std::size_t>(it - masses.begin())];
    }
  }
  throw std::invalid_argument("policy distribution: unknown kind");
}

double PolicyDistribution::log_prob(const Action& a) const {
  switch (kind) {
    case Kind::Categorical: {
      if (a.index < 0 || a.index >= static_cast<int>(probs.size()))
        throw std::invalid_argument("log_prob: action out of range");
      return std::log(std::max(probs[static_cast<std::size_t>(a.index)], 1e-300));
    }
    case Kind::Gaussian: {
      if (a.box.size() != mean.size())
        throw std::invalid_argument("log_prob: action dimension mismatch");
      double lp = 0.0;
      for (std::size_t i = 0; i < mean.size(); ++i) {
        const double z = (a.box[i] - mean[i]) / stddev[i];
        lp += -0.5 * z * z - std::log(stddev[i]) - 0.5 * std::log(2.0 * M_PI);
      }
      return lp;
    }
    case Kind::Empirical:
      throw std::invalid_argument("log_prob: undefined for empirical distributions");
  }
  throw std::invalid_argument("policy distribution: unknown kind");
}

}  // namespace smx
