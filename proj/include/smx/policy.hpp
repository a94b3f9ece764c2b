#pragma once

#include <vector>

#include "smx/rng.hpp"

namespace smx {

// A single environment action: a discrete index, or a continuous vector in
// [-1, 1]^d (box is empty for discrete actions).
struct Action {
  int index = 0;
  std::vector<double> box;

  bool is_discrete() const { return box.empty(); }
  friend bool operator==(const Action&, const Action&) = default;
};

// The currency between prior, planner and losses: a categorical, diagonal
// Gaussian, or empirical (dirac-mixture) distribution over actions.
struct PolicyDistribution {
  enum class Kind { Categorical, Gaussian, Empirical };

  Kind kind = Kind::Categorical;
  std::vector<double> probs;    // categorical
  std::vector<double> mean;     // gaussian
  std::vector<double> stddev;   // gaussian, strictly positive
  std::vector<Action> atoms;    // empirical
  std::vector<double> masses;   // empirical

  static PolicyDistribution categorical(std::vector<double> probs);
  static PolicyDistribution gaussian(std::vector<double> mean, std::vector<double> stddev);
  static PolicyDistribution empirical(std::vector<Action> atoms, std::vector<double> masses);

  // Checks the distribution invariants; throws std::invalid_argument.
  void validate() const;

  Action sample(RngStream& rng) const;
  Action mode() const;

  // Log density/mass of an action. Defined for categorical and gaussian.
  double log_prob(const Action& a) const;
};

}  // namespace smx
