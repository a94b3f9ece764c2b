#pragma once

#include <span>
#include <vector>

#include "smx/rng.hpp"

namespace smx {

// Tolerance constants shared across the library.
inline constexpr double kProbTol = 1e-9;        // distribution normalisation checks
inline constexpr double kDegenerateTol = 1e-12; // min-max degeneracy threshold
inline constexpr double kSampleTol = 1e-6;      // sampling precondition

// Temperature softmax: normalised exp(values / tau), max-subtracted for
// stability. tau > 0, values finite.
std::vector<double> softmax_temp(std::span<const double> values, double tau);

// (v - min) / (max - min) elementwise. Degenerate input (max == min within
// kDegenerateTol) maps to all zeros, which a downstream softmax turns into
// the uniform distribution.
std::vector<double> minmax_normalise(std::span<const double> values);

// Draws index i with probability probs[i], consuming exactly one uniform
// draw. probs must be nonnegative and sum to 1 within kSampleTol.
int sample_categorical(std::span<const double> probs, RngStream& rng);

// (1 - weight) * probs + weight * d with d ~ Dirichlet(alpha * 1).
std::vector<double> mix_dirichlet_noise(std::span<const double> probs, double alpha,
                                        double weight, RngStream& rng);

}  // namespace smx
