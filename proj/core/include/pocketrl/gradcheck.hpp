#pragma once

#include <cstdint>

#include "pocketrl/nn.hpp"

namespace pocketrl::nn {

// Central-finite-difference verification of the analytic gradients. The
// reference path only ever calls forward + loss_value, so it is independent
// of backward().

struct GradcheckReport {
  int trials = 0;
  int failures = 0;
  double worst_rel_error = 0.0;
  bool ok() const { return failures == 0; }
};

// Relative error of analytic vs numeric gradient for every parameter:
//   |a - n| / max(|a| + |n|, 1e-6)   with step h = 1e-5.
// Returns the worst relative error over all parameters.
double gradcheck_single(const MLP& net, const LossSpec& loss, const Matrix& x,
                        const Matrix& target);

// Random architectures up to 3 layers and width 32, across all three losses
// and both output activations, each required to hit rel error < 1e-4.
// Inputs are resampled away from ReLU/Huber kinks, where finite differences
// are invalid.
GradcheckReport gradcheck(int trials, std::uint64_t seed);

}  // namespace pocketrl::nn
