#pragma once

#include <Eigen/Dense>

#include <functional>

namespace hb {

using CVec = Eigen::VectorXcd;
using HermitianApply = std::function<void(const CVec& in, CVec& out)>;

struct RitzPair {
  double value = 0;
  CVec vector;
  int cycles = 0;
  bool converged = false;
};

// Extreme eigenvalue of a Hermitian operator by restarted Lanczos with full
// reorthogonalization. Every Ritz value is a Rayleigh quotient, so the
// largest one never overshoots the true top eigenvalue.
RitzPair lanczos_extreme(const HermitianApply& apply, const CVec& start, bool largest,
                         double abs_tol, int steps_per_cycle = 40, int max_cycles = 60);

} // namespace hb
