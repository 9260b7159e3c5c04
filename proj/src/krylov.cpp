#include "heisenbundle/krylov.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <vector>

namespace hb {

RitzPair lanczos_extreme(const HermitianApply& apply, const CVec& start, bool largest,
                         double abs_tol, int steps_per_cycle, int max_cycles) {
  const Eigen::Index dim = start.size();
  RitzPair out;
  CVec v = start;
  double nv = v.norm();
  if (dim == 0 || nv == 0) return out;
  v /= nv;
  if (dim <= steps_per_cycle) steps_per_cycle = static_cast<int>(dim);

  double prev = std::numeric_limits<double>::quiet_NaN();
  std::vector<CVec> basis;
  CVec w(dim);
  for (int cycle = 0; cycle < max_cycles; ++cycle) {
    basis.clear();
    basis.push_back(v);
    std::vector<double> alpha, beta;
    double tail = 0;
    for (int j = 0; j < steps_per_cycle; ++j) {
      apply(basis[j], w);
      double a = basis[j].dot(w).real();
      alpha.push_back(a);
      // two passes of classical Gram-Schmidt against the whole basis
      for (int pass = 0; pass < 2; ++pass)
        for (const CVec& q : basis) w -= q * q.dot(w);
      double b = w.norm();
      tail = b;
      if (j + 1 == steps_per_cycle || b < 1e-14 * (std::abs(a) + 1e-300)) break;
      beta.push_back(b);
      basis.push_back(w / b);
    }
    const int m = static_cast<int>(alpha.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) T(i, i) = alpha[i];
    for (int i = 0; i + 1 < m; ++i) T(i, i + 1) = T(i + 1, i) = beta[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const int pick = largest ? m - 1 : 0;
    double theta = es.eigenvalues()(pick);
    Eigen::VectorXd s = es.eigenvectors().col(pick);
    CVec y = CVec::Zero(dim);
    for (int i = 0; i < m; ++i) y += basis[i] * s(i);
    y /= y.norm();

    out.value = theta;
    out.vector = y;
    out.cycles = cycle + 1;
    bool exhausted = m < steps_per_cycle || m == dim;
    // ||A y - theta y|| = tail |s_m|; an eigenvalue lies that close to theta
    double residual = tail * std::abs(s(m - 1));
    if (exhausted || residual <= abs_tol || (!std::isnan(prev) && std::abs(theta - prev) <= abs_tol)) {
      out.converged = true;
      return out;
    }
    prev = theta;
    v = y;
  }
  return out;
}

} // namespace hb
