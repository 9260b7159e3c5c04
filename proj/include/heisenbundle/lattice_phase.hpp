#pragma once

#include "heisenbundle/coeffs.hpp"

#include <Eigen/Dense>

namespace hb {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

Mat symplectic_J(int d);
Mat upper_K(int d);

// exp(2 pi i t) after reducing t modulo 1
cplx unit_phase(double t);

// A lattice generator L in GL(2d, R) with the derived quantities cached.
struct LatticeGen {
  int d = 0;
  Mat L;
  double det = 0;  // signed
  Mat Linv;
  Mat Ladj;        // J (L^{-1})^T J^T, generator of the adjoint lattice
  Mat Theta;       // -L^T J L
  double norm = 0; // spectral norm of L

  int n() const { return 2 * d; }
  double abs_det() const { return std::abs(det); }
  Vec point(const Index& k) const;
  Vec adjoint_point(const Index& k) const;
};

LatticeGen make_lattice(const Mat& L, double det_threshold = 1e-12);
LatticeGen adjoint_lattice(const LatticeGen& g);
Mat row_major_matrix(int dim, const std::vector<double>& entries);
double spectral_norm(const Mat& A);

// c(z1, z2) = exp(-2 pi i z1^T K z2); c(z, w) conj(c(w, z)) = exp(-2 pi i z^T J w)
cplx heisenberg_c(const Vec& z1, const Vec& z2);
cplx symplectic_c(const Vec& z1, const Vec& z2);

// zeta_M(k, m) = exp(2 pi i k^T M m)
struct BilinearCocycle {
  Mat M;
  int n() const { return static_cast<int>(M.rows()); }
  bool operator==(const BilinearCocycle& o) const {
    return M.rows() == o.M.rows() && M.cols() == o.M.cols() && M == o.M;
  }
};

cplx cocycle_eval(const BilinearCocycle& z, const Index& k, const Index& m);

// c_L(k, m) = c(Lk, Lm) written as zeta_M with M = -L^T K L
BilinearCocycle lattice_cocycle(const LatticeGen& g);
// conj(c_{L°}), the twist of the adjoint algebra
BilinearCocycle adjoint_lattice_cocycle(const LatticeGen& g);
// zeta_{Theta^low}, Theta^low the strictly lower triangular part
BilinearCocycle theta_low_cocycle(const Mat& Theta);
Mat strict_lower(const Mat& A);

// rho_L(k) = exp(-pi i k^T (L^T K L + Theta_L^low) k); c_L = zeta_{Theta^low} d(rho)
cplx cochain_rho(const LatticeGen& g, const Index& k);

// Collected-powers correction: delta_k = P(k) delta_{e1}^{k1} * ... * delta_{en}^{kn}
cplx collected_P(const BilinearCocycle& z, const Index& k);
cplx collected_P(const LatticeGen& g, const Index& k);
cplx collected_P_product(const LatticeGen& g, const Index& k);

// a^L = a . P_{c_L}
Coeffs twist_coeffs(const Coeffs& a, const LatticeGen& g);

} // namespace hb
