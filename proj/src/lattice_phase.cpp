#include "heisenbundle/lattice_phase.hpp"

#include "heisenbundle/errors.hpp"

#include <cmath>
#include <numbers>

namespace hb {

Mat symplectic_J(int d) {
  Mat J = Mat::Zero(2 * d, 2 * d);
  J.topRightCorner(d, d) = Mat::Identity(d, d);
  J.bottomLeftCorner(d, d) = -Mat::Identity(d, d);
  return J;
}

Mat upper_K(int d) {
  Mat K = Mat::Zero(2 * d, 2 * d);
  K.topRightCorner(d, d) = Mat::Identity(d, d);
  return K;
}

cplx unit_phase(double t) {
  double r = t - std::nearbyint(t);
  double a = 2.0 * std::numbers::pi * r;
  return {std::cos(a), std::sin(a)};
}

double spectral_norm(const Mat& A) {
  if (A.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(A);
  return svd.singularValues()(0);
}

Mat row_major_matrix(int dim, const std::vector<double>& entries) {
  if (static_cast<int>(entries.size()) != dim * dim)
    fail(ErrorKind::DimensionMismatch, "expected " + std::to_string(dim * dim) + " entries, got " +
                                           std::to_string(entries.size()));
  Mat A(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) A(i, j) = entries[i * dim + j];
  return A;
}

static Vec to_vec(const Index& k) {
  Vec v(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) v(i) = k[i];
  return v;
}

Vec LatticeGen::point(const Index& k) const {
  if (static_cast<int>(k.size()) != n()) fail(ErrorKind::DimensionMismatch, "lattice index length");
  return L * to_vec(k);
}

Vec LatticeGen::adjoint_point(const Index& k) const {
  if (static_cast<int>(k.size()) != n()) fail(ErrorKind::DimensionMismatch, "lattice index length");
  return Ladj * to_vec(k);
}

LatticeGen make_lattice(const Mat& L, double det_threshold) {
  if (L.rows() != L.cols() || L.rows() == 0 || L.rows() % 2 != 0)
    fail(ErrorKind::DimensionMismatch, "lattice generator must be square of even size");
  LatticeGen g;
  g.d = static_cast<int>(L.rows()) / 2;
  g.L = L;
  g.det = L.determinant();
  if (!(std::abs(g.det) >= det_threshold))
    fail(ErrorKind::SingularMatrix, "|det L| = " + std::to_string(std::abs(g.det)));
  g.Linv = L.inverse();
  Mat J = symplectic_J(g.d);
  g.Ladj = J * g.Linv.transpose() * J.transpose();
  g.Theta = -L.transpose() * J * L;
  g.norm = spectral_norm(L);
  return g;
}

LatticeGen adjoint_lattice(const LatticeGen& g) { return make_lattice(g.Ladj); }

cplx heisenberg_c(const Vec& z1, const Vec& z2) {
  if (z1.size() != z2.size() || z1.size() % 2 != 0)
    fail(ErrorKind::DimensionMismatch, "phase-space points of unequal or odd length");
  const int d = static_cast<int>(z1.size()) / 2;
  double t = 0;
  for (int i = 0; i < d; ++i) t += z1(i) * z2(d + i);
  return unit_phase(-t);
}

cplx symplectic_c(const Vec& z1, const Vec& z2) {
  if (z1.size() != z2.size() || z1.size() % 2 != 0)
    fail(ErrorKind::DimensionMismatch, "phase-space points of unequal or odd length");
  const int d = static_cast<int>(z1.size()) / 2;
  double t = 0;
  for (int i = 0; i < d; ++i) t += z1(i) * z2(d + i) - z1(d + i) * z2(i);
  return unit_phase(-t);
}

// integer-index phase sums grow like |k|^2 ||L||^2; accumulate wide and reduce before rounding
static cplx wide_phase(long double t) { return unit_phase(static_cast<double>(t - std::nearbyint(t))); }

cplx cocycle_eval(const BilinearCocycle& z, const Index& k, const Index& m) {
  const int n = z.n();
  if (static_cast<int>(k.size()) != n || static_cast<int>(m.size()) != n)
    fail(ErrorKind::DimensionMismatch, "cocycle argument length");
  long double t = 0;
  for (int i = 0; i < n; ++i) {
    if (k[i] == 0) continue;
    long double row = 0;
    for (int j = 0; j < n; ++j) row += static_cast<long double>(z.M(i, j)) * m[j];
    t += k[i] * row;
  }
  return wide_phase(t);
}

BilinearCocycle lattice_cocycle(const LatticeGen& g) {
  return {-g.L.transpose() * upper_K(g.d) * g.L};
}

BilinearCocycle adjoint_lattice_cocycle(const LatticeGen& g) {
  return {g.Ladj.transpose() * upper_K(g.d) * g.Ladj};
}

Mat strict_lower(const Mat& A) {
  Mat low = Mat::Zero(A.rows(), A.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < i; ++j) low(i, j) = A(i, j);
  return low;
}

BilinearCocycle theta_low_cocycle(const Mat& Theta) { return {strict_lower(Theta)}; }

static long double quadratic_form(const Mat& A, const Index& k) {
  long double t = 0;
  for (int i = 0; i < A.rows(); ++i) {
    if (k[i] == 0) continue;
    for (int j = 0; j < A.cols(); ++j) t += static_cast<long double>(k[i]) * A(i, j) * k[j];
  }
  return t;
}

cplx cochain_rho(const LatticeGen& g, const Index& k) {
  if (static_cast<int>(k.size()) != g.n()) fail(ErrorKind::DimensionMismatch, "cochain index length");
  Mat A = g.L.transpose() * upper_K(g.d) * g.L + strict_lower(g.Theta);
  return wide_phase(-0.5L * quadratic_form(A, k));
}

cplx collected_P(const BilinearCocycle& z, const Index& k) {
  const int n = z.n();
  if (static_cast<int>(k.size()) != n) fail(ErrorKind::DimensionMismatch, "collected index length");
  long double t = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) t += static_cast<long double>(k[i]) * k[j] * z.M(i, j);
    t += 0.5L * k[i] * (k[i] - 1) * z.M(i, i);
  }
  return wide_phase(-t);
}

cplx collected_P(const LatticeGen& g, const Index& k) { return collected_P(lattice_cocycle(g), k); }

cplx collected_P_product(const LatticeGen& g, const Index& k) {
  const int n = g.n();
  if (static_cast<int>(k.size()) != n) fail(ErrorKind::DimensionMismatch, "collected index length");
  cplx p = 1.0;
  for (int i = 0; i < n; ++i) {
    Vec head = g.L.col(i) * k[i];
    Vec tail = Vec::Zero(n);
    for (int j = i + 1; j < n; ++j) tail += g.L.col(j) * k[j];
    p *= std::conj(heisenberg_c(head, tail));
    Vec e = g.L.col(i);
    cplx self = std::conj(heisenberg_c(e, e));
    // the exponent k(k-1)/2 is an integer for every integer k
    long long ex = static_cast<long long>(k[i]) * (k[i] - 1) / 2;
    double arg = std::arg(self) / (2.0 * std::numbers::pi);
    double t = arg * static_cast<double>(ex);
    p *= unit_phase(t);
  }
  return p;
}

Coeffs twist_coeffs(const Coeffs& a, const LatticeGen& g) {
  if (a.dim() != g.n()) fail(ErrorKind::DimensionMismatch, "twist of a sequence on the wrong Z^n");
  BilinearCocycle z = lattice_cocycle(g);
  Coeffs out(a.dim());
  for (const auto& [k, v] : a) out.set(k, v * collected_P(z, k));
  return out;
}

} // namespace hb
