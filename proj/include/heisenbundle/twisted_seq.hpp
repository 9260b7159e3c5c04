#pragma once

#include "heisenbundle/coeffs.hpp"
#include "heisenbundle/krylov.hpp"
#include "heisenbundle/lattice_phase.hpp"

#include <cstdint>
#include <optional>

namespace hb {

// l1(Z^n) with product (a * b)(n) = s sum_k a(k) b(n-k) zeta(k, n-k)
// and involution a*(n) = conj(a(-n)) zeta(n, n); s is the Haar scale.
struct TwistedAlgebra {
  BilinearCocycle zeta;
  double haarScale = 1.0;

  int n() const { return zeta.n(); }
  bool operator==(const TwistedAlgebra& o) const {
    return zeta == o.zeta && haarScale == o.haarScale;
  }
};

TwistedAlgebra algebra_A(const LatticeGen& g);       // A_L: cocycle c_L, scale 1
TwistedAlgebra algebra_B(const LatticeGen& g);       // B_L: conj c_{L°}, scale 1/|det L|
TwistedAlgebra algebra_theta(const Mat& Theta);      // zeta_{Theta^low}, scale 1

struct AlgElem {
  TwistedAlgebra alg;
  Coeffs c;

  AlgElem() = default;
  AlgElem(TwistedAlgebra a, Coeffs coeffs);
  int n() const { return alg.n(); }
};

AlgElem identity(const TwistedAlgebra& alg);
AlgElem tconv(const AlgElem& a, const AlgElem& b);
AlgElem tstar(const AlgElem& a);
AlgElem add(const AlgElem& a, const AlgElem& b);
AlgElem sub(const AlgElem& a, const AlgElem& b);
AlgElem scale(const AlgElem& a, cplx s);
bool is_self_adjoint(const AlgElem& a, double tol = 1e-13);

enum class SeqNorm { L1, L1Weighted, L2 };
// The l1 norms carry the Haar scale; L2 is the plain coefficient norm.
double seq_norm(const AlgElem& a, SeqNorm kind, double s = 0);

// Compression of the left regular representation to the box [-N, N]^n;
// entry (n, m) = s a(n - m) zeta(n - m, m). Row/column order: coordinate 0 fastest.
Eigen::MatrixXcd rep_matrix(const AlgElem& a, int N);
std::size_t box_position(const Index& k, int N);

class BoxOperator {
public:
  BoxOperator(const AlgElem& a, int N);
  std::size_t dim() const { return dim_; }
  int radius() const { return N_; }
  void apply(const CVec& x, CVec& y) const;
  void apply_adjoint(const CVec& x, CVec& y) const;

private:
  struct Term {
    Index k;
    cplx value;
    std::vector<std::vector<cplx>> phase; // per coordinate, m_j in [-N, N]
  };
  void sweep(const CVec& x, CVec& y, bool adjoint) const;

  int n_ = 0, N_ = 0;
  std::size_t dim_ = 0;
  std::vector<Term> terms_;
};

struct NormOptions {
  double tol = 1e-3;
  int boxMax = 0;       // 0: 64 when n = 2, scaled to similar work otherwise
  int startBox = 0;     // 0: 4 * support radius
  std::uint64_t seed = 1;
  int restarts = 3;
  bool throwOnFailure = true;
};

int default_box_max(int n);

struct NormEstimate {
  double value = 0;          // compression norm at boxRadius, never above the true norm
  bool lowerCertified = true;
  double upperBound = 0;     // scaled l1 norm
  int boxRadius = 0;
  double tol = 0;
  bool converged = false;
  double extrapolated = 0;   // Richardson estimate from the last two boxes
  std::vector<std::pair<int, double>> history;
};

NormEstimate opnorm(const AlgElem& a, const NormOptions& opt = {});

// Extreme eigenvalues of the box compressions of a self-adjoint element, run
// with the same box-doubling rule as opnorm. Compressions only shrink the
// numerical range, so edgeMin >= inf spectrum and edgeMax <= sup spectrum.
struct SpectralEdges {
  double edgeMin = 0, edgeMax = 0;
  double prevMin = 0, prevMax = 0;
  int boxRadius = 0, prevRadius = 0;
  double minExtrapolated = 0, maxExtrapolated = 0;
  bool converged = false;
  double tol = 0;
};

SpectralEdges spectral_edges(const AlgElem& a, const NormOptions& opt = {});

struct Enclosure {
  double lower = 0, upper = 0;
};

AlgElem invert(const AlgElem& a, double tol, std::optional<Enclosure> spec = std::nullopt,
               const NormOptions& nopt = {});
AlgElem inv_sqrt(const AlgElem& a, double tol, std::optional<Enclosure> spec = std::nullopt,
                 const NormOptions& nopt = {});

// Square matrices over a twisted algebra, stored row-major.
struct AlgMatrix {
  int size = 0;
  std::vector<AlgElem> entries;
  const AlgElem& at(int i, int j) const { return entries[i * size + j]; }
  AlgElem& at(int i, int j) { return entries[i * size + j]; }
};

AlgMatrix mat_mul(const AlgMatrix& A, const AlgMatrix& B);
AlgMatrix mat_star(const AlgMatrix& A);
AlgMatrix mat_sub(const AlgMatrix& A, const AlgMatrix& B);
// max over entries of the scaled l1 norm, an upper bound for every C*-entry norm
double mat_max_l1(const AlgMatrix& A);

} // namespace hb
