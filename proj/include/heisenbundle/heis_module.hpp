#pragma once

#include "heisenbundle/twisted_seq.hpp"
#include "heisenbundle/windows.hpp"

namespace hb {

struct TfTerm {
  Vec z;
  cplx c;
};

// f = sum_j c_j pi(z_j) g over a fixed base window g. Terms are kept sorted,
// merged on equal z and pruned below kPruneThreshold.
class ModuleVector {
public:
  explicit ModuleVector(Window base, std::vector<TfTerm> terms = {});
  static ModuleVector of(const Window& base);
  static ModuleVector shifted(const Window& base, const Vec& z, cplx c = 1.0);

  const Window& base() const { return base_; }
  const std::vector<TfTerm>& terms() const { return terms_; }
  int dim() const { return base_.dim(); }
  bool empty() const { return terms_.empty(); }

  cplx eval(double t) const;
  cplx eval(const Vec& t) const;
  double coeff_l1() const;
  double max_radius() const;

  ModuleVector operator+(const ModuleVector& o) const;
  ModuleVector operator-(const ModuleVector& o) const;
  ModuleVector scaled(cplx s) const;

private:
  void canonicalize();
  Window base_;
  std::vector<TfTerm> terms_;
};

void same_base(const ModuleVector& a, const ModuleVector& b);

struct GramCoeffs {
  Coeffs coeffs;
  double omittedBound = 0; // bound on the l1 mass of everything not stored
  bool rigorous = true;    // false when the frequency tail was only checked empirically
};

// k -> <f, pi(G k) h> for a generator G of a lattice in R^{2d}
GramCoeffs gram_coeffs(const ModuleVector& f, const ModuleVector& h, const Mat& G, double decayTol = 1e-13);

// <f, h> in L^2
cplx l2_inner(const ModuleVector& f, const ModuleVector& h);
double l2_norm(const ModuleVector& f);

// <f, h>_L(k) = <f, pi(Lk) h>, an element of A_L
AlgElem inner_left(const ModuleVector& f, const ModuleVector& h, const LatticeGen& L, double decayTol = 1e-13);
// <f, h>_{L°}(k) = <h, pi*(L°k) f>, an element of B_L
AlgElem inner_right(const ModuleVector& f, const ModuleVector& h, const LatticeGen& L, double decayTol = 1e-13,
                    double* omitted = nullptr);

// a . f = sum_k a(k) pi(Lk) f
ModuleVector act_left(const AlgElem& a, const ModuleVector& f, const LatticeGen& L);
// f . b = |det L|^{-1} sum_k b(k) pi*(L°k) f
ModuleVector act_right(const ModuleVector& f, const AlgElem& b, const LatticeGen& L);

struct ModuleNorm {
  double value = 0;      // from A_L
  double crossValue = 0; // from B_L
  double upperBound = 0; // square root of the l1 bound on the A side
  NormEstimate aSide, bSide;
};

// crossCheck = false skips the B side
ModuleNorm module_norm(const ModuleVector& f, const LatticeGen& L, const NormOptions& opt = {},
                       double decayTol = 1e-13, bool crossCheck = true);

// L^2 distance between <f,g>_L . h and f . <g,h>_{L°}
double figa_residual(const ModuleVector& f, const ModuleVector& g, const ModuleVector& h, const LatticeGen& L,
                     double decayTol = 1e-13);

std::string to_text(const ModuleVector& f);
ModuleVector module_vector_from_text(const std::string& text);

} // namespace hb
