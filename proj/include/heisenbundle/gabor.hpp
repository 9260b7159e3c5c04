#pragma once

#include "heisenbundle/heis_module.hpp"

#include <string>
#include <vector>

namespace hb {

struct FrameOptions {
  double tol = 1e-3;           // norm / spectral edge tolerance
  double decayTol = 1e-13;     // tail budget for the Janssen coefficients
  NormOptions norm;            // norm.tol is overwritten by tol
};

struct FrameReport {
  LatticeGen lattice;
  std::vector<std::string> windows;
  int windowCount = 1;
  double det = 0;              // |det L|
  double bessel = 0;           // B
  double lower = 0;            // A, estimate only
  bool certified = false;
  double neumannRate = 1;      // ||e - lambda b|| for lambda = 2 / (A + B)
  double lambda = 0;
  int boxRadius = 0;
  int prevRadius = 0;
  double tol = 0;
  double tailBound = 0;        // l1 mass not stored in b
  bool converged = false;
  bool densityAdvisory = false; // |det L| > number of windows
  SpectralEdges edges;
};

struct MultiWindowSet {
  std::vector<ModuleVector> windows;

  explicit MultiWindowSet(std::vector<ModuleVector> w);
  int size() const { return static_cast<int>(windows.size()); }
  bool density_advisory(const LatticeGen& L) const { return L.abs_det() > size(); }
};

// b = <g, h>_{L°} in B_L, so that S_{g,h,L} f = f . b
AlgElem janssen_coeffs(const ModuleVector& g, const ModuleVector& h, const LatticeGen& L, double decayTol = 1e-13);

// sum over k in [-R, R]^2 of <f, pi(Lk) g> pi(Lk) h on the grid of f (d = 1)
SampledFunction frame_op_apply(const ModuleVector& g, const ModuleVector& h, const LatticeGen& L,
                               const SampledFunction& f, int radius, double tol = 1e-10);
// the same operator through the Janssen expansion, f . b evaluated on a grid
SampledFunction janssen_apply(const AlgElem& b, const ModuleVector& f, const LatticeGen& L, double start,
                              double step, std::size_t count);
// relative L^2 distance of two functions on the same grid
double relative_l2_error(const SampledFunction& a, const SampledFunction& ref);

FrameReport frame_bounds(const ModuleVector& g, const LatticeGen& L, const FrameOptions& opt = {});
FrameReport multiwindow_bounds(const MultiWindowSet& ws, const LatticeGen& L, const FrameOptions& opt = {});

// canonical dual g . b_S^{-1}; invTol is the residual demanded of the inverse
ModuleVector dual_window(const ModuleVector& g, const LatticeGen& L, const FrameOptions& opt = {},
                         double invTol = 1e-10);

// max_k |<g, h>_{L°}(k) - |det L| delta_0(k)|
double wexler_raz_residual(const ModuleVector& g, const ModuleVector& h, const LatticeGen& L,
                           double decayTol = 1e-13);

struct MultiWindowSearch {
  bool found = false;
  Vec shift;
  int candidatesTried = 0;
  FrameReport report;
};

// {g, pi(s) g} over at most maxCandidates shifts s, the first certified one wins
MultiWindowSearch multiwindow_search(const ModuleVector& g, const LatticeGen& L, const FrameOptions& opt = {},
                                     int maxCandidates = 100);

struct ProjectionResult {
  AlgMatrix P;                  // p_ij = <Phi_i, Phi_j>_L
  std::vector<ModuleVector> phi;
  double idempotence = 0;       // max_ij ||(P P - P)_ij||_1
  double selfAdjointness = 0;   // max_ij ||(P* - P)_ij||_1
  double partition = 0;         // ||sum_i <Phi_i, Phi_i>_{L°} - 1||_1
  FrameReport report;
};

ProjectionResult projection_build(const MultiWindowSet& ws, const LatticeGen& L, const FrameOptions& opt = {},
                                  double invTol = 1e-10);

// ||sum_i b_i - 1_{B_L}|| in the scaled l1 norm
double partition_residual(const std::vector<AlgElem>& parts);

} // namespace hb
