#pragma once

#include "heisenbundle/gabor.hpp"

#include <string>
#include <vector>

namespace hb {

// L(t) = A + t D for the listed parameters
struct PathSpec {
  Mat A, D;
  std::vector<double> ts;

  static PathSpec linear(const Mat& L0, const Mat& L1, int samples);
  static PathSpec affine(const Mat& A, const Mat& D, std::vector<double> ts);
  Mat at(double t) const;
  std::size_t size() const { return ts.size(); }
};

// parameters strictly increasing, shapes consistent; with invertible = true
// every sampled matrix must be a lattice generator
void validate(const PathSpec& p, bool invertible = true);

struct CurveRow {
  double t = 0;
  Mat L;
  double lower = 0, upper = 0;
  bool certified = false;
  std::uint64_t seed = 0;
};

// "t,L,value_lower,value_upper,certified,seed", L row-major joined by ';'
std::string curve_csv(const std::vector<CurveRow>& rows);

// opnorm of the fixed coefficients a in A_{L(t)}
std::vector<CurveRow> norm_curve(const Coeffs& a, const PathSpec& path, const NormOptions& opt = {});
// module norm of f over L(t)
std::vector<CurveRow> norm_curve(const ModuleVector& f, const PathSpec& path, const NormOptions& opt = {});

struct HolderFit {
  double exponent = 0;
  double constant = 0;
  double residual = 0;   // RMS of the log-log fit
  double boundCheck = 0; // max |dv| / (constant |dL|^{1/2})
  int points = 0;
};

HolderFit holder_fit(const std::vector<CurveRow>& curve, std::size_t anchor, double tol);

struct DeformationCheck {
  double lhsLower = 0, lhsUpper = 0;
  double rhs = 0;
  bool holds = false;
  Enclosure first, second;
};

// | ||pi_Theta(a)|| - ||pi_Theta'(a)|| | <= 2 sqrt(pi) ||a||_{l1_nu} ||Theta - Theta'||^{1/2}
DeformationCheck deformation_bound_check(const Coeffs& a, const Mat& Theta, const Mat& Theta2,
                                         const NormOptions& opt = {});

// [compression norm, min(l1, extrapolated norm + tol)]
Enclosure norm_enclosure(const AlgElem& a, const NormOptions& opt = {});

// ||a^L - a^{L0}||_1 <= (2d+1) pi ||K|| (||L|| + ||L0||) ||a||_{l1_nu2} ||L - L0||
double twist_lipschitz_bound(const Coeffs& a, const LatticeGen& L, const LatticeGen& L0);

struct ModulusStep {
  std::size_t index = 0; // pair (index, index + 1)
  double lhs = 0;        // largest |dv| the enclosures allow
  double holderTerm = 0;
  double twistTerm = 0;     // measured ||a^L - a^{L0}||_1
  double lipschitzTerm = 0; // its Lipschitz bound
  bool holds = false;       // lhs <= holder + lipschitz + 2 tol
};

std::vector<ModulusStep> modulus_check(const Coeffs& a, const std::vector<CurveRow>& curve, double tol);

struct StabilityPoint {
  double r = 0;
  int direction = 0;
  Mat L;
  double det = 0;
  bool certified = false;
  double lower = 0, bessel = 0;
  double sMinusId = 0;      // compression estimate of ||S_{g,h0,L} - Id||
  double sMinusIdUpper = 0;
};

struct StabilityReport {
  double radius = 0;
  std::uint64_t seed = 0;
  double diagnosticTol = 0;
  std::vector<Mat> directions;
  std::vector<StabilityPoint> points;
  FrameReport base;
};

// axis directions over all matrix units (both signs) plus 8 seeded random unit directions
std::vector<Mat> stability_directions(int dim, std::uint64_t seed);

// diagnosticTol is the norm tolerance of the ||S - Id|| curve
StabilityReport stability_radius(const ModuleVector& g, const LatticeGen& L0, double step, double maxRadius,
                                 const FrameOptions& opt = {}, double diagnosticTol = 1e-2);
std::vector<CurveRow> stability_rows(const StabilityReport& r);

struct SweepRow {
  double t = 0;
  double det = 0;
  double lowerEstimate = 0;
  double bessel = 0;
  bool certified = false;
  bool converged = false;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  bool anyCertified = false;
  double lastCertified = 0;
  bool failedBeforeEnd = false; // the final sample is not certified
  bool endsAtCritical = false;  // |det| of the final matrix equals the window count
};

SweepReport balian_low_sweep(const MultiWindowSet& ws, const PathSpec& path, const FrameOptions& opt = {});
std::vector<CurveRow> sweep_rows(const SweepReport& r, const PathSpec& path, std::uint64_t seed);

enum class SpectrumPath { Theta, Lattice };

struct SpectrumSample {
  double t = 0;
  std::vector<double> eigenvalues;
};

struct SpectrumStep {
  double hausdorff = 0;
  double bound = 0;
  bool holds = false;
};

struct SpectrumCurve {
  std::vector<SpectrumSample> samples;
  std::vector<SpectrumStep> steps;
  int box = 0;
};

// eigenvalues of the box-N compression along a path of Theta matrices or lattice generators
SpectrumCurve spectrum_curve(const Coeffs& a, const PathSpec& path, SpectrumPath kind, int N);

double hausdorff_distance(const std::vector<double>& a, const std::vector<double>& b);

} // namespace hb
