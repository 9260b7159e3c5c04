#include "heisenbundle/deform.hpp"

#include "heisenbundle/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

namespace hb {

namespace {

const double kTwoSqrtPi = 2.0 * std::sqrt(std::numbers::pi);

Enclosure norm_range(const NormEstimate& e) {
  return {e.value, std::min(e.upperBound, std::max(e.value, e.extrapolated) + e.tol)};
}

// largest |x - y| over x in a, y in b
double max_gap(const Enclosure& a, const Enclosure& b) { return std::max(a.upper - b.lower, b.upper - a.lower); }

} // namespace

PathSpec PathSpec::linear(const Mat& L0, const Mat& L1, int samples) {
  if (samples < 2) fail(ErrorKind::InvalidArgument, "a linear path needs at least two samples");
  std::vector<double> ts;
  for (int i = 0; i < samples; ++i) ts.push_back(double(i) / (samples - 1));
  return affine(L0, L1 - L0, std::move(ts));
}

PathSpec PathSpec::affine(const Mat& A, const Mat& D, std::vector<double> ts) {
  PathSpec p{A, D, std::move(ts)};
  validate(p, false);
  return p;
}

Mat PathSpec::at(double t) const { return A + t * D; }

void validate(const PathSpec& p, bool invertible) {
  if (p.A.rows() != p.A.cols() || p.D.rows() != p.A.rows() || p.D.cols() != p.A.cols())
    fail(ErrorKind::DimensionMismatch, "path matrices must be square and of equal size");
  if (p.ts.empty()) fail(ErrorKind::InvalidArgument, "path without samples");
  for (std::size_t i = 1; i < p.ts.size(); ++i)
    if (!(p.ts[i] > p.ts[i - 1])) fail(ErrorKind::InvalidArgument, "path parameters must increase strictly");
  if (invertible)
    for (double t : p.ts) make_lattice(p.at(t));
}

std::string curve_csv(const std::vector<CurveRow>& rows) {
  std::string out = "t,L,value_lower,value_upper,certified,seed\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.12g,", r.t);
    out += buf;
    for (Eigen::Index i = 0; i < r.L.rows(); ++i)
      for (Eigen::Index j = 0; j < r.L.cols(); ++j) {
        std::snprintf(buf, sizeof buf, (i || j) ? ";%.12g" : "%.12g", r.L(i, j));
        out += buf;
      }
    std::snprintf(buf, sizeof buf, ",%.12g,%.12g,%d,%llu\n", r.lower, r.upper, r.certified ? 1 : 0,
                  static_cast<unsigned long long>(r.seed));
    out += buf;
  }
  return out;
}

Enclosure norm_enclosure(const AlgElem& a, const NormOptions& opt) { return norm_range(opnorm(a, opt)); }

std::vector<CurveRow> norm_curve(const Coeffs& a, const PathSpec& path, const NormOptions& opt) {
  validate(path);
  std::vector<CurveRow> rows;
  for (double t : path.ts) {
    LatticeGen L = make_lattice(path.at(t));
    if (a.dim() != L.n()) fail(ErrorKind::DimensionMismatch, "coefficients and lattice disagree in dimension");
    NormEstimate e = opnorm(AlgElem(algebra_A(L), a), opt);
    Enclosure r = norm_range(e);
    rows.push_back({t, L.L, r.lower, r.upper, e.converged, opt.seed});
  }
  return rows;
}

std::vector<CurveRow> norm_curve(const ModuleVector& f, const PathSpec& path, const NormOptions& opt) {
  validate(path);
  std::vector<CurveRow> rows;
  for (double t : path.ts) {
    LatticeGen L = make_lattice(path.at(t));
    ModuleNorm m = module_norm(f, L, opt, 1e-13, false);
    Enclosure r = norm_range(m.aSide);
    rows.push_back({t, L.L, std::sqrt(r.lower), std::sqrt(r.upper), m.aSide.converged, opt.seed});
  }
  return rows;
}

HolderFit holder_fit(const std::vector<CurveRow>& curve, std::size_t anchor, double tol) {
  if (anchor >= curve.size()) fail(ErrorKind::InvalidArgument, "anchor outside the curve");
  const CurveRow& a = curve[anchor];
  std::vector<double> dL, dv;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (i == anchor) continue;
    double d = spectral_norm(curve[i].L - a.L);
    if (d <= 0) continue;
    dL.push_back(d);
    dv.push_back(std::abs(curve[i].lower - a.lower));
  }
  if (dL.size() < 8) fail(ErrorKind::InvalidArgument, "a Hoelder fit needs 8 distinct offsets");
  if (*std::max_element(dv.begin(), dv.end()) < 10 * tol)
    fail(ErrorKind::DegenerateData, "the curve is flat at this tolerance");

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < dL.size(); ++i)
    if (dv[i] > tol && dv[i] > 0) {
      xs.push_back(std::log(dL[i]));
      ys.push_back(std::log(dv[i]));
    }
  if (xs.size() < 2) fail(ErrorKind::DegenerateData, "too few points above the noise floor");
  Eigen::MatrixXd X(xs.size(), 2);
  Eigen::VectorXd Y(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = xs[i];
    Y(i) = ys[i];
  }
  Eigen::Vector2d beta = X.colPivHouseholderQr().solve(Y);
  HolderFit fit;
  fit.exponent = beta(1);
  fit.constant = std::exp(beta(0));
  fit.residual = std::sqrt((X * beta - Y).squaredNorm() / static_cast<double>(xs.size()));
  fit.points = static_cast<int>(xs.size());
  for (std::size_t i = 0; i < dL.size(); ++i)
    fit.boundCheck = std::max(fit.boundCheck, dv[i] / (fit.constant * std::sqrt(dL[i])));
  return fit;
}

DeformationCheck deformation_bound_check(const Coeffs& a, const Mat& Theta, const Mat& Theta2,
                                         const NormOptions& opt) {
  for (const Mat* T : {&Theta, &Theta2}) {
    if (T->rows() != a.dim() || T->cols() != a.dim()) fail(ErrorKind::DimensionMismatch, "Theta has the wrong size");
    if ((*T + T->transpose()).cwiseAbs().maxCoeff() > 1e-12) fail(ErrorKind::InvalidArgument, "Theta is not skew");
  }
  DeformationCheck out;
  out.first = norm_enclosure(AlgElem(algebra_theta(Theta), a), opt);
  out.second = norm_enclosure(AlgElem(algebra_theta(Theta2), a), opt);
  out.lhsLower = std::max({0.0, out.first.lower - out.second.upper, out.second.lower - out.first.upper});
  out.lhsUpper = max_gap(out.first, out.second);
  out.rhs = kTwoSqrtPi * sum_abs_weighted(a, 1) * std::sqrt(spectral_norm(Theta - Theta2));
  out.holds = out.lhsUpper <= out.rhs + 2 * opt.tol;
  return out;
}

double twist_lipschitz_bound(const Coeffs& a, const LatticeGen& L, const LatticeGen& L0) {
  return (2 * L.d + 1) * std::numbers::pi * spectral_norm(upper_K(L.d)) * (L.norm + L0.norm) *
         sum_abs_weighted(a, 2) * spectral_norm(L.L - L0.L);
}

std::vector<ModulusStep> modulus_check(const Coeffs& a, const std::vector<CurveRow>& curve, double tol) {
  std::vector<ModulusStep> out;
  const double w1 = sum_abs_weighted(a, 1);
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    LatticeGen L0 = make_lattice(curve[i].L), L = make_lattice(curve[i + 1].L);
    ModulusStep s;
    s.index = i;
    s.lhs = max_gap({curve[i + 1].lower, curve[i + 1].upper}, {curve[i].lower, curve[i].upper});
    s.holderTerm = kTwoSqrtPi * w1 * std::sqrt(L.norm + L0.norm) * std::sqrt(spectral_norm(L.L - L0.L));
    s.twistTerm = sum_abs(twist_coeffs(a, L) - twist_coeffs(a, L0));
    s.lipschitzTerm = twist_lipschitz_bound(a, L, L0);
    s.holds = s.lhs <= s.holderTerm + s.lipschitzTerm + 2 * tol;
    out.push_back(s);
  }
  return out;
}

std::vector<Mat> stability_directions(int dim, std::uint64_t seed) {
  std::vector<Mat> dirs;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      for (double sgn : {1.0, -1.0}) {
        Mat E = Mat::Zero(dim, dim);
        E(i, j) = sgn;
        dirs.push_back(E);
      }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  for (int k = 0; k < 8; ++k) {
    Mat E(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) E(i, j) = nd(rng);
    dirs.push_back(E / spectral_norm(E));
  }
  return dirs;
}

StabilityReport stability_radius(const ModuleVector& g, const LatticeGen& L0, double step, double maxRadius,
                                 const FrameOptions& opt, double diagnosticTol) {
  if (!(step > 0) || maxRadius < 0) fail(ErrorKind::InvalidArgument, "step must be positive");
  StabilityReport out;
  out.seed = opt.norm.seed;
  out.diagnosticTol = diagnosticTol;
  out.base = frame_bounds(g, L0, opt);
  if (!out.base.certified) fail(ErrorKind::NotAFrame, "window is not a certified frame at the base lattice");
  out.directions = stability_directions(L0.n(), opt.norm.seed);
  if (step > maxRadius) return out;
  ModuleVector h0 = dual_window(g, L0, opt);
  NormOptions nopt = opt.norm;
  nopt.tol = diagnosticTol;
  nopt.throwOnFailure = false;

  const int steps = static_cast<int>(std::floor(maxRadius / step + 1e-9));
  for (int s = 1; s <= steps; ++s) {
    const double r = s * step;
    bool all = true;
    for (std::size_t d = 0; d < out.directions.size(); ++d) {
      StabilityPoint p;
      p.r = r;
      p.direction = static_cast<int>(d);
      p.L = L0.L + r * out.directions[d];
      p.det = std::abs(p.L.determinant());
      if (p.det > 1e-12) {
        LatticeGen L = make_lattice(p.L);
        FrameReport fr = frame_bounds(g, L, opt);
        p.certified = fr.certified;
        p.lower = fr.lower;
        p.bessel = fr.bessel;
        AlgElem dev = sub(janssen_coeffs(g, h0, L, opt.decayTol), identity(algebra_B(L)));
        double dropped = prune_l1(dev.c, 1e-2 * diagnosticTol / dev.alg.haarScale) * dev.alg.haarScale;
        Enclosure e = norm_enclosure(dev, nopt);
        p.sMinusId = std::max(0.0, e.lower - dropped);
        p.sMinusIdUpper = e.upper + dropped;
      }
      all = all && p.certified;
      out.points.push_back(p);
    }
    if (!all) break;
    out.radius = r;
  }
  return out;
}

std::vector<CurveRow> stability_rows(const StabilityReport& r) {
  std::vector<CurveRow> rows;
  for (const auto& p : r.points) rows.push_back({p.r, p.L, p.sMinusId, p.sMinusIdUpper, p.certified, r.seed});
  return rows;
}

SweepReport balian_low_sweep(const MultiWindowSet& ws, const PathSpec& path, const FrameOptions& opt) {
  validate(path);
  SweepReport out;
  for (double t : path.ts) {
    LatticeGen L = make_lattice(path.at(t));
    FrameReport fr = multiwindow_bounds(ws, L, opt);
    out.rows.push_back({t, fr.det, fr.lower, fr.bessel, fr.certified, fr.converged});
    if (fr.certified) {
      out.anyCertified = true;
      out.lastCertified = t;
    }
  }
  out.failedBeforeEnd = !out.rows.back().certified;
  out.endsAtCritical = std::abs(out.rows.back().det - ws.size()) < 1e-9;
  return out;
}

std::vector<CurveRow> sweep_rows(const SweepReport& r, const PathSpec& path, std::uint64_t seed) {
  std::vector<CurveRow> rows;
  for (const auto& s : r.rows) rows.push_back({s.t, path.at(s.t), s.lowerEstimate, s.bessel, s.certified, seed});
  return rows;
}

double hausdorff_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) fail(ErrorKind::InvalidArgument, "Hausdorff distance of an empty set");
  auto one_side = [](const std::vector<double>& x, const std::vector<double>& sorted) {
    double m = 0;
    for (double v : x) {
      auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
      double best = INFINITY;
      if (it != sorted.end()) best = *it - v;
      if (it != sorted.begin()) best = std::min(best, v - *(it - 1));
      m = std::max(m, best);
    }
    return m;
  };
  std::vector<double> sa = a, sb = b;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  return std::max(one_side(sa, sb), one_side(sb, sa));
}

SpectrumCurve spectrum_curve(const Coeffs& a, const PathSpec& path, SpectrumPath kind, int N) {
  validate(path, kind == SpectrumPath::Lattice);
  if (N < 1) fail(ErrorKind::InvalidArgument, "box radius must be positive");
  SpectrumCurve out;
  out.box = N;
  const double w1 = sum_abs_weighted(a, 1);
  std::vector<Mat> thetas;
  std::vector<Coeffs> twisted;
  for (double t : path.ts) {
    TwistedAlgebra alg;
    if (kind == SpectrumPath::Theta) {
      Mat T = path.at(t);
      if ((T + T.transpose()).cwiseAbs().maxCoeff() > 1e-12) fail(ErrorKind::InvalidArgument, "Theta is not skew");
      alg = algebra_theta(T);
      thetas.push_back(T);
      twisted.push_back(a);
    } else {
      LatticeGen L = make_lattice(path.at(t));
      alg = algebra_A(L);
      thetas.push_back(L.Theta);
      twisted.push_back(twist_coeffs(a, L));
    }
    AlgElem e(alg, a);
    if (!is_self_adjoint(e, 1e-12)) fail(ErrorKind::NotSelfAdjoint, "element is not self-adjoint along the path");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rep_matrix(e, N), Eigen::EigenvaluesOnly);
    SpectrumSample smp{t, {}};
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) smp.eigenvalues.push_back(es.eigenvalues()(i));
    out.samples.push_back(std::move(smp));
  }
  for (std::size_t i = 0; i + 1 < out.samples.size(); ++i) {
    SpectrumStep s;
    s.hausdorff = hausdorff_distance(out.samples[i].eigenvalues, out.samples[i + 1].eigenvalues);
    s.bound = kTwoSqrtPi * w1 * std::sqrt(spectral_norm(thetas[i + 1] - thetas[i])) +
              sum_abs(twisted[i + 1] - twisted[i]);
    s.holds = s.hausdorff <= s.bound + 1e-9;
    out.steps.push_back(s);
  }
  return out;
}

} // namespace hb
