#include "heisenbundle/gabor.hpp"

#include "heisenbundle/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hb {

MultiWindowSet::MultiWindowSet(std::vector<ModuleVector> w) : windows(std::move(w)) {
  if (windows.empty()) fail(ErrorKind::InvalidArgument, "a window set needs at least one window");
  for (const auto& v : windows) same_base(windows.front(), v);
}

AlgElem janssen_coeffs(const ModuleVector& g, const ModuleVector& h, const LatticeGen& L, double decayTol) {
  same_base(g, h);
  return inner_right(g, h, L, decayTol);
}

namespace {

std::vector<cplx> eval_on_grid(const ModuleVector& f, double start, double step, std::size_t count) {
  std::vector<cplx> v(count);
  for (std::size_t i = 0; i < count; ++i) v[i] = f.eval(start + static_cast<double>(i) * step);
  return v;
}

// pi(Lk) f as a module vector
ModuleVector shift_by(const ModuleVector& f, const Vec& w) {
  std::vector<TfTerm> t;
  t.reserve(f.terms().size());
  for (const auto& term : f.terms()) t.push_back({w + term.z, term.c * heisenberg_c(w, term.z)});
  return ModuleVector(f.base(), std::move(t));
}

AlgElem hermitian_part(const AlgElem& b) { return scale(add(b, tstar(b)), 0.5); }

FrameReport bounds_from_element(const AlgElem& b, double tailMass, const LatticeGen& L, int windows,
                                const FrameOptions& opt) {
  FrameReport r;
  r.lattice = L;
  r.windowCount = windows;
  r.det = L.abs_det();
  r.tol = opt.tol;
  r.tailBound = tailMass;
  r.densityAdvisory = r.det > windows;

  NormOptions nopt = opt.norm;
  nopt.tol = opt.tol;
  nopt.throwOnFailure = false;
  SpectralEdges e = spectral_edges(b, nopt);
  r.edges = e;
  r.boxRadius = e.boxRadius;
  r.prevRadius = e.prevRadius;
  r.converged = e.converged;
  r.bessel = std::max(e.edgeMax, e.maxExtrapolated);
  r.lower = std::clamp(std::min(e.edgeMin, e.minExtrapolated), 0.0, r.bessel);

  // the tail of b moves every spectral value by at most its scaled l1 mass
  const double slack = opt.tol + tailMass * b.alg.haarScale;
  const double lo = r.lower - slack, hi = r.bessel + slack;
  if (r.lower + r.bessel > 0) {
    r.lambda = 2.0 / (r.lower + r.bessel);
    r.neumannRate = std::max(std::abs(1.0 - r.lambda * lo), std::abs(1.0 - r.lambda * hi));
  }
  r.certified = r.converged && !r.densityAdvisory && r.neumannRate < 1.0;
  return r;
}

} // namespace

SampledFunction frame_op_apply(const ModuleVector& g, const ModuleVector& h, const LatticeGen& L,
                               const SampledFunction& f, int radius, double tol) {
  same_base(g, h);
  if (L.d != 1 || g.dim() != 1) fail(ErrorKind::DimensionMismatch, "grid frame operator is one-dimensional");
  if (radius < 0) fail(ErrorKind::InvalidArgument, "negative truncation radius");
  const std::size_t count = f.values.size();
  SampledFunction out{f.start, f.step, std::vector<cplx>(count, 0.0)};
  const double hNorm = l2_norm(h);
  double shellMass = 0;
  for (int k0 = -radius; k0 <= radius; ++k0)
    for (int k1 = -radius; k1 <= radius; ++k1) {
      Vec w = L.point({k0, k1});
      auto gk = eval_on_grid(shift_by(g, w), f.start, f.step, count);
      cplx c = 0;
      for (std::size_t i = 0; i < count; ++i) c += f.values[i] * std::conj(gk[i]);
      c *= f.step;
      if (std::max(std::abs(k0), std::abs(k1)) == radius) shellMass += std::abs(c) * hNorm;
      if (std::abs(c) * hNorm < 1e-3 * kPruneThreshold) continue;
      auto hk = eval_on_grid(shift_by(h, w), f.start, f.step, count);
      for (std::size_t i = 0; i < count; ++i) out.values[i] += c * hk[i];
    }
  if (shellMass > tol)
    fail(ErrorKind::BoxTooSmall, "outer shell still carries " + std::to_string(shellMass));
  return out;
}

SampledFunction janssen_apply(const AlgElem& b, const ModuleVector& f, const LatticeGen& L, double start,
                              double step, std::size_t count) {
  return {start, step, eval_on_grid(act_right(f, b, L), start, step, count)};
}

double relative_l2_error(const SampledFunction& a, const SampledFunction& ref) {
  if (a.values.size() != ref.values.size() || a.start != ref.start || a.step != ref.step)
    fail(ErrorKind::GridMismatch, "functions live on different grids");
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    num += std::norm(a.values[i] - ref.values[i]);
    den += std::norm(ref.values[i]);
  }
  if (den == 0) return num == 0 ? 0.0 : INFINITY;
  return std::sqrt(num / den);
}

FrameReport multiwindow_bounds(const MultiWindowSet& ws, const LatticeGen& L, const FrameOptions& opt) {
  if (!(opt.tol > 0)) fail(ErrorKind::InvalidArgument, "tolerance must be positive");
  AlgElem b(algebra_B(L), Coeffs(L.n()));
  double tail = 0;
  std::vector<std::string> names;
  for (const auto& g : ws.windows) {
    double omitted = 0;
    b = add(b, inner_right(g, g, L, opt.decayTol / ws.size(), &omitted));
    tail += omitted;
    names.push_back(g.base().descriptor() + "/" + std::to_string(g.terms().size()) + " terms");
  }
  // tiny entries only slow the Krylov sweeps; their mass joins the tail
  b = hermitian_part(b);
  tail += prune_l1(b.c, 1e-2 * opt.tol / b.alg.haarScale);
  FrameReport r = bounds_from_element(hermitian_part(b), tail, L, ws.size(), opt);
  r.windows = std::move(names);
  return r;
}

FrameReport frame_bounds(const ModuleVector& g, const LatticeGen& L, const FrameOptions& opt) {
  return multiwindow_bounds(MultiWindowSet({g}), L, opt);
}

ModuleVector dual_window(const ModuleVector& g, const LatticeGen& L, const FrameOptions& opt, double invTol) {
  FrameReport r = frame_bounds(g, L, opt);
  if (!r.certified) fail(ErrorKind::NotAFrame, "frame bounds are not certified for this window and lattice");
  AlgElem b = hermitian_part(janssen_coeffs(g, g, L, opt.decayTol));
  AlgElem inv = invert(b, invTol, Enclosure{r.lower, r.bessel});
  prune_l1(inv.c, 1e-3 * invTol);
  return act_right(g, inv, L);
}

double wexler_raz_residual(const ModuleVector& g, const ModuleVector& h, const LatticeGen& L, double decayTol) {
  AlgElem b = janssen_coeffs(g, h, L, decayTol);
  Coeffs diff = b.c;
  diff.add(Index(L.n(), 0), -L.abs_det());
  double m = 0;
  for (const auto& [k, v] : diff) m = std::max(m, std::abs(v));
  return m;
}

MultiWindowSearch multiwindow_search(const ModuleVector& g, const LatticeGen& L, const FrameOptions& opt,
                                     int maxCandidates) {
  MultiWindowSearch out;
  const int n = L.n();
  std::mt19937_64 rng(opt.norm.seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int c = 0; c < maxCandidates; ++c) {
    Vec s(n);
    if (c == 0) {
      s.setConstant(0.5);
    } else {
      Vec u(n);
      for (int i = 0; i < n; ++i) u(i) = U(rng);
      s = L.L * u;
    }
    out.candidatesTried = c + 1;
    MultiWindowSet ws({g, shift_by(g, s)});
    FrameReport r = multiwindow_bounds(ws, L, opt);
    if (r.certified) {
      out.found = true;
      out.shift = s;
      out.report = r;
      return out;
    }
  }
  return out;
}

double partition_residual(const std::vector<AlgElem>& parts) {
  if (parts.empty()) fail(ErrorKind::InvalidArgument, "empty partition");
  AlgElem s = sub(AlgElem(parts.front().alg, Coeffs(parts.front().n())), identity(parts.front().alg));
  for (const auto& p : parts) s = add(s, p);
  return seq_norm(s, SeqNorm::L1);
}

ProjectionResult projection_build(const MultiWindowSet& ws, const LatticeGen& L, const FrameOptions& opt,
                                  double invTol) {
  ProjectionResult out;
  out.report = multiwindow_bounds(ws, L, opt);
  if (!out.report.certified) fail(ErrorKind::NotAFrame, "window set is not a certified frame");
  AlgElem b(algebra_B(L), Coeffs(L.n()));
  for (const auto& g : ws.windows) b = add(b, janssen_coeffs(g, g, L, opt.decayTol / ws.size()));
  AlgElem y = hermitian_part(inv_sqrt(hermitian_part(b), invTol, Enclosure{out.report.lower, out.report.bessel}));
  prune_l1(y.c, 1e-3 * invTol);
  for (const auto& g : ws.windows) out.phi.push_back(act_right(g, y, L));

  const int n = ws.size();
  out.P.size = n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.P.entries.push_back(inner_left(out.phi[i], out.phi[j], L, opt.decayTol));
  out.idempotence = mat_max_l1(mat_sub(mat_mul(out.P, out.P), out.P));
  out.selfAdjointness = mat_max_l1(mat_sub(mat_star(out.P), out.P));
  std::vector<AlgElem> parts;
  for (const auto& p : out.phi) parts.push_back(inner_right(p, p, L, opt.decayTol));
  out.partition = partition_residual(parts);
  return out;
}

} // namespace hb
