#include "heisenbundle/twisted_seq.hpp"

#include "heisenbundle/errors.hpp"

#include <cmath>
#include <random>

namespace hb {

TwistedAlgebra algebra_A(const LatticeGen& g) { return {lattice_cocycle(g), 1.0}; }
TwistedAlgebra algebra_B(const LatticeGen& g) {
  return {adjoint_lattice_cocycle(g), 1.0 / g.abs_det()};
}
TwistedAlgebra algebra_theta(const Mat& Theta) { return {theta_low_cocycle(Theta), 1.0}; }

AlgElem::AlgElem(TwistedAlgebra a, Coeffs coeffs) : alg(std::move(a)), c(std::move(coeffs)) {
  if (c.dim() != alg.n()) fail(ErrorKind::DimensionMismatch, "coefficients do not live on Z^n of the algebra");
}

static void same_algebra(const AlgElem& a, const AlgElem& b) {
  if (!(a.alg == b.alg)) fail(ErrorKind::AlgebraMismatch, "operands belong to different twisted algebras");
}

AlgElem identity(const TwistedAlgebra& alg) {
  return {alg, Coeffs::delta(alg.n(), Index(alg.n(), 0), 1.0 / alg.haarScale)};
}

namespace {

struct Entry {
  Index k;
  cplx v;
};

std::vector<Entry> entries_of(const Coeffs& c) {
  std::vector<Entry> out;
  out.reserve(c.size());
  for (const auto& [k, v] : c) out.push_back({k, v});
  return out;
}

// u = M^T k so that k^T M m = u . m
template <class R = double>
std::vector<R> row_form(const Mat& M, const Index& k) {
  const int n = static_cast<int>(M.rows());
  std::vector<R> u(n, 0);
  for (int i = 0; i < n; ++i) {
    if (k[i] == 0) continue;
    for (int j = 0; j < n; ++j) u[j] += k[i] * M(i, j);
  }
  return u;
}

} // namespace

AlgElem tconv(const AlgElem& a, const AlgElem& b) {
  same_algebra(a, b);
  const int n = a.n();
  AlgElem out{a.alg, Coeffs(n)};
  if (a.c.empty() || b.c.empty()) return out;
  auto A = entries_of(a.c);
  auto B = entries_of(b.c);
  std::vector<int> lo(n, 0), hi(n, 0), blo(n, 0), bhi(n, 0);
  for (int i = 0; i < n; ++i) {
    int alo = A[0].k[i], ahi = A[0].k[i];
    for (auto& e : A) alo = std::min(alo, e.k[i]), ahi = std::max(ahi, e.k[i]);
    blo[i] = bhi[i] = B[0].k[i];
    for (auto& e : B) blo[i] = std::min(blo[i], e.k[i]), bhi[i] = std::max(bhi[i], e.k[i]);
    lo[i] = alo + blo[i];
    hi[i] = ahi + bhi[i];
  }
  std::vector<std::size_t> stride(n);
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) {
    stride[i] = total;
    total *= static_cast<std::size_t>(hi[i] - lo[i] + 1);
  }
  std::vector<cplx> acc(total, 0.0);
  for (const auto& ea : A) {
    auto u = row_form<long double>(a.alg.zeta.M, ea.k);
    for (const auto& eb : B) {
      long double t = 0;
      std::size_t pos = 0;
      for (int i = 0; i < n; ++i) {
        t += u[i] * eb.k[i];
        pos += stride[i] * static_cast<std::size_t>(ea.k[i] + eb.k[i] - lo[i]);
      }
      acc[pos] += ea.v * eb.v * unit_phase(static_cast<double>(t - std::nearbyint(t)));
    }
  }
  Index k(n);
  for (std::size_t pos = 0; pos < total; ++pos) {
    if (acc[pos] == cplx(0.0)) continue;
    std::size_t r = pos;
    for (int i = 0; i < n; ++i) {
      std::size_t ext = static_cast<std::size_t>(hi[i] - lo[i] + 1);
      k[i] = lo[i] + static_cast<int>(r % ext);
      r /= ext;
    }
    out.c.set(k, a.alg.haarScale * acc[pos]);
  }
  return out;
}

AlgElem tstar(const AlgElem& a) {
  AlgElem out{a.alg, Coeffs(a.n())};
  for (const auto& [k, v] : a.c) {
    Index mk(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) mk[i] = -k[i];
    // a*(m) at m = -k
    out.c.set(mk, std::conj(v) * cocycle_eval(a.alg.zeta, mk, mk));
  }
  return out;
}

AlgElem add(const AlgElem& a, const AlgElem& b) {
  same_algebra(a, b);
  return {a.alg, a.c + b.c};
}

AlgElem sub(const AlgElem& a, const AlgElem& b) {
  same_algebra(a, b);
  return {a.alg, a.c - b.c};
}

AlgElem scale(const AlgElem& a, cplx s) { return {a.alg, a.c.scaled(s)}; }

bool is_self_adjoint(const AlgElem& a, double tol) {
  double scale = std::max(1.0, sum_abs(a.c));
  return max_abs_diff(a.c, tstar(a).c) <= tol * scale;
}

double seq_norm(const AlgElem& a, SeqNorm kind, double s) {
  switch (kind) {
  case SeqNorm::L1: return a.alg.haarScale * sum_abs(a.c);
  case SeqNorm::L1Weighted: return a.alg.haarScale * sum_abs_weighted(a.c, s);
  case SeqNorm::L2: {
    double t = 0;
    for (const auto& [k, v] : a.c) t += std::norm(v);
    return std::sqrt(t);
  }
  }
  return 0;
}

std::size_t box_position(const Index& k, int N) {
  std::size_t pos = 0, stride = 1;
  const std::size_t side = 2 * static_cast<std::size_t>(N) + 1;
  for (int v : k) {
    if (v < -N || v > N) fail(ErrorKind::BoxTooSmall, "index outside the box");
    pos += stride * static_cast<std::size_t>(v + N);
    stride *= side;
  }
  return pos;
}

static std::size_t box_dim(int n, int N) {
  std::size_t d = 1;
  for (int i = 0; i < n; ++i) d *= 2 * static_cast<std::size_t>(N) + 1;
  return d;
}

static Index box_index(std::size_t pos, int n, int N) {
  Index k(n);
  const std::size_t side = 2 * static_cast<std::size_t>(N) + 1;
  for (int i = 0; i < n; ++i) {
    k[i] = static_cast<int>(pos % side) - N;
    pos /= side;
  }
  return k;
}

Eigen::MatrixXcd rep_matrix(const AlgElem& a, int N) {
  const int n = a.n();
  const std::size_t D = box_dim(n, N);
  if (D > 20000) fail(ErrorKind::InvalidArgument, "dense compression too large; use BoxOperator");
  Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(D, D);
  for (std::size_t col = 0; col < D; ++col) {
    Index m = box_index(col, n, N);
    for (const auto& [k, v] : a.c) {
      Index row(n);
      bool inside = true;
      for (int i = 0; i < n; ++i) {
        row[i] = m[i] + k[i];
        inside = inside && row[i] >= -N && row[i] <= N;
      }
      if (!inside) continue;
      R(box_position(row, N), col) += a.alg.haarScale * v * cocycle_eval(a.alg.zeta, k, m);
    }
  }
  return R;
}

BoxOperator::BoxOperator(const AlgElem& a, int N) : n_(a.n()), N_(N), dim_(box_dim(a.n(), N)) {
  for (const auto& [k, v] : a.c) {
    bool reaches = true;
    for (int x : k) reaches = reaches && std::abs(x) <= 2 * N;
    if (!reaches) continue;
    Term t{k, a.alg.haarScale * v, {}};
    auto u = row_form(a.alg.zeta.M, k);
    t.phase.resize(n_);
    for (int j = 0; j < n_; ++j) {
      t.phase[j].resize(2 * N + 1);
      for (int m = -N; m <= N; ++m) t.phase[j][m + N] = unit_phase(u[j] * m);
    }
    terms_.push_back(std::move(t));
  }
}

// y(m + k) += s a(k) zeta(k, m) x(m), or the adjoint y(m) += conj(...) x(m + k)
void BoxOperator::sweep(const CVec& x, CVec& y, bool adjoint) const {
  y.setZero(static_cast<Eigen::Index>(dim_));
  const int side = 2 * N_ + 1;
  std::vector<std::size_t> stride(n_);
  std::size_t s = 1;
  for (int i = 0; i < n_; ++i) stride[i] = s, s *= side;

  std::vector<int> mlo(n_), mhi(n_), m(n_);
  std::vector<cplx> outer(n_ + 1);
  for (const Term& t : terms_) {
    bool empty = false;
    std::ptrdiff_t shift = 0;
    for (int i = 0; i < n_; ++i) {
      mlo[i] = std::max(-N_, -N_ - t.k[i]);
      mhi[i] = std::min(N_, N_ - t.k[i]);
      empty = empty || mlo[i] > mhi[i];
      shift += static_cast<std::ptrdiff_t>(stride[i]) * t.k[i];
    }
    if (empty) continue;
    const cplx v = adjoint ? std::conj(t.value) : t.value;
    // odometer over coordinates 1..n-1, contiguous inner loop over coordinate 0
    for (int i = 1; i < n_; ++i) m[i] = mlo[i];
    while (true) {
      cplx ph = v;
      std::size_t base = 0;
      for (int i = 1; i < n_; ++i) {
        ph *= adjoint ? std::conj(t.phase[i][m[i] + N_]) : t.phase[i][m[i] + N_];
        base += stride[i] * static_cast<std::size_t>(m[i] + N_);
      }
      const auto& p0 = t.phase[0];
      if (!adjoint) {
        for (int m0 = mlo[0]; m0 <= mhi[0]; ++m0) {
          std::size_t src = base + static_cast<std::size_t>(m0 + N_);
          y[static_cast<Eigen::Index>(src + shift)] += ph * p0[m0 + N_] * x[static_cast<Eigen::Index>(src)];
        }
      } else {
        for (int m0 = mlo[0]; m0 <= mhi[0]; ++m0) {
          std::size_t dst = base + static_cast<std::size_t>(m0 + N_);
          y[static_cast<Eigen::Index>(dst)] += ph * std::conj(p0[m0 + N_]) * x[static_cast<Eigen::Index>(dst + shift)];
        }
      }
      int i = 1;
      for (; i < n_; ++i) {
        if (++m[i] <= mhi[i]) break;
        m[i] = mlo[i];
      }
      if (i >= n_) break;
    }
  }
}

void BoxOperator::apply(const CVec& x, CVec& y) const { sweep(x, y, false); }
void BoxOperator::apply_adjoint(const CVec& x, CVec& y) const { sweep(x, y, true); }

int default_box_max(int n) {
  switch (n) {
  case 1: return 4096;
  case 2: return 64;
  case 3: return 16;
  case 4: return 8;
  default: return 4;
  }
}

namespace {

CVec random_vector(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  CVec v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cplx(nd(rng), nd(rng));
  return v / v.norm();
}

CVec embed(const CVec& v, int n, int from, int to) {
  CVec out = CVec::Zero(static_cast<Eigen::Index>(box_dim(n, to)));
  for (std::size_t p = 0; p < static_cast<std::size_t>(v.size()); ++p)
    out[static_cast<Eigen::Index>(box_position(box_index(p, n, from), to))] = v[static_cast<Eigen::Index>(p)];
  return out;
}

CVec warm_start(const CVec* prev, int n, int from, int to, std::mt19937_64& rng) {
  CVec r = random_vector(box_dim(n, to), rng);
  if (!prev) return r;
  CVec w = embed(*prev, n, from, to);
  return w + 1e-3 * r;
}

std::vector<int> box_schedule(const Coeffs& c, const NormOptions& opt, int n) {
  const int boxMax = opt.boxMax > 0 ? opt.boxMax : default_box_max(n);
  int N = opt.startBox > 0 ? opt.startBox : 4 * std::max(1, c.support_radius());
  if (N > boxMax / 2) N = std::max(1, boxMax / 2);
  std::vector<int> out;
  while (true) {
    out.push_back(N);
    if (N >= boxMax) break;
    N = std::min(2 * N, boxMax);
  }
  return out;
}

double richardson(double x, int N, double xp, int Np) {
  double a = (N + 1.0) * (N + 1.0), b = (Np + 1.0) * (Np + 1.0);
  return x + (x - xp) * b / (a - b);
}

// Richardson under the O(1/N^2) model, widened when three boxes show a slower
// observed contraction per doubling. Changes below noise use Richardson alone.
double extrapolate(const std::vector<std::pair<int, double>>& h, double tol) {
  const std::size_t m = h.size();
  if (m < 2) return m ? h.back().second : 0.0;
  auto [N, x] = h[m - 1];
  auto [Np, xp] = h[m - 2];
  double rich = richardson(x, N, xp, Np) - x;
  double d1 = x - xp;
  if (m < 3 || std::abs(d1) < 0.05 * tol) return x + rich;
  double d0 = xp - h[m - 3].second;
  double rho = (d0 * d1 > 0) ? d0 / d1 : 0.0;
  double geo = d1 / (std::max(rho, 1.05) - 1.0);
  return x + (std::abs(geo) > std::abs(rich) ? geo : rich);
}

} // namespace

NormEstimate opnorm(const AlgElem& a, const NormOptions& opt) {
  NormEstimate est;
  est.tol = opt.tol;
  est.upperBound = seq_norm(a, SeqNorm::L1);
  const int n = a.n();
  if (a.c.empty()) {
    est.converged = true;
    return est;
  }
  const bool herm = is_self_adjoint(a);
  const double scale = std::max(est.upperBound, 1e-300);
  const double lanczosTol = 1e-2 * opt.tol;
  std::mt19937_64 rng(opt.seed);

  CVec vecHi, vecLo;
  int prevN = 0;
  double prev = -1;
  for (int N : box_schedule(a.c, opt, n)) {
    BoxOperator op(a, N);
    double value = 0;
    if (herm) {
      HermitianApply h = [&](const CVec& x, CVec& y) { op.apply(x, y); };
      double best = -1;
      RitzPair hi, lo;
      for (int r = 0; r < (prevN ? 1 : std::max(1, opt.restarts)); ++r) {
        auto shi = warm_start(prevN ? &vecHi : nullptr, n, prevN, N, rng);
        auto slo = warm_start(prevN ? &vecLo : nullptr, n, prevN, N, rng);
        RitzPair h1 = lanczos_extreme(h, shi, true, lanczosTol);
        // the bottom edge only matters when it competes with the top one
        const double loose = std::max(lanczosTol, 1e-2 * std::abs(h1.value));
        RitzPair l1 = lanczos_extreme(h, slo, false, loose);
        if (loose > lanczosTol && std::abs(l1.value) > std::abs(h1.value) - 4 * loose)
          l1 = lanczos_extreme(h, l1.vector, false, lanczosTol);
        double v = std::max(std::abs(h1.value), std::abs(l1.value));
        if (v > best) best = v, hi = h1, lo = l1;
      }
      vecHi = hi.vector;
      vecLo = lo.vector;
      value = best;
    } else {
      CVec tmp;
      HermitianApply h = [&](const CVec& x, CVec& y) {
        op.apply(x, tmp);
        op.apply_adjoint(tmp, y);
      };
      double best = -1;
      RitzPair hi;
      for (int r = 0; r < (prevN ? 1 : std::max(1, opt.restarts)); ++r) {
        auto s = warm_start(prevN ? &vecHi : nullptr, n, prevN, N, rng);
        RitzPair h1 = lanczos_extreme(h, s, true, lanczosTol * 2 * scale);
        if (h1.value > best) best = h1.value, hi = h1;
      }
      vecHi = hi.vector;
      value = std::sqrt(std::max(0.0, best));
    }
    // nested boxes: the previous compression norm is also a lower bound here
    value = std::max(value, prev);
    est.history.emplace_back(N, value);
    est.value = value;
    est.boxRadius = N;
    if (prevN) {
      est.extrapolated = extrapolate(est.history, opt.tol);
      if (std::abs(est.extrapolated - value) < opt.tol) {
        est.converged = true;
        return est;
      }
    }
    prev = value;
    prevN = N;
  }
  est.extrapolated = extrapolate(est.history, opt.tol);
  if (opt.throwOnFailure)
    fail(ErrorKind::NoConvergence, "operator norm did not settle within tol " + std::to_string(opt.tol) +
                                       " up to box radius " + std::to_string(est.boxRadius));
  return est;
}

SpectralEdges spectral_edges(const AlgElem& a, const NormOptions& opt) {
  if (!is_self_adjoint(a)) fail(ErrorKind::NotSelfAdjoint, "spectral edges need a self-adjoint element");
  SpectralEdges out;
  out.tol = opt.tol;
  const int n = a.n();
  if (a.c.empty()) {
    out.converged = true;
    return out;
  }
  std::mt19937_64 rng(opt.seed);
  const double lanczosTol = 1e-2 * opt.tol;
  CVec vecHi, vecLo;
  std::vector<std::pair<int, double>> histMax, histMin;
  int prevN = 0;
  for (int N : box_schedule(a.c, opt, n)) {
    BoxOperator op(a, N);
    HermitianApply h = [&](const CVec& x, CVec& y) { op.apply(x, y); };
    double hiBest = -1e300, loBest = 1e300;
    RitzPair hi, lo;
    for (int r = 0; r < (prevN ? 1 : std::max(1, opt.restarts)); ++r) {
      RitzPair h1 = lanczos_extreme(h, warm_start(prevN ? &vecHi : nullptr, n, prevN, N, rng), true, lanczosTol);
      RitzPair l1 = lanczos_extreme(h, warm_start(prevN ? &vecLo : nullptr, n, prevN, N, rng), false, lanczosTol);
      if (h1.value > hiBest) hiBest = h1.value, hi = h1;
      if (l1.value < loBest) loBest = l1.value, lo = l1;
    }
    vecHi = hi.vector;
    vecLo = lo.vector;
    if (prevN) {
      hiBest = std::max(hiBest, out.edgeMax);
      loBest = std::min(loBest, out.edgeMin);
      out.prevMax = out.edgeMax;
      out.prevMin = out.edgeMin;
      out.prevRadius = prevN;
    }
    out.edgeMax = hiBest;
    out.edgeMin = loBest;
    out.boxRadius = N;
    histMax.emplace_back(N, out.edgeMax);
    histMin.emplace_back(N, out.edgeMin);
    if (prevN) {
      out.maxExtrapolated = extrapolate(histMax, opt.tol);
      out.minExtrapolated = extrapolate(histMin, opt.tol);
      if (std::abs(out.maxExtrapolated - out.edgeMax) < opt.tol && std::abs(out.minExtrapolated - out.edgeMin) < opt.tol) {
        out.converged = true;
        return out;
      }
    } else {
      out.maxExtrapolated = out.edgeMax;
      out.minExtrapolated = out.edgeMin;
    }
    prevN = N;
  }
  if (opt.throwOnFailure)
    fail(ErrorKind::NoConvergence, "spectral edges did not settle up to box radius " + std::to_string(out.boxRadius));
  return out;
}

static Enclosure resolve_enclosure(const AlgElem& a, std::optional<Enclosure> spec, const NormOptions& nopt) {
  if (spec) return *spec;
  SpectralEdges e = spectral_edges(a, nopt);
  return {std::min(e.edgeMin, e.minExtrapolated), std::max(e.edgeMax, e.maxExtrapolated)};
}

AlgElem invert(const AlgElem& a, double tol, std::optional<Enclosure> spec, const NormOptions& nopt) {
  if (!is_self_adjoint(a)) fail(ErrorKind::NotSelfAdjoint, "Neumann inversion needs a positive element");
  Enclosure enc = resolve_enclosure(a, spec, nopt);
  if (!(enc.lower > 0)) fail(ErrorKind::NotPositive, "spectrum reaches " + std::to_string(enc.lower));
  const double lambda = 2.0 / (enc.lower + enc.upper);
  const AlgElem e = identity(a.alg);
  const AlgElem r = sub(e, scale(a, lambda));
  const AlgElem base = scale(e, lambda);
  AlgElem x = base;
  for (int it = 0; it < 5000; ++it) {
    AlgElem next = add(base, tconv(r, x));
    double step = seq_norm(sub(next, x), SeqNorm::L1);
    x = std::move(next);
    if (step < 1e-3 * tol) {
      double res = seq_norm(sub(tconv(a, x), e), SeqNorm::L1);
      if (res <= tol) return x;
    }
  }
  fail(ErrorKind::NoConvergence, "Neumann series did not reach the requested residual");
}

AlgElem inv_sqrt(const AlgElem& a, double tol, std::optional<Enclosure> spec, const NormOptions& nopt) {
  if (!is_self_adjoint(a)) fail(ErrorKind::NotSelfAdjoint, "inverse square root needs a positive element");
  Enclosure enc = resolve_enclosure(a, spec, nopt);
  if (!(enc.lower > 0)) fail(ErrorKind::NotPositive, "spectrum reaches " + std::to_string(enc.lower));
  const double B = enc.upper;
  const AlgElem e = identity(a.alg);
  const AlgElem ap = scale(a, 1.0 / B);
  const AlgElem three = scale(e, 3.0);
  AlgElem x = e;
  for (int it = 0; it < 200; ++it) {
    AlgElem next = scale(tconv(x, sub(three, tconv(ap, tconv(x, x)))), 0.5);
    double step = seq_norm(sub(next, x), SeqNorm::L1);
    x = std::move(next);
    if (step < 1e-3 * tol) {
      AlgElem y = scale(x, 1.0 / std::sqrt(B));
      double res = seq_norm(sub(tconv(y, tconv(a, y)), e), SeqNorm::L1);
      if (res <= tol) return y;
    }
  }
  fail(ErrorKind::NoConvergence, "Newton-Schulz iteration did not reach the requested residual");
}

static void check_square(const AlgMatrix& A) {
  if (static_cast<int>(A.entries.size()) != A.size * A.size)
    fail(ErrorKind::ShapeMismatch, "matrix storage does not match its size");
}

AlgMatrix mat_mul(const AlgMatrix& A, const AlgMatrix& B) {
  check_square(A);
  check_square(B);
  if (A.size != B.size) fail(ErrorKind::ShapeMismatch, "matrix sizes differ");
  AlgMatrix C{A.size, {}};
  if (A.size == 0) return C;
  for (int i = 0; i < A.size; ++i)
    for (int j = 0; j < A.size; ++j) {
      AlgElem s{A.at(0, 0).alg, Coeffs(A.at(0, 0).n())};
      for (int k = 0; k < A.size; ++k) s = add(s, tconv(A.at(i, k), B.at(k, j)));
      C.entries.push_back(std::move(s));
    }
  return C;
}

AlgMatrix mat_star(const AlgMatrix& A) {
  check_square(A);
  AlgMatrix C{A.size, std::vector<AlgElem>(A.entries.size())};
  for (int i = 0; i < A.size; ++i)
    for (int j = 0; j < A.size; ++j) C.at(j, i) = tstar(A.at(i, j));
  return C;
}

AlgMatrix mat_sub(const AlgMatrix& A, const AlgMatrix& B) {
  check_square(A);
  check_square(B);
  if (A.size != B.size) fail(ErrorKind::ShapeMismatch, "matrix sizes differ");
  AlgMatrix C{A.size, {}};
  for (std::size_t i = 0; i < A.entries.size(); ++i) C.entries.push_back(sub(A.entries[i], B.entries[i]));
  return C;
}

double mat_max_l1(const AlgMatrix& A) {
  double m = 0;
  for (const auto& e : A.entries) m = std::max(m, seq_norm(e, SeqNorm::L1));
  return m;
}

} // namespace hb
