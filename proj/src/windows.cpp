#include "heisenbundle/windows.hpp"

#include "heisenbundle/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

namespace hb {

namespace {

constexpr double kPi = std::numbers::pi;

using Poly = std::vector<cplx>;

Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly c(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

// coefficients of p(u + alpha)
template <class T>
std::vector<T> taylor_shift(const std::vector<T>& p, T alpha) {
  std::vector<T> q = p;
  const std::size_t n = q.size();
  // repeated synthetic division
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = n - 1; j > i; --j) q[j - 1] += alpha * q[j];
  return q;
}

// int u^j exp(-2 pi u^2) du
double gauss_moment(std::size_t j) {
  if (j % 2) return 0.0;
  double m = 1.0 / std::sqrt(2.0);
  for (std::size_t i = 1; i < j; i += 2) m *= static_cast<double>(i) / (4.0 * kPi);
  return m;
}

// int |u|^j exp(-2 pi u^2) du
double abs_gauss_moment(std::size_t j) {
  double a = (j + 1.0) / 2.0;
  return std::tgamma(a) / std::pow(2.0 * kPi, a);
}

cplx factor_stft(const PolyGaussian& f, const PolyGaussian& g, double x, double w) {
  const cplx alpha(x / 2.0, -w / 2.0), beta(-x / 2.0, -w / 2.0);
  Poly gc(g.coef.size());
  for (std::size_t i = 0; i < gc.size(); ++i) gc[i] = std::conj(g.coef[i]);
  Poly r = poly_mul(taylor_shift(f.coef, alpha), taylor_shift(gc, beta));
  cplx s = 0;
  for (std::size_t j = 0; j < r.size(); j += 2) s += r[j] * gauss_moment(j);
  return std::exp(-kPi * (x * x + w * w) / 2.0) * unit_phase(-w * x / 2.0) * s;
}

double factor_norm2(const PolyGaussian& f) {
  Poly fc(f.coef.size());
  for (std::size_t i = 0; i < fc.size(); ++i) fc[i] = std::conj(f.coef[i]);
  Poly r = poly_mul(f.coef, fc);
  double s = 0;
  for (std::size_t j = 0; j < r.size(); j += 2) s += r[j].real() * gauss_moment(j);
  return s;
}

PolyGaussian hermite_factor(int k) {
  // physicists' H_k(y), then y = sqrt(2 pi) t
  std::vector<double> hm1{}, h{1.0};
  for (int n = 0; n < k; ++n) {
    std::vector<double> next(h.size() + 1, 0.0);
    for (std::size_t j = 0; j < h.size(); ++j) next[j + 1] += 2.0 * h[j];
    for (std::size_t j = 0; j < hm1.size(); ++j) next[j] -= 2.0 * n * hm1[j];
    hm1 = h;
    h = next;
  }
  double c = std::pow(2.0, 0.25) / std::sqrt(std::pow(2.0, k) * std::tgamma(k + 1.0));
  PolyGaussian p;
  p.coef.resize(h.size());
  for (std::size_t j = 0; j < h.size(); ++j) p.coef[j] = c * h[j] * std::pow(2.0 * kPi, j / 2.0);
  return p;
}

} // namespace

cplx PolyGaussian::eval(cplx t) const {
  cplx s = 0;
  for (std::size_t j = coef.size(); j-- > 0;) s = s * t + coef[j];
  return s * std::exp(-kPi * t * t);
}

Window Window::gaussian(int d) {
  if (d < 1) fail(ErrorKind::InvalidArgument, "dimension must be positive");
  Window w;
  w.kind_ = Kind::Gaussian;
  w.d_ = d;
  w.factors_.assign(d, PolyGaussian{{std::pow(2.0, 0.25)}});
  return w;
}

Window Window::hermite(int order) {
  if (order < 0) fail(ErrorKind::InvalidArgument, "Hermite order must be nonnegative");
  Window w;
  w.kind_ = order == 0 ? Kind::Gaussian : Kind::Hermite;
  w.d_ = 1;
  w.order_ = order;
  w.factors_ = {hermite_factor(order)};
  if (order == 0) w.factors_ = {PolyGaussian{{std::pow(2.0, 0.25)}}};
  return w;
}

Window Window::sampled(double start, double step, std::vector<cplx> values, std::optional<double> decayRadius) {
  if (!(step > 0) || values.size() < 2) fail(ErrorKind::InvalidArgument, "sampled window needs step > 0 and two samples");
  if (decayRadius && !(*decayRadius > 0)) fail(ErrorKind::InvalidArgument, "decay radius must be positive");
  Window w;
  w.kind_ = Kind::Sampled;
  w.d_ = 1;
  w.start_ = start;
  w.step_ = step;
  w.values_ = std::move(values);
  w.decayRadius_ = decayRadius;
  return w;
}

std::pair<double, double> Window::support() const {
  double lo = start_, hi = start_ + step_ * static_cast<double>(values_.size() - 1);
  if (decayRadius_) lo = std::max(lo, -*decayRadius_), hi = std::min(hi, *decayRadius_);
  return {lo, hi};
}

cplx Window::eval(double t) const {
  if (d_ != 1) fail(ErrorKind::DimensionMismatch, "scalar evaluation of a multivariate window");
  if (analytic()) return factors_[0].eval(t);
  if (decayRadius_ && std::abs(t) > *decayRadius_) return 0.0;
  double u = (t - start_) / step_;
  if (u < 0 || u > static_cast<double>(values_.size() - 1)) return 0.0;
  std::size_t i = static_cast<std::size_t>(std::floor(u));
  if (i + 1 >= values_.size()) return values_.back();
  double f = u - static_cast<double>(i);
  return (1.0 - f) * values_[i] + f * values_[i + 1];
}

cplx Window::eval(const Vec& t) const {
  if (t.size() != d_) fail(ErrorKind::DimensionMismatch, "evaluation point has the wrong dimension");
  if (!analytic()) return eval(t(0));
  cplx v = 1.0;
  for (int i = 0; i < d_; ++i) v *= factors_[i].eval(t(i));
  return v;
}

double Window::l2_norm() const {
  if (analytic()) {
    double n2 = 1.0;
    for (const auto& f : factors_) n2 *= factor_norm2(f);
    return std::sqrt(n2);
  }
  // exact for the piecewise linear interpolant
  double s = 0;
  for (std::size_t i = 0; i + 1 < values_.size(); ++i) {
    cplx a = values_[i], b = values_[i + 1];
    s += step_ / 3.0 * (std::norm(a) + (a * std::conj(b)).real() + std::norm(b));
  }
  return std::sqrt(s);
}

std::string Window::descriptor() const {
  switch (kind_) {
  case Kind::Gaussian: return "gaussian:" + std::to_string(d_);
  case Kind::Hermite: return "hermite:" + std::to_string(order_);
  case Kind::Sampled: {
    char buf[96];
    std::snprintf(buf, sizeof buf, "sampled:%zu:%.17g:%.17g", values_.size(), start_, step_);
    return buf;
  }
  }
  return "";
}

bool Window::operator==(const Window& o) const {
  if (kind_ != o.kind_ || d_ != o.d_ || order_ != o.order_) return false;
  if (kind_ != Kind::Sampled) return true;
  return start_ == o.start_ && step_ == o.step_ && values_ == o.values_ && decayRadius_ == o.decayRadius_;
}

std::string sampled_window_text(const Window& w) {
  if (w.kind() != Window::Kind::Sampled) fail(ErrorKind::InvalidArgument, "only sampled windows have a file form");
  std::string out;
  char buf[128];
  std::snprintf(buf, sizeof buf, "1 %.17g %.17g %zu", w.start(), w.step(), w.values().size());
  out += buf;
  if (w.decay_radius()) {
    std::snprintf(buf, sizeof buf, " %.17g", *w.decay_radius());
    out += buf;
  }
  out += '\n';
  for (const cplx& v : w.values()) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.real(), v.imag());
    out += buf;
  }
  return out;
}

Window parse_sampled_window(const std::string& text) {
  std::istringstream in(text);
  std::string header;
  if (!std::getline(in, header)) fail(ErrorKind::ParseError, "empty window file");
  std::istringstream hs(header);
  int d = 0;
  double start = 0, step = 0;
  std::size_t count = 0;
  if (!(hs >> d >> start >> step >> count)) fail(ErrorKind::ParseError, "header must read 'd start step count'");
  std::optional<double> radius;
  double r;
  if (hs >> r) radius = r;
  if (d != 1) fail(ErrorKind::DimensionMismatch, "sampled windows are one-dimensional");
  std::vector<cplx> values;
  values.reserve(count);
  std::string line;
  while (values.size() < count && std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    double re = 0, im = 0;
    if (!(ls >> re)) fail(ErrorKind::ParseError, "bad sample line: " + line);
    ls >> im;
    values.emplace_back(re, im);
  }
  if (values.size() != count) fail(ErrorKind::ParseError, "fewer samples than the header announces");
  return Window::sampled(start, step, std::move(values), radius);
}

Window load_sampled_window(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorKind::ParseError, "cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_sampled_window(ss.str());
}

void save_sampled_window(const Window& w, const std::string& path) {
  std::ofstream f(path);
  if (!f) fail(ErrorKind::ParseError, "cannot write " + path);
  f << sampled_window_text(w);
}

void validate(const QuadratureSpec& q) {
  if (!(q.T > 0) || !(q.h > 0) || q.T / q.h > 1e6)
    fail(ErrorKind::QuadratureUnderResolved, "quadrature needs T > 0, h > 0 and T / h <= 1e6");
}

namespace {

// trapezoid sum of f over a + i h, i = 0..n, with the coarse sum over even i
std::pair<cplx, cplx> trapezoid_pair(const std::function<cplx(double)>& f, double a, double h, std::size_t n) {
  cplx fine = 0, coarse = 0;
  const std::size_t m = n - n % 2;
  for (std::size_t i = 0; i <= n; ++i) {
    cplx v = f(a + h * static_cast<double>(i));
    double wf = (i == 0 || i == n) ? 0.5 : 1.0;
    fine += wf * v;
    if (i <= m && i % 2 == 0) coarse += ((i == 0 || i == m) ? 0.5 : 1.0) * v;
  }
  fine *= h;
  coarse *= 2.0 * h;
  if (m != n) {
    // odd panel count: finish the coarse sum with the last fine panel
    coarse += 0.5 * h * (f(a + h * static_cast<double>(m)) + f(a + h * static_cast<double>(n)));
  }
  return {fine, coarse};
}

cplx sampled_stft(const Window& f, const Window& g, double x, double w) {
  // integrate over the grid of whichever factor is sampled
  if (!f.analytic()) {
    auto [lo, hi] = f.support();
    double h = f.step();
    std::size_t i0 = static_cast<std::size_t>(std::max(0.0, std::ceil((lo - f.start()) / h - 1e-9)));
    std::size_t i1 = static_cast<std::size_t>(std::floor((hi - f.start()) / h + 1e-9));
    cplx s = 0;
    for (std::size_t i = i0; i <= i1; ++i) {
      double t = f.start() + h * static_cast<double>(i);
      double wt = (i == i0 || i == i1) ? 0.5 : 1.0;
      s += wt * f.eval(t) * std::conj(g.eval(t - x)) * unit_phase(-w * t);
    }
    return s * h;
  }
  auto [lo, hi] = g.support();
  double h = g.step();
  std::size_t i0 = static_cast<std::size_t>(std::max(0.0, std::ceil((lo - g.start()) / h - 1e-9)));
  std::size_t i1 = static_cast<std::size_t>(std::floor((hi - g.start()) / h + 1e-9));
  cplx s = 0;
  for (std::size_t i = i0; i <= i1; ++i) {
    double u = g.start() + h * static_cast<double>(i);
    double wt = (i == i0 || i == i1) ? 0.5 : 1.0;
    s += wt * f.eval(u + x) * std::conj(g.eval(u)) * unit_phase(-w * (u + x));
  }
  return s * h;
}

} // namespace

cplx stft(const Window& f, const Window& g, const Vec& z) {
  if (f.dim() != g.dim() || z.size() != 2 * f.dim())
    fail(ErrorKind::DimensionMismatch, "stft arguments of inconsistent dimension");
  const int d = f.dim();
  if (f.analytic() && g.analytic()) {
    cplx v = 1.0;
    for (int i = 0; i < d; ++i) v *= factor_stft(f.factors()[i], g.factors()[i], z(i), z(d + i));
    return v;
  }
  return sampled_stft(f, g, z(0), z(1));
}

QuadratureResult stft_quadrature(const Window& f, const Window& g, const Vec& z, const QuadratureSpec& q) {
  validate(q);
  if (f.dim() != 1 || g.dim() != 1 || z.size() != 2) fail(ErrorKind::DimensionMismatch, "quadrature STFT is one-dimensional");
  const double x = z(0), w = z(1);
  auto integrand = [&](double t) { return f.eval(t) * std::conj(g.eval(t - x)) * unit_phase(-w * t); };
  std::size_t n = static_cast<std::size_t>(std::ceil(2.0 * q.T / q.h));
  auto [fine, coarse] = trapezoid_pair(integrand, x / 2.0 - q.T, 2.0 * q.T / static_cast<double>(n), n);
  QuadratureResult r{fine, std::abs(fine - coarse)};
  if (r.errorEstimate > q.target)
    fail(ErrorKind::QuadratureUnderResolved, "step-halving estimate " + std::to_string(r.errorEstimate));
  return r;
}

cplx pair_inner(const Vec& z1, const Window& f, const Vec& z2, const Window& g) {
  cplx ph = std::conj(heisenberg_c(z1, z1) * heisenberg_c(-z1, z2));
  return ph * stft(f, g, z2 - z1);
}

cplx pair_inner(const Vec& z1, const Vec& z2, const Window& g) { return pair_inner(z1, g, z2, g); }

StftEnvelope::StftEnvelope(const Window& f, const Window& g) {
  if (!f.analytic() || !g.analytic())
    fail(ErrorKind::DecayNotCertified, "no analytic decay envelope for sampled windows");
  if (f.dim() != g.dim()) fail(ErrorKind::DimensionMismatch, "windows of different dimension");
  for (int i = 0; i < f.dim(); ++i) {
    std::vector<double> a, b;
    for (const cplx& c : f.factors()[i].coef) a.push_back(std::abs(c));
    for (const cplx& c : g.factors()[i].coef) b.push_back(std::abs(c));
    pf_.push_back(a);
    pg_.push_back(b);
  }
}

double StftEnvelope::growth(double b) const {
  double total = 1.0;
  for (std::size_t i = 0; i < pf_.size(); ++i) {
    auto A = taylor_shift(pf_[i], b / 2.0), B = taylor_shift(pg_[i], b / 2.0);
    double s = 0;
    for (std::size_t j = 0; j < A.size(); ++j)
      for (std::size_t l = 0; l < B.size(); ++l) s += A[j] * B[l] * abs_gauss_moment(j + l);
    total *= s;
  }
  return total;
}

double StftEnvelope::bound(double a, double b) const {
  return growth(b) * std::exp(-kPi * a * a / 2.0);
}

SampledFunction sample(const Window& w, double start, double step, std::size_t count) {
  SampledFunction s{start, step, {}};
  s.values.reserve(count);
  for (std::size_t i = 0; i < count; ++i) s.values.push_back(w.eval(start + step * static_cast<double>(i)));
  return s;
}

QuadratureResult quadrature_inner(const SampledFunction& f, const SampledFunction& g) {
  if (f.values.size() != g.values.size() || f.step != g.step || f.start != g.start)
    fail(ErrorKind::GridMismatch, "sampled functions live on different grids");
  if (f.values.size() < 3) fail(ErrorKind::GridMismatch, "need at least three samples");
  const std::size_t n = f.values.size() - 1;
  auto val = [&](double t) {
    std::size_t i = static_cast<std::size_t>(std::llround((t - f.start) / f.step));
    return f.values[i] * std::conj(g.values[i]);
  };
  auto [fine, coarse] = trapezoid_pair(val, f.start, f.step, n);
  return {fine, std::abs(fine - coarse) / 3.0};
}

M1Estimate m1_norm_estimate(const Window& f, int s, double T, double h) {
  if (f.dim() != 1) fail(ErrorKind::DimensionMismatch, "M1 quadrature is implemented for d = 1");
  if (s < 0 || s > 2) fail(ErrorKind::InvalidArgument, "weight exponent must be 0, 1 or 2");
  QuadratureSpec spec{T, h};
  validate(spec);
  const Window phi = Window::gaussian(1);
  const std::size_t n = static_cast<std::size_t>(std::ceil(2.0 * T / h));
  const double step = 2.0 * T / static_cast<double>(n);
  const std::size_t m = n - n % 2;
  double fine = 0, coarse = 0;
  Vec z(2);
  for (std::size_t i = 0; i <= n; ++i) {
    z(0) = -T + step * static_cast<double>(i);
    double wi = (i == 0 || i == n) ? 0.5 : 1.0;
    double ci = (i % 2 || i > m) ? 0.0 : ((i == 0 || i == m) ? 0.5 : 1.0);
    for (std::size_t j = 0; j <= n; ++j) {
      z(1) = -T + step * static_cast<double>(j);
      double wj = (j == 0 || j == n) ? 0.5 : 1.0;
      double cj = (j % 2 || j > m) ? 0.0 : ((j == 0 || j == m) ? 0.5 : 1.0);
      double v = std::abs(stft(f, phi, z)) * std::pow(1.0 + std::abs(z(0)) + std::abs(z(1)), s);
      fine += wi * wj * v;
      coarse += ci * cj * v;
    }
  }
  M1Estimate out;
  out.value = fine * step * step;
  out.errorEstimate = std::abs(out.value - coarse * 4.0 * step * step);
  if (f.analytic()) {
    StftEnvelope env(f, phi);
    const double dr = 0.05;
    for (double r = T; r < T + 40.0; r += dr) {
      double piece = 2.0 * kPi * (r + dr) * dr * env.bound(r, r + dr) *
                     std::pow(1.0 + std::sqrt(2.0) * (r + dr), s);
      out.tailBound += piece;
      if (piece < 1e-300) break;
    }
  }
  return out;
}

} // namespace hb
