#include "heisenbundle/heis_module.hpp"

#include "heisenbundle/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <sstream>

namespace hb {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<long long> merge_key(const Vec& z) {
  std::vector<long long> k(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) k[i] = std::llround(z(i) * 1073741824.0);
  return k;
}

} // namespace

ModuleVector::ModuleVector(Window base, std::vector<TfTerm> terms) : base_(std::move(base)), terms_(std::move(terms)) {
  for (const auto& t : terms_)
    if (t.z.size() != 2 * base_.dim()) fail(ErrorKind::DimensionMismatch, "term point has the wrong dimension");
  canonicalize();
}

ModuleVector ModuleVector::of(const Window& base) { return shifted(base, Vec::Zero(2 * base.dim())); }

ModuleVector ModuleVector::shifted(const Window& base, const Vec& z, cplx c) {
  return ModuleVector(base, {TfTerm{z, c}});
}

void ModuleVector::canonicalize() {
  std::map<std::vector<long long>, TfTerm> merged;
  for (auto& t : terms_) {
    auto key = merge_key(t.z);
    auto it = merged.find(key);
    if (it == merged.end())
      merged.emplace(std::move(key), t);
    else
      it->second.c += t.c;
  }
  terms_.clear();
  for (auto& [k, t] : merged)
    if (std::abs(t.c) >= kPruneThreshold) terms_.push_back(std::move(t));
}

cplx ModuleVector::eval(double t) const {
  if (dim() != 1) fail(ErrorKind::DimensionMismatch, "scalar evaluation in d > 1");
  cplx s = 0;
  for (const auto& term : terms_) s += term.c * unit_phase(term.z(1) * t) * base_.eval(t - term.z(0));
  return s;
}

cplx ModuleVector::eval(const Vec& t) const {
  const int d = dim();
  if (t.size() != d) fail(ErrorKind::DimensionMismatch, "evaluation point has the wrong dimension");
  cplx s = 0;
  for (const auto& term : terms_) {
    double ph = term.z.tail(d).dot(t);
    s += term.c * unit_phase(ph) * base_.eval(Vec(t - term.z.head(d)));
  }
  return s;
}

double ModuleVector::coeff_l1() const {
  double s = 0;
  for (const auto& t : terms_) s += std::abs(t.c);
  return s;
}

double ModuleVector::max_radius() const {
  double r = 0;
  for (const auto& t : terms_) r = std::max(r, t.z.norm());
  return r;
}

void same_base(const ModuleVector& a, const ModuleVector& b) {
  if (!(a.base() == b.base())) fail(ErrorKind::BaseMismatch, a.base().descriptor() + " vs " + b.base().descriptor());
}

ModuleVector ModuleVector::operator+(const ModuleVector& o) const {
  same_base(*this, o);
  std::vector<TfTerm> t = terms_;
  t.insert(t.end(), o.terms_.begin(), o.terms_.end());
  return ModuleVector(base_, std::move(t));
}

ModuleVector ModuleVector::operator-(const ModuleVector& o) const { return *this + o.scaled(-1.0); }

ModuleVector ModuleVector::scaled(cplx s) const {
  std::vector<TfTerm> t = terms_;
  for (auto& x : t) x.c *= s;
  return ModuleVector(base_, std::move(t));
}

namespace {

// V_g g(u) with a fast path for Gaussian bases
struct SelfStft {
  const Window& g;
  bool gaussian;
  explicit SelfStft(const Window& w) : g(w), gaussian(w.kind() == Window::Kind::Gaussian) {}
  cplx operator()(const Vec& u) const {
    if (!gaussian) return stft(g, g, u);
    const int d = g.dim();
    double r2 = u.squaredNorm(), xw = 0;
    for (int i = 0; i < d; ++i) xw += u(i) * u(d + i);
    return std::exp(-kPi * r2 / 2.0) * unit_phase(-xw / 2.0);
  }
};

double xdotw(const Vec& a, const Vec& b) {
  const int d = static_cast<int>(a.size()) / 2;
  double t = 0;
  for (int i = 0; i < d; ++i) t += a(i) * b(d + i);
  return t;
}

// <pi(z1) g, pi(w) pi(y) g> = conj(c(w, y)) <pi(z1) g, pi(w + y) g>
cplx shifted_pair(const Vec& z1, const Vec& w, const Vec& y, const SelfStft& V) {
  Vec z2 = w + y;
  double t = xdotw(w, y) + xdotw(z1, z1) - xdotw(z1, z2);
  return unit_phase(t) * V(Vec(z2 - z1));
}

double unit_ball_volume(int n) { return std::pow(kPi, n / 2.0) / std::tgamma(n / 2.0 + 1.0); }

// bound on sum over lattice points p with |p - u| >= r of the envelope at |p - u|
struct LatticeTail {
  std::vector<double> r, tail;
  LatticeTail(const StftEnvelope& env, const Mat& G) {
    const int n = static_cast<int>(G.rows());
    double D = 0;
    for (int i = 0; i < n; ++i) D += G.col(i).norm();
    const double detG = std::abs(G.determinant());
    const double vol = unit_ball_volume(n);
    const double dr = 0.05, delta = 0.25;
    for (double r0 = 0; r0 <= 60.0; r0 += dr) {
      double s = 0;
      for (int j = 0;; ++j) {
        double a = r0 + j * delta, b = a + delta;
        double piece = vol * std::pow(b + D, n) / detG * env.bound(a, b);
        s += piece;
        if (piece < 1e-40 * (s + 1e-300) || a > 200.0) break;
      }
      r.push_back(r0);
      tail.push_back(s);
    }
  }
  // smallest tabulated radius whose tail times weight fits the budget
  std::pair<double, double> cut(double weight, double budget) const {
    // tail is nonincreasing in r
    auto it = std::partition_point(tail.begin(), tail.end(), [&](double t) { return weight * t > budget; });
    if (it == tail.end()) fail(ErrorKind::DecayNotCertified, "envelope tail did not fall below the budget");
    std::size_t i = static_cast<std::size_t>(it - tail.begin());
    return {r[i], weight * tail[i]};
  }
};

struct PairBox {
  std::size_t a, b;
  Vec u;
  double rcut;
  std::vector<int> lo, hi;
};

GramCoeffs analytic_gram(const ModuleVector& f, const ModuleVector& h, const Mat& G, double decayTol) {
  const Window& g = f.base();
  const int n = static_cast<int>(G.rows());
  StftEnvelope env(g, g);
  LatticeTail tail(env, G);
  const Mat Ginv = G.inverse();
  std::vector<double> rowNorm(n);
  for (int i = 0; i < n; ++i) rowNorm[i] = Ginv.row(i).norm();

  GramCoeffs out{Coeffs(n), 0.0, true};
  const auto& F = f.terms();
  const auto& H = h.terms();
  if (F.empty() || H.empty()) return out;
  const double budget = 0.5 * decayTol / static_cast<double>(F.size() * H.size());

  std::vector<PairBox> boxes;
  std::vector<int> glo(n, std::numeric_limits<int>::max()), ghi(n, std::numeric_limits<int>::min());
  for (std::size_t a = 0; a < F.size(); ++a)
    for (std::size_t b = 0; b < H.size(); ++b) {
      double weight = std::abs(F[a].c) * std::abs(H[b].c);
      if (weight * tail.tail[0] <= budget) {
        out.omittedBound += weight * tail.tail[0];
        continue;
      }
      auto [rc, omitted] = tail.cut(weight, budget);
      out.omittedBound += omitted;
      PairBox pb{a, b, F[a].z - H[b].z, rc, std::vector<int>(n), std::vector<int>(n)};
      Vec center = Ginv * pb.u;
      for (int i = 0; i < n; ++i) {
        pb.lo[i] = static_cast<int>(std::ceil(center(i) - rc * rowNorm[i]));
        pb.hi[i] = static_cast<int>(std::floor(center(i) + rc * rowNorm[i]));
        glo[i] = std::min(glo[i], pb.lo[i]);
        ghi[i] = std::max(ghi[i], pb.hi[i]);
      }
      boxes.push_back(std::move(pb));
    }
  if (boxes.empty()) return out;

  std::vector<std::size_t> stride(n);
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) {
    if (ghi[i] < glo[i]) return out;
    stride[i] = total;
    total *= static_cast<std::size_t>(ghi[i] - glo[i] + 1);
  }
  if (total > 50'000'000) fail(ErrorKind::DecayNotCertified, "Gram support too large to enumerate");
  std::vector<cplx> acc(total, 0.0);
  SelfStft V(g);
  Index k(n);
  Vec kv(n), w(n), z2(n), diff(n);
  for (const PairBox& pb : boxes) {
    bool empty = false;
    for (int i = 0; i < n; ++i) empty = empty || pb.lo[i] > pb.hi[i];
    if (empty) continue;
    const cplx weight = F[pb.a].c * std::conj(H[pb.b].c);
    const Vec& z1 = F[pb.a].z;
    const Vec& y = H[pb.b].z;
    const double r2cut = pb.rcut * pb.rcut;
    const double x11 = xdotw(z1, z1);
    k = pb.lo;
    while (true) {
      for (int i = 0; i < n; ++i) kv(i) = k[i];
      w.noalias() = G * kv;
      if ((w - pb.u).squaredNorm() <= r2cut) {
        std::size_t pos = 0;
        for (int i = 0; i < n; ++i) pos += stride[i] * static_cast<std::size_t>(k[i] - glo[i]);
        z2 = w + y;
        diff = z2 - z1;
        acc[pos] += weight * unit_phase(xdotw(w, y) + x11 - xdotw(z1, z2)) * V(diff);
      }
      int i = 0;
      for (; i < n; ++i) {
        if (++k[i] <= pb.hi[i]) break;
        k[i] = pb.lo[i];
      }
      if (i == n) break;
    }
  }
  for (std::size_t pos = 0; pos < total; ++pos) {
    if (acc[pos] == cplx(0.0)) continue;
    std::size_t r = pos;
    for (int i = 0; i < n; ++i) {
      std::size_t ext = static_cast<std::size_t>(ghi[i] - glo[i] + 1);
      k[i] = glo[i] + static_cast<int>(r % ext);
      r /= ext;
    }
    if (std::abs(acc[pos]) < kPruneThreshold)
      out.omittedBound += std::abs(acc[pos]);
    else
      out.coeffs.set(k, acc[pos]);
  }
  return out;
}

// Sampled bases: the time support is exact, the frequency tail is watched shell by shell.
GramCoeffs sampled_gram(const ModuleVector& f, const ModuleVector& h, const Mat& G, double decayTol) {
  const Window& g = f.base();
  if (!g.decay_radius()) fail(ErrorKind::DecayNotCertified, "sampled window without a decay radius");
  if (G.rows() != 2) fail(ErrorKind::DimensionMismatch, "sampled windows are one-dimensional");
  auto [lo, hi] = g.support();
  const double width = hi - lo;
  GramCoeffs out{Coeffs(2), 0.0, false};
  SelfStft V(g);
  int quiet = 0;
  for (int m = 0; m <= 400 && quiet < 2; ++m) {
    double shellMass = 0;
    for (int k0 = -m; k0 <= m; ++k0)
      for (int k1 = -m; k1 <= m; ++k1) {
        if (std::max(std::abs(k0), std::abs(k1)) != m) continue;
        Vec kv(2);
        kv << k0, k1;
        Vec w = G * kv;
        cplx s = 0;
        for (const auto& a : f.terms())
          for (const auto& b : h.terms()) {
            double dx = w(0) + b.z(0) - a.z(0);
            if (std::abs(dx) > width) continue;
            s += a.c * std::conj(b.c) * shifted_pair(a.z, w, b.z, V);
          }
        shellMass += std::abs(s);
        if (std::abs(s) < kPruneThreshold)
          out.omittedBound += std::abs(s);
        else
          out.coeffs.set({k0, k1}, s);
      }
    quiet = (m > 0 && shellMass < 0.1 * decayTol) ? quiet + 1 : 0;
  }
  return out;
}

} // namespace

GramCoeffs gram_coeffs(const ModuleVector& f, const ModuleVector& h, const Mat& G, double decayTol) {
  same_base(f, h);
  if (G.rows() != 2 * f.dim() || G.cols() != G.rows()) fail(ErrorKind::DimensionMismatch, "lattice generator size");
  if (f.base().analytic()) return analytic_gram(f, h, G, decayTol);
  return sampled_gram(f, h, G, decayTol);
}

cplx l2_inner(const ModuleVector& f, const ModuleVector& h) {
  same_base(f, h);
  const Window& g = f.base();
  SelfStft V(g);
  Vec zero = Vec::Zero(2 * f.dim());
  cplx s = 0;
  if (g.analytic()) {
    StftEnvelope env(g, g);
    for (const auto& a : f.terms())
      for (const auto& b : h.terms()) {
        double r = (a.z - b.z).norm();
        if (std::abs(a.c) * std::abs(b.c) * env.bound(r, r) < 1e-22) continue;
        s += a.c * std::conj(b.c) * shifted_pair(a.z, zero, b.z, V);
      }
    return s;
  }
  for (const auto& a : f.terms())
    for (const auto& b : h.terms()) s += a.c * std::conj(b.c) * shifted_pair(a.z, zero, b.z, V);
  return s;
}

double l2_norm(const ModuleVector& f) { return std::sqrt(std::max(0.0, l2_inner(f, f).real())); }

AlgElem inner_left(const ModuleVector& f, const ModuleVector& h, const LatticeGen& L, double decayTol) {
  if (L.d != f.dim()) fail(ErrorKind::DimensionMismatch, "lattice and window dimensions differ");
  return {algebra_A(L), gram_coeffs(f, h, L.L, decayTol).coeffs};
}

AlgElem inner_right(const ModuleVector& f, const ModuleVector& h, const LatticeGen& L, double decayTol,
                    double* omitted) {
  if (L.d != f.dim()) fail(ErrorKind::DimensionMismatch, "lattice and window dimensions differ");
  // <h, pi*(w) f> = conj(c(w, w)) <h, pi(-w) f>
  GramCoeffs gc = gram_coeffs(h, f, Mat(-L.Ladj), decayTol);
  if (omitted) *omitted = gc.omittedBound;
  Coeffs c(L.n());
  for (const auto& [k, v] : gc.coeffs) {
    Vec w = L.adjoint_point(k);
    c.set(k, std::conj(heisenberg_c(w, w)) * v);
  }
  return {algebra_B(L), c};
}

ModuleVector act_left(const AlgElem& a, const ModuleVector& f, const LatticeGen& L) {
  if (!(a.alg == algebra_A(L))) fail(ErrorKind::AlgebraMismatch, "left action needs an element of A_L");
  std::vector<TfTerm> t;
  t.reserve(a.c.size() * f.terms().size());
  for (const auto& [k, v] : a.c) {
    Vec w = L.point(k);
    for (const auto& term : f.terms()) t.push_back({w + term.z, v * term.c * heisenberg_c(w, term.z)});
  }
  return ModuleVector(f.base(), std::move(t));
}

ModuleVector act_right(const ModuleVector& f, const AlgElem& b, const LatticeGen& L) {
  if (!(b.alg == algebra_B(L))) fail(ErrorKind::AlgebraMismatch, "right action needs an element of B_L");
  const double s = 1.0 / L.abs_det();
  std::vector<TfTerm> t;
  t.reserve(b.c.size() * f.terms().size());
  for (const auto& [k, v] : b.c) {
    Vec w = L.adjoint_point(k);
    cplx cw = heisenberg_c(w, w);
    for (const auto& term : f.terms())
      t.push_back({term.z - w, s * v * term.c * cw * heisenberg_c(Vec(-w), term.z)});
  }
  return ModuleVector(f.base(), std::move(t));
}

ModuleNorm module_norm(const ModuleVector& f, const LatticeGen& L, const NormOptions& opt, double decayTol,
                       bool crossCheck) {
  ModuleNorm out;
  AlgElem a = inner_left(f, f, L, decayTol);
  out.aSide = opnorm(a, opt);
  out.value = std::sqrt(out.aSide.value);
  if (crossCheck) {
    out.bSide = opnorm(inner_right(f, f, L, decayTol), opt);
    out.crossValue = std::sqrt(out.bSide.value);
  }
  out.upperBound = std::sqrt(out.aSide.upperBound);
  return out;
}

double figa_residual(const ModuleVector& f, const ModuleVector& g, const ModuleVector& h, const LatticeGen& L,
                     double decayTol) {
  same_base(f, g);
  same_base(g, h);
  ModuleVector lhs = act_left(inner_left(f, g, L, decayTol), h, L);
  ModuleVector rhs = act_right(f, inner_right(g, h, L, decayTol), L);
  return l2_norm(lhs - rhs);
}

std::string to_text(const ModuleVector& f) {
  std::string out = "base " + f.base().descriptor() + "\n";
  if (!f.base().analytic()) {
    out += "window\n" + sampled_window_text(f.base()) + "end\n";
  }
  out += "terms " + std::to_string(f.terms().size()) + "\n";
  char buf[64];
  for (const auto& t : f.terms()) {
    for (Eigen::Index i = 0; i < t.z.size(); ++i) {
      std::snprintf(buf, sizeof buf, i ? " %.17g" : "%.17g", t.z(i));
      out += buf;
    }
    std::snprintf(buf, sizeof buf, "  %.17g  %.17g\n", t.c.real(), t.c.imag());
    out += buf;
  }
  return out;
}

ModuleVector module_vector_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line, tag, desc;
  if (!std::getline(in, line)) fail(ErrorKind::ParseError, "empty module vector");
  std::istringstream hs(line);
  if (!(hs >> tag >> desc) || tag != "base") fail(ErrorKind::ParseError, "expected 'base <descriptor>'");
  std::optional<Window> base;
  if (desc.rfind("gaussian:", 0) == 0) {
    base = Window::gaussian(std::stoi(desc.substr(9)));
  } else if (desc.rfind("hermite:", 0) == 0) {
    base = Window::hermite(std::stoi(desc.substr(8)));
  } else if (desc.rfind("sampled:", 0) == 0) {
    if (!std::getline(in, line) || line != "window") fail(ErrorKind::ParseError, "sampled base needs a window block");
    std::string block;
    while (std::getline(in, line) && line != "end") block += line + "\n";
    base = parse_sampled_window(block);
  } else {
    fail(ErrorKind::ParseError, "unknown base window " + desc);
  }
  std::size_t count = 0;
  if (!std::getline(in, line)) fail(ErrorKind::ParseError, "missing terms line");
  std::istringstream ts(line);
  if (!(ts >> tag >> count) || tag != "terms") fail(ErrorKind::ParseError, "expected 'terms <count>'");
  const int n = 2 * base->dim();
  std::vector<TfTerm> terms;
  while (terms.size() < count && std::getline(in, line)) {
    std::istringstream ls(line);
    TfTerm t{Vec(n), 0.0};
    std::string tok;
    for (int i = 0; i < n; ++i) {
      if (!(ls >> tok)) fail(ErrorKind::ParseError, "short term line");
      t.z(i) = std::strtod(tok.c_str(), nullptr);
    }
    std::string re, im;
    if (!(ls >> re >> im)) fail(ErrorKind::ParseError, "term line needs re im");
    t.c = cplx(std::strtod(re.c_str(), nullptr), std::strtod(im.c_str(), nullptr));
    terms.push_back(std::move(t));
  }
  if (terms.size() != count) fail(ErrorKind::ParseError, "fewer terms than announced");
  return ModuleVector(*base, std::move(terms));
}

} // namespace hb
