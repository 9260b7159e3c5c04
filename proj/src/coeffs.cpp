#include "heisenbundle/coeffs.hpp"

#include "heisenbundle/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace hb {

Coeffs Coeffs::delta(int n, const Index& k, cplx v) {
  Coeffs c(n);
  c.set(k, v);
  return c;
}

void Coeffs::check_index(const Index& k) const {
  if (static_cast<int>(k.size()) != n_)
    fail(ErrorKind::DimensionMismatch, "index of length " + std::to_string(k.size()) +
                                           " in a sequence on Z^" + std::to_string(n_));
}

cplx Coeffs::get(const Index& k) const {
  check_index(k);
  auto it = map_.find(k);
  return it == map_.end() ? cplx(0.0) : it->second;
}

void Coeffs::set(const Index& k, cplx v) {
  check_index(k);
  if (std::abs(v) < kPruneThreshold)
    map_.erase(k);
  else
    map_[k] = v;
}

void Coeffs::add(const Index& k, cplx v) {
  check_index(k);
  map_[k] += v;
}

void Coeffs::prune(double threshold) {
  for (auto it = map_.begin(); it != map_.end();) {
    if (std::abs(it->second) < threshold)
      it = map_.erase(it);
    else
      ++it;
  }
}

int l1_length(const Index& k) {
  int r = 0;
  for (int v : k) r += std::abs(v);
  return r;
}

int Coeffs::support_radius() const {
  int r = 0;
  for (const auto& [k, v] : map_) r = std::max(r, l1_length(k));
  return r;
}

Coeffs Coeffs::scaled(cplx s) const {
  Coeffs out(n_);
  for (const auto& [k, v] : map_) out.set(k, s * v);
  return out;
}

Coeffs Coeffs::operator+(const Coeffs& o) const {
  if (o.n_ != n_) fail(ErrorKind::DimensionMismatch, "adding sequences on different Z^n");
  Coeffs out = *this;
  for (const auto& [k, v] : o.map_) out.map_[k] += v;
  out.prune();
  return out;
}

Coeffs Coeffs::operator-(const Coeffs& o) const { return *this + o.scaled(-1.0); }

double sum_abs(const Coeffs& a) {
  double s = 0;
  for (const auto& [k, v] : a) s += std::abs(v);
  return s;
}

double sum_abs_weighted(const Coeffs& a, double s) {
  double t = 0;
  for (const auto& [k, v] : a) t += std::abs(v) * std::pow(1.0 + l1_length(k), s);
  return t;
}

double max_abs_diff(const Coeffs& a, const Coeffs& b) {
  double m = 0;
  for (const auto& [k, v] : a) m = std::max(m, std::abs(v - b.get(k)));
  for (const auto& [k, v] : b)
    if (!a.entries().count(k)) m = std::max(m, std::abs(v));
  return m;
}

std::string to_text(const Coeffs& a) {
  std::string out;
  char buf[64];
  for (const auto& [k, v] : a) {
    for (std::size_t i = 0; i < k.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(k[i]);
    }
    std::snprintf(buf, sizeof buf, "  %.17g  %.17g\n", v.real(), v.imag());
    out += buf;
  }
  return out;
}

Coeffs coeffs_from_text(const std::string& text, int n) {
  Coeffs c(n);
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    Index k(n);
    for (int i = 0; i < n; ++i)
      if (!(ls >> k[i])) fail(ErrorKind::ParseError, "bad index on line " + std::to_string(lineno));
    std::string re, im, extra;
    if (!(ls >> re >> im) || (ls >> extra))
      fail(ErrorKind::ParseError, "expected re im on line " + std::to_string(lineno));
    c.set(k, cplx(std::strtod(re.c_str(), nullptr), std::strtod(im.c_str(), nullptr)));
  }
  return c;
}

double prune_l1(Coeffs& a, double budget) {
  std::vector<std::pair<double, Index>> mags;
  for (const auto& [k, v] : a) mags.emplace_back(std::abs(v), k);
  std::sort(mags.begin(), mags.end());
  double dropped = 0;
  for (const auto& [m, k] : mags) {
    if (dropped + m > budget) break;
    dropped += m;
    a.set(k, 0.0);
  }
  return dropped;
}

} // namespace hb
