#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

namespace hb {

using cplx = std::complex<double>;
using Index = std::vector<int>;

inline constexpr double kPruneThreshold = 1e-15;

// Finitely supported sequence on Z^n. Entries below kPruneThreshold are
// dropped, so the stored support is always the numerical support.
class Coeffs {
public:
  Coeffs() = default;
  explicit Coeffs(int n) : n_(n) {}

  static Coeffs delta(int n, const Index& k, cplx v = 1.0);

  int dim() const { return n_; }
  std::size_t size() const { return map_.size(); }
  bool empty() const { return map_.empty(); }

  cplx get(const Index& k) const;
  void set(const Index& k, cplx v);
  void add(const Index& k, cplx v);
  void prune(double threshold = kPruneThreshold);

  // max over the support of the l1 length of the index; 0 when empty
  int support_radius() const;

  const std::map<Index, cplx>& entries() const { return map_; }
  auto begin() const { return map_.begin(); }
  auto end() const { return map_.end(); }

  Coeffs scaled(cplx s) const;
  Coeffs operator+(const Coeffs& o) const;
  Coeffs operator-(const Coeffs& o) const;

private:
  void check_index(const Index& k) const;

  int n_ = 0;
  std::map<Index, cplx> map_;
};

int l1_length(const Index& k);

// Unweighted sums over the support; the algebra-aware norms live in twisted_seq.
double sum_abs(const Coeffs& a);
// drops the smallest entries while their total modulus stays within budget; returns the mass dropped
double prune_l1(Coeffs& a, double budget);
double sum_abs_weighted(const Coeffs& a, double s);
double max_abs_diff(const Coeffs& a, const Coeffs& b);

// One line per entry: "k1 ... kn  re  im", printed with round-trip precision.
std::string to_text(const Coeffs& a);
Coeffs coeffs_from_text(const std::string& text, int n);

} // namespace hb
