#pragma once

#include "heisenbundle/lattice_phase.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hb {

// p(t) exp(-pi t^2) with p(t) = sum_j coef[j] t^j
struct PolyGaussian {
  std::vector<cplx> coef;
  cplx eval(cplx t) const;
};

class Window {
public:
  enum class Kind { Gaussian, Hermite, Sampled };

  static Window gaussian(int d = 1);
  static Window hermite(int order);
  // samples at start + i * step; linear interpolation in between, zero outside
  static Window sampled(double start, double step, std::vector<cplx> values,
                        std::optional<double> decayRadius = std::nullopt);

  Kind kind() const { return kind_; }
  int dim() const { return d_; }
  int order() const { return order_; }
  bool analytic() const { return kind_ != Kind::Sampled; }
  const std::vector<PolyGaussian>& factors() const { return factors_; }

  double start() const { return start_; }
  double step() const { return step_; }
  const std::vector<cplx>& values() const { return values_; }
  std::optional<double> decay_radius() const { return decayRadius_; }
  // interval outside of which the window vanishes (sampled windows only)
  std::pair<double, double> support() const;

  cplx eval(const Vec& t) const;
  cplx eval(double t) const;
  double l2_norm() const;

  // "gaussian:d", "hermite:k" or "sampled:count:start:step"
  std::string descriptor() const;
  bool operator==(const Window& o) const;

private:
  Kind kind_ = Kind::Gaussian;
  int d_ = 1;
  int order_ = 0;
  std::vector<PolyGaussian> factors_;
  double start_ = 0, step_ = 0;
  std::vector<cplx> values_;
  std::optional<double> decayRadius_;
};

// Text file: header "d start step count [decay_radius]", then one "re im" per line.
Window load_sampled_window(const std::string& path);
void save_sampled_window(const Window& w, const std::string& path);
Window parse_sampled_window(const std::string& text);
std::string sampled_window_text(const Window& w);

struct QuadratureSpec {
  double T = 6.0;
  double h = 1.0 / 256.0;
  double target = 1e-10;
};
void validate(const QuadratureSpec& q);

struct QuadratureResult {
  cplx value;
  double errorEstimate = 0;
};

// V_g f(z) = <f, pi(z) g>; closed form for analytic pairs, quadrature otherwise
cplx stft(const Window& f, const Window& g, const Vec& z);
// trapezoid rule on [x/2 - T, x/2 + T] with a step-halving error estimate (d = 1)
QuadratureResult stft_quadrature(const Window& f, const Window& g, const Vec& z, const QuadratureSpec& q = {});

// <pi(z1) f, pi(z2) g> = conj(c(z1, z1) c(-z1, z2)) V_g f(z2 - z1)
cplx pair_inner(const Vec& z1, const Window& f, const Vec& z2, const Window& g);
cplx pair_inner(const Vec& z1, const Vec& z2, const Window& g);

// F with |V_g f(z)| <= F(b) exp(-pi a^2 / 2) whenever a <= |z| <= b; F is nondecreasing
class StftEnvelope {
public:
  StftEnvelope(const Window& f, const Window& g);
  double growth(double b) const;
  double bound(double a, double b) const;

private:
  std::vector<std::vector<double>> pf_, pg_; // absolute coefficients per coordinate
};

struct SampledFunction {
  double start = 0, step = 0;
  std::vector<cplx> values;
};

SampledFunction sample(const Window& w, double start, double step, std::size_t count);
QuadratureResult quadrature_inner(const SampledFunction& f, const SampledFunction& g);

struct M1Estimate {
  double value = 0;
  double errorEstimate = 0;
  double tailBound = 0;
};

// int |V_phi f(z)| (1 + |z|_1)^s dz over [-T, T]^2 with grid step h (d = 1)
M1Estimate m1_norm_estimate(const Window& f, int s, double T = 6.0, double h = 1.0 / 32.0);

} // namespace hb
