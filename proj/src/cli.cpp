#include "heisenbundle/cli.hpp"

#include "heisenbundle/errors.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace hb {

namespace {

struct Key {
  const char* name;
  const char* def;
  const char* help;
};

const Key kKeys[] = {
    {"d", "1", "half dimension of phase space"},
    {"lattice", "", "lattice generator, row-major comma list"},
    {"window", "gaussian", "gaussian | hermite:k | file:path"},
    {"tol", "0.001", "norm and frame-bound tolerance"},
    {"box-max", "64", "largest box radius"},
    {"seed", "1", "random seed"},
    {"out", "heisenbundle-out", "output directory"},
    {"direction", "", "path direction D in L(t) = L + t D, row-major"},
    {"t", "", "path parameters, comma list"},
    {"coeffs", "", "algebra element: coefficient file or 'random'"},
    {"support", "1", "support radius of random elements"},
    {"theta", "", "skew matrix, row-major"},
    {"theta2", "", "second skew matrix, row-major"},
    {"spectrum-path", "theta", "theta | lattice"},
    {"spectrum-box", "10", "compression radius for spectra"},
    {"step", "0.05", "stability radius step"},
    {"max-radius", "0.05", "largest stability radius tried"},
    {"diagnostic-tol", "0.01", "tolerance of the ||S - Id|| curve"},
    {"windows", "1", "window count for project (1 or 2)"},
    {"candidates", "100", "second-window candidates for project"},
    {"inv-tol", "1e-10", "inversion tolerance for duals and projections"},
};

const std::pair<const char*, Command> kCommands[] = {
    {"framecheck", Command::FrameCheck}, {"dualwindow", Command::DualWindow}, {"wexlerraz", Command::WexlerRaz},
    {"normcurve", Command::NormCurve},   {"holder", Command::Holder},         {"deformbound", Command::DeformBound},
    {"stability", Command::Stability},   {"balianlow", Command::BalianLow},   {"project", Command::Project},
    {"spectrum", Command::Spectrum},     {"verify", Command::Verify},
};

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

bool is_key(const std::string& k) {
  return std::any_of(std::begin(kKeys), std::end(kKeys), [&](const Key& x) { return k == x.name; });
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int no = 0;
  while (std::getline(f, line)) {
    ++no;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(no) + ": expected key = value");
    std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
    if (!is_key(k)) throw UsageError(path + ":" + std::to_string(no) + ": unknown key '" + k + "'");
    if (kv.count(k)) throw UsageError(path + ":" + std::to_string(no) + ": duplicate key '" + k + "'");
    kv[k] = v;
  }
  return kv;
}

double to_double(const std::string& key, const std::string& s) {
  double v = 0;
  std::string t = trim(s);
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || p != t.data() + t.size() || !std::isfinite(v))
    throw UsageError("--" + key + ": '" + s + "' is not a number");
  return v;
}

long long to_int(const std::string& key, const std::string& s, long long lo, long long hi) {
  long long v = 0;
  std::string t = trim(s);
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || p != t.data() + t.size()) throw UsageError("--" + key + ": '" + s + "' is not an integer");
  if (v < lo || v > hi) throw UsageError("--" + key + ": " + s + " is out of range");
  return v;
}

std::vector<double> to_list(const std::string& key, const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
  if (out.empty()) throw UsageError("--" + key + ": empty list");
  return out;
}

Mat to_matrix(const std::string& key, const std::string& s, int dim) {
  std::vector<double> v = to_list(key, s);
  if (static_cast<int>(v.size()) != dim * dim)
    throw UsageError("--" + key + ": expected " + std::to_string(dim * dim) + " entries, got " + std::to_string(v.size()));
  return row_major_matrix(dim, v);
}

Mat unit_direction(int dim) {
  Mat D = Mat::Zero(dim, dim);
  D(0, 0) = 1;
  return D;
}

const char* default_ts(Command c) {
  switch (c) {
  case Command::NormCurve: return "0,0.25,0.5,0.75,1";
  case Command::Holder: return "-0.08,-0.06,-0.04,-0.02,0,0.02,0.04,0.06,0.08";
  case Command::BalianLow: return "0.5,0.6,0.7,0.8,0.9,0.95,0.99,1";
  case Command::Spectrum: return "0,0.01,0.02,0.03,0.04";
  default: return "";
  }
}

void check_window_spec(const std::string& w, int d) {
  if (w == "gaussian") return;
  if (w.rfind("hermite:", 0) == 0) {
    if (d != 1) throw UsageError("--window hermite:k needs --d 1");
    to_int("window", w.substr(8), 0, 60);
    return;
  }
  if (w.rfind("file:", 0) == 0 && w.size() > 5) {
    if (d != 1) throw UsageError("--window file:path needs --d 1");
    return;
  }
  throw UsageError("--window: expected gaussian, hermite:k or file:path, got '" + w + "'");
}

Window make_window(const RunConfig& c) {
  if (c.window == "gaussian") return Window::gaussian(c.d);
  if (c.window.rfind("hermite:", 0) == 0) return Window::hermite(static_cast<int>(to_int("window", c.window.substr(8), 0, 60)));
  return load_sampled_window(c.window.substr(5));
}

// ---------------------------------------------------------------- helpers for execute

std::string index_text(const Index& k) {
  std::string s;
  for (std::size_t i = 0; i < k.size(); ++i) s += (i ? ";" : "") + std::to_string(k[i]);
  return s;
}

std::string matrix_text(const Mat& M) {
  std::string s;
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) s += (s.empty() ? "" : ";") + fmt_num(M(i, j));
  return s;
}

Coeffs random_element(std::mt19937_64& rng, int n, int radius) {
  std::uniform_real_distribution<double> u(-1, 1);
  Coeffs a(n);
  Index k(n, -radius);
  while (true) {
    a.set(k, cplx(u(rng), u(rng)));
    int i = 0;
    while (i < n && k[i] == radius) k[i++] = -radius;
    if (i == n) break;
    ++k[i];
  }
  return a;
}

Coeffs load_coeffs(const RunConfig& c, int n) {
  if (c.coeffsFile.empty() || c.coeffsFile == "random") {
    std::mt19937_64 rng(c.seed);
    return random_element(rng, n, c.support);
  }
  std::ifstream f(c.coeffsFile);
  if (!f) fail(ErrorKind::InvalidArgument, "cannot read coefficient file " + c.coeffsFile);
  std::stringstream ss;
  ss << f.rdbuf();
  return coeffs_from_text(ss.str(), n);
}

Coeffs harper_element(int n) {
  Coeffs a(n);
  for (int j = 0; j < n; ++j) {
    Index k(n, 0);
    k[j] = 1;
    a.set(k, 1.0);
    k[j] = -1;
    a.set(k, 1.0);
  }
  return a;
}

FrameOptions frame_options(const RunConfig& c) {
  FrameOptions o;
  o.tol = c.tol;
  o.norm.tol = c.tol;
  o.norm.boxMax = c.boxMax;
  o.norm.seed = c.seed;
  return o;
}

NormOptions norm_options(const RunConfig& c) {
  NormOptions o;
  o.tol = c.tol;
  o.boxMax = c.boxMax;
  o.seed = c.seed;
  return o;
}

Table sampled_table(const ModuleVector& f) {
  Table t{{"x", "re", "im"}, {}};
  for (int i = -128; i <= 128; ++i) {
    double x = i / 16.0;
    cplx v = f.eval(x);
    t.rows.push_back({fmt_num(x), fmt_num(v.real()), fmt_num(v.imag())});
  }
  return t;
}

// [k_1, ..., k_n, re, im] per stored entry
Json coeffs_json(const Coeffs& a) {
  Json arr = Json::array();
  for (const auto& [k, v] : a) {
    Json e = Json::array();
    for (int x : k) e.push_back(x);
    e.push_back(v.real());
    e.push_back(v.imag());
    arr.push_back(e);
  }
  return arr;
}

Table coeffs_table(const Coeffs& a) {
  Table t{{"k", "re", "im"}, {}};
  for (const auto& [k, v] : a) t.rows.push_back({index_text(k), fmt_num(v.real()), fmt_num(v.imag())});
  return t;
}

// ---------------------------------------------------------------- verify

struct Check {
  std::string name;
  double value;
  double bound;
  bool pass;
};

Mat random_generator(std::mt19937_64& rng, double range) {
  std::uniform_real_distribution<double> u(-range, range);
  while (true) {
    Mat L(2, 2);
    L << u(rng), u(rng), u(rng), u(rng);
    if (std::abs(L.determinant()) > 0.2) return L;
  }
}

Vec random_vec(std::mt19937_64& rng, double r) {
  std::uniform_real_distribution<double> u(-r, r);
  Vec z(2);
  z << u(rng), u(rng);
  return z;
}

ModuleVector random_module_vector(std::mt19937_64& rng, const Window& base, int terms) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<TfTerm> t;
  for (int i = 0; i < terms; ++i) t.push_back({random_vec(rng, 1.0), cplx(u(rng), u(rng))});
  return ModuleVector(base, t);
}

std::vector<Check> verify_suite(const RunConfig& c) {
  std::vector<Check> out;
  auto add = [&](std::string name, double value, double bound) { out.push_back({name, value, bound, value <= bound}); };
  std::mt19937_64 rng(c.seed);
  std::uniform_int_distribution<int> ki(-5, 5);

  double m = 0;
  for (int i = 0; i < 200; ++i) {
    Vec z1 = random_vec(rng, 5), z2 = random_vec(rng, 5), z3 = random_vec(rng, 5);
    m = std::max(m, std::abs(heisenberg_c(z1, z2) * heisenberg_c(z1 + z2, z3) -
                             heisenberg_c(z1, z2 + z3) * heisenberg_c(z2, z3)));
  }
  add("cocycle", m, 1e-13);

  m = 0;
  for (int i = 0; i < 200; ++i) {
    LatticeGen g = make_lattice(random_generator(rng, 3));
    Index k{ki(rng), ki(rng)}, l{ki(rng), ki(rng)}, kl{k[0] + l[0], k[1] + l[1]};
    cplx rhs = cocycle_eval(theta_low_cocycle(g.Theta), k, l) * cochain_rho(g, kl) / (cochain_rho(g, k) * cochain_rho(g, l));
    m = std::max(m, std::abs(cocycle_eval(lattice_cocycle(g), k, l) - rhs));
  }
  add("cohomology", m, 1e-12);

  m = 0;
  double iso = 0;
  for (int i = 0; i < 5; ++i) {
    LatticeGen g = make_lattice(random_generator(rng, 2));
    for (int a = -4; a <= 4; ++a)
      for (int b = -4; b <= 4; ++b) m = std::max(m, std::abs(collected_P(g, {a, b}) - collected_P_product(g, {a, b})));
    Coeffs x = random_element(rng, 2, 2);
    iso = std::max(iso, std::abs(sum_abs_weighted(twist_coeffs(x, g), 1) - sum_abs_weighted(x, 1)) / sum_abs_weighted(x, 1));
  }
  add("collected_cocycle", m, 1e-12);
  add("twist_isometry", iso, 1e-14);

  double assoc = 0, invol = 0, hom = 0;
  for (int i = 0; i < 5; ++i) {
    LatticeGen g = make_lattice(random_generator(rng, 2));
    TwistedAlgebra A = algebra_A(g), T = algebra_theta(g.Theta);
    AlgElem a{A, random_element(rng, 2, 1)}, b{A, random_element(rng, 2, 1)}, e{A, random_element(rng, 2, 1)};
    assoc = std::max(assoc, max_abs_diff(tconv(tconv(a, b), e).c, tconv(a, tconv(b, e)).c));
    invol = std::max(invol, max_abs_diff(tstar(tconv(a, b)).c, tconv(tstar(b), tstar(a)).c));
    AlgElem at{T, twist_coeffs(a.c, g)}, bt{T, twist_coeffs(b.c, g)};
    hom = std::max(hom, max_abs_diff(twist_coeffs(tconv(a, b).c, g), tconv(at, bt).c));
  }
  add("associativity", assoc, 1e-12);
  add("involution", invol, 1e-12);
  add("twist_homomorphism", hom, 1e-12);

  NormOptions nopt = norm_options(c);
  nopt.throwOnFailure = false;
  double cstar = 0;
  for (int i = 0; i < 2; ++i) {
    LatticeGen g = make_lattice(random_generator(rng, 1.5));
    AlgElem a{algebra_A(g), random_element(rng, 2, 1)};
    double na = opnorm(a, nopt).value, naa = opnorm(tconv(tstar(a), a), nopt).value;
    cstar = std::max(cstar, std::abs(naa - na * na) / (na * na));
  }
  add("c_star_identity", cstar, 0.02);

  Mat D(2, 2);
  D << 0.5, 0, 0, 1;
  LatticeGen L = make_lattice(D);
  ModuleVector phi = ModuleVector::of(Window::gaussian(1));
  FrameOptions fopt = frame_options(c);
  FrameReport fr = frame_bounds(phi, L, fopt);
  add("frame_neumann_rate", fr.certified ? fr.neumannRate : 1.0, 1.0 - 1e-9);
  ModuleVector h = dual_window(phi, L, fopt, c.invTol);
  add("wexler_raz", wexler_raz_residual(phi, h, L), 1e-6);

  ModuleVector f = random_module_vector(rng, phi.base(), 3);
  SampledFunction grid{-10, 1.0 / 32, {}};
  for (int i = 0; i <= 640; ++i) grid.values.push_back(f.eval(grid.start + i * grid.step));
  SampledFunction direct = frame_op_apply(phi, phi, L, grid, 14);
  SampledFunction jan = janssen_apply(janssen_coeffs(phi, phi, L), f, L, -10, 1.0 / 32, 641);
  add("janssen_direct", relative_l2_error(jan, direct), 1e-6);
  add("reconstruction", relative_l2_error(frame_op_apply(phi, h, L, grid, 14), grid), 1e-5);

  double figa = 0;
  for (int i = 0; i < 2; ++i) {
    ModuleVector x = random_module_vector(rng, phi.base(), 2), y = random_module_vector(rng, phi.base(), 2),
                 z = random_module_vector(rng, phi.base(), 2);
    figa = std::max(figa, figa_residual(x, y, z, L));
  }
  add("figa", figa, 1e-7);

  double deform = 0;
  std::uniform_real_distribution<double> th(-1, 1);
  for (int i = 0; i < 3; ++i) {
    Coeffs a = random_element(rng, 2, 1);
    double t1 = th(rng), t2 = t1 + 0.05 * th(rng);
    Mat T1 = Mat::Zero(2, 2), T2 = Mat::Zero(2, 2);
    T1(1, 0) = t1, T1(0, 1) = -t1, T2(1, 0) = t2, T2(0, 1) = -t2;
    DeformationCheck dc = deformation_bound_check(a, T1, T2, norm_options(c));
    deform = std::max(deform, dc.lhsUpper / (dc.rhs + 2 * c.tol));
  }
  add("deformation_ratio", deform, 1.0);

  Mat A0(2, 2), D0(2, 2);
  A0 << 0, 0, 0, 1;
  D0 << 1, 0, 0, 0;
  SweepReport sw = balian_low_sweep(MultiWindowSet({phi}), PathSpec::affine(A0, D0, {0.9, 1.0}), fopt);
  add("balian_low_critical", (sw.rows[0].certified && !sw.rows[1].certified) ? 0.0 : 1.0, 0.0);

  StabilityReport st = stability_radius(phi, L, 0.02, 0.02, fopt, c.diagnosticTol);
  double sid = 0, dense = 0;
  for (const auto& p : st.points) {
    sid = std::max(sid, p.sMinusIdUpper);
    if (p.certified && p.det >= 1) dense = 1;
  }
  add("stability_radius_positive", st.radius > 0 ? 0.0 : 1.0, 0.0);
  add("stability_s_minus_id", sid, 1.0 - 1e-9);
  add("stability_density", dense, 0.0);

  ProjectionResult pr = projection_build(MultiWindowSet({phi}), L, fopt, c.invTol);
  add("projection", std::max({pr.idempotence, pr.selfAdjointness, pr.partition}), 1e-6);
  return out;
}

Json config_echo(const RunConfig& c) {
  Json j = Json::object();
  for (const auto& [k, v] : c.echo) j[k] = v;
  return j;
}

} // namespace

const char* command_name(Command c) {
  for (const auto& [n, k] : kCommands)
    if (k == c) return n;
  return "?";
}

int exit_code(ErrorKind k) {
  switch (k) {
  case ErrorKind::NoConvergence:
  case ErrorKind::BoxTooSmall:
  case ErrorKind::DecayNotCertified:
  case ErrorKind::QuadratureUnderResolved: return 3;
  case ErrorKind::NotAFrame: return 4;
  default: return 2;
  }
}

RunConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app{"heisenbundle"};
  std::string cmd, configPath;
  std::map<std::string, std::string> flags;
  app.add_option("command", cmd, "subcommand")->required();
  for (const auto& k : kKeys) app.add_option(std::string("--") + k.name, flags[k.name], k.help);
  app.add_option("--config", configPath, "flat key = value file");
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  RunConfig c;
  auto it = std::find_if(std::begin(kCommands), std::end(kCommands), [&](const auto& p) { return cmd == p.first; });
  if (it == std::end(kCommands)) throw UsageError("unknown command '" + cmd + "'");
  c.command = it->second;

  std::map<std::string, std::string> file;
  if (!configPath.empty()) file = read_config_file(configPath);
  auto value = [&](const Key& k) -> std::string {
    if (app.count(std::string("--") + k.name)) return flags[k.name];
    if (auto f = file.find(k.name); f != file.end()) return f->second;
    if (std::string(k.name) == "t") return default_ts(c.command);
    return k.def;
  };
  std::map<std::string, std::string> v;
  for (const auto& k : kKeys) {
    v[k.name] = trim(value(k));
    if (std::string(k.name) != "out") c.echo.emplace_back(k.name, v[k.name]);
  }

  c.d = static_cast<int>(to_int("d", v["d"], 1, 3));
  const int n = 2 * c.d;
  if (!v["lattice"].empty()) c.lattice = to_matrix("lattice", v["lattice"], n);
  c.window = v["window"];
  check_window_spec(c.window, c.d);
  c.tol = to_double("tol", v["tol"]);
  c.boxMax = static_cast<int>(to_int("box-max", v["box-max"], 2, 4096));
  c.seed = static_cast<std::uint64_t>(to_int("seed", v["seed"], 0, std::numeric_limits<long long>::max()));
  c.out = v["out"];
  if (!v["direction"].empty()) c.direction = to_matrix("direction", v["direction"], n);
  if (!v["t"].empty()) c.ts = to_list("t", v["t"]);
  c.coeffsFile = v["coeffs"];
  c.support = static_cast<int>(to_int("support", v["support"], 0, 8));
  if (!v["theta"].empty()) c.theta = to_matrix("theta", v["theta"], n);
  if (!v["theta2"].empty()) c.theta2 = to_matrix("theta2", v["theta2"], n);
  c.spectrumPath = v["spectrum-path"];
  if (c.spectrumPath != "theta" && c.spectrumPath != "lattice") throw UsageError("--spectrum-path: theta or lattice");
  c.spectrumBox = static_cast<int>(to_int("spectrum-box", v["spectrum-box"], 1, 40));
  c.step = to_double("step", v["step"]);
  c.maxRadius = to_double("max-radius", v["max-radius"]);
  c.diagnosticTol = to_double("diagnostic-tol", v["diagnostic-tol"]);
  c.windows = static_cast<int>(to_int("windows", v["windows"], 1, 2));
  c.candidates = static_cast<int>(to_int("candidates", v["candidates"], 1, 100000));
  c.invTol = to_double("inv-tol", v["inv-tol"]);
  for (double x : {c.tol, c.step, c.diagnosticTol, c.invTol})
    if (!(x > 0)) throw UsageError("tolerances and steps must be positive");
  if (c.maxRadius < 0) throw UsageError("--max-radius must be nonnegative");

  auto need = [&](bool ok, const char* what) {
    if (!ok) throw UsageError(std::string(command_name(c.command)) + " needs " + what);
  };
  switch (c.command) {
  case Command::FrameCheck:
  case Command::DualWindow:
  case Command::WexlerRaz:
  case Command::Stability:
  case Command::Project: need(c.lattice.size() > 0, "--lattice"); break;
  case Command::NormCurve:
  case Command::BalianLow:
    need(c.lattice.size() > 0, "--lattice");
    need(c.direction.size() > 0, "--direction");
    break;
  case Command::Holder:
    need(c.lattice.size() > 0, "--lattice");
    if (c.direction.size() == 0) c.direction = unit_direction(n);
    need(std::count(c.ts.begin(), c.ts.end(), 0.0) == 1, "exactly one t = 0 as the anchor");
    break;
  case Command::DeformBound:
    need(c.theta.size() > 0 && c.theta2.size() > 0, "--theta and --theta2");
    break;
  case Command::Spectrum:
    need(c.direction.size() > 0, "--direction");
    if (c.spectrumPath == "theta") need(c.theta.size() > 0, "--theta for a theta path");
    else need(c.lattice.size() > 0, "--lattice for a lattice path");
    break;
  case Command::Verify: break;
  }
  for (auto& e : c.echo)
    if (e.first == "direction" && e.second.empty() && c.direction.size() > 0) e.second = matrix_text(c.direction);
  return c;
}

RunOutput execute(const RunConfig& c) {
  RunOutput out;
  const std::string name = command_name(c.command);
  Json& doc = out.report;
  doc["command"] = name;
  doc["config"] = config_echo(c);
  doc["seed"] = c.seed;
  doc["tol"] = c.tol;
  doc["box_max"] = c.boxMax;
  Json res = Json::object();
  auto table = [&](const std::string& suffix, const std::string& csv) { out.files[name + suffix + ".csv"] = csv; };

  const FrameOptions fopt = frame_options(c);
  const NormOptions nopt = norm_options(c);

  switch (c.command) {
  case Command::FrameCheck: {
    ModuleVector g = ModuleVector::of(make_window(c));
    res["frame"] = frame_report_json(frame_bounds(g, make_lattice(c.lattice), fopt));
    break;
  }
  case Command::DualWindow:
  case Command::WexlerRaz: {
    LatticeGen L = make_lattice(c.lattice);
    ModuleVector g = ModuleVector::of(make_window(c));
    FrameReport fr = frame_bounds(g, L, fopt);
    res["frame"] = frame_report_json(fr);
    if (!fr.certified) fail(ErrorKind::NotAFrame, "frame bounds are not certified for this window and lattice");
    ModuleVector h = dual_window(g, L, fopt, c.invTol);
    res["inv_tol"] = c.invTol;
    res["wexler_raz_residual"] = wexler_raz_residual(g, h, L);
    res["dual_terms"] = h.terms().size();
    res["dual_l2_norm"] = l2_norm(h);
    if (c.command == Command::DualWindow) {
      out.files["dual_window.txt"] = to_text(h);
      table("", sampled_table(h).csv());
    } else {
      res["self_residual"] = wexler_raz_residual(g, g, L);
      AlgElem b = janssen_coeffs(g, h, L);
      b.c.add(Index(L.n(), 0), -L.abs_det());
      table("", coeffs_table(b.c).csv());
    }
    break;
  }
  case Command::NormCurve: {
    PathSpec p = PathSpec::affine(c.lattice, c.direction, c.ts);
    validate(p);
    std::vector<CurveRow> rows;
    if (c.coeffsFile.empty()) {
      res["element"] = "module norm of the window";
      rows = norm_curve(ModuleVector::of(make_window(c)), p, nopt);
    } else {
      Coeffs a = load_coeffs(c, 2 * c.d);
      res["element"] = coeffs_json(a);
      rows = norm_curve(a, p, nopt);
      Table mt{{"index", "lhs", "holder_term", "twist_term", "lipschitz_term", "holds"}, {}};
      bool all = true;
      for (const auto& s : modulus_check(a, rows, c.tol)) {
        mt.rows.push_back({std::to_string(s.index), fmt_num(s.lhs), fmt_num(s.holderTerm), fmt_num(s.twistTerm),
                           fmt_num(s.lipschitzTerm), s.holds ? "1" : "0"});
        all = all && s.holds;
      }
      res["modulus_bound_holds"] = all;
      table("_modulus", mt.csv());
    }
    table("", curve_csv(rows));
    break;
  }
  case Command::Holder: {
    PathSpec p = PathSpec::affine(c.lattice, c.direction, c.ts);
    validate(p);
    auto rows = norm_curve(ModuleVector::of(make_window(c)), p, nopt);
    std::size_t anchor = std::find(c.ts.begin(), c.ts.end(), 0.0) - c.ts.begin();
    HolderFit h = holder_fit(rows, anchor, c.tol);
    res["exponent"] = h.exponent;
    res["constant"] = h.constant;
    res["fit_residual"] = h.residual;
    res["bound_check"] = h.boundCheck;
    res["points"] = h.points;
    table("", curve_csv(rows));
    break;
  }
  case Command::DeformBound: {
    Coeffs a = load_coeffs(c, 2 * c.d);
    DeformationCheck dc = deformation_bound_check(a, c.theta, c.theta2, nopt);
    res["element"] = coeffs_json(a);
    res["norm_theta"] = enclosure_json(dc.first);
    res["norm_theta2"] = enclosure_json(dc.second);
    res["lhs_lower"] = dc.lhsLower;
    res["lhs_upper"] = dc.lhsUpper;
    res["rhs"] = dc.rhs;
    res["holds"] = dc.holds;
    break;
  }
  case Command::Stability: {
    ModuleVector g = ModuleVector::of(make_window(c));
    StabilityReport s = stability_radius(g, make_lattice(c.lattice), c.step, c.maxRadius, fopt, c.diagnosticTol);
    res["radius"] = s.radius;
    res["seed"] = s.seed;
    res["diagnostic_tol"] = s.diagnosticTol;
    res["base"] = frame_report_json(s.base);
    Json dirs = Json::array();
    for (const auto& D : s.directions) dirs.push_back(matrix_json(D));
    res["directions"] = dirs;
    Table t{{"r", "direction", "L", "det", "certified", "lower", "bessel", "s_minus_id", "s_minus_id_upper"}, {}};
    bool detOk = true, neumannOk = true;
    for (const auto& pt : s.points) {
      t.rows.push_back({fmt_num(pt.r), std::to_string(pt.direction), matrix_text(pt.L), fmt_num(pt.det),
                        pt.certified ? "1" : "0", fmt_num(pt.lower), fmt_num(pt.bessel), fmt_num(pt.sMinusId),
                        fmt_num(pt.sMinusIdUpper)});
      if (pt.certified && pt.det >= 1) detOk = false;
      if (pt.r <= s.radius && !(pt.sMinusIdUpper < 1)) neumannOk = false;
    }
    res["no_certified_point_at_density_one"] = detOk;
    res["s_minus_id_below_one"] = neumannOk;
    table("", t.csv());
    break;
  }
  case Command::BalianLow: {
    PathSpec p = PathSpec::affine(c.lattice, c.direction, c.ts);
    ModuleVector g = ModuleVector::of(make_window(c));
    SweepReport s = balian_low_sweep(MultiWindowSet({g}), p, fopt);
    res["any_certified"] = s.anyCertified;
    res["last_certified_t"] = s.lastCertified;
    res["final_sample_uncertified"] = s.failedBeforeEnd;
    res["ends_at_critical_density"] = s.endsAtCritical;
    Table t{{"t", "det", "lower_estimate", "bessel", "certified", "converged"}, {}};
    for (const auto& r : s.rows)
      t.rows.push_back({fmt_num(r.t), fmt_num(r.det), fmt_num(r.lowerEstimate), fmt_num(r.bessel),
                        r.certified ? "1" : "0", r.converged ? "1" : "0"});
    table("", t.csv());
    break;
  }
  case Command::Project: {
    LatticeGen L = make_lattice(c.lattice);
    ModuleVector g = ModuleVector::of(make_window(c));
    std::vector<ModuleVector> ws{g};
    if (c.windows == 2) {
      MultiWindowSearch s = multiwindow_search(g, L, fopt, c.candidates);
      res["candidates_tried"] = s.candidatesTried;
      if (!s.found) fail(ErrorKind::NotAFrame, "no certified second window among the candidates");
      res["second_window_shift"] = Json::array({s.shift(0), s.shift(1)});
      ws.push_back(ModuleVector::shifted(g.base(), s.shift));
    }
    ProjectionResult pr = projection_build(MultiWindowSet(ws), L, fopt, c.invTol);
    res["frame"] = frame_report_json(pr.report);
    res["inv_tol"] = c.invTol;
    res["idempotence"] = pr.idempotence;
    res["self_adjointness"] = pr.selfAdjointness;
    res["partition"] = pr.partition;
    break;
  }
  case Command::Spectrum: {
    const int n = 2 * c.d;
    Coeffs a = c.coeffsFile.empty() ? harper_element(n) : load_coeffs(c, n);
    bool theta = c.spectrumPath == "theta";
    PathSpec p = PathSpec::affine(theta ? c.theta : c.lattice, c.direction, c.ts);
    SpectrumCurve sc = spectrum_curve(a, p, theta ? SpectrumPath::Theta : SpectrumPath::Lattice, c.spectrumBox);
    res["element"] = coeffs_json(a);
    res["box"] = sc.box;
    Table ev{{"t", "index", "eigenvalue"}, {}};
    for (const auto& s : sc.samples)
      for (std::size_t i = 0; i < s.eigenvalues.size(); ++i)
        ev.rows.push_back({fmt_num(s.t), std::to_string(i), fmt_num(s.eigenvalues[i])});
    Table st{{"step", "hausdorff", "bound", "holds"}, {}};
    bool all = true;
    for (std::size_t i = 0; i < sc.steps.size(); ++i) {
      st.rows.push_back({std::to_string(i), fmt_num(sc.steps[i].hausdorff), fmt_num(sc.steps[i].bound),
                         sc.steps[i].holds ? "1" : "0"});
      all = all && sc.steps[i].holds;
    }
    res["all_steps_hold"] = all;
    table("", ev.csv());
    table("_steps", st.csv());
    break;
  }
  case Command::Verify: {
    Table t{{"check", "value", "bound", "pass"}, {}};
    bool all = true;
    for (const auto& ch : verify_suite(c)) {
      t.rows.push_back({ch.name, fmt_num(ch.value), fmt_num(ch.bound), ch.pass ? "1" : "0"});
      res[ch.name] = Json{{"value", ch.value}, {"bound", ch.bound}, {"pass", ch.pass}};
      all = all && ch.pass;
    }
    res["all_pass"] = all;
    out.exitCode = all ? 0 : 1;
    table("", t.csv());
    break;
  }
  }
  doc["result"] = res;
  out.files[name + ".json"] = report_json_text(doc);
  out.files[name + ".txt"] = report_text(doc);
  return out;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  RunOutput r;
  try {
    r = execute(cfg);
  } catch (const Error& e) {
    err << "heisenbundle: " << e.what() << "\n";
    return exit_code(e.kind());
  }
  std::error_code ec;
  std::filesystem::create_directories(cfg.out, ec);
  if (ec) {
    err << "heisenbundle: cannot create " << cfg.out << ": " << ec.message() << "\n";
    return 2;
  }
  try {
    for (const auto& [file, content] : r.files) write_file((std::filesystem::path(cfg.out) / file).string(), content);
  } catch (const Error& e) {
    err << "heisenbundle: " << e.what() << "\n";
    return 2;
  }
  out << report_text(r.report);
  return r.exitCode;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty() || std::count(args.begin(), args.end(), "--help") || std::count(args.begin(), args.end(), "-h")) {
    std::cout << "usage: heisenbundle <command> [--key value ...] [--config file]\ncommands:";
    for (const auto& [n, k] : kCommands) std::cout << " " << n;
    std::cout << "\nkeys:\n";
    for (const auto& k : kKeys)
      std::cout << "  --" << k.name << (*k.def ? std::string(" (") + k.def + ")" : "") << "  " << k.help << "\n";
    return args.empty() ? 2 : 0;
  }
  RunConfig cfg;
  try {
    cfg = parse_config(args);
  } catch (const UsageError& e) {
    std::cerr << "heisenbundle: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "heisenbundle: " << e.what() << "\n";
    return 2;
  }
  return run(cfg, std::cout, std::cerr);
}

} // namespace hb
