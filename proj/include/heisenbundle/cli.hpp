#pragma once

#include "heisenbundle/errors.hpp"
#include "heisenbundle/report.hpp"

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace hb {

enum class Command {
  FrameCheck,
  DualWindow,
  WexlerRaz,
  NormCurve,
  Holder,
  DeformBound,
  Stability,
  BalianLow,
  Project,
  Spectrum,
  Verify,
};

const char* command_name(Command c);

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  Command command = Command::FrameCheck;
  int d = 1;
  Mat lattice;   // empty unless given
  std::string window = "gaussian";
  double tol = 1e-3;
  int boxMax = 64;
  std::uint64_t seed = 1;
  std::string out = "heisenbundle-out";

  // paths L(t) = lattice + t direction (Theta paths for spectrum use theta instead of lattice)
  Mat direction;
  std::vector<double> ts;
  std::string coeffsFile;
  int support = 1;
  Mat theta, theta2;
  std::string spectrumPath = "theta";
  int spectrumBox = 10;
  double step = 0.05, maxRadius = 0.05, diagnosticTol = 1e-2;
  int windows = 1;
  int candidates = 100;
  double invTol = 1e-10;

  // resolved string value of every key, defaults included; out and config are left out so
  // that runs writing to different directories can be compared byte for byte
  std::vector<std::pair<std::string, std::string>> echo;
};

// args exclude the program name. A "--config FILE" of flat key = value lines is read first and
// the flags override it.
RunConfig parse_config(const std::vector<std::string>& args);

// builds the report without touching the file system; tables maps file name to CSV content
struct RunOutput {
  int exitCode = 0;
  Json report;
  std::map<std::string, std::string> files;
};

RunOutput execute(const RunConfig& cfg);

// execute, then write <out>/<command>.json, <command>.txt and the tables
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

int exit_code(ErrorKind k);
int cli_main(int argc, char** argv);

} // namespace hb
