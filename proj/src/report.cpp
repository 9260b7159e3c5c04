#include "heisenbundle/report.hpp"

#include "heisenbundle/errors.hpp"

#include <cstdio>
#include <fstream>

namespace hb {

Json matrix_json(const Mat& M) {
  Json a = Json::array();
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) a.push_back(M(i, j));
  return a;
}

Json frame_report_json(const FrameReport& r) {
  Json j;
  j["lattice"] = matrix_json(r.lattice.L);
  j["det"] = r.det;
  j["bessel"] = r.bessel;
  j["lower"] = r.lower;
  j["certified"] = r.certified;
  j["neumann_rate"] = r.neumannRate;
  j["box_radius"] = r.boxRadius;
  j["tol"] = r.tol;
  j["lower_is_estimate"] = true;
  j["windows"] = r.windows;
  j["window_count"] = r.windowCount;
  j["lambda"] = r.lambda;
  j["prev_box_radius"] = r.prevRadius;
  j["tail_bound"] = r.tailBound;
  j["converged"] = r.converged;
  j["density_advisory"] = r.densityAdvisory;
  j["edge_min"] = r.edges.edgeMin;
  j["edge_max"] = r.edges.edgeMax;
  j["edge_min_extrapolated"] = r.edges.minExtrapolated;
  j["edge_max_extrapolated"] = r.edges.maxExtrapolated;
  return j;
}

Json norm_estimate_json(const NormEstimate& e) {
  Json j;
  j["value"] = e.value;
  j["extrapolated"] = e.extrapolated;
  j["upper_bound"] = e.upperBound;
  j["box_radius"] = e.boxRadius;
  j["tol"] = e.tol;
  j["converged"] = e.converged;
  Json h = Json::array();
  for (const auto& [N, v] : e.history) h.push_back(Json::array({N, v}));
  j["history"] = h;
  return j;
}

Json enclosure_json(const Enclosure& e) { return Json{{"lower", e.lower}, {"upper", e.upper}}; }

namespace {

void flatten(const Json& v, const std::string& prefix, std::string& out) {
  if (v.is_object() && !v.empty()) {
    for (const auto& [k, x] : v.items()) flatten(x, prefix.empty() ? k : prefix + "." + k, out);
    return;
  }
  out += prefix + ": " + (v.is_string() ? v.get<std::string>() : v.dump()) + "\n";
}

} // namespace

std::string report_text(const Json& doc) {
  std::string out;
  flatten(doc, "", out);
  return out;
}

std::string report_json_text(const Json& doc) { return doc.dump(2) + "\n"; }

std::string Table::csv() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
    out += "\n";
  };
  line(header);
  for (const auto& r : rows) {
    if (r.size() != header.size()) fail(ErrorKind::ShapeMismatch, "table row width differs from the header");
    line(r);
  }
  return out;
}

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::InvalidArgument, "cannot write " + path);
  f << content;
  if (!f) fail(ErrorKind::InvalidArgument, "write failed for " + path);
}

} // namespace hb
