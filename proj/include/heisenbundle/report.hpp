#pragma once

#include "heisenbundle/deform.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace hb {

using Json = nlohmann::ordered_json;

Json matrix_json(const Mat& M); // row-major list
Json frame_report_json(const FrameReport& r);
Json norm_estimate_json(const NormEstimate& e);
Json enclosure_json(const Enclosure& e);

// "key: value" lines, nested keys joined with '.'
std::string report_text(const Json& doc);
std::string report_json_text(const Json& doc);

// a CSV table with a fixed header; cells are written as given
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string csv() const;
};

std::string fmt_num(double v); // %.12g, the precision used by every table

void write_file(const std::string& path, const std::string& content);

} // namespace hb
