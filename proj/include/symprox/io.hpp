#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "symprox/measures.hpp"
#include "symprox/penalties.hpp"
#include "symprox/pr1_map.hpp"
#include "symprox/sequence_model.hpp"

namespace symprox {

using Json = nlohmann::ordered_json;

// 17 significant digits, shortest form that round-trips.
std::string format_double(double v);
// RFC 4180 field quoting.
std::string csv_field(const std::string& s);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& fields);

 private:
  std::ofstream out_;
  std::filesystem::path path_;
};

// Header row included.
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);
// TOML or JSON by extension, returned as JSON.
Json load_config(const std::filesystem::path& path);

Json to_json(const EmpiricalMeasure1D& mu);
EmpiricalMeasure1D measure_from_json(const Json& j);
void write_measure_csv(const std::filesystem::path& path, const EmpiricalMeasure1D& mu);
// .json or .csv (columns atom,weight).
EmpiricalMeasure1D read_measure(const std::filesystem::path& path);

Json to_json(const PenaltySpec& f);
PenaltySpec penalty_from_json(const Json& j);

Json to_json(const PR1Map& map);
PR1Map pr1_from_json(const Json& j);
// CSV with columns y,x and a JSON sidecar <path>.json holding the extension.
void write_pr1_csv(const std::filesystem::path& path, const PR1Map& map);
PR1Map read_pr1_csv(const std::filesystem::path& path);

// {"values": [...]}, {"prior": {...}, "p": n} or {"gaussian_quantiles": n}.
Json to_json(const ThetaSpec& t);
ThetaSpec theta_from_json(const Json& j);

JointSample2D read_coupling_csv(const std::filesystem::path& path);

}  // namespace symprox
