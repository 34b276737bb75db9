#include "symprox/io.hpp"

#include <fmt/format.h>

#include <sstream>

#include "symprox/errors.hpp"
#include "toml.hpp"

namespace symprox {

namespace fs = std::filesystem;

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

CsvWriter::CsvWriter(const fs::path& path, const std::vector<std::string>& header) : out_(path), path_(path) {
  require(out_.good(), Errc::Io, "cannot open " + path.string() + " for writing");
  row(header);
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> f;
  f.reserve(values.size());
  for (double v : values) f.push_back(format_double(v));
  row(f);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) out_ << (i ? "," : "") << csv_field(fields[i]);
  out_ << "\r\n";
  require(out_.good(), Errc::Io, "write failed on " + path_.string());
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::Io, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(field);
      field.clear();
      any = true;
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(field);
        rows.push_back(row);
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  require(!quoted, Errc::InvalidArgument, path.string() + ": unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(field);
    rows.push_back(row);
  }
  return rows;
}

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  require(in.good(), Errc::Io, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    fail(Errc::InvalidArgument, path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const Json& j) {
  std::ofstream out(path);
  require(out.good(), Errc::Io, "cannot open " + path.string() + " for writing");
  out << j.dump(2) << "\n";
  require(out.good(), Errc::Io, "write failed on " + path.string());
}

Json load_config(const fs::path& path) {
  require(fs::exists(path), Errc::Io, "config file " + path.string() + " does not exist");
  auto ext = path.extension().string();
  if (ext == ".json") return read_json(path);
  require(ext == ".toml", Errc::InvalidArgument, "config must end in .toml or .json: " + path.string());
  try {
    auto table = toml::parse_file(path.string());
    std::ostringstream os;
    os << toml::json_formatter{table};
    return Json::parse(os.str());
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << path.string() << ": " << e.description() << " at line " << e.source().begin.line;
    fail(Errc::InvalidArgument, os.str());
  }
}

namespace {

const Json& field(const Json& j, const char* key, const std::string& where) {
  require(j.is_object(), Errc::InvalidArgument, where + " must be an object");
  auto it = j.find(key);
  require(it != j.end(), Errc::InvalidArgument, where + ": missing required field '" + key + "'");
  return *it;
}

double number(const Json& j, const char* key, const std::string& where) {
  const auto& v = field(j, key, where);
  require(v.is_number(), Errc::InvalidArgument, where + ": field '" + key + "' must be a number");
  return v.get<double>();
}

std::vector<double> numbers(const Json& v, const std::string& what) {
  require(v.is_array(), Errc::InvalidArgument, what + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    require(e.is_number(), Errc::InvalidArgument, what + " must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

Json profile_json(const WeightProfile& w) {
  Json a = Json::array();
  for (const auto& [t, v] : w.steps) a.push_back({t, v});
  return a;
}

WeightProfile profile_from(const Json& j, const std::string& where) {
  if (j.contains("weights")) return WeightProfile::from_weights(numbers(j["weights"], where + ".weights"));
  const auto& p = field(j, "profile", where);
  require(p.is_array(), Errc::InvalidArgument, where + ".profile must be an array of [t, value] pairs");
  WeightProfile w;
  for (const auto& step : p) {
    auto v = numbers(step, where + ".profile entry");
    require(v.size() == 2, Errc::InvalidArgument, where + ".profile entries must be [t, value] pairs");
    w.steps.emplace_back(v[0], v[1]);
  }
  return w;
}

}  // namespace

Json to_json(const EmpiricalMeasure1D& mu) { return Json{{"atoms", mu.atoms()}, {"weights", mu.weights()}}; }

EmpiricalMeasure1D measure_from_json(const Json& j) {
  auto atoms = numbers(field(j, "atoms", "measure"), "measure.atoms");
  auto weights = numbers(field(j, "weights", "measure"), "measure.weights");
  return EmpiricalMeasure1D(atoms, weights);
}

void write_measure_csv(const fs::path& path, const EmpiricalMeasure1D& mu) {
  CsvWriter w(path, {"atom", "weight"});
  for (std::size_t k = 0; k < mu.size(); ++k) w.row(std::vector<double>{mu.atoms()[k], mu.weights()[k]});
}

namespace {

double parse_number(const std::string& s, const fs::path& path) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    require(used == s.size(), Errc::InvalidArgument, path.string() + ": bad number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    fail(Errc::InvalidArgument, path.string() + ": bad number '" + s + "'");
  }
}

std::vector<std::vector<double>> numeric_columns(const fs::path& path, const std::vector<std::string>& names) {
  auto rows = read_csv(path);
  require(!rows.empty(), Errc::InvalidArgument, path.string() + ": empty CSV");
  std::vector<std::size_t> idx;
  for (const auto& n : names) {
    auto it = std::find(rows[0].begin(), rows[0].end(), n);
    require(it != rows[0].end(), Errc::InvalidArgument, path.string() + ": missing column '" + n + "'");
    idx.push_back(static_cast<std::size_t>(it - rows[0].begin()));
  }
  std::vector<std::vector<double>> cols(names.size());
  for (std::size_t r = 1; r < rows.size(); ++r) {
    require(rows[r].size() == rows[0].size(), Errc::InvalidArgument,
            path.string() + ": row " + std::to_string(r) + " has the wrong field count");
    for (std::size_t c = 0; c < idx.size(); ++c) cols[c].push_back(parse_number(rows[r][idx[c]], path));
  }
  return cols;
}

}  // namespace

EmpiricalMeasure1D read_measure(const fs::path& path) {
  if (path.extension() == ".json") return measure_from_json(read_json(path));
  auto cols = numeric_columns(path, {"atom", "weight"});
  return EmpiricalMeasure1D(cols[0], cols[1]);
}

Json to_json(const PenaltySpec& f) {
  Json j;
  std::visit(
      [&](const auto& fam) {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, Separable>) {
          j["variant"] = "separable";
          std::visit(
              [&](const auto& s) {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, AbsWeight>) {
                  j["scalar"] = {{"kind", "abs"}, {"xi", s.xi}};
                } else if constexpr (std::is_same_v<S, Quadratic>) {
                  j["scalar"] = {{"kind", "quadratic"}, {"c", s.c}};
                } else {
                  Json m = to_json(s.map);
                  m["kind"] = "tabulated";
                  j["scalar"] = m;
                }
              },
              fam.scalar);
        } else if constexpr (std::is_same_v<T, Slope>) {
          j["variant"] = "slope";
          j["profile"] = profile_json(fam.profile);
        } else if constexpr (std::is_same_v<T, SmoothedOwl>) {
          j["variant"] = "sowl";
          j["profile"] = profile_json(fam.profile);
        } else if constexpr (std::is_same_v<T, L2Power>) {
          j["variant"] = "l2power";
          j["alpha"] = fam.alpha;
        } else {
          j["variant"] = "l1power";
          j["alpha"] = fam.alpha;
        }
      },
      f.family);
  j["scale"] = f.scale;
  return j;
}

PenaltySpec penalty_from_json(const Json& j) {
  const std::string where = "penalty";
  const auto& v = field(j, "variant", where);
  require(v.is_string(), Errc::InvalidArgument, "penalty.variant must be a string");
  const auto variant = v.get<std::string>();
  PenaltySpec f;
  if (variant == "separable") {
    const auto& s = field(j, "scalar", where);
    const auto& k = field(s, "kind", "penalty.scalar");
    require(k.is_string(), Errc::InvalidArgument, "penalty.scalar.kind must be a string");
    auto kind = k.get<std::string>();
    if (kind == "abs") {
      f.family = Separable{AbsWeight{number(s, "xi", "penalty.scalar")}};
    } else if (kind == "quadratic") {
      f.family = Separable{Quadratic{number(s, "c", "penalty.scalar")}};
    } else if (kind == "tabulated") {
      f.family = Separable{TabulatedProx{pr1_from_json(s)}};
    } else {
      fail(Errc::InvalidArgument, "penalty.scalar.kind must be abs, quadratic or tabulated, not '" + kind + "'");
    }
  } else if (variant == "slope") {
    f.family = Slope{profile_from(j, where)};
  } else if (variant == "sowl") {
    f.family = SmoothedOwl{profile_from(j, where)};
  } else if (variant == "l2power") {
    f.family = L2Power{number(j, "alpha", where)};
  } else if (variant == "l1power") {
    f.family = L1Power{number(j, "alpha", where)};
  } else {
    fail(Errc::InvalidArgument,
         "penalty.variant must be separable, slope, sowl, l2power or l1power, not '" + variant + "'");
  }
  if (j.contains("scale")) f.scale = number(j, "scale", where);
  f.validate();
  return f;
}

Json to_json(const PR1Map& map) {
  return Json{{"y", map.y}, {"x", map.x}, {"slope_left", map.slope_left}, {"slope_right", map.slope_right}};
}

PR1Map pr1_from_json(const Json& j) {
  PR1Map m;
  m.y = numbers(field(j, "y", "map"), "map.y");
  m.x = numbers(field(j, "x", "map"), "map.x");
  if (j.contains("slope_left")) m.slope_left = number(j, "slope_left", "map");
  if (j.contains("slope_right")) m.slope_right = number(j, "slope_right", "map");
  return m;
}

void write_pr1_csv(const fs::path& path, const PR1Map& map) {
  {
    CsvWriter w(path, {"y", "x"});
    for (std::size_t i = 0; i < map.size(); ++i) w.row(std::vector<double>{map.y[i], map.x[i]});
  }
  Json side{{"nodes", map.size()},
            {"extension", "linear beyond the end nodes"},
            {"slope_left", map.slope_left},
            {"slope_right", map.slope_right},
            {"slope_rule", "boundary-segment-slope"},
            {"representative", "piecewise-linear interpolant of the grid values; any PR1 map agreeing on the grid "
                                "is an equally valid representative"}};
  write_json(fs::path(path.string() + ".json"), side);
}

PR1Map read_pr1_csv(const fs::path& path) {
  auto cols = numeric_columns(path, {"y", "x"});
  PR1Map m{cols[0], cols[1], 1.0, 1.0};
  fs::path side(path.string() + ".json");
  if (fs::exists(side)) {
    auto j = read_json(side);
    m.slope_left = number(j, "slope_left", side.string());
    m.slope_right = number(j, "slope_right", side.string());
  } else if (m.size() >= 2) {
    std::size_t e = m.size() - 1;
    m.slope_left = (m.x[1] - m.x[0]) / (m.y[1] - m.y[0]);
    m.slope_right = (m.x[e] - m.x[e - 1]) / (m.y[e] - m.y[e - 1]);
  }
  return m;
}

Json to_json(const ThetaSpec& t) {
  switch (t.kind) {
    case ThetaSpec::Kind::Values: return Json{{"values", t.values}};
    case ThetaSpec::Kind::Prior: return Json{{"prior", to_json(t.prior)}, {"p", t.p}};
    case ThetaSpec::Kind::GaussianQuantiles: return Json{{"gaussian_quantiles", t.p}};
  }
  return {};
}

ThetaSpec theta_from_json(const Json& j) {
  require(j.is_object(), Errc::InvalidArgument, "theta must be an object");
  if (j.contains("values")) return ThetaSpec::explicit_values(numbers(j["values"], "theta.values"));
  auto count = [&](const char* key) {
    const auto& v = field(j, key, "theta");
    require(v.is_number_integer() && v.get<long long>() >= 1, Errc::InvalidArgument,
            std::string("theta.") + key + " must be a positive integer");
    return static_cast<std::size_t>(v.get<long long>());
  };
  if (j.contains("gaussian_quantiles")) return ThetaSpec::gaussian_quantiles(count("gaussian_quantiles"));
  if (j.contains("prior")) return ThetaSpec::from_prior(measure_from_json(j["prior"]), count("p"));
  if (j.contains("prior_file")) {
    const auto& f = j["prior_file"];
    require(f.is_string(), Errc::InvalidArgument, "theta.prior_file must be a path");
    return ThetaSpec::from_prior(read_measure(f.get<std::string>()), count("p"));
  }
  fail(Errc::InvalidArgument, "theta needs one of 'values', 'prior' (with 'p'), 'prior_file' or 'gaussian_quantiles'");
}

JointSample2D read_coupling_csv(const fs::path& path) {
  auto cols = numeric_columns(path, {"x", "g"});
  std::vector<Point2> pts;
  for (std::size_t i = 0; i < cols[0].size(); ++i) pts.push_back({cols[0][i], cols[1][i]});
  require(!pts.empty(), Errc::InvalidArgument, path.string() + ": coupling has no rows");
  return JointSample2D(pts);
}

}  // namespace symprox
