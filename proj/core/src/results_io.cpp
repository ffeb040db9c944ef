#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ofrr/errors.hpp"
#include "ofrr/experiment.hpp"

namespace ofrr {

namespace {

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quoted(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string opt(const std::optional<double>& v) { return v ? number(*v) : std::string(); }

std::vector<std::string> split_csv(const std::string& line, std::size_t lineno) {
  std::vector<std::string> fields(1);
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back() += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  if (in_quotes) throw ParseError("results csv: unterminated quote", lineno);
  return fields;
}

std::optional<double> parse_double(const std::string& s, std::size_t lineno) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) throw ParseError("results csv: bad number '" + s + "'", lineno);
  return v;
}

nlohmann::json json_number(const std::optional<double>& v) {
  if (!v) return nullptr;
  if (!std::isfinite(*v)) return number(*v);
  return *v;
}

}  // namespace

std::optional<OutputFormat> parse_output_format(std::string_view name) noexcept {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json") return OutputFormat::Json;
  return std::nullopt;
}

void write_csv(std::ostream& out, const ResultTable& table) {
  out << kCsvHeader << '\n';
  for (const ResultRow& r : table) {
    out << quoted(r.experiment) << ',' << quoted(r.matrix) << ',' << quoted(r.policy) << ','
        << quoted(r.basis_method) << ',' << quoted(r.projection) << ','
        << (r.index ? std::to_string(*r.index) : std::string()) << ',' << opt(r.value) << ','
        << opt(r.reference) << ',' << opt(r.rel_error) << ',' << opt(r.residual) << ','
        << opt(r.cond2) << ',' << opt(r.wall_ms) << ',' << quoted(r.status) << '\n';
  }
}

void write_json(std::ostream& out, const ResultTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const ResultRow& r : table) {
    rows.push_back({
        {"experiment", r.experiment},
        {"matrix", r.matrix},
        {"policy", r.policy},
        {"basis_method", r.basis_method},
        {"projection", r.projection},
        {"index", r.index ? nlohmann::json(*r.index) : nlohmann::json(nullptr)},
        {"value", json_number(r.value)},
        {"reference", json_number(r.reference)},
        {"rel_error", json_number(r.rel_error)},
        {"residual", json_number(r.residual)},
        {"cond2", json_number(r.cond2)},
        {"wall_ms", json_number(r.wall_ms)},
        {"status", r.status},
    });
  }
  out << rows.dump(2) << '\n';
}

void write_results(const ResultTable& table, OutputFormat format, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path.string());
  if (format == OutputFormat::Csv) {
    write_csv(out, table);
  } else {
    write_json(out, table);
  }
  out.flush();
  if (!out) throw std::runtime_error("failed writing output file: " + path.string());
}

ResultTable read_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw ParseError("results csv: empty input", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw ParseError("results csv: unexpected header", 1);
  ResultTable table;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv(line, lineno);
    if (f.size() != 13) throw ParseError("results csv: expected 13 fields", lineno);
    ResultRow r;
    r.experiment = f[0];
    r.matrix = f[1];
    r.policy = f[2];
    r.basis_method = f[3];
    r.projection = f[4];
    if (!f[5].empty()) {
      std::size_t idx = 0;
      const auto [p, ec] = std::from_chars(f[5].data(), f[5].data() + f[5].size(), idx);
      if (ec != std::errc() || p != f[5].data() + f[5].size()) {
        throw ParseError("results csv: bad index '" + f[5] + "'", lineno);
      }
      r.index = idx;
    }
    r.value = parse_double(f[6], lineno);
    r.reference = parse_double(f[7], lineno);
    r.rel_error = parse_double(f[8], lineno);
    r.residual = parse_double(f[9], lineno);
    r.cond2 = parse_double(f[10], lineno);
    r.wall_ms = parse_double(f[11], lineno);
    r.status = f[12];
    table.push_back(std::move(r));
  }
  return table;
}

}  // namespace ofrr
