#include "ofrr/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ofrr/errors.hpp"

namespace ofrr {

namespace {

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

CsrMatrix read_matrix_market(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) throw ParseError("matrix market: empty input", 1);
  ++lineno;
  {
    std::istringstream hs(line);
    std::string banner, object, layout, field, symmetry;
    hs >> banner >> object >> layout >> field >> symmetry;
    if (banner != "%%MatrixMarket" || lowercase(object) != "matrix") {
      throw ParseError("matrix market: missing %%MatrixMarket matrix header", lineno);
    }
    if (lowercase(layout) != "coordinate") {
      throw ParseError("matrix market: only coordinate layout is supported", lineno);
    }
    if (lowercase(field) != "real") {
      throw ParseError("matrix market: field '" + field + "' is not real", lineno);
    }
    if (lowercase(symmetry) != "symmetric") {
      throw ParseError("matrix market: symmetry '" + symmetry + "' is not symmetric", lineno);
    }
  }

  std::size_t rows = 0, cols = 0, entries = 0;
  bool have_size = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line) || line[0] == '%') continue;
    std::istringstream ss(line);
    if (!(ss >> rows >> cols >> entries)) {
      throw ParseError("matrix market: malformed size line", lineno);
    }
    have_size = true;
    break;
  }
  if (!have_size) throw ParseError("matrix market: missing size line", lineno + 1);
  if (rows != cols) throw ParseError("matrix market: symmetric matrix must be square", lineno);

  std::vector<std::size_t> ri, ci;
  std::vector<double> vals;
  ri.reserve(2 * entries);
  ci.reserve(2 * entries);
  vals.reserve(2 * entries);
  std::size_t seen = 0;
  while (seen < entries && std::getline(in, line)) {
    ++lineno;
    if (blank(line) || line[0] == '%') continue;
    std::istringstream ss(line);
    long long i = 0, j = 0;
    double v = 0.0;
    if (!(ss >> i >> j >> v)) throw ParseError("matrix market: malformed entry", lineno);
    if (i < 1 || j < 1 || static_cast<std::size_t>(i) > rows || static_cast<std::size_t>(j) > cols) {
      throw ParseError("matrix market: index out of range", lineno);
    }
    const auto r = static_cast<std::size_t>(i - 1);
    const auto c = static_cast<std::size_t>(j - 1);
    ri.push_back(r);
    ci.push_back(c);
    vals.push_back(v);
    if (r != c) {
      ri.push_back(c);
      ci.push_back(r);
      vals.push_back(v);
    }
    ++seen;
  }
  if (seen < entries) {
    throw ParseError("matrix market: expected " + std::to_string(entries) + " entries, found " +
                         std::to_string(seen),
                     lineno + 1);
  }
  return CsrMatrix::from_triplets(rows, ri, ci, vals, Format::F64);
}

CsrMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix market file: " + path.string());
  return read_matrix_market(in);
}

}  // namespace ofrr
