#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ajd/errors.hpp"
#include "ajd/matrix.hpp"
#include "ajd/matrix_set.hpp"

namespace ajd {

/// Malformed input file; the message carries nlohmann's line/column report
/// for syntax errors.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Matrix set file format:
//   { "n": <int>, "k": <int>, "matrices": [ [n*n row-major floats], ... ] }
// Symmetry is enforced on load: asymmetry beyond 1e-9 is an error, below it
// the matrix is symmetrized by averaging.

inline MatrixSet parse_matrix_set(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("matrix set: ") + e.what());
  }
  try {
    if (!doc.is_object()) throw ParseError("matrix set: top level must be an object");
    const auto n = doc.at("n").get<std::int64_t>();
    const auto k = doc.at("k").get<std::int64_t>();
    if (n < 1) throw ParseError("matrix set: n must be positive");
    if (k < 1) throw ParseError("matrix set: k must be positive");
    const auto& arrays = doc.at("matrices");
    if (!arrays.is_array() || arrays.size() != static_cast<std::size_t>(k)) {
      throw ParseError("matrix set: expected " + std::to_string(k) + " matrices");
    }
    const auto nn = static_cast<std::size_t>(n);
    std::vector<SymmetricMatrix> matrices;
    matrices.reserve(static_cast<std::size_t>(k));
    for (std::size_t idx = 0; idx < arrays.size(); ++idx) {
      const auto entries = arrays[idx].get<std::vector<double>>();
      if (entries.size() != nn * nn) {
        throw ParseError("matrix set: matrix " + std::to_string(idx) + " has " +
                         std::to_string(entries.size()) + " entries, expected " +
                         std::to_string(nn * nn));
      }
      const Matrix m = Matrix::from_entries(nn, nn, entries);
      double asym = 0.0;
      for (std::size_t i = 0; i < nn; ++i)
        for (std::size_t j = i + 1; j < nn; ++j)
          asym = std::max(asym, std::abs(m(i, j) - m(j, i)));
      if (asym > 1e-9) {
        throw ParseError("matrix set: matrix " + std::to_string(idx) +
                         " is asymmetric beyond tolerance (max deviation " +
                         std::to_string(asym) + ")");
      }
      matrices.push_back(SymmetricMatrix::symmetrized(m));
    }
    return MatrixSet(std::move(matrices));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("matrix set: ") + e.what());
  }
}

inline std::string matrix_set_to_json(const MatrixSet& c) {
  nlohmann::json doc;
  doc["n"] = c.n;
  doc["k"] = c.k();
  auto& arrays = doc["matrices"] = nlohmann::json::array();
  for (const auto& m : c.matrices) {
    arrays.push_back(std::vector<double>(m.entries().begin(), m.entries().end()));
  }
  return doc.dump();
}

inline MatrixSet load_matrix_set(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_matrix_set(buf.str());
}

inline void save_matrix_set(const MatrixSet& c, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << matrix_set_to_json(c) << '\n';
}

inline nlohmann::json matrix_to_json(const Matrix& m) {
  return nlohmann::json{
      {"rows", m.rows()},
      {"cols", m.cols()},
      {"entries", std::vector<double>(m.entries().begin(), m.entries().end())}};
}

}  // namespace ajd
