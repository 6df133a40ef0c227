#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "passivity/convexity.hpp"
#include "passivity/core.hpp"
#include "passivity/families.hpp"
#include "passivity/qmi.hpp"
#include "passivity/realization.hpp"

namespace passivity::io {

using Json = nlohmann::json;

// Documents store complex entries as [re, im] pairs, matrices as arrays of rows.

inline Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Complex complex_from_json(const Json& j, const std::string& field) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  require(j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number(), ErrorCode::parse_error,
          field + ": expected [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

/// rows x cols are checked when given; an empty array is a matrix with zero rows.
inline Matrix matrix_from_json(const Json& j, const std::string& field, std::optional<Eigen::Index> rows = {},
                               std::optional<Eigen::Index> cols = {}) {
  require(j.is_array(), ErrorCode::parse_error, field + ": expected an array of rows");
  const auto r = static_cast<Eigen::Index>(j.size());
  Eigen::Index c = cols.value_or(0);
  if (r > 0) {
    require(j[0].is_array(), ErrorCode::parse_error, field + "[0]: expected a row array");
    c = static_cast<Eigen::Index>(j[0].size());
  }
  if (rows)
    require(r == *rows, ErrorCode::shape_error,
            field + ": expected " + std::to_string(*rows) + " rows, got " + std::to_string(r));
  if (cols && r > 0)
    require(c == *cols, ErrorCode::shape_error,
            field + ": expected " + std::to_string(*cols) + " columns, got " + std::to_string(c));
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const std::string row_field = field + "[" + std::to_string(i) + "]";
    require(j[i].is_array(), ErrorCode::parse_error, row_field + ": expected a row array");
    require(static_cast<Eigen::Index>(j[i].size()) == c, ErrorCode::shape_error, row_field + ": ragged row");
    for (Eigen::Index k = 0; k < c; ++k)
      m(i, k) = complex_from_json(j[i][k], row_field + "[" + std::to_string(k) + "]");
  }
  require(linalg::all_finite(m), ErrorCode::parse_error, field + ": entries must be finite");
  return m;
}

struct RealizationMetadata {
  std::optional<std::string> name;
  std::map<std::string, double> params;
};

struct RealizationDocument {
  Realization realization;
  RealizationMetadata metadata;
};

inline Json to_json(const Realization& r, const RealizationMetadata& meta = {}) {
  Json doc;
  doc["n"] = r.n();
  doc["m"] = r.m();
  doc["A"] = to_json(r.A());
  doc["B"] = to_json(r.B());
  doc["C"] = to_json(r.C());
  doc["D"] = to_json(r.D());
  if (meta.name || !meta.params.empty()) {
    Json md = Json::object();
    if (meta.name) md["name"] = *meta.name;
    if (!meta.params.empty()) md["params"] = meta.params;
    doc["metadata"] = md;
  }
  return doc;
}

inline RealizationDocument realization_from_json(const Json& doc) {
  require(doc.is_object(), ErrorCode::parse_error, "realization document must be an object");
  for (const char* key : {"n", "m", "A", "B", "C", "D"})
    require(doc.contains(key), ErrorCode::parse_error, std::string("missing field '") + key + "'");
  require(doc["n"].is_number_integer() && doc["n"].get<long long>() >= 0, ErrorCode::parse_error,
          "n: expected a nonnegative integer");
  require(doc["m"].is_number_integer() && doc["m"].get<long long>() >= 1, ErrorCode::parse_error,
          "m: expected a positive integer");
  const auto n = static_cast<Eigen::Index>(doc["n"].get<long long>());
  const auto m = static_cast<Eigen::Index>(doc["m"].get<long long>());
  Matrix a = matrix_from_json(doc["A"], "A", n, n);
  Matrix b = matrix_from_json(doc["B"], "B", n, m);
  Matrix c = matrix_from_json(doc["C"], "C", m, n);
  Matrix d = matrix_from_json(doc["D"], "D", m, m);
  if (n == 0) {
    a.resize(0, 0);
    b.resize(0, m);
  }
  RealizationMetadata meta;
  if (doc.contains("metadata")) {
    const Json& md = doc["metadata"];
    require(md.is_object(), ErrorCode::parse_error, "metadata: expected an object");
    if (md.contains("name")) {
      require(md["name"].is_string(), ErrorCode::parse_error, "metadata.name: expected a string");
      meta.name = md["name"].get<std::string>();
    }
    if (md.contains("params")) {
      require(md["params"].is_object(), ErrorCode::parse_error, "metadata.params: expected an object");
      for (const auto& [key, value] : md["params"].items()) {
        require(value.is_number(), ErrorCode::parse_error, "metadata.params." + key + ": expected a number");
        meta.params[key] = value.get<double>();
      }
    }
  }
  try {
    return {Realization(std::move(a), std::move(b), std::move(c), std::move(d)), std::move(meta)};
  } catch (const Error& e) {
    fail(ErrorCode::shape_error, e.what());
  }
}

inline Json parse_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::parse_error, source + ": " + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << contents;
}

/// Canonical form: sorted keys, two-space indent, trailing newline. Doubles use
/// the shortest representation that round-trips bit-exactly.
inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline RealizationDocument load(const std::string& path) {
  return realization_from_json(parse_text(read_file(path), path));
}

inline void save(const std::string& path, const Realization& r, const RealizationMetadata& meta = {}) {
  write_file(path, dump(to_json(r, meta)));
}

/// A bare matrix array, or an object with a "matrix" field.
inline Matrix load_matrix(const std::string& path) {
  const Json doc = parse_text(read_file(path), path);
  if (doc.is_object()) {
    require(doc.contains("matrix"), ErrorCode::parse_error, path + ": missing field 'matrix'");
    return matrix_from_json(doc["matrix"], "matrix");
  }
  return matrix_from_json(doc, "matrix");
}

inline Json to_json(const IsometryFamily& fam) {
  Json doc;
  doc["state_blocks"] = Json::array();
  doc["io_blocks"] = Json::array();
  for (const auto& b : fam.state_blocks) doc["state_blocks"].push_back(to_json(b));
  for (const auto& b : fam.io_blocks) doc["io_blocks"].push_back(to_json(b));
  return doc;
}

inline IsometryFamily isometry_family_from_json(const Json& doc, Eigen::Index n, Eigen::Index m) {
  require(doc.is_object() && doc.contains("state_blocks") && doc.contains("io_blocks"), ErrorCode::parse_error,
          "isometry document needs 'state_blocks' and 'io_blocks'");
  require(doc["state_blocks"].is_array() && doc["io_blocks"].is_array(), ErrorCode::parse_error,
          "isometry blocks must be arrays");
  IsometryFamily fam;
  std::size_t j = 0;
  for (const auto& b : doc["state_blocks"]) {
    Matrix blk = matrix_from_json(b, "state_blocks[" + std::to_string(j++) + "]", n, n);
    if (n == 0) blk.resize(0, 0);
    fam.state_blocks.push_back(std::move(blk));
  }
  j = 0;
  for (const auto& b : doc["io_blocks"])
    fam.io_blocks.push_back(matrix_from_json(b, "io_blocks[" + std::to_string(j++) + "]", m, m));
  return fam;
}

inline Json to_json(const FamilyTag& tag) {
  Json j;
  j["family"] = std::string(to_string(tag.family()));
  if (tag.eta()) j["eta"] = std::isinf(*tag.eta()) ? Json("inf") : Json(*tag.eta());
  return j;
}

inline Json to_json(const Certificate& c) {
  Json j;
  j["family"] = to_json(c.family);
  j["status"] = std::string(to_string(c.status));
  j["P"] = to_json(c.P);
  j["Q"] = to_json(c.Q);
  j["min_eig_P"] = std::isinf(c.min_eig_P) ? Json(nullptr) : Json(c.min_eig_P);
  j["min_eig_Q"] = std::isinf(c.min_eig_Q) ? Json(nullptr) : Json(c.min_eig_Q);
  j["tol_psd"] = c.tol_psd;
  return j;
}

inline Json to_json(const MembershipReport& r) {
  Json j;
  j["oracle"] = std::string(to_string(r.kind));
  if (r.eta) j["eta"] = std::isinf(*r.eta) ? Json("inf") : Json(*r.eta);
  j["verdict"] = std::string(to_string(r.verdict));
  j["evidence"] = r.passed() ? "sampled pass (not a proof)" : "counterexample at worst_point";
  j["worst_point"] = to_json(r.worst_point);
  j["worst_margin"] = std::isinf(r.worst_margin) ? Json(nullptr) : Json(r.worst_margin);
  j["samples_used"] = r.samples_used;
  j["skipped"] = r.skipped;
  j["tol_oracle"] = r.tol_oracle;
  return j;
}

inline Json grid_summary(const DomainGrid& g) {
  Json j;
  j["domain"] = std::string(to_string(g.domain));
  j["boundary_points"] = g.boundary.size();
  j["interior_points"] = g.interior.size();
  j["seed"] = g.seed;
  return j;
}

/// 64-bit FNV-1a, used as the inputs digest in reports.
inline std::string digest(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream ss;
  ss << std::hex;
  ss.width(16);
  ss.fill('0');
  ss << h;
  return ss.str();
}

}  // namespace passivity::io
