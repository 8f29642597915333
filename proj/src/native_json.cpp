#include <json.hpp>

#include "perinv/error.hpp"
#include "perinv/io.hpp"

namespace perinv {
namespace {

using nlohmann::json;

Error schema(const std::string& what) { return Error(ErrorCode::SchemaViolation, what); }

Matrix read_rows(const json& value, const char* field, Eigen::Index rows, Eigen::Index cols) {
  if (!value.is_array()) throw schema(std::string("'") + field + "' must be an array of rows");
  if (rows >= 0 && static_cast<Eigen::Index>(value.size()) != rows)
    throw schema(std::string("'") + field + "' must have " + std::to_string(rows) + " rows");
  Matrix out(static_cast<Eigen::Index>(value.size()), cols);
  for (std::size_t i = 0; i < value.size(); ++i) {
    const json& row = value[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw schema(std::string("'") + field + "' rows must hold " + std::to_string(cols) + " numbers");
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (!row[j].is_number()) throw schema(std::string("'") + field + "' entries must be numbers");
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j].get<double>();
    }
  }
  return out;
}

int read_int(const json& obj, const char* field) {
  if (!obj.contains(field) || !obj[field].is_number_integer()) throw schema(std::string("'") + field + "' must be an integer");
  return obj[field].get<int>();
}

PeriodicSet read_object(const json& obj) {
  if (!obj.is_object()) throw schema("structure must be a JSON object");
  const int dim = read_int(obj, "dim");
  const int rank = read_int(obj, "rank");
  if (dim < 1) throw schema("'dim' must be at least 1");
  if (rank < 0 || rank > dim) throw schema("'rank' must lie in [0, dim]");
  std::string id;
  if (obj.contains("id")) {
    if (!obj["id"].is_string()) throw schema("'id' must be a string");
    id = obj["id"].get<std::string>();
  }
  if (!obj.contains("motif_frac")) throw schema("'motif_frac' is required");
  const Matrix basis = obj.contains("basis") ? read_rows(obj["basis"], "basis", rank, dim)
                                             : (rank == 0 ? Matrix(0, dim) : throw schema("'basis' is required"));
  const Matrix motif = read_rows(obj["motif_frac"], "motif_frac", -1, dim);
  std::vector<std::string> species;
  if (obj.contains("species") && !obj["species"].is_null()) {
    if (!obj["species"].is_array()) throw schema("'species' must be an array of strings");
    for (const auto& s : obj["species"]) {
      if (!s.is_string()) throw schema("'species' must be an array of strings");
      species.push_back(s.get<std::string>());
    }
    if (!species.empty() && static_cast<Eigen::Index>(species.size()) != motif.rows())
      throw schema("'species' must have one label per motif point");
  }
  try {
    return PeriodicSet(dim, rank, basis, motif, std::move(species), std::move(id));
  } catch (const Error& e) {
    throw schema(e.what());
  }
}

json to_json(const PeriodicSet& set) {
  json obj;
  obj["id"] = set.id();
  obj["dim"] = set.dim();
  obj["rank"] = set.rank();
  auto rows = [](const Matrix& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
      out.push_back(std::move(row));
    }
    return out;
  };
  obj["basis"] = rows(set.basis());
  obj["motif_frac"] = rows(set.motif_mixed());
  obj["species"] = set.species();
  return obj;
}

}  // namespace

std::vector<PeriodicSet> read_native(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw schema(std::string("invalid JSON: ") + e.what());
  }
  std::vector<PeriodicSet> out;
  try {
    if (doc.is_array()) {
      for (const auto& obj : doc) out.push_back(read_object(obj));
    } else {
      out.push_back(read_object(doc));
    }
  } catch (const json::exception& e) {
    throw schema(e.what());
  }
  if (out.empty()) throw schema("no structures in document");
  return out;
}

std::string write_native(const PeriodicSet& set) { return to_json(set).dump(2); }

std::string write_native(const std::vector<PeriodicSet>& sets) {
  json arr = json::array();
  for (const auto& s : sets) arr.push_back(to_json(s));
  return arr.dump(2);
}

}  // namespace perinv
