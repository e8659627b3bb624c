#include "sesqui/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace sesqui {
namespace io {

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json entries = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      entries.push_back({m(i, j).real(), m(i, j).imag()});
    }
  }
  return entries;
}

Matrix matrix_from_json(const nlohmann::json& entries, Index rows, Index cols,
                        const std::string& field) {
  if (!entries.is_array() || static_cast<Index>(entries.size()) != rows * cols) {
    throw InputError("triple document: field '" + field + "' must hold " +
                     std::to_string(rows * cols) + " [re, im] pairs");
  }
  Matrix m(rows, cols);
  Index k = 0;
  for (const auto& entry : entries) {
    if (!entry.is_array() || entry.size() != 2) {
      throw InputError("triple document: field '" + field + "' has a malformed entry");
    }
    m(k / cols, k % cols) = Complex(entry[0].get<double>(), entry[1].get<double>());
    ++k;
  }
  return m;
}

nlohmann::json triple_to_json(const FormTriple& triple) {
  nlohmann::json doc;
  doc["format"] = "sesqui-triple";
  doc["version"] = 1;
  doc["label"] = triple.space_v.label;
  doc["dim_v"] = triple.space_v.dim;
  doc["dim_h"] = triple.space_h.dim;
  doc["gram_v"] = matrix_to_json(triple.space_v.gram);
  doc["gram_h"] = matrix_to_json(triple.space_h.gram);
  doc["embedding"] = matrix_to_json(triple.j.matrix);
  doc["form"] = matrix_to_json(triple.form);
  return doc;
}

FormTriple triple_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || doc.value("format", "") != "sesqui-triple") {
    throw InputError("triple document: missing format tag 'sesqui-triple'");
  }
  for (const char* field : {"dim_v", "dim_h", "gram_v", "gram_h", "embedding", "form"}) {
    if (!doc.contains(field)) {
      throw InputError(std::string("triple document: missing field '") + field + "'");
    }
  }
  const Index n = doc["dim_v"].get<Index>();
  const Index m = doc["dim_h"].get<Index>();
  if (n <= 0 || m <= 0) throw InputError("triple document: dimensions must be positive");
  return build_triple(matrix_from_json(doc["gram_v"], n, n, "gram_v"),
                      matrix_from_json(doc["gram_h"], m, m, "gram_h"),
                      matrix_from_json(doc["embedding"], m, n, "embedding"),
                      matrix_from_json(doc["form"], n, n, "form"),
                      doc.value("label", std::string{}));
}

void save_triple(const FormTriple& triple, const std::string& path) {
  write_file_atomic(path, triple_to_json(triple).dump(2) + "\n");
}

FormTriple load_triple(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open triple file: " + path);
  nlohmann::json doc;
  in >> doc;
  return triple_from_json(doc);
}

std::string format_number(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  std::ostringstream os;
  for (size_t i = 0; i < header.size(); ++i) {
    if (i) os << ',';
    os << header[i];
  }
  os << '\n';
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      os << format_number(row[i]);
    }
    os << '\n';
  }
  return os.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write file: " + tmp);
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace io
}  // namespace sesqui
