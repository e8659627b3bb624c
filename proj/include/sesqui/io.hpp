#pragma once

#include "sesqui/formmodel.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace sesqui {
namespace io {

// Dense matrices travel as row-major lists of [re, im] pairs; see the
// README for the full triple document schema.
nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& entries, Index rows, Index cols,
                        const std::string& field);

nlohmann::json triple_to_json(const FormTriple& triple);
FormTriple triple_from_json(const nlohmann::json& doc);

void save_triple(const FormTriple& triple, const std::string& path);
FormTriple load_triple(const std::string& path);

// Deterministic shortest-faithful formatting used by all table output.
std::string format_number(double value);

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows);

// Writes content to path via a temporary file and rename, so failed runs
// leave no partial output behind.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace io
}  // namespace sesqui
