#pragma once

#include <string>

#include <json.hpp>

#include "phm/errors.hpp"
#include "phm/types.hpp"

namespace phm::cli {

inline constexpr int kSchemaVersion = 1;

/// Malformed or unreadable matrix file; the message names the offending row/column.
class MatrixFileError : public Error {
public:
    using Error::Error;
};

/// {"schema":1, "n":N, "entries":[[[re,im], …N], …N]}
nlohmann::json to_matrix_json(const ComplexMatrix& m);
ComplexMatrix from_matrix_json(const nlohmann::json& doc);

ComplexMatrix read_matrix_file(const std::string& path);
void write_matrix_file(const std::string& path, const ComplexMatrix& m);

/// [re, im]
nlohmann::json complex_json(Complex z);

}  // namespace phm::cli
