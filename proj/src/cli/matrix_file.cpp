#include "phm/cli/matrix_file.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace phm::cli {

namespace {

std::string where(std::size_t row, std::size_t col) {
    return "entries[" + std::to_string(row) + "][" + std::to_string(col) + "]";
}

}  // namespace

nlohmann::json complex_json(Complex z) {
    return nlohmann::json::array({z.real(), z.imag()});
}

nlohmann::json to_matrix_json(const ComplexMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return {{"schema", kSchemaVersion}, {"n", m.rows()}, {"entries", std::move(rows)}};
}

ComplexMatrix from_matrix_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw MatrixFileError("matrix file: top level must be an object");
    if (!doc.contains("schema") || !doc["schema"].is_number_integer() ||
        doc["schema"].get<long long>() != kSchemaVersion) {
        throw MatrixFileError("matrix file: missing or unsupported \"schema\" (expected 1)");
    }
    if (!doc.contains("n") || !doc["n"].is_number_integer() || doc["n"].get<long long>() < 1) {
        throw MatrixFileError("matrix file: \"n\" must be a positive integer");
    }
    const auto n = static_cast<std::size_t>(doc["n"].get<long long>());
    if (!doc.contains("entries") || !doc["entries"].is_array()) {
        throw MatrixFileError("matrix file: \"entries\" must be an array");
    }
    const auto& entries = doc["entries"];
    if (entries.size() != n) {
        throw MatrixFileError("matrix file: \"entries\" has " + std::to_string(entries.size()) +
                              " rows, expected " + std::to_string(n));
    }

    const auto dim = static_cast<Eigen::Index>(n);
    ComplexMatrix m(dim, dim);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = entries[i];
        if (!row.is_array() || row.size() != n) {
            throw MatrixFileError("matrix file: entries[" + std::to_string(i) +
                                  "] must be an array of " + std::to_string(n) + " values");
        }
        for (std::size_t j = 0; j < n; ++j) {
            const auto& cell = row[j];
            if (!cell.is_array() || cell.size() != 2 || !cell[0].is_number() ||
                !cell[1].is_number()) {
                throw MatrixFileError("matrix file: " + where(i, j) +
                                      " must be a [re, im] pair of numbers");
            }
            const double re = cell[0].get<double>();
            const double im = cell[1].get<double>();
            if (!std::isfinite(re) || !std::isfinite(im)) {
                throw MatrixFileError("matrix file: " + where(i, j) + " is not finite");
            }
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = Complex(re, im);
        }
    }
    return m;
}

ComplexMatrix read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MatrixFileError("cannot open matrix file '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw MatrixFileError("matrix file '" + path + "': invalid JSON: " + e.what());
    }
    try {
        return from_matrix_json(doc);
    } catch (const MatrixFileError& e) {
        throw MatrixFileError("'" + path + "': " + e.what());
    }
}

void write_matrix_file(const std::string& path, const ComplexMatrix& m) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw MatrixFileError("cannot write matrix file '" + path + "'");
    out << to_matrix_json(m).dump() << '\n';
    if (!out) throw MatrixFileError("write failed for '" + path + "'");
}

}  // namespace phm::cli
