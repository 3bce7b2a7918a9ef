#include "gw/io.hpp"

#include <fstream>
#include <vector>

namespace gw::io {

namespace {

std::vector<double> number_array(const nlohmann::json& j, const char* what) {
    if (!j.is_array()) throw FormatError(std::string(what) + " must be an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) {
        if (!v.is_number()) throw FormatError(std::string(what) + " entries must be numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace

Gaussian gaussian_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("mean") || !j.contains("cov")) {
        throw FormatError("Gaussian: expected an object with \"mean\" and \"cov\"");
    }
    std::vector<double> mean = number_array(j.at("mean"), "mean");
    const auto& rows = j.at("cov");
    if (!rows.is_array() || rows.size() != mean.size() || mean.empty()) {
        throw FormatError("Gaussian: cov must be a d x d array matching the mean");
    }
    Matrix cov(mean.size(), mean.size());
    for (std::size_t i = 0; i < mean.size(); ++i) {
        const std::vector<double> row = number_array(rows[i], "cov row");
        if (row.size() != mean.size()) throw FormatError("Gaussian: cov must be square");
        for (std::size_t k = 0; k < row.size(); ++k) cov(i, k) = row[k];
    }
    return Gaussian(std::move(mean), SpdMatrix(SymMatrix(cov)));
}

Gaussian load_gaussian(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    return gaussian_from_json(j);
}

nlohmann::json to_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::json to_json(const SymMatrix& m) { return to_json(m.matrix()); }

nlohmann::json to_json(const Gaussian& g) {
    return nlohmann::json{{"mean", g.mean()}, {"cov", to_json(g.cov().matrix())}};
}

}  // namespace gw::io
