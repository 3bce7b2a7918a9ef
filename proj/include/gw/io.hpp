#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "gw/geometry.hpp"
#include "gw/linalg.hpp"

namespace gw::io {

// Malformed documents (missing keys, ragged rows, non-numeric entries).
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// {"mean": [..], "cov": [[..], ..]}; cov is symmetrized and PD-checked.
Gaussian gaussian_from_json(const nlohmann::json& j);
Gaussian load_gaussian(const std::filesystem::path& path);

nlohmann::json to_json(const Matrix& m);
nlohmann::json to_json(const SymMatrix& m);
nlohmann::json to_json(const Gaussian& g);

}  // namespace gw::io
