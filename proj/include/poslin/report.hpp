#pragma once

#include <string_view>

#include <json.hpp>

#include "poslin/model.hpp"
#include "poslin/solvers.hpp"
#include "poslin/spectral.hpp"
#include "poslin/validate.hpp"

namespace poslin {

// JSON views of the library results. nlohmann::json keeps object keys sorted,
// so dumps are byte-stable for identical inputs.

nlohmann::json to_json(const Matrix& m);
nlohmann::json to_json(const ValidationReport& rep);
nlohmann::json to_json(const Policy& pol, double margin = kDefaultStabilityMargin);
nlohmann::json to_json(const SpectralCertificate& cert);
nlohmann::json to_json(const SolveResult& res, bool include_trace = false);

/// Reads a gain from either {"L": [[...]]}, {"policy": {"L": ...}} (a solve
/// result) or a bare array of rows.
Matrix parse_gain(std::string_view json_text);

}  // namespace poslin
