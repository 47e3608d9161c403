#include "poslin/report.hpp"

#include <string>

#include "poslin/error.hpp"

namespace poslin {

using nlohmann::json;

json to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return rows;
}

json to_json(const ValidationReport& rep) {
  json checks = json::array();
  for (const auto& c : rep.checks) {
    json item{{"name", c.name}, {"passed", c.passed}};
    if (c.witness) item["witness"] = json{{"index", c.witness->index}, {"value", c.witness->value}};
    else item["witness"] = nullptr;
    checks.push_back(std::move(item));
  }
  return json{{"passed", rep.passed}, {"checks", std::move(checks)},
              {"observability_vector", rep.observability_vector}};
}

json to_json(const Policy& pol, double margin) {
  json out{{"L", to_json(pol.L)}, {"feasible", pol.feasible}};
  if (pol.spectral_radius) {
    out["spectral_radius"] = *pol.spectral_radius;
    out["stable"] = *pol.spectral_radius < 1.0 - margin;
  } else {
    out["spectral_radius"] = nullptr;
    out["stable"] = nullptr;
  }
  return out;
}

json to_json(const SpectralCertificate& cert) {
  return json{{"rho", cert.rho},           {"eigvec", cert.eigvec},
              {"residual", cert.residual}, {"stable", cert.stable},
              {"rho_lower", cert.rho_lower}, {"rho_upper", cert.rho_upper},
              {"iterations", cert.iterations}};
}

json to_json(const SolveResult& res, bool include_trace) {
  json out{{"method", std::string(to_string(res.method))},
           {"status", std::string(to_string(res.status))},
           {"iterations", res.iterations}};
  out["p_star"] = res.p_star ? json(*res.p_star) : json(nullptr);
  out["policy"] = res.policy ? to_json(*res.policy) : json(nullptr);
  out["residual"] = res.certificate ? json(*res.certificate) : json(nullptr);
  out["verdict"] = res.status == SolveStatus::Converged  ? "J* finite"
                   : res.status == SolveStatus::Diverged ? "J* infinite"
                                                         : "undecided";
  if (res.lp_status) out["lp_status"] = std::string(to_string(*res.lp_status));
  if (res.first_optimal_policy_index) out["first_optimal_policy_index"] = *res.first_optimal_policy_index;
  if (include_trace) {
    json hist = json::array();
    for (const auto& h : res.history) hist.push_back(json::array({h.iteration, h.residual}));
    out["history"] = std::move(hist);
  }
  return out;
}

Matrix parse_gain(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Parse, std::string("malformed policy JSON: ") + e.what());
  } catch (const json::out_of_range& e) {
    throw Error(ErrorCode::NonFinite, std::string("number out of range: ") + e.what());
  }
  const json* rows = &doc;
  if (doc.is_object()) {
    if (doc.contains("policy") && doc["policy"].is_object()) rows = &doc["policy"];
    if (!rows->contains("L")) throw Error(ErrorCode::Parse, "policy JSON has no field 'L'");
    rows = &(*rows)["L"];
  }
  if (!rows->is_array()) throw Error(ErrorCode::Parse, "policy gain must be an array of rows");
  std::vector<std::vector<double>> data;
  for (const auto& row : *rows) {
    if (!row.is_array()) throw Error(ErrorCode::Parse, "policy gain must be an array of rows");
    std::vector<double> r;
    for (const auto& x : row) {
      if (!x.is_number()) throw Error(ErrorCode::Parse, "policy gain must hold numbers");
      r.push_back(x.get<double>());
    }
    data.push_back(std::move(r));
  }
  Matrix L = Matrix::from_rows(data);
  if (!L.all_finite()) throw Error(ErrorCode::NonFinite, "policy gain has non-finite entries");
  return L;
}

}  // namespace poslin
