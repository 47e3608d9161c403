#include "poslin/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <json.hpp>

#include "poslin/error.hpp"

namespace poslin {

using nlohmann::json;

std::string_view to_string(NormKind k) {
  switch (k) {
    case NormKind::One: return "one";
    case NormKind::Two: return "two";
    case NormKind::Inf: return "inf";
  }
  return "?";
}

NormKind parse_norm_kind(std::string_view name) {
  if (name == "one") return NormKind::One;
  if (name == "two") return NormKind::Two;
  if (name == "inf") return NormKind::Inf;
  throw Error(ErrorCode::UnknownNorm, "unknown norm '" + std::string(name) +
                                          "' (expected one, two or inf)");
}

double norm(std::span<const double> v, NormKind kind) {
  switch (kind) {
    case NormKind::One: {
      double acc = 0.0;
      for (double x : v) acc += std::fabs(x);
      return acc;
    }
    case NormKind::Inf: return max_abs(v);
    case NormKind::Two: {
      // scaled to avoid overflow on large entries
      const double big = max_abs(v);
      if (big == 0.0) return 0.0;
      double acc = 0.0;
      for (double x : v) acc += (x / big) * (x / big);
      return big * std::sqrt(acc);
    }
  }
  return 0.0;
}

double dual_norm(std::span<const double> v, NormKind constraint_norm) {
  return norm(v, dual(constraint_norm));
}

Matrix abs_matrix(const Matrix& m) { return abs(m); }

namespace {

[[noreturn]] void dim_error(const std::string& what) {
  throw Error(ErrorCode::DimensionMismatch, what);
}

void require_finite(const Matrix& m, const char* name) {
  if (!m.all_finite()) throw Error(ErrorCode::NonFinite, std::string(name) + " has non-finite entries");
}

void require_finite(const Vector& v, const char* name) {
  if (!all_finite(v)) throw Error(ErrorCode::NonFinite, std::string(name) + " has non-finite entries");
}

void check_common(const Matrix& A, const Matrix& B, const Vector& s, const Vector& r) {
  const std::size_t n = A.rows();
  if (n == 0) dim_error("A must have at least one row");
  if (!A.is_square()) dim_error("A must be square, got " + std::to_string(A.rows()) + "x" + std::to_string(A.cols()));
  if (B.rows() != n) dim_error("B must have " + std::to_string(n) + " rows");
  if (B.cols() == 0) dim_error("B must have at least one column");
  if (s.size() != n) dim_error("s must have length " + std::to_string(n));
  if (r.size() != B.cols()) dim_error("r must have length " + std::to_string(B.cols()));
  require_finite(A, "A");
  require_finite(B, "B");
  require_finite(s, "s");
  require_finite(r, "r");
}

}  // namespace

void check_shape(const AbsProblem& p) {
  check_common(p.A, p.B, p.s, p.r);
  if (p.E.rows() != p.m() || p.E.cols() != p.n()) {
    dim_error("E must be " + std::to_string(p.m()) + "x" + std::to_string(p.n()));
  }
  require_finite(p.E, "E");
}

void check_shape(const NormProblem& p) {
  check_common(p.A, p.B, p.s, p.r);
  if (p.N.size() != p.n()) dim_error("N must have length " + std::to_string(p.n()));
  require_finite(p.N, "N");
}

void check_shape(const Problem& p) {
  std::visit([](const auto& q) { check_shape(q); }, p);
}

std::size_t state_dim(const Problem& p) {
  return std::visit([](const auto& q) { return q.n(); }, p);
}

std::size_t control_dim(const Problem& p) {
  return std::visit([](const auto& q) { return q.m(); }, p);
}

bool is_feasible_gain(const Matrix& L, const AbsProblem& p, double tol) {
  if (L.rows() != p.m() || L.cols() != p.n()) return false;
  for (std::size_t i = 0; i < L.rows(); ++i)
    for (std::size_t j = 0; j < L.cols(); ++j)
      if (std::fabs(L(i, j)) > p.E(i, j) + tol) return false;
  return true;
}

std::optional<Vector> gain_direction(const Matrix& L, const Vector& N, double tol) {
  const std::size_t m = L.rows();
  if (L.cols() != N.size()) return std::nullopt;
  const auto jmax = static_cast<std::size_t>(std::max_element(N.begin(), N.end()) - N.begin());
  Vector w(m, 0.0);
  if (!N.empty() && N[jmax] > 0.0) {
    for (std::size_t i = 0; i < m; ++i) w[i] = -L(i, jmax) / N[jmax];
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < N.size(); ++j)
      if (std::fabs(L(i, j) + w[i] * N[j]) > tol) return std::nullopt;
  return w;
}

bool is_feasible_gain(const Matrix& L, const NormProblem& p, double tol) {
  if (L.rows() != p.m() || L.cols() != p.n()) return false;
  const auto w = gain_direction(L, p.N, tol);
  return w && norm(*w, p.norm) <= 1.0 + tol;
}

bool is_feasible_gain(const Matrix& L, const Problem& p, double tol) {
  return std::visit([&](const auto& q) { return is_feasible_gain(L, q, tol); }, p);
}

Matrix closed_loop(const Matrix& A, const Matrix& B, const Matrix& L) { return A + B * L; }

namespace {

const json& field(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw Error(ErrorCode::Parse, std::string("missing field '") + key + "'");
  return *it;
}

double as_number(const json& v, const char* key) {
  if (!v.is_number()) throw Error(ErrorCode::Parse, std::string("field '") + key + "' must hold numbers");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw Error(ErrorCode::NonFinite, std::string("field '") + key + "' has a non-finite entry");
  return x;
}

Vector read_vector(const json& doc, const char* key) {
  const json& v = field(doc, key);
  if (!v.is_array()) throw Error(ErrorCode::Parse, std::string("field '") + key + "' must be an array");
  Vector out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(as_number(x, key));
  return out;
}

Matrix read_matrix(const json& doc, const char* key) {
  const json& v = field(doc, key);
  if (!v.is_array()) throw Error(ErrorCode::Parse, std::string("field '") + key + "' must be an array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& row : v) {
    if (!row.is_array()) throw Error(ErrorCode::Parse, std::string("field '") + key + "' must be an array of rows");
    std::vector<double> r;
    for (const auto& x : row) r.push_back(as_number(x, key));
    rows.push_back(std::move(r));
  }
  try {
    return Matrix::from_rows(rows);
  } catch (const Error& e) {
    throw Error(ErrorCode::DimensionMismatch, std::string(key) + ": " + e.what());
  }
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return rows;
}

}  // namespace

Problem parse_problem(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Parse, std::string("malformed JSON: ") + e.what());
  } catch (const json::out_of_range& e) {
    throw Error(ErrorCode::NonFinite, std::string("number out of range: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::Parse, "problem must be a JSON object");
  const json& cls = field(doc, "class");
  if (!cls.is_string()) throw Error(ErrorCode::Parse, "field 'class' must be a string");
  const auto name = cls.get<std::string>();

  if (name == "abs") {
    AbsProblem p{read_matrix(doc, "A"), read_matrix(doc, "B"), read_matrix(doc, "E"),
                 read_vector(doc, "s"), read_vector(doc, "r")};
    check_shape(p);
    return p;
  }
  if (name == "norm") {
    const json& nk = field(doc, "norm");
    if (!nk.is_string()) throw Error(ErrorCode::Parse, "field 'norm' must be a string");
    NormProblem p{read_matrix(doc, "A"), read_matrix(doc, "B"), read_vector(doc, "N"),
                  read_vector(doc, "s"), read_vector(doc, "r"), parse_norm_kind(nk.get<std::string>())};
    check_shape(p);
    return p;
  }
  throw Error(ErrorCode::Parse, "unknown problem class '" + name + "' (expected abs or norm)");
}

std::string serialize_problem(const Problem& p) {
  json doc;
  std::visit(
      [&](const auto& q) {
        using T = std::decay_t<decltype(q)>;
        doc["A"] = matrix_json(q.A);
        doc["B"] = matrix_json(q.B);
        doc["s"] = q.s;
        doc["r"] = q.r;
        if constexpr (std::is_same_v<T, AbsProblem>) {
          doc["class"] = "abs";
          doc["E"] = matrix_json(q.E);
        } else {
          doc["class"] = "norm";
          doc["N"] = q.N;
          doc["norm"] = std::string(to_string(q.norm));
        }
      },
      p);
  return doc.dump(2);
}

}  // namespace poslin
