#include "qklab/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qklab {

namespace {

using nlohmann::json;

int multiplicity_of(int a, int b, int c) {
  if (a == b && b == c) return 1;
  if (a == b || b == c || a == c) return 3;
  return 6;
}

void validate(const CubicModel& model) {
  if (model.m < 1) throw Error(ErrorKind::Config, "m must be >= 1");
  if (model.terms.empty()) throw Error(ErrorKind::Config, "model has no k coefficients");
  if (model.domain_id != "positive_orthant" && model.domain_id != "h_positive")
    throw Error(ErrorKind::Config, "unknown domain predicate '" + model.domain_id + "'");
  const auto um = static_cast<std::size_t>(model.m);
  if (model.t_lo.size() != um || model.t_hi.size() != um)
    throw Error(ErrorKind::Config, "t sampling box must have m entries");
  for (const auto& t : model.h_samples) {
    if (t.size() != um) throw Error(ErrorKind::Config, "h sample of wrong length");
    const double h = model.cubic<double>(t);
    if (std::abs(h - 1.0) > 1e-12)
      throw Error(ErrorKind::Config, "declared H sample has h = " + std::to_string(h));
  }
  for (const auto& A : model.aut_generators)
    if (A.rows() != model.m || A.cols() != model.m) throw Error(ErrorKind::Config, "aut generator must be m x m");
  for (const auto& a : model.aut_algebra)
    if (a.rows() != model.m || a.cols() != model.m) throw Error(ErrorKind::Config, "aut algebra element must be m x m");
}

Matrix<double> matrix_from_json(const json& j) {
  const int rows = static_cast<int>(j.size());
  const int cols = rows ? static_cast<int>(j.at(0).size()) : 0;
  Matrix<double> m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j.at(static_cast<std::size_t>(i)).size()) != cols)
      throw Error(ErrorKind::Config, "ragged matrix");
    for (int k = 0; k < cols; ++k) m(i, k) = j.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(k)).get<double>();
  }
  return m;
}

json matrix_to_json(const Matrix<double>& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(row);
  }
  return rows;
}

Matrix<double> permutation(const std::vector<int>& image) {
  const int m = static_cast<int>(image.size());
  Matrix<double> p(m, m);
  for (int i = 0; i < m; ++i) p(image[static_cast<std::size_t>(i)], i) = 1.0;
  return p;
}

}  // namespace

void add_term(CubicModel& model, int a, int b, int c, double k) {
  std::array<int, 3> idx{a, b, c};
  std::sort(idx.begin(), idx.end());
  if (idx[0] < 0 || idx[2] >= model.m) throw Error(ErrorKind::Config, "k index out of range");
  for (CubicTerm& t : model.terms) {
    if (t.a == idx[0] && t.b == idx[1] && t.c == idx[2]) {
      t.k += k;
      return;
    }
  }
  model.terms.push_back({idx[0], idx[1], idx[2], k, multiplicity_of(idx[0], idx[1], idx[2])});
}

double CubicModel::k(int a, int b, int c) const {
  std::array<int, 3> idx{a, b, c};
  std::sort(idx.begin(), idx.end());
  for (const CubicTerm& t : terms)
    if (t.a == idx[0] && t.b == idx[1] && t.c == idx[2]) return t.k;
  return 0.0;
}

bool CubicModel::in_domain(std::span<const double> t) const {
  if (static_cast<int>(t.size()) != m) return false;
  if (domain_id == "positive_orthant") {
    return std::all_of(t.begin(), t.end(), [](double x) { return x > 0.0; });
  }
  return cubic<double>(t) > 0.0;
}

std::vector<AffineGenerator> CubicModel::affine_generators() const {
  std::vector<AffineGenerator> out;
  const auto um = static_cast<std::size_t>(m);
  out.push_back({"scaling", 1.0, Matrix<double>(m, m), std::vector<double>(um, 0.0)});
  for (int a = 0; a < m; ++a) {
    std::vector<double> dv(um, 0.0);
    dv[static_cast<std::size_t>(a)] = 1.0;
    out.push_back({"translation_" + std::to_string(a + 1), 0.0, Matrix<double>(m, m), dv});
  }
  for (std::size_t i = 0; i < aut_algebra.size(); ++i)
    out.push_back({"aut_" + std::to_string(i + 1), 0.0, aut_algebra[i], std::vector<double>(um, 0.0)});
  return out;
}

CubicModel builtin_model(const std::string& name) {
  CubicModel model;
  model.name = name;
  if (name == "E1") {
    model.m = 1;
    add_term(model, 0, 0, 0, 6.0);
    model.h_samples = {{1.0}};
    model.t_lo = {0.5};
    model.t_hi = {2.0};
  } else if (name == "E2") {
    model.m = 3;
    add_term(model, 0, 1, 2, 1.0);
    model.h_samples = {{1.0, 1.0, 1.0}, {2.0, 0.5, 1.0}};
    model.t_lo = {0.5, 0.5, 0.5};
    model.t_hi = {2.0, 2.0, 2.0};
    model.aut_generators = {permutation({1, 2, 0}), permutation({1, 0, 2})};
    Matrix<double> d1(3, 3), d2(3, 3);
    d1(0, 0) = 1.0;
    d1(1, 1) = -1.0;
    d2(1, 1) = 1.0;
    d2(2, 2) = -1.0;
    model.aut_algebra = {d1, d2};
  } else {
    throw Error(ErrorKind::Config, "unknown builtin model '" + name + "'");
  }
  validate(model);
  return model;
}

CubicModel model_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("model file: ") + e.what());
  }
  CubicModel model;
  try {
    model.name = j.value("name", std::string("custom"));
    model.m = j.at("m").get<int>();
    for (const auto& term : j.at("k")) {
      const auto& idx = term.at("indices");
      if (idx.size() != 3) throw Error(ErrorKind::Config, "k indices must be triples");
      // Indices in the file are 1-based, as in t^1 .. t^m.
      add_term(model, idx[0].get<int>() - 1, idx[1].get<int>() - 1, idx[2].get<int>() - 1, term.at("value").get<double>());
    }
    model.domain_id = j.value("domain", std::string("positive_orthant"));
    if (j.contains("h_samples")) model.h_samples = j.at("h_samples").get<std::vector<std::vector<double>>>();
    const auto& box = j.at("t_box");
    model.t_lo = box.at("lo").get<std::vector<double>>();
    model.t_hi = box.at("hi").get<std::vector<double>>();
    if (j.contains("aut_generators"))
      for (const auto& g : j.at("aut_generators")) model.aut_generators.push_back(matrix_from_json(g));
    if (j.contains("aut_algebra"))
      for (const auto& g : j.at("aut_algebra")) model.aut_algebra.push_back(matrix_from_json(g));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("model file: ") + e.what());
  }
  validate(model);
  return model;
}

CubicModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot read model file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json_text(ss.str());
}

std::string model_to_json_text(const CubicModel& model) {
  json j;
  j["name"] = model.name;
  j["m"] = model.m;
  j["k"] = json::array();
  for (const CubicTerm& t : model.terms) j["k"].push_back({{"indices", {t.a + 1, t.b + 1, t.c + 1}}, {"value", t.k}});
  j["domain"] = model.domain_id;
  j["h_samples"] = model.h_samples;
  j["t_box"] = {{"lo", model.t_lo}, {"hi", model.t_hi}};
  j["aut_generators"] = json::array();
  for (const auto& g : model.aut_generators) j["aut_generators"].push_back(matrix_to_json(g));
  j["aut_algebra"] = json::array();
  for (const auto& g : model.aut_algebra) j["aut_algebra"].push_back(matrix_to_json(g));
  return j.dump(2);
}

}  // namespace qklab
