#pragma once

// Projective special real cubic models h(t) = (1/6) k_abc t^a t^b t^c.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "qklab/linalg.hpp"

namespace qklab {

/// One independent coefficient k_abc with a <= b <= c (0-based). The
/// multiplicity counts the distinct orderings of (a,b,c) in the full sum.
struct CubicTerm {
  int a = 0;
  int b = 0;
  int c = 0;
  double k = 0.0;
  int multiplicity = 1;
};

/// Infinitesimal element of Aff_H: (d lambda, a in aut(H), dv) at the identity.
struct AffineGenerator {
  std::string name;
  double lambda_rate = 0.0;
  Matrix<double> a;
  std::vector<double> v_rate;
};

struct CubicModel {
  std::string name;
  int m = 0;
  std::vector<CubicTerm> terms;
  std::string domain_id = "positive_orthant";
  std::vector<std::vector<double>> h_samples;
  std::vector<double> t_lo;
  std::vector<double> t_hi;
  std::vector<Matrix<double>> aut_generators;
  std::vector<Matrix<double>> aut_algebra;

  int n() const { return m + 1; }

  /// Fully symmetric coefficient k_abc (0-based indices).
  double k(int a, int b, int c) const;

  /// (1/6) k_abc t^a t^b t^c over any commutative ring scalar.
  template <class S>
  S cubic(std::span<const S> t) const {
    S sum(0.0);
    for (const CubicTerm& term : terms) {
      const double coef = term.k * term.multiplicity / 6.0;
      const auto ua = static_cast<std::size_t>(term.a);
      const auto ub = static_cast<std::size_t>(term.b);
      const auto uc = static_cast<std::size_t>(term.c);
      sum += S(coef) * t[ua] * t[ub] * t[uc];
    }
    return sum;
  }

  /// Membership of t in U by the model's built-in predicate.
  bool in_domain(std::span<const double> t) const;

  /// Lie algebra generators of Aff_H used by the Killing suites: scaling,
  /// translations along each t-axis, and the model's aut(H) generators.
  std::vector<AffineGenerator> affine_generators() const;
};

/// Adds k to the coefficient of the unordered triple {a,b,c}.
void add_term(CubicModel& model, int a, int b, int c, double k);

CubicModel builtin_model(const std::string& name);
CubicModel load_model(const std::filesystem::path& path);
CubicModel model_from_json_text(const std::string& text);
std::string model_to_json_text(const CubicModel& model);

}  // namespace qklab
