#pragma once

#include <string>
#include <vector>

namespace radcav {

enum class ScalarKind { power_sum, inverse_power_sum, log_entropy, quadratic, custom };

// One monomial coeff*(x+shift)^expo.
struct ScalarTerm {
  double coeff = 0.0;
  double expo = 0.0;
  double shift = 0.0;
};

// Scalar component g or h of a separable stored energy.
//
// Families and their admissible coefficients:
//   power_sum          sum_k c_k (x+e_k)^{p_k}            c_k > 0, e_k >= 0
//   inverse_power_sum  a x + sum_k c_k (x+e_k)^{-p_k}     a >= 0, c_k > 0, p_k > 0, e_k >= 0
//   log_entropy        c (x-1) ln x                       c > 0
//   quadratic          c x^2                              c > 0
//   custom             sum_k c_k (x+e_k)^{p_k}            unrestricted signs
//
// All families except log_entropy normalize to a signed monomial table;
// evaluation and the closed-form limits below work off that table.
class ScalarModel {
 public:
  static ScalarModel power_sum(std::vector<ScalarTerm> terms);
  static ScalarModel inverse_power_sum(double linear, std::vector<ScalarTerm> terms);
  static ScalarModel log_entropy(double coeff);
  static ScalarModel quadratic(double coeff);
  static ScalarModel custom(std::vector<ScalarTerm> terms);

  ScalarKind kind() const { return kind_; }
  const std::vector<ScalarTerm>& terms() const { return terms_; }
  double log_coeff() const { return log_coeff_; }

  double f(double x) const;
  double d1(double x) const;
  double d2(double x) const;
  double d3(double x) const;

  // lim_{x->inf} d1(x)/x^{d-2}; NaN when the limit does not exist finitely.
  double gamma_limit(int d) const;
  // One-sided limits of d1; +-inf encoded as HUGE_VAL.
  double d1_limit_zero() const;
  double d1_limit_inf() const;
  // lim_{x->0+} x*d1(x), the slope-weighted origin limit.
  double x_d1_limit_zero() const;

  std::string describe() const;

 private:
  ScalarModel() = default;
  ScalarKind kind_ = ScalarKind::custom;
  std::vector<ScalarTerm> terms_;
  double log_coeff_ = 0.0;
};

}  // namespace radcav
