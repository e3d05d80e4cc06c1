#include "radcav/scalar_model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "radcav/errors.hpp"

namespace radcav {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require(bool cond, const char* msg) {
  if (!cond) throw DomainError(msg);
}

// k-th derivative prefactor of (x+e)^p.
double falling(double p, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= (p - i);
  return r;
}

// Sum of c*falling(p,k)*(x+e)^(p-k) over the table. The prefactor is
// multiplied first so that terms with a vanishing derivative never touch
// pow with a negative exponent at x+e = 0.
double table_deriv(const std::vector<ScalarTerm>& terms, double x, int k) {
  double sum = 0.0;
  for (const auto& t : terms) {
    const double c = t.coeff * falling(t.expo, k);
    if (c == 0.0) continue;
    sum += c * std::pow(x + t.shift, t.expo - k);
  }
  return sum;
}

}  // namespace

ScalarModel ScalarModel::power_sum(std::vector<ScalarTerm> terms) {
  require(!terms.empty(), "power_sum: empty coefficient list");
  for (const auto& t : terms) {
    require(t.coeff > 0.0, "power_sum: coefficients must be positive");
    require(t.shift >= 0.0, "power_sum: shifts must be nonnegative");
  }
  ScalarModel m;
  m.kind_ = ScalarKind::power_sum;
  m.terms_ = std::move(terms);
  return m;
}

ScalarModel ScalarModel::inverse_power_sum(double linear, std::vector<ScalarTerm> terms) {
  require(linear >= 0.0, "inverse_power_sum: linear coefficient must be nonnegative");
  require(!terms.empty(), "inverse_power_sum: empty coefficient list");
  ScalarModel m;
  m.kind_ = ScalarKind::inverse_power_sum;
  if (linear > 0.0) m.terms_.push_back({linear, 1.0, 0.0});
  for (const auto& t : terms) {
    require(t.coeff > 0.0, "inverse_power_sum: coefficients must be positive");
    require(t.expo > 0.0, "inverse_power_sum: exponents must be positive");
    require(t.shift >= 0.0, "inverse_power_sum: shifts must be nonnegative");
    m.terms_.push_back({t.coeff, -t.expo, t.shift});
  }
  return m;
}

ScalarModel ScalarModel::log_entropy(double coeff) {
  require(coeff > 0.0, "log_entropy: coefficient must be positive");
  ScalarModel m;
  m.kind_ = ScalarKind::log_entropy;
  m.log_coeff_ = coeff;
  return m;
}

ScalarModel ScalarModel::quadratic(double coeff) {
  require(coeff > 0.0, "quadratic: coefficient must be positive");
  ScalarModel m;
  m.kind_ = ScalarKind::quadratic;
  m.terms_.push_back({coeff, 2.0, 0.0});
  return m;
}

ScalarModel ScalarModel::custom(std::vector<ScalarTerm> terms) {
  require(!terms.empty(), "custom: empty coefficient list");
  ScalarModel m;
  m.kind_ = ScalarKind::custom;
  m.terms_ = std::move(terms);
  return m;
}

double ScalarModel::f(double x) const {
  if (kind_ == ScalarKind::log_entropy) return log_coeff_ * (x - 1.0) * std::log(x);
  return table_deriv(terms_, x, 0);
}

double ScalarModel::d1(double x) const {
  if (kind_ == ScalarKind::log_entropy) return log_coeff_ * (std::log(x) + 1.0 - 1.0 / x);
  return table_deriv(terms_, x, 1);
}

double ScalarModel::d2(double x) const {
  if (kind_ == ScalarKind::log_entropy) return log_coeff_ * (1.0 / x + 1.0 / (x * x));
  return table_deriv(terms_, x, 2);
}

double ScalarModel::d3(double x) const {
  if (kind_ == ScalarKind::log_entropy) {
    const double x2 = x * x;
    return log_coeff_ * (-1.0 / x2 - 2.0 / (x2 * x));
  }
  return table_deriv(terms_, x, 3);
}

double ScalarModel::gamma_limit(int d) const {
  // d1(x) ~ sum c p x^{p-1}; compare each power against x^{d-2}.
  if (kind_ == ScalarKind::log_entropy) {
    // d1 ~ ln x: finite limit 0 iff d >= 3.
    return d >= 3 ? 0.0 : kNaN;
  }
  double gamma = 0.0;
  for (const auto& t : terms_) {
    const double c = t.coeff * t.expo;
    if (c == 0.0) continue;
    if (t.expo - 1.0 > d - 2.0) return kNaN;
    if (t.expo - 1.0 == d - 2.0) gamma += c;
  }
  return gamma >= 0.0 ? gamma : kNaN;
}

double ScalarModel::d1_limit_zero() const {
  if (kind_ == ScalarKind::log_entropy) return -kInf;
  // Terms with shift > 0 are regular at 0; among shift-0 terms the smallest
  // exponent dominates. Exponents below 1 make the derivative blow up.
  double finite = 0.0;
  double blow_expo = kInf;
  double blow_coeff = 0.0;
  for (const auto& t : terms_) {
    const double c = t.coeff * t.expo;
    if (c == 0.0) continue;
    if (t.shift > 0.0) {
      finite += c * std::pow(t.shift, t.expo - 1.0);
    } else if (t.expo < 1.0) {
      if (t.expo < blow_expo) {
        blow_expo = t.expo;
        blow_coeff = c;
      } else if (t.expo == blow_expo) {
        blow_coeff += c;
      }
    } else if (t.expo == 1.0) {
      finite += c;
    }
  }
  if (blow_expo < 1.0 && blow_coeff != 0.0) return blow_coeff > 0.0 ? kInf : -kInf;
  return finite;
}

double ScalarModel::d1_limit_inf() const {
  if (kind_ == ScalarKind::log_entropy) return kInf;
  // The largest exponent with nonvanishing derivative dominates at infinity.
  double top_expo = -kInf;
  double top_coeff = 0.0;
  for (const auto& t : terms_) {
    const double c = t.coeff * t.expo;
    if (c == 0.0) continue;
    if (t.expo > top_expo) {
      top_expo = t.expo;
      top_coeff = c;
    } else if (t.expo == top_expo) {
      top_coeff += c;
    }
  }
  if (top_coeff == 0.0) return 0.0;
  if (top_expo > 1.0) return top_coeff > 0.0 ? kInf : -kInf;
  if (top_expo == 1.0) return top_coeff;
  return 0.0;
}

double ScalarModel::x_d1_limit_zero() const {
  if (kind_ == ScalarKind::log_entropy) return -log_coeff_;
  // x*d1 ~ sum c p x^p over shift-0 terms; negative exponents dominate.
  double blow_expo = kInf;
  double blow_coeff = 0.0;
  for (const auto& t : terms_) {
    const double c = t.coeff * t.expo;
    if (c == 0.0 || t.shift > 0.0) continue;
    if (t.expo < blow_expo) {
      blow_expo = t.expo;
      blow_coeff = c;
    } else if (t.expo == blow_expo) {
      blow_coeff += c;
    }
  }
  if (blow_expo < 0.0 && blow_coeff != 0.0) return blow_coeff > 0.0 ? kInf : -kInf;
  return 0.0;
}

std::string ScalarModel::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case ScalarKind::log_entropy:
      os << "log_entropy(c=" << log_coeff_ << ")";
      return os.str();
    case ScalarKind::quadratic:
      os << "quadratic(c=" << terms_[0].coeff << ")";
      return os.str();
    case ScalarKind::power_sum:
      os << "power_sum";
      break;
    case ScalarKind::inverse_power_sum:
      os << "inverse_power_sum";
      break;
    case ScalarKind::custom:
      os << "custom";
      break;
  }
  os << "[";
  for (size_t i = 0; i < terms_.size(); ++i) {
    if (i) os << "; ";
    os << terms_[i].coeff << "*(x+" << terms_[i].shift << ")^" << terms_[i].expo;
  }
  os << "]";
  return os.str();
}

}  // namespace radcav
