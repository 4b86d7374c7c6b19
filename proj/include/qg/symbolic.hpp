#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace qg::sym {

/// Exact rational with 64-bit parts; overflow throws.
class Rational {
 public:
  Rational(std::int64_t p = 0, std::int64_t q = 1);
  std::int64_t num() const { return p_; }
  std::int64_t den() const { return q_; }
  double to_double() const { return static_cast<double>(p_) / static_cast<double>(q_); }
  std::string str() const;
  bool is_zero() const { return p_ == 0; }

  friend Rational operator+(Rational a, Rational b);
  friend Rational operator-(Rational a, Rational b);
  friend Rational operator*(Rational a, Rational b);
  friend Rational operator/(Rational a, Rational b);
  Rational operator-() const { return Rational(-p_, q_); }
  friend bool operator==(Rational a, Rational b) { return a.p_ == b.p_ && a.q_ == b.q_; }
  friend bool operator<(Rational a, Rational b);

 private:
  std::int64_t p_, q_;
};

/// Independent and dependent variables in a fixed order.
enum Var : int { T = 0, X = 1, Y = 2, PSI1 = 3, PSI2 = 4, PSI3 = 5 };
constexpr int kVars = 6;
const char* var_name(int v);

/// Occurrence of a named time function: (name, derivative order).
using Atom = std::pair<std::string, int>;

/// Product of variable powers and time-function atoms (atoms kept sorted).
struct Monomial {
  std::array<int, kVars> e{};
  std::vector<Atom> atoms;
  bool operator<(const Monomial& o) const;
  bool operator==(const Monomial& o) const { return e == o.e && atoms == o.atoms; }
  std::string str() const;
};

/// User-supplied time function with all derivatives: value(t, k) = u^(k)(t).
struct TimeFunction {
  std::string label = "1";
  std::function<double(double t, int k)> value = [](double, int k) { return k == 0 ? 1.0 : 0.0; };

  static TimeFunction constant(double c);
  static TimeFunction identity();  // u = t
  static TimeFunction sine();      // u = sin t
};

using FunctionTable = std::map<std::string, TimeFunction>;

/// Polynomial in (t, x, y, psi_i) with rational coefficients and time-function atoms.
class Expr {
 public:
  Expr() = default;
  Expr(Rational c);  // constant
  static Expr var(int v);
  static Expr fn(const std::string& name, int order = 0);

  const std::map<Monomial, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool operator==(const Expr& o) const { return terms_ == o.terms_; }

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  Expr operator-() const;

  /// Exact partial derivative; d/dt also advances every atom's derivative order.
  Expr diff(int v) const;
  /// Numerical value at (t, x, y, psi...), atoms from the table (missing names read as u = 1).
  double eval(const std::array<double, kVars>& point, const FunctionTable& fns) const;
  std::string str() const;

 private:
  void add_term(const Monomial& m, Rational c);
  std::map<Monomial, Rational> terms_;
};

/// Membership in the coefficient family {c, ct, cx, cy, c(x^2+y^2), ctx, cty, u(t), x u'(t), y u'(t), c psi_i}.
bool in_family(const Expr& e);

}  // namespace qg::sym
