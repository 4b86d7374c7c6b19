#include "qg/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qg/error.hpp"

namespace qg::sym {
namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw InvalidArgument("Rational: overflow");
  return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw InvalidArgument("Rational: overflow");
  return r;
}

}  // namespace

Rational::Rational(std::int64_t p, std::int64_t q) {
  if (q == 0) throw InvalidArgument("Rational: zero denominator");
  if (q < 0) p = -p, q = -q;
  const std::int64_t g = std::gcd(p < 0 ? -p : p, q);
  p_ = g ? p / g : 0;
  q_ = g ? q / g : 1;
}

std::string Rational::str() const {
  return q_ == 1 ? std::to_string(p_) : std::to_string(p_) + "/" + std::to_string(q_);
}

Rational operator+(Rational a, Rational b) {
  const std::int64_t g = std::gcd(a.q_, b.q_);
  return Rational(checked_add(checked_mul(a.p_, b.q_ / g), checked_mul(b.p_, a.q_ / g)), checked_mul(a.q_, b.q_ / g));
}
Rational operator-(Rational a, Rational b) { return a + (-b); }
Rational operator*(Rational a, Rational b) {
  const std::int64_t g1 = std::gcd(a.p_ < 0 ? -a.p_ : a.p_, b.q_), g2 = std::gcd(b.p_ < 0 ? -b.p_ : b.p_, a.q_);
  const std::int64_t d1 = g1 ? g1 : 1, d2 = g2 ? g2 : 1;
  return Rational(checked_mul(a.p_ / d1, b.p_ / d2), checked_mul(a.q_ / d2, b.q_ / d1));
}
Rational operator/(Rational a, Rational b) {
  if (b.is_zero()) throw InvalidArgument("Rational: division by zero");
  return a * Rational(b.q_, b.p_);
}
bool operator<(Rational a, Rational b) { return (a - b).p_ < 0; }

const char* var_name(int v) {
  static const char* names[kVars] = {"t", "x", "y", "psi1", "psi2", "psi3"};
  return v >= 0 && v < kVars ? names[v] : "?";
}

bool Monomial::operator<(const Monomial& o) const {
  if (e != o.e) return e < o.e;
  return atoms < o.atoms;
}

std::string Monomial::str() const {
  std::string s;
  for (int v = 0; v < kVars; ++v) {
    if (e[v] == 0) continue;
    if (!s.empty()) s += "*";
    s += var_name(v);
    if (e[v] > 1) s += "^" + std::to_string(e[v]);
  }
  for (const auto& [name, k] : atoms) {
    if (!s.empty()) s += "*";
    s += name + std::string(k, '\'') + "(t)";
  }
  return s;
}

TimeFunction TimeFunction::constant(double c) {
  return {std::to_string(c), [c](double, int k) { return k == 0 ? c : 0.0; }};
}

TimeFunction TimeFunction::identity() {
  return {"t", [](double t, int k) { return k == 0 ? t : (k == 1 ? 1.0 : 0.0); }};
}

TimeFunction TimeFunction::sine() {
  return {"sin t", [](double t, int k) {
            switch (k % 4) {
              case 0: return std::sin(t);
              case 1: return std::cos(t);
              case 2: return -std::sin(t);
              default: return -std::cos(t);
            }
          }};
}

Expr::Expr(Rational c) {
  if (!c.is_zero()) terms_[Monomial{}] = c;
}

Expr Expr::var(int v) {
  if (v < 0 || v >= kVars) throw InvalidArgument("Expr::var: unknown variable");
  Monomial m;
  m.e[v] = 1;
  Expr r;
  r.terms_[m] = Rational(1);
  return r;
}

Expr Expr::fn(const std::string& name, int order) {
  Monomial m;
  m.atoms.push_back({name, order});
  Expr r;
  r.terms_[m] = Rational(1);
  return r;
}

void Expr::add_term(const Monomial& m, Rational c) {
  if (c.is_zero()) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(m, c);
    return;
  }
  it->second = it->second + c;
  if (it->second.is_zero()) terms_.erase(it);
}

Expr operator+(const Expr& a, const Expr& b) {
  Expr r = a;
  for (const auto& [m, c] : b.terms_) r.add_term(m, c);
  return r;
}

Expr Expr::operator-() const {
  Expr r;
  for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
  return r;
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
  Expr r;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) {
      Monomial m;
      for (int v = 0; v < kVars; ++v) m.e[v] = ma.e[v] + mb.e[v];
      m.atoms = ma.atoms;
      m.atoms.insert(m.atoms.end(), mb.atoms.begin(), mb.atoms.end());
      std::sort(m.atoms.begin(), m.atoms.end());
      r.add_term(m, ca * cb);
    }
  return r;
}

Expr Expr::diff(int v) const {
  if (v < 0 || v >= kVars) throw InvalidArgument("Expr::diff: unknown variable");
  Expr r;
  for (const auto& [m, c] : terms_) {
    if (m.e[v] > 0) {
      Monomial d = m;
      d.e[v] -= 1;
      r.add_term(d, c * Rational(m.e[v]));
    }
    if (v == T) {
      // product rule over the atoms
      for (std::size_t k = 0; k < m.atoms.size(); ++k) {
        Monomial d = m;
        d.atoms[k].second += 1;
        std::sort(d.atoms.begin(), d.atoms.end());
        r.add_term(d, c);
      }
    }
  }
  return r;
}

double Expr::eval(const std::array<double, kVars>& p, const FunctionTable& fns) const {
  double acc = 0.0;
  for (const auto& [m, c] : terms_) {
    double v = c.to_double();
    for (int q = 0; q < kVars; ++q)
      for (int k = 0; k < m.e[q]; ++k) v *= p[q];
    for (const auto& [name, k] : m.atoms) {
      auto it = fns.find(name);
      v *= it == fns.end() ? (k == 0 ? 1.0 : 0.0) : it->second.value(p[T], k);
    }
    acc += v;
  }
  return acc;
}

std::string Expr::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    const std::string ms = m.str();
    Rational a = c;
    if (!first) {
      os << (c < Rational(0) ? " - " : " + ");
      if (c < Rational(0)) a = -c;
    }
    if (ms.empty())
      os << a.str();
    else if (a == Rational(1))
      os << ms;
    else if (a == Rational(-1))
      os << "-" << ms;
    else
      os << a.str() << "*" << ms;
    first = false;
  }
  return os.str();
}

bool in_family(const Expr& e) {
  const auto& t = e.terms();
  if (t.empty()) return true;
  if (t.size() == 2) {
    Monomial xx, yy;
    xx.e[X] = 2;
    yy.e[Y] = 2;
    auto a = t.find(xx), b = t.find(yy);
    return a != t.end() && b != t.end() && a->second == b->second;
  }
  if (t.size() != 1) return false;
  const Monomial& m = t.begin()->first;
  int degree = 0;
  for (int v = 0; v < kVars; ++v) degree += m.e[v];
  if (m.atoms.empty()) {
    if (degree <= 1) return true;  // c, ct, cx, cy, c psi_i
    return degree == 2 && m.e[T] == 1 && (m.e[X] == 1 || m.e[Y] == 1);
  }
  if (m.atoms.size() != 1) return false;
  const int k = m.atoms.front().second;
  if (k == 0) return degree == 0;
  return k == 1 && degree == 1 && (m.e[X] == 1 || m.e[Y] == 1);
}

}  // namespace qg::sym
