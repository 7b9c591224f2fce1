#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "prefstab/rational.hpp"

namespace prefstab {

// Sparse multivariate polynomial with exact rational coefficients.
// Variables are identified by index; callers attach names only when printing.
class Poly {
 public:
  using Monomial = std::vector<unsigned>;  // exponent per variable

  Poly() : nvars_(0) {}
  explicit Poly(int nvars) : nvars_(nvars) {}

  static Poly constant(int nvars, const Rational& c) {
    Poly p(nvars);
    if (c != 0) p.terms_[Monomial(nvars, 0)] = c;
    return p;
  }
  static Poly variable(int nvars, int var, const Rational& coeff = 1) {
    Poly p(nvars);
    Monomial m(nvars, 0);
    m[var] = 1;
    if (coeff != 0) p.terms_[m] = coeff;
    return p;
  }

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  const std::map<Monomial, Rational>& terms() const { return terms_; }

  Rational coeff(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
  }
  Rational constant_term() const { return coeff(Monomial(nvars_, 0)); }

  unsigned total_degree() const {
    unsigned d = 0;
    for (auto& [m, c] : terms_) {
      unsigned s = 0;
      for (unsigned e : m) s += e;
      d = std::max(d, s);
    }
    return d;
  }

  Poly& operator+=(const Poly& o) {
    check_vars(o);
    for (auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    check_vars(o);
    for (auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }

  friend Poly operator*(const Poly& a, const Poly& b) {
    a.check_vars(b);
    Poly out(a.nvars_);
    for (auto& [ma, ca] : a.terms_)
      for (auto& [mb, cb] : b.terms_) {
        Monomial m(a.nvars_);
        for (int i = 0; i < a.nvars_; ++i) m[i] = ma[i] + mb[i];
        out.add_term(m, ca * cb);
      }
    return out;
  }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  Poly scaled(const Rational& c) const {
    Poly out(nvars_);
    if (c == 0) return out;
    for (auto& [m, k] : terms_) out.terms_[m] = k * c;
    return out;
  }
  Poly negated() const { return scaled(-1); }

  Rational eval(const std::vector<Rational>& point) const {
    Rational total = 0;
    for (auto& [m, c] : terms_) {
      Rational t = c;
      for (int i = 0; i < nvars_; ++i)
        for (unsigned e = 0; e < m[i]; ++e) t *= point[i];
      total += t;
    }
    return total;
  }

  // Substitutes every variable by t * weight[var]; returns univariate
  // coefficients in t (index = degree).
  std::vector<Rational> restrict_to_ray(const std::vector<Rational>& weight) const {
    std::vector<Rational> coeffs;
    for (auto& [m, c] : terms_) {
      unsigned deg = 0;
      Rational k = c;
      for (int i = 0; i < nvars_; ++i) {
        deg += m[i];
        for (unsigned e = 0; e < m[i]; ++e) k *= weight[i];
      }
      if (coeffs.size() <= deg) coeffs.resize(deg + 1, Rational(0));
      coeffs[deg] += k;
    }
    while (!coeffs.empty() && coeffs.back() == 0) coeffs.pop_back();
    return coeffs;
  }
  std::vector<Rational> restrict_to_diagonal() const {
    return restrict_to_ray(std::vector<Rational>(nvars_, Rational(1)));
  }

  // Substitutes one variable by an exact rational; result keeps the same
  // variable universe (the substituted one no longer appears).
  Poly substituted(int var, const Rational& value) const {
    Poly out(nvars_);
    for (auto& [m, c] : terms_) {
      Rational k = c;
      for (unsigned e = 0; e < m[var]; ++e) k *= value;
      Monomial mm = m;
      mm[var] = 0;
      out.add_term(mm, k);
    }
    return out;
  }

  bool all_coeffs_nonnegative() const {
    for (auto& [m, c] : terms_)
      if (c < 0) return false;
    return true;
  }

  bool operator==(const Poly& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }

  // "3*e1^2*e2 + 1/2*e1" with caller-provided variable names; deterministic
  // (graded-lex via the underlying map order).
  std::string str(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    std::string out;
    for (auto& [m, c] : terms_) {
      if (!out.empty()) out += " + ";
      std::string mono;
      for (int i = 0; i < nvars_; ++i) {
        if (m[i] == 0) continue;
        if (!mono.empty()) mono += "*";
        mono += names[i];
        if (m[i] > 1) mono += "^" + std::to_string(m[i]);
      }
      if (mono.empty())
        out += format_rational(c);
      else if (c == 1)
        out += mono;
      else
        out += format_rational(c) + "*" + mono;
    }
    return out;
  }

 private:
  void check_vars(const Poly& o) const {
    if (nvars_ != o.nvars_) throw StructuralError("polynomial variable mismatch");
  }
  void add_term(const Monomial& m, const Rational& c) {
    if (c == 0) return;
    auto [it, fresh] = terms_.emplace(m, c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  int nvars_;
  std::map<Monomial, Rational> terms_;
};

// ---- univariate helpers (coefficients by ascending degree) ----

using UPoly = std::vector<Rational>;

inline UPoly upoly_trim(UPoly p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
  return p;
}
inline bool upoly_is_zero(const UPoly& p) { return upoly_trim(p).empty(); }
inline int upoly_degree(const UPoly& p) { return static_cast<int>(upoly_trim(p).size()) - 1; }

inline Rational upoly_eval(const UPoly& p, const Rational& x) {
  Rational acc = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

inline UPoly upoly_derivative(const UPoly& p) {
  UPoly d;
  for (size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * Rational(static_cast<long>(i)));
  return upoly_trim(d);
}

inline UPoly upoly_rem(UPoly a, const UPoly& b) {
  a = upoly_trim(a);
  UPoly bb = upoly_trim(b);
  if (bb.empty()) throw StructuralError("polynomial division by zero");
  while (a.size() >= bb.size() && !a.empty()) {
    Rational f = a.back() / bb.back();
    size_t shift = a.size() - bb.size();
    for (size_t i = 0; i < bb.size(); ++i) a[shift + i] -= f * bb[i];
    a = upoly_trim(a);
    if (a.size() < bb.size()) break;
  }
  return a;
}

inline std::vector<UPoly> sturm_chain(const UPoly& p) {
  std::vector<UPoly> chain;
  UPoly p0 = upoly_trim(p);
  if (p0.empty()) return chain;
  chain.push_back(p0);
  UPoly p1 = upoly_derivative(p0);
  while (!p1.empty()) {
    chain.push_back(p1);
    UPoly r = upoly_rem(chain[chain.size() - 2], p1);
    for (auto& c : r) c = -c;
    p1 = upoly_trim(r);
  }
  return chain;
}

inline int sign_changes_at(const std::vector<UPoly>& chain, const Rational& x) {
  int changes = 0, last = 0;
  for (auto& p : chain) {
    Rational v = upoly_eval(p, x);
    int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

// Number of distinct real roots in (a, b].
inline int count_roots(const UPoly& p, const Rational& a, const Rational& b) {
  UPoly q = upoly_trim(p);
  if (q.empty()) throw StructuralError("root count of zero polynomial");
  auto chain = sturm_chain(q);
  return sign_changes_at(chain, a) - sign_changes_at(chain, b);
}

// True iff p(x) > 0 for every x in the open interval (a, b).
inline bool upoly_positive_on(const UPoly& p, const Rational& a, const Rational& b) {
  UPoly q = upoly_trim(p);
  if (q.empty()) return false;
  Rational mid = (a + b) / 2;
  if (upoly_eval(q, mid) <= 0) return false;
  // No interior root: count over (a, b] and discard a root exactly at b.
  int roots = count_roots(q, a, b);
  if (roots == 0) return true;
  if (roots == 1 && upoly_eval(q, b) == 0) {
    // Single root at the right endpoint; positivity at mid plus no other
    // root means no interior sign change.
    return count_roots(q, a, mid) == 0;
  }
  return false;
}

// Sign of p(t) for all sufficiently small t > 0: sign of the lowest-order
// nonzero coefficient (0 for the zero polynomial).
inline int sign_near_zero_plus(const UPoly& p) {
  for (auto& c : p) {
    if (c > 0) return 1;
    if (c < 0) return -1;
  }
  return 0;
}

// All rational roots of p (exact), via the rational root theorem applied to
// the primitive integer form.
inline std::vector<Rational> rational_roots(const UPoly& p) {
  UPoly q = upoly_trim(p);
  std::vector<Rational> roots;
  if (q.empty() || q.size() == 1) return roots;
  // Clear denominators.
  Integer lcm = 1;
  for (auto& c : q) lcm = boost::multiprecision::lcm(lcm, denominator(c));
  std::vector<Integer> z;
  for (auto& c : q) z.push_back(numerator(c) * (lcm / denominator(c)));
  // Strip trailing zero coefficients at degree 0 (root at 0).
  size_t low = 0;
  while (low < z.size() && z[low] == 0) ++low;
  if (low > 0) roots.push_back(Rational(0));
  if (low + 1 >= z.size()) return roots;
  Integer a0 = boost::multiprecision::abs(z[low]);
  Integer an = boost::multiprecision::abs(z.back());
  auto divisors = [](const Integer& n) {
    std::vector<Integer> ds;
    for (Integer d = 1; d * d <= n; ++d)
      if (n % d == 0) {
        ds.push_back(d);
        if (d * d != n) ds.push_back(n / d);
      }
    return ds;
  };
  for (auto& pnum : divisors(a0))
    for (auto& pden : divisors(an)) {
      for (int s : {1, -1}) {
        Rational cand(pnum * s, pden);
        if (upoly_eval(q, cand) == 0) roots.push_back(cand);
      }
    }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return roots;
}

// Smallest root in the open interval (a, b), exact when rational.
// Returns nullopt when there is no root there; throws SolverLimitError when
// a root exists but is irrational (callers treat that as a solver limit).
inline std::optional<Rational> min_root_in(const UPoly& p, const Rational& a, const Rational& b) {
  UPoly q = upoly_trim(p);
  if (q.empty()) throw StructuralError("root query on zero polynomial");
  Rational lo = a, hi = b;
  // Open interval: nudge endpoints off exact roots.
  int total = count_roots(q, lo, hi) - (upoly_eval(q, hi) == 0 ? 1 : 0);
  if (total <= 0) return std::nullopt;
  auto rats = rational_roots(q);
  std::vector<Rational> inside;
  for (auto& r : rats)
    if (r > a && r < b) inside.push_back(r);
  if (static_cast<int>(inside.size()) == total) return inside.front();
  if (!inside.empty()) {
    // Mixed case: make sure no irrational root precedes the smallest
    // rational one.
    Rational first = inside.front();
    int before = count_roots(q, a, first) - 1;  // (a, first] minus `first`
    if (before == 0) return first;
  }
  throw SolverLimitError("irrational root encountered in exact root query");
}

}  // namespace prefstab
