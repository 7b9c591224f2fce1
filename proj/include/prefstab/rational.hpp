#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <string>

namespace prefstab {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

struct StructuralError : std::runtime_error {
  explicit StructuralError(const std::string& what) : std::runtime_error(what) {}
};

struct ContractError : std::runtime_error {
  explicit ContractError(const std::string& what) : std::runtime_error(what) {}
};

struct SolverLimitError : std::runtime_error {
  explicit SolverLimitError(const std::string& what) : std::runtime_error(what) {}
};

// Accepts "p/q", "p", or "-p/q"; whitespace is not tolerated.
inline Rational parse_rational(const std::string& s) {
  if (s.empty()) throw StructuralError("empty rational literal");
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) {
      return Rational(Integer(s));
    }
    Integer num(s.substr(0, slash));
    Integer den(s.substr(slash + 1));
    if (den == 0) throw StructuralError("zero denominator in rational literal: " + s);
    return Rational(num, den);
  } catch (const StructuralError&) {
    throw;
  } catch (const std::exception&) {
    throw StructuralError("bad rational literal: " + s);
  }
}

// Canonical form: "p" for integers, "p/q" otherwise (q > 0, gcd(p,q)=1).
inline std::string format_rational(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace prefstab
