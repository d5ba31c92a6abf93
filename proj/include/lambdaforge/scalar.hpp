#pragma once

#include <gmpxx.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lambdaforge/error.hpp"

namespace lf {

using Rat = mpq_class;

Rat rat_of(long n, long d = 1);
Rat rat_parse(const std::string& s);
std::string rat_str(const Rat& r);
bool rat_is_int(const Rat& r);
long rat_to_long(const Rat& r); // exact integers only

/// Interned formal parameter names (k, hbar, c, eps, ...). Names are global to
/// the process; ids are stable, comparisons always go through the name so that
/// canonical forms do not depend on registration order.
class Params {
  public:
    static int intern(const std::string& name);
    static const std::string& name(int id);
    static bool name_less(int a, int b);
};

/// Power product of parameters, exponents > 0, kept sorted by parameter name.
struct Pmono {
    std::vector<std::pair<int, int>> pe; // (param id, exponent)

    int total_deg() const;
    int exp_of(int id) const;
    static Pmono one() { return {}; }
    Pmono mul(const Pmono& o) const;
    // divides exactly or returns nullopt
    std::optional<Pmono> div(const Pmono& o) const;
    bool operator==(const Pmono& o) const { return pe == o.pe; }
};

/// Graded lexicographic order: total degree first, then exponent sequence read
/// along alphabetically sorted parameter names (larger exponent on the earlier
/// name wins).
struct PmonoLess {
    bool operator()(const Pmono& a, const Pmono& b) const;
};

/// Multivariate polynomial over Q; zero coefficients absent.
class Poly {
  public:
    std::map<Pmono, Rat, PmonoLess> t;

    Poly() = default;
    static Poly constant(const Rat& r);
    static Poly var(int paramId);
    bool is_zero() const { return t.empty(); }
    bool is_constant() const;
    Rat constant_value() const; // 0 if zero
    int total_deg() const;

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly neg() const;
    Poly scaled(const Rat& r) const;

    // leading term under PmonoLess (largest); poly must be nonzero
    std::pair<Pmono, Rat> lead() const;
    // exact division; fails if not divisible
    std::optional<Poly> divided_by(const Poly& d) const;
    std::vector<int> vars() const;

    bool operator==(const Poly& o) const { return t == o.t; }
    bool operator<(const Poly& o) const;
};

Poly poly_gcd(const Poly& a, const Poly& b);

/// Canonical rational function num/den: gcd(num,den)=1, den monic under the
/// monomial order, zero is 0/1. Structural equality is mathematical equality.
class Scalar {
  public:
    Poly num, den;

    Scalar();                   // 0
    Scalar(long n);             // integer
    Scalar(const Rat& r);
    Scalar(Poly n, Poly d);     // normalizes
    static Scalar param(const std::string& name);
    static Scalar param_id(int id);
    static Scalar of_poly(Poly p);

    bool is_zero() const { return num.is_zero(); }
    bool is_one() const;
    bool is_rational() const;   // constant (no parameters)
    Rat rational_value() const; // requires is_rational()

    Scalar operator+(const Scalar& o) const;
    Scalar operator-(const Scalar& o) const;
    Scalar operator*(const Scalar& o) const;
    Scalar operator/(const Scalar& o) const; // fails on zero divisor
    Scalar neg() const;
    Scalar inv() const;
    Scalar pow(long e) const;

    Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
    Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
    Scalar& operator*=(const Scalar& o) { return *this = *this * o; }

    bool operator==(const Scalar& o) const { return num == o.num && den == o.den; }
    bool operator!=(const Scalar& o) const { return !(*this == o); }
    bool operator<(const Scalar& o) const; // arbitrary total order for containers

    /// Substitute parameters; entries absent from the map stay formal.
    /// Fails with PoleAtSubstitution if a denominator vanishes.
    Scalar substitute(const std::map<int, Scalar>& assignment) const;

    std::string str() const;
};

Scalar operator*(const Rat& r, const Scalar& s);

/// x(x-1)...(x-j+1)/j!
Scalar binom(const Scalar& x, long j);
Rat binom_rat(const Rat& x, long j);
Rat factorial(long n);

} // namespace lf
