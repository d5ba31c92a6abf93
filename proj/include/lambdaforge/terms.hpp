#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lambdaforge/scalar.hpp"

namespace lf {

enum class Parity : int { Even = 0, Odd = 1 };

inline int parity_sign(Parity p) { return p == Parity::Odd ? -1 : 1; }

struct GeneratorDecl {
    std::string id;
    Parity parity = Parity::Even;
    Rat delta = 0;                          // conformal weight
    Rat zeta = 0;                           // pregrading; must end up > 0
    long charge = 0;
    Rat coset = 0;                          // gamma-bar mod 1, default delta mod 1
    std::optional<std::pair<Rat, Rat>> bigrade; // (p,q) filtration bidegree
};

/// Frozen, ordered set of generator declarations. The declaration order is the
/// global total order used for normal forms and PBW bases.
class GenSet {
  public:
    GenSet() = default;
    explicit GenSet(std::vector<GeneratorDecl> gens);

    size_t size() const { return gens_.size(); }
    const GeneratorDecl& operator[](size_t i) const { return gens_[i]; }
    int index_of(const std::string& id) const; // fails with UnknownGenerator
    std::optional<int> find(const std::string& id) const;

  private:
    std::vector<GeneratorDecl> gens_;
    std::map<std::string, int> byName_;
};

/// T^(tpow) e_gen, a divided-power derivative of a generator.
struct Term {
    int gen = 0;
    int tpow = 0;
    friend auto operator<=>(const Term&, const Term&) = default;
};

/// Right-nested normally ordered word :t1 (t2 (... ts)...):, empty = |0>.
struct Monomial {
    std::vector<Term> w;
    friend auto operator<=>(const Monomial&, const Monomial&) = default;

    bool is_vacuum() const { return w.empty(); }
    size_t size() const { return w.size(); }
};

/// Declaration-order-then-tpow comparison of Terms (the global total order).
inline int compare_index(const Term& a, const Term& b) {
    if (a.gen != b.gen) return a.gen < b.gen ? -1 : 1;
    if (a.tpow != b.tpow) return a.tpow < b.tpow ? -1 : 1;
    return 0;
}

/// Scalar-linear combination of Monomials; zero coefficients absent.
class Expr {
  public:
    std::map<Monomial, Scalar> t;

    Expr() = default;
    static Expr zero() { return {}; }
    static Expr vacuum(const Scalar& c = Scalar(1));
    static Expr single(Monomial m, Scalar c = Scalar(1));
    static Expr gen(int genIdx, Scalar c = Scalar(1));

    bool is_zero() const { return t.empty(); }
    void add(const Monomial& m, const Scalar& c);
    Expr operator+(const Expr& o) const;
    Expr operator-(const Expr& o) const;
    Expr scaled(const Scalar& c) const;
    Expr neg() const { return scaled(Scalar(-1)); }
    Expr& operator+=(const Expr& o);

    bool operator==(const Expr& o) const { return t == o.t; }
    bool operator!=(const Expr& o) const { return !(*this == o); }
    bool operator<(const Expr& o) const { return t < o.t; }

    /// map Scalars through a parameter assignment
    Expr substitute(const std::map<int, Scalar>& a) const;
};

/// Polynomial in one formal variable with Expr coefficients; c[n] multiplies var^n.
struct Lambda1 {
    std::vector<Expr> c;

    bool is_zero() const;
    void trim();
    Expr coeff(size_t n) const { return n < c.size() ? c[n] : Expr(); }
    void add(size_t n, const Expr& e);
    Lambda1 operator+(const Lambda1& o) const;
    Lambda1 scaled(const Scalar& s) const;
    size_t degree_bound() const { return c.size(); }
    bool operator==(const Lambda1& o) const;
};

/// Polynomial in two formal variables (lam, mu) with Expr coefficients.
struct Lambda2 {
    std::map<std::pair<int, int>, Expr> t; // (lam exp, mu exp) -> Expr

    bool is_zero() const;
    void add(int i, int j, const Expr& e);
    Lambda2 operator+(const Lambda2& o) const;
    Lambda2 operator-(const Lambda2& o) const;
    Lambda2 scaled(const Scalar& s) const;
    bool operator==(const Lambda2& o) const { return t == o.t; }
};

/// Metadata of words over a GenSet.
struct TermMeta {
    const GenSet& g;
    explicit TermMeta(const GenSet& gs) : g(gs) {}

    Rat delta(const Term& t) const { return g[t.gen].delta + t.tpow; }
    Rat zeta(const Term& t) const { return g[t.gen].zeta; }
    Parity parity(const Term& t) const { return g[t.gen].parity; }

    Rat delta(const Monomial& m) const;
    Rat zeta(const Monomial& m) const;
    long charge(const Monomial& m) const;
    Parity parity(const Monomial& m) const;
    /// p-filtration degree (sum of bigrade.first); generators without a
    /// bigrade contribute 0
    Rat pdeg(const Monomial& m) const;

    /// sign (-1)^(p(a)p(b)) for swapping
    int koszul(const Term& a, const Term& b) const {
        return (parity(a) == Parity::Odd && parity(b) == Parity::Odd) ? -1 : 1;
    }
    int koszul(const Term& a, const Monomial& m) const {
        return (parity(a) == Parity::Odd && parity(m) == Parity::Odd) ? -1 : 1;
    }

    /// Delta of a homogeneous Expr; nullopt for 0; fails on inhomogeneous input.
    std::optional<Rat> homogeneous_delta(const Expr& e) const;
    bool is_ordered(const Monomial& m) const;
};

/// Monomial with metadata checks (UnknownGenerator on bad indices).
Monomial make_monomial(const GenSet& g, const std::vector<Term>& terms);

/// T as an even derivation: T(T^(n)e) = (n+1) T^(n+1)e, T|0> = 0.
/// Output words can be unordered at odd equal pairs; callers that need normal
/// form re-normalize.
Expr apply_T_raw(const Expr& x);
/// divided power T^(k)/k! applied k times
Expr apply_T_divided_raw(const Expr& x, long k);

} // namespace lf
