#pragma once

#include <map>
#include <mutex>
#include <vector>

#include "lambdaforge/wick.hpp"

namespace lf {

/// Gamma/Z coset data per generator. The H-induced default has eps = 0,
/// gamma = Delta, chi = 0 for all generators.
struct GammaData {
    const GenSet* gens = nullptr;
    std::vector<Rat> coset; // gamma-bar mod 1 per generator; empty = H-induced

    static GammaData h_induced(const GenSet& g);
    static GammaData with_cosets(const GenSet& g, std::vector<Rat> cosets);

    bool h_induced_flag() const { return coset.empty(); }
    Rat eps(int gen) const;               // maximal non-positive real in coset - Delta mod 1
    Rat gamma(int gen) const;             // Delta + eps
    int chi(int g1, int g2) const;        // 1 iff eps1+eps2 <= -1
};

/// PBW word in Zhu generators (indices into the GenSet).
struct ZWord {
    std::vector<int> g;
    friend auto operator<=>(const ZWord&, const ZWord&) = default;
};

/// Canonical combination of PBW-ordered words in Zhu-algebra generators.
struct ZhuExpr {
    std::map<ZWord, Scalar> t;

    bool is_zero() const { return t.empty(); }
    void add(const ZWord& w, const Scalar& c);
    ZhuExpr operator+(const ZhuExpr& o) const;
    ZhuExpr operator-(const ZhuExpr& o) const;
    ZhuExpr scaled(const Scalar& c) const;
    ZhuExpr& operator+=(const ZhuExpr& o);
    bool operator==(const ZhuExpr& o) const { return t == o.t; }
    bool operator!=(const ZhuExpr& o) const { return !(*this == o); }
    static ZhuExpr one(const Scalar& c = Scalar(1));
    static ZhuExpr gen(int g, const Scalar& c = Scalar(1));
    ZhuExpr substitute(const std::map<int, Scalar>& a) const;
};

/// Poisson-algebra presentation: supercommutative polynomials on a fixed
/// generator set with a generator-pair bracket table, extended by Leibniz.
/// Used for the quasiclassical (hbar = 0) Zhu algebra.
struct PoissonPresentation {
    const GenSet* gens = nullptr;
    std::map<std::pair<int, int>, ZhuExpr> bracket_table; // [i][j] for all pairs

    ZhuExpr normalize(const ZhuExpr& raw) const; // supercommutative sort, odd^2 = 0
    ZhuExpr mul(const ZhuExpr& a, const ZhuExpr& b) const;
    ZhuExpr bracket(const ZhuExpr& a, const ZhuExpr& b) const; // Leibniz both slots
    Parity parity_of(const ZWord& w) const;
};

/// hbar- and (hbar,Gamma)-deformed products, the reduction map pi_Z and the
/// H-twisted Zhu algebra of the enveloping vertex algebra of a spec.
class ZhuAlgebra {
  public:
    explicit ZhuAlgebra(Engine& eng);

    Engine& engine() { return eng_; }
    const GenSet& gens() const { return eng_.gens(); }
    int hbar_param() const { return hbar_; }

    /// a_(n,hbar)b = sum_j binom(gamma_a, j) hbar^j a_(n+j)b
    Expr deformed_product(const Expr& a, long n, const Expr& b, const GammaData& gamma);
    /// [a,b]_hbar = sum_j binom(gamma_a - 1, j) hbar^j a_(j)b
    Expr hbar_bracket(const Expr& a, const Expr& b, const GammaData& gamma);
    /// hbar := 1 specializations for the H-induced Gamma
    Expr star_product(const Expr& a, long n, const Expr& b);
    Expr star_bracket(const Expr& a, const Expr& b);

    /// image in Zhu_H V = V/(V *_{-2} V) as a canonical PBW word combination
    ZhuExpr pi_Z(const Expr& x);
    /// non-linear Lie bracket of Zhu_H R: [abar, bbar] = pi_Z([a_* b])
    ZhuExpr zhu_commutator(int geni, int genj);
    /// PBW straightening with bracket corrections; table defaults to this
    /// algebra's commutator table
    ZhuExpr zhu_normal_form_raw(const std::vector<int>& word, const Scalar& c);
    ZhuExpr mul(const ZhuExpr& a, const ZhuExpr& b);
    ZhuExpr commutator(const ZhuExpr& a, const ZhuExpr& b);
    Parity zparity(const ZWord& w) const;

    /// hbar := 0 Poisson structure on V/V_(-2)V: commutative product of
    /// generator images, bracket = 0-th product pushed to the quotient
    PoissonPresentation classical_zhu();
    /// image of an Expr in V/V_(-2)V (kills monomials containing T-powers)
    ZhuExpr classical_image(const Expr& x) const;

  private:
    Engine& eng_;
    int hbar_;
    std::map<std::pair<int, int>, ZhuExpr> ztab_;
    std::mutex zMx_;

    ZhuExpr pi_word(const Monomial& m);
    const ZhuExpr& ztab(int i, int j);
};

} // namespace lf
