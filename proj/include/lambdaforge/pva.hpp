#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lambdaforge/zhu.hpp"

namespace lf {

struct PvaGen {
    std::string id;
    Parity parity = Parity::Even;
    std::optional<Rat> delta;
};

/// Commutative (super) monomial in the u_i^(n): sorted factors (gen, order).
struct PvaMono {
    std::vector<std::pair<int, int>> f;
    friend auto operator<=>(const PvaMono&, const PvaMono&) = default;
};

/// Differential polynomial with Scalar coefficients, canonical sorted form.
struct PvaExpr {
    std::map<PvaMono, Scalar> t;

    static PvaExpr constant(const Scalar& c);
    static PvaExpr var(int gen, int order = 0, const Scalar& c = Scalar(1));
    bool is_zero() const { return t.empty(); }
    void add_raw(const PvaMono& m, const Scalar& c);
    PvaExpr operator+(const PvaExpr& o) const;
    PvaExpr operator-(const PvaExpr& o) const;
    PvaExpr scaled(const Scalar& c) const;
    PvaExpr& operator+=(const PvaExpr& o);
    bool operator==(const PvaExpr& o) const { return t == o.t; }
    bool operator!=(const PvaExpr& o) const { return !(*this == o); }
};

/// lambda-polynomial of differential polynomials
struct PvaLambda {
    std::vector<PvaExpr> c;
    void add(size_t n, const PvaExpr& e);
    PvaExpr coeff(size_t n) const { return n < c.size() ? c[n] : PvaExpr(); }
    bool is_zero() const;
    void trim();
    bool operator==(const PvaLambda& o) const;
};

struct PvaLambda2 {
    std::map<std::pair<int, int>, PvaExpr> t;
    void add(int i, int j, const PvaExpr& e);
    bool is_zero() const { return t.empty(); }
};

/// Poisson vertex algebra presentation: generators and the lambda-bracket
/// table on generator pairs (missing (j,i) entries derived by skewsymmetry).
struct PvaSpec {
    std::string name;
    std::vector<PvaGen> gens;
    std::map<std::pair<int, int>, PvaLambda> table;

    int index_of(const std::string& id) const;
    std::optional<int> find(const std::string& id) const;
};

class PvaEngine {
  public:
    explicit PvaEngine(PvaSpec spec);

    const PvaSpec& spec() const { return spec_; }

    PvaExpr normalize(const PvaExpr& raw) const; // sort factors, odd squares vanish
    PvaExpr mul(const PvaExpr& a, const PvaExpr& b) const;
    PvaExpr apply_T(const PvaExpr& p) const;
    PvaExpr apply_T_pow(const PvaExpr& p, long n) const;
    /// left partial derivative d/du_gen^(order)
    PvaExpr partial(const PvaExpr& p, int gen, int order) const;
    Parity parity_of(const PvaExpr& p) const;

    /// master-formula lambda-bracket {P_lam Q}
    PvaLambda bracket(const PvaExpr& p, const PvaExpr& q);
    /// sum_p (-T)^p d/du_i^(p), the variational derivative (test accessor)
    PvaExpr variational(const PvaExpr& p, int gen) const;

    /// canonical representative of the class of p in V/TV (graded exact row
    /// reduction slice by slice)
    PvaExpr reduce_mod_T(const PvaExpr& p) const;
    /// {h_lam P} at lam = 0
    PvaExpr hamiltonian_flow(const PvaExpr& h, const PvaExpr& p);
    bool involution_check(const PvaExpr& h1, const PvaExpr& h2);

    /// skewsymmetry / Jacobi residuals on generators
    CheckReport check_skewsymmetry();
    CheckReport check_jacobi();
    PvaLambda2 jacobi_residual(int i, int j, int k);

    /// H-twisted Zhu Poisson algebra: commutative product on generator images
    /// with the hbar = 1 bracket, T^(n)a reduced by binom(-gamma_a, n).
    /// Requires all deltas set.
    PoissonPresentation pva_zhu();
    /// the GenSet backing pva_zhu / classical presentations
    const GenSet& zhu_gens();

  private:
    PvaSpec spec_;
    std::optional<GenSet> zgens_;
    PvaLambda table_bracket(int i, int j) const; // with skew derivation
    PvaLambda skew_image(const PvaLambda& l) const;
};

/// quasiclassical limit of an eps-family LcaSpec: {a_lam b} = eps^{-1}[a_lam b] at eps=0
PvaSpec quasiclassical_limit(const LcaSpec& family, const std::string& eps_param = "eps");

/// built-in GFZ spec and its KdV functionals h0, h1, h2
PvaSpec make_gfz();
PvaExpr gfz_h(const PvaSpec& s, int which);

} // namespace lf
