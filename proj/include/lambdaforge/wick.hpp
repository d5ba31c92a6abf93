#pragma once

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "lambdaforge/terms.hpp"

namespace lf {

/// Presentation of a non-linear Lie conformal algebra: generators with graded
/// metadata and a generator-pair lambda-bracket table. Entries absent for a
/// pair (i,j) are derived from (j,i) by skewsymmetry; diagonal entries default
/// to zero. Table values are combinations of ordered monomials.
struct LcaSpec {
    GenSet gens;
    std::map<std::pair<int, int>, Lambda1> table;
    bool hamiltonian = true;
    std::string name;

    LcaSpec() = default;
    LcaSpec(GenSet g, std::map<std::pair<int, int>, Lambda1> tab, bool ham = true,
            std::string nm = "");

    /// grading + weight-homogeneity invariants; throws GradingViolation /
    /// ValidationError
    void validate() const;
    bool has_entry(int i, int j) const { return table.count({i, j}) != 0; }
};

struct CheckEntry {
    std::vector<int> gens; // pair or triple
    bool ok = true;
    std::string residual;  // printed nonzero residual
};

struct CheckReport {
    bool pass = true;
    std::vector<CheckEntry> entries; // only failures are recorded
    size_t checked = 0;
};

/// Rewrite engine over a frozen LcaSpec: extends the generator table to the
/// whole enveloping vertex algebra. All public results are in normal form
/// (Scalar combinations of ordered monomials). Thread-safe; memoization caches
/// are guarded and shared.
class Engine {
  public:
    explicit Engine(LcaSpec spec);

    const LcaSpec& spec() const { return spec_; }
    const GenSet& gens() const { return spec_.gens; }
    const TermMeta& meta() const { return meta_; }

    Expr normal_form(const Expr& x);
    /// :AB: in normal form
    Expr product(const Expr& a, const Expr& b);
    /// [A lam B]; coefficient of lam^n is c[n]
    Lambda1 bracket(const Expr& a, const Expr& b);
    /// A_(n)B for any integer n
    Expr nth(const Expr& a, long n, const Expr& b);
    Expr apply_T(const Expr& x) { return normal_form(apply_T_raw(x)); }
    Expr apply_T_divided(const Expr& x, long k) { return normal_form(apply_T_divided_raw(x, k)); }
    /// :t1(:t2(...(x)...):): for single terms t_i -- exact prepending (1.49),
    /// then normal form; distinct from product() with a composite left slot
    Expr splice(const std::vector<Term>& prefix, const Expr& x);

    /// definite integrals of lambda-polynomials (UnsupportedBound otherwise)
    Lambda1 integrate_0_to_var(const Lambda1& l) const;     // 0..lam, result in lam
    Expr integrate_mT_to_0(const Lambda1& l);               // -T..0, T-powers applied
    /// dispatcher over textual bounds: ("0","lam"), ("-T","0"), ("0","0")
    Lambda1 integrate(const Lambda1& l, const std::string& lower, const std::string& upper);
    /// I_lam(a,b) = :ab: + int_0^lam [a_x b] dx  (indefinite-integral bracket)
    Lambda1 integral_bracket(const Expr& a, const Expr& b);

    /// [b_{-lam-T} a]-style substitution: var -> sgn*var + t*T applied to L
    Lambda1 subst_affine(const Lambda1& l, long sgn, long tcoef);

    CheckReport check_skewsymmetry();
    CheckReport check_jacobi();
    /// Jacobi residual for one ordered generator triple
    Lambda2 jacobi_residual(int i, int j, int k);
    /// Borcherds identity (both sides assembled from nth products); returns
    /// lhs-rhs residual
    Expr borcherds_residual(const Expr& a, const Expr& b, const Expr& c, long m, long n, long k);

    int koszul_sign(const Expr& a, const Expr& b) const; // fails if inhomogeneous parity
    Parity parity_of(const Expr& e) const;

  private:
    LcaSpec spec_;
    TermMeta meta_;

    std::map<Monomial, Expr> nfCache_;
    std::map<std::pair<Monomial, Monomial>, Expr> prodCache_;
    std::map<std::pair<Monomial, Monomial>, Lambda1> brCache_;
    std::mutex nfMx_, prodMx_, brMx_;

    Expr nf_word(const Monomial& m);
    Expr prod_word(const Monomial& a, const Monomial& b);
    Lambda1 br_word(const Monomial& a, const Monomial& b);
    Lambda1 br_expr(const Expr& a, const Expr& b);
    Expr prod_expr(const Expr& a, const Expr& b);
    Lambda1 br_term(const Term& a, const Term& b);
    Lambda1 base_bracket(int i, int j);
    Expr nf_expr(const Expr& e);
};

/// worker count for batch checks: min(hardware, LAMBDA_FORGE_THREADS)
unsigned worker_count();
/// run tasks indexed 0..n-1 on the worker pool
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

} // namespace lf
