#pragma once

#include <memory>

#include "lambdaforge/constructions.hpp"

namespace lf {

/// The BRST complex C_k(g,x) = V(R_k(g,x)) with the differential d, building
/// blocks J_a and the energy-momentum field.
struct WComplex {
    LieAlgData g;
    GoodGrading gr;
    DualBases db;
    Scalar k;
    LcaSpec spec;                  // R_k(g,x)
    std::shared_ptr<Engine> eng;
    std::vector<int> curIdx;       // generator index of each current
    std::map<int, int> phIdx;      // basis index in S_+ -> phi_alpha generator
    std::map<int, int> psIdx;      // basis index in S_+ -> phi^alpha generator
    std::map<int, int> PhIdx;      // basis index in S_1/2 -> Phi_alpha generator
    Expr d;
    EMField L;
    Scalar ck;                     // central charge c_k(g,x)

    Expr cur_of(const Vec& a) const;
    Expr phi_of(const Vec& a) const;   // phi_{pi_+ a}
    Expr phiup_of(const Vec& a) const; // phi^{pi_- a}
    Expr Phi_of(const Vec& a) const;   // Phi_{pi_1/2 a}
    /// J_a = a + sum_alpha :phi^alpha phi_{[u_alpha, a]}:
    Expr J(const Vec& a) const;
    /// psi_k(a|b) = k(a|b) + str_{g+}((pi_+ ad a)(pi_+ ad b))
    Scalar psi(const Vec& a, const Vec& b) const;
    /// closed form of [d_lam a], [d_lam phi_a], [d_lam phi^a], [d_lam Phi_a]
    Lambda1 d_gen_closed(int genIdx) const;
};

WComplex build_complex(const LieAlgData& g, const GoodGrading& gr, const Scalar& level);

/// The reduced complex (V(R), d) on r = J_{g_<=} + phi^{g_-} + Phi_{g_1/2}.
struct ReducedSpec {
    const WComplex* wc = nullptr;
    LcaSpec spec;
    std::shared_ptr<Engine> eng;
    std::vector<int> sle;          // basis indices of g_<= in generator order
    std::vector<int> splus;        // basis indices of S_+ (phi^ block order)
    std::vector<int> shalf;
    std::map<int, Expr> dTable;    // generator index -> d(generator)

    int jgen(int basisIdx) const;  // generator index of J_{u_basisIdx}
    int psgen(int basisIdx) const;
    int Phgen(int basisIdx) const;
    Expr J_of(const Vec& a) const;     // a in g_<=
    Expr phiup_of(const Vec& a) const; // phi^{pi_- a}
    Expr Phi_of(const Vec& a) const;
    /// d as an odd derivation of V(R)
    Expr d_of(const Expr& x) const;
    /// embed a reduced-spec Expr into the full complex (J/phi^/Phi words
    /// expanded and multiplied out there)
    Expr embed(const Expr& x) const;
};

ReducedSpec reduced_spec(const WComplex& wc);

struct WGenerator {
    Vec u;        // g^f basis vector
    Rat jdeg;     // grading of u
    Rat weight;   // 1 - j
    Expr E;       // d-closed representative in the reduced V(R)
};

/// Solve d(E_i) = 0 for each g^f basis vector of weight <= maxDelta via an
/// exact linear system; leading term J_{u_i}, corrections of strictly larger
/// p-degree. Free variables of an underdetermined system are set to zero.
std::vector<WGenerator> solve_generators(ReducedSpec& rs, const Rat& maxDelta);

/// lambda-bracket of two solved generators inside V(R)
Lambda1 w_bracket(ReducedSpec& rs, const WGenerator& a, const WGenerator& b);

/// Re-express a reduced V(R) element in the PBW basis on {T^(n)E_i}; fails
/// with InsufficientGenerators when the weight is not covered.
Expr express_in_generators(ReducedSpec& rs, const std::vector<WGenerator>& gens, const Expr& x,
                           const GenSet& egens);

/// The W-algebra presented on its generators E_i: brackets recomputed in V(R)
/// and re-expressed in E-monomials.
struct WAlgebraSpec {
    std::vector<WGenerator> gens;
    LcaSpec spec;                   // generators E_i with the re-expressed table
    std::shared_ptr<Engine> eng;
};

WAlgebraSpec w_spec(ReducedSpec& rs, std::vector<WGenerator> gens);

/// Finite W-algebra data: Zhu images and the two commutator routes.
struct FiniteW {
    std::vector<ZhuExpr> ebar;                       // pi_Z(E_i) in U(rbar)
    std::map<std::pair<int, int>, ZhuExpr> table_zhuW;   // route (i): Zhu of W_k, mapped into U(rbar)
    std::map<std::pair<int, int>, ZhuExpr> table_finite; // route (ii): computed in U(rbar)
    bool agree = true;
};

FiniteW finite_w(ReducedSpec& rs, WAlgebraSpec& ws);

/// d-bar on U(rbar) (the finite complex differential) as odd derivation
ZhuExpr zhu_d(ReducedSpec& rs, ZhuAlgebra& zhu, const ZhuExpr& x);

/// Whittaker model: graded dimensions of (M^0_l)^{n_l} up to the Kazhdan
/// degree cutoff, and the S(g^f) reference dimensions.
struct WhittakerReport {
    std::vector<Rat> degrees;
    std::vector<long> dims;
    std::vector<long> slodowy_dims; // S(g^f) graded dimensions
    bool match = true;
};

WhittakerReport whittaker_invariants(const LieAlgData& g, const GoodGrading& gr,
                                     const std::vector<Vec>& l_choice, const Rat& cutoff);

} // namespace lf
