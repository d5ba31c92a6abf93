#pragma once

#include <memory>

#include "lambdaforge/liealg.hpp"
#include "lambdaforge/zhu.hpp"

namespace lf {

struct EMField {
    Expr L;
    Scalar central_charge;
};

/// residual of the energy-momentum property: [L_lam L] - (T+2lam)L - lam^3/12 c |0>
Lambda1 em_residual(Engine& eng, const EMField& em);
/// residual of primality at the given weight: [L_lam a] - (T + Delta lam) a
Lambda1 primary_residual(Engine& eng, const EMField& em, const Expr& a, const Rat& delta);

/// current Lie conformal algebra Cur_k g: [a_lam b] = [a,b] + lam k (a|b)
LcaSpec cur(const LieAlgData& g, const Scalar& level);

/// charged free fermions: pairs (ph_<name>, ps_<name>) with [ph_i lam ps_j] = delta_ij;
/// weights Delta(ps_i) = m_i, Delta(ph_i) = 1 - m_i
struct ChargedPair {
    std::string base;
    Parity parity = Parity::Odd; // parity of the fermions themselves
    Rat m = Rat(1, 2);
};
LcaSpec fermion_charged(const std::vector<ChargedPair>& pairs);

/// neutral sector: generators Ph_<name> with [Ph_i lam Ph_j] = pairing(i,j)
LcaSpec fermion_neutral(const std::vector<std::string>& names, const std::vector<Parity>& parities,
                        const Mat& pairing);

/// Sugawara energy-momentum field on Cur_k g (engine must be over cur(g, level))
EMField sugawara(Engine& eng, const LieAlgData& g, const Scalar& level);

/// energy-momentum field of a neutral fermion system; pairing as in
/// fermion_neutral
EMField fermionic_em_neutral(Engine& eng, const Mat& pairing);
/// charged polarization with weights m_i on fermion_charged(pairs)
EMField fermionic_em_charged(Engine& eng, const std::vector<ChargedPair>& pairs);

/// Kac-Todorov complex: currents + odd copy with
///   [a_lam b] = [a,b] + lam kappa (a|b),  [abar_lam bbar] = kappa (a|b),
///   [a_lam bbar] = [a,b]bar,   kappa = level + h_dual
struct KacTodorov {
    LieAlgData g;
    Scalar kappa;
    LcaSpec spec;
    std::shared_ptr<Engine> eng;
    Expr G, L;
    Scalar central_charge;

    Expr cur_of(const Vec& a) const;  // current generators
    Expr bar_of(const Vec& a) const;  // odd copies
};
KacTodorov kac_todorov(const LieAlgData& g, const Scalar& level);

/// cubic Dirac operator: D = pi_Z(G), C = pi_Z(L) at k + h_dual = 1
struct DiracData {
    KacTodorov kt;
    std::shared_ptr<ZhuAlgebra> zhu;
    ZhuExpr D, C;
    Scalar hdual;
};
DiracData dirac(const LieAlgData& g);

} // namespace lf
