#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lambdaforge/linalg.hpp"
#include "lambdaforge/terms.hpp"

namespace lf {

/// Element of a finite-dimensional Lie (super)algebra as coordinates in the
/// declared basis.
using Vec = std::vector<Scalar>;

/// Structure constants, parities and an invariant bilinear form.
struct LieAlgData {
    std::string name;
    std::vector<std::string> basis;
    std::vector<Parity> parity;          // same length as basis
    std::vector<std::vector<Vec>> c;     // c[i][j] = [u_i, u_j] coordinates
    Mat form;                            // B_ij = (u_i|u_j)

    size_t dim() const { return basis.size(); }
    long sdim() const;
    int index_of(const std::string& id) const;
    Vec unit(size_t i) const;
    Vec bracket(const Vec& a, const Vec& b) const;
    Scalar pair(const Vec& a, const Vec& b) const; // (a|b)
    bool is_zero(const Vec& v) const;
    Vec scaled(const Vec& v, const Scalar& s) const;
    Vec add(const Vec& a, const Vec& b) const;

    /// all LieAlgData invariants: super-antisymmetry, Jacobi, form symmetry /
    /// invariance / non-degeneracy. Returns list of human-readable violations.
    std::vector<std::string> validate() const;

    /// eigenvalue of the Casimir sum_i u^i u_i on the adjoint rep, divided by 2
    Scalar dual_coxeter() const;
};

/// ad x eigenspace decomposition with a good pair (x, f).
struct GoodGrading {
    Vec x, f;
    std::vector<Rat> j;                  // ad x eigenvalue per basis vector
    std::vector<std::vector<int>> gf;    // basis (coordinate vectors idx list...) see gf_basis
    std::vector<Vec> gf_basis;           // basis of the centralizer g^f
    std::vector<Rat> gf_j;               // grading of each g^f basis vector

    std::vector<int> indices_with(const std::function<bool(const Rat&)>& pred) const;
    std::vector<int> s_plus() const;     // j > 0
    std::vector<int> s_le() const;       // j <= 0
    std::vector<int> s_half() const;     // j == 1/2
    Vec project(const Vec& v, const std::function<bool(const Rat&)>& pred) const;
};

GoodGrading grading_from_pair(const LieAlgData& g, const Vec& x, const Vec& f);

/// Bases dual w.r.t. the invariant form, and the symplectic dual pair on
/// g_{1/2} for <a|b>_ne = (f|[a,b]).
struct DualBases {
    std::vector<Vec> u;      // u_alpha = basis vectors (coordinates)
    std::vector<Vec> udual;  // u^alpha with (u_alpha|u^beta) = delta
    std::vector<int> half;   // indices into basis lying in g_{1/2}
    std::vector<Vec> vhalf;  // v_alpha with (f|[u_alpha, v_beta]) = delta
};

DualBases dual_bases(const LieAlgData& g, const GoodGrading& gr);

/// built-ins
LieAlgData make_sl2();
LieAlgData make_sl3();
LieAlgData make_abelian1();
/// principal good pairs for the built-ins
std::pair<Vec, Vec> principal_pair(const LieAlgData& g);
/// minimal nilpotent pair for sl3 (half-integer grading, used in tests)
std::pair<Vec, Vec> minimal_pair_sl3(const LieAlgData& g);

} // namespace lf
