#include <doctest.h>

#include "common.hpp"
#include "oracle.hpp"

using namespace lf;
using namespace lf::testutil;
using oracle::ModeOracle;
using oracle::MState;

TEST_CASE("oracle basics on the current algebra") {
    LcaSpec c2 = cur_sl2();
    ModeOracle mo(c2);
    int e = 0, h = 1, f = 2;
    MState vac = MState::vacuum();
    // e_(n)|0> = 0 for n >= 0
    CHECK(mo.apply_mode(e, 0, vac).is_zero());
    CHECK(mo.apply_mode(e, 3, vac).is_zero());
    // state e_(-1)f_(-1)|0>
    MState ef = mo.apply_mode(e, -1, mo.apply_mode(f, -1, vac));
    CHECK(ef.t.size() == 1);
    // e_(0) (f_(-1)|0>) = [e_(0), f_(-1)]|0> = h_(-1)|0>
    MState r = mo.apply_mode(e, 0, mo.apply_mode(f, -1, vac));
    CHECK(r == mo.apply_mode(h, -1, vac));
    // e_(1) f_(-1)|0> = k(e|f)|0> = k|0>
    MState r1 = mo.apply_mode(e, 1, mo.apply_mode(f, -1, vac));
    CHECK(r1 == MState::vacuum(Scalar::param("k")));
    // skew-derived: f_(0) e_(-1)|0> = -h
    MState r2 = mo.apply_mode(f, 0, mo.apply_mode(e, -1, vac));
    CHECK(r2 == mo.apply_mode(h, -1, vac).scaled(Scalar(-1)));
}

TEST_CASE("oracle Virasoro commutators") {
    LcaSpec vir = virasoro();
    ModeOracle mo(vir);
    MState vac = MState::vacuum();
    MState L = mo.apply_mode(0, -1, vac); // L = L_(-1)|0> in (n)-product indexing
    // L_(3)L = (c/2)|0>   (the lam^3/6 coefficient of [L_lam L] times 3!)
    MState r3 = mo.nth(L, 3, L);
    CHECK(r3 == MState::vacuum(Scalar::param("c") * Scalar(Rat(1, 2))));
    // L_(1)L = 2L
    CHECK(mo.nth(L, 1, L) == L.scaled(Scalar(2)));
    // L_(2)L = 0
    CHECK(mo.nth(L, 2, L).is_zero());
    // L_(0)L = TL, and TL = T^(1)L corresponds to L_(-2)|0>
    MState tl = mo.apply_mode(0, -2, vac);
    CHECK(mo.nth(L, 0, L) == tl);
}

TEST_CASE("oracle from_expr matches mode construction") {
    LcaSpec c2 = cur_sl2();
    ModeOracle mo(c2);
    // word :e f: -> e_(-1) f_(-1)|0>
    Expr ef = Expr::single(Monomial{{Term{0, 0}, Term{2, 0}}});
    MState s = mo.from_expr(ef);
    CHECK(s == mo.apply_mode(0, -1, mo.apply_mode(2, -1, MState::vacuum())));
    // T^(2)e -> e_(-3)|0>
    Expr t2e = Expr::single(Monomial{{Term{0, 2}}});
    CHECK(mo.from_expr(t2e) == mo.apply_mode(0, -3, MState::vacuum()));
}

TEST_CASE("oracle Borcherds identity instances") {
    LcaSpec vir = virasoro();
    ModeOracle mo(vir);
    MState L = mo.apply_mode(0, -1, MState::vacuum());
    Rng rng(42);
    for (int trial = 0; trial < 12; trial++) {
        long m = rng.below(7) - 3, n = rng.below(7) - 3, k = rng.below(7) - 3;
        MState resid = mo.borcherds_residual(L, L, L, m, n, k);
        CHECK(resid.is_zero());
    }
    LcaSpec c2 = cur_sl2();
    ModeOracle mo2(c2);
    MState e = mo2.apply_mode(0, -1, MState::vacuum());
    MState h = mo2.apply_mode(1, -1, MState::vacuum());
    MState f = mo2.apply_mode(2, -1, MState::vacuum());
    Rng rng2(43);
    for (int trial = 0; trial < 12; trial++) {
        long m = rng2.below(7) - 3, n = rng2.below(7) - 3, k = rng2.below(7) - 3;
        CHECK(mo2.borcherds_residual(e, h, f, m, n, k).is_zero());
    }
}

TEST_CASE("oracle fermion squares") {
    LcaSpec ch = charged_pair();
    ModeOracle mo(ch);
    MState vac = MState::vacuum();
    // ph_(-1) ph_(-1) |0> = 0 for the odd fermion (zero bracket with itself)
    MState sq = mo.apply_mode(0, -1, mo.apply_mode(0, -1, vac));
    CHECK(sq.is_zero());
    // ph_(0) ps_(-1)|0> = <ph|ps>|0> = |0>
    MState r = mo.apply_mode(0, 0, mo.apply_mode(1, -1, vac));
    CHECK(r == vac);
}
