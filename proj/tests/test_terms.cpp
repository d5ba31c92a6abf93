#include <doctest.h>

#include "common.hpp"

using namespace lf;
using namespace lf::testutil;

TEST_CASE("monomial metadata") {
    LcaSpec vir = virasoro();
    TermMeta meta(vir.gens);
    // vacuum
    Monomial vac = make_monomial(vir.gens, {});
    CHECK(meta.delta(vac) == 0);
    CHECK(meta.charge(vac) == 0);
    // T^(1)L has Delta = 2 + 1 = 3
    Monomial tl = make_monomial(vir.gens, {Term{0, 1}});
    CHECK(meta.delta(tl) == 3);
    // unknown generator index
    CHECK_THROWS_AS((void)make_monomial(vir.gens, {Term{5, 0}}), Error);

    LcaSpec c2 = cur_sl2();
    TermMeta m2(c2.gens);
    Monomial ef = make_monomial(c2.gens, {Term{0, 0}, Term{2, 0}});
    CHECK(m2.delta(ef) == 2);
    CHECK(m2.zeta(ef) == 2);
    CHECK(m2.parity(ef) == Parity::Even);
}

TEST_CASE("compare_index total order") {
    CHECK(compare_index(Term{0, 0}, Term{2, 0}) < 0);
    CHECK(compare_index(Term{0, 1}, Term{0, 2}) < 0);
    CHECK(compare_index(Term{0, 0}, Term{0, 0}) == 0);
    CHECK(compare_index(Term{1, 5}, Term{0, 0}) > 0);
}

TEST_CASE("apply_T") {
    LcaSpec c2 = cur_sl2();
    TermMeta meta(c2.gens);
    // T|0> = 0
    CHECK(apply_T_raw(Expr::vacuum()).is_zero());
    // T(T^(1)e) = 2 T^(2)e
    Expr te = Expr::single(Monomial{{Term{0, 1}}});
    Expr r = apply_T_raw(te);
    CHECK(r == Expr::single(Monomial{{Term{0, 2}}}, Scalar(2)));
    // derivation on :ef:
    Expr ef = Expr::single(Monomial{{Term{0, 0}, Term{2, 0}}});
    Expr d = apply_T_raw(ef);
    Expr expect = Expr::single(Monomial{{Term{0, 1}, Term{2, 0}}}) +
                  Expr::single(Monomial{{Term{0, 0}, Term{2, 1}}});
    CHECK(d == expect);
    // T raises Delta by one on every monomial
    for (auto& [m, c] : d.t) CHECK(meta.delta(m) == 3);
    // homogeneity detection
    Expr bad = Expr::gen(0) + Expr::single(Monomial{{Term{0, 1}}});
    CHECK_THROWS_AS((void)meta.homogeneous_delta(bad), Error);
}

TEST_CASE("ordered predicate") {
    LcaSpec ch = charged_pair();
    TermMeta meta(ch.gens);
    // ph ph (same odd generator twice) is not ordered
    CHECK_FALSE(meta.is_ordered(make_monomial(ch.gens, {Term{0, 0}, Term{0, 0}})));
    CHECK(meta.is_ordered(make_monomial(ch.gens, {Term{0, 0}, Term{0, 1}})));
    CHECK(meta.is_ordered(make_monomial(ch.gens, {Term{0, 0}, Term{1, 0}})));
    CHECK_FALSE(meta.is_ordered(make_monomial(ch.gens, {Term{1, 0}, Term{0, 0}})));
}
