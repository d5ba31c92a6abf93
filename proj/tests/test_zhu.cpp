#include <doctest.h>

#include "common.hpp"

using namespace lf;
using namespace lf::testutil;

namespace {

Scalar hb() { return Scalar::param("hbar"); }

// (n,hbar)-product extended by linearity over Delta-homogeneous slices
Expr deformed_linear(ZhuAlgebra& z, const Expr& x, long n, const Expr& b, const GammaData& g) {
    TermMeta meta(z.gens());
    std::map<Rat, Expr> slices;
    for (auto& [m, c] : x.t) {
        Expr e;
        e.add(m, c);
        slices[meta.delta(m)] += e;
    }
    Expr r;
    for (auto& [d, e] : slices) r += z.deformed_product(e, n, b, g);
    return r;
}

Expr hbar_linear(ZhuAlgebra& z, const Expr& x, const Expr& b, const GammaData& g) {
    TermMeta meta(z.gens());
    std::map<Rat, Expr> slices;
    for (auto& [m, c] : x.t) {
        Expr e;
        e.add(m, c);
        slices[meta.delta(m)] += e;
    }
    Expr r;
    for (auto& [d, e] : slices) r += z.hbar_bracket(e, b, g);
    return r;
}

} // namespace

TEST_CASE("deformed products on currents") {
    Engine eng(cur_sl2());
    ZhuAlgebra z(eng);
    GammaData g = GammaData::h_induced(eng.gens());
    int e = 0, h = 1, f = 2;
    // a_(0,hbar)b = [a,b] + hbar k(a|b)|0> for currents
    Expr r = z.deformed_product(Expr::gen(e), 0, Expr::gen(f), g);
    Expr expect = Expr::gen(h) + Expr::vacuum(hb() * Scalar::param("k"));
    CHECK(r == expect);
    // hbar := 0 gives the plain nth product
    std::map<int, Scalar> at0{{z.hbar_param(), Scalar(0)}};
    for (long n = -2; n <= 2; n++) {
        Expr lhs = z.deformed_product(Expr::gen(e), n, Expr::gen(f), g).substitute(at0);
        CHECK(lhs == eng.nth(Expr::gen(e), n, Expr::gen(f)));
    }
    // inhomogeneous input is rejected
    Expr badmix = Expr::gen(e) + Expr::single(Monomial{{Term{e, 1}}});
    CHECK_THROWS_AS((void)z.deformed_product(badmix, 0, Expr::gen(f), g), Error);
}

TEST_CASE("deformed translation: a_(-2,h)b = ((T+hH)a)_(-1,h)b") {
    for (auto spec : {cur_sl2(), virasoro(), charged_pair()}) {
        Engine eng(spec);
        ZhuAlgebra z(eng);
        GammaData g = GammaData::h_induced(eng.gens());
        size_t n = eng.gens().size();
        for (size_t a = 0; a < n; a++)
            for (size_t b = 0; b < n; b++) {
                Expr ea = Expr::gen((int)a), eb = Expr::gen((int)b);
                Expr lhs = z.deformed_product(ea, -2, eb, g);
                Expr rhs = z.deformed_product(eng.apply_T(ea), -1, eb, g) +
                           z.deformed_product(ea, -1, eb, g)
                               .scaled(hb() * Scalar(eng.gens()[a].delta));
                CHECK(lhs == rhs);
            }
    }
}

TEST_CASE("hbar bracket") {
    Engine ec(cur_sl2());
    ZhuAlgebra zc(ec);
    GammaData gc = GammaData::h_induced(ec.gens());
    // currents have gamma - 1 = 0: [a,b]_h = [a,b]
    CHECK(zc.hbar_bracket(Expr::gen(0), Expr::gen(2), gc) == Expr::gen(1));
    // Virasoro: [L,L]_h = TL + 2 hbar L (the central term is killed by binom(1,3)=0)
    Engine ev(virasoro());
    ZhuAlgebra zv(ev);
    GammaData gv = GammaData::h_induced(ev.gens());
    Expr r = zv.hbar_bracket(Expr::gen(0), Expr::gen(0), gv);
    Expr expect = Expr::single(Monomial{{Term{0, 1}}}) + Expr::gen(0, Scalar(2) * hb());
    CHECK(r == expect);
    // [(T + hbar H)a, b]_h = 0
    for (size_t a = 0; a < 3; a++)
        for (size_t b = 0; b < 3; b++) {
            Expr ea = Expr::gen((int)a);
            Expr lhs = hbar_linear(zc, ec.apply_T(ea), Expr::gen((int)b), gc) +
                       zc.hbar_bracket(ea, Expr::gen((int)b), gc)
                           .scaled(hb() * Scalar(ec.gens()[a].delta));
            CHECK(lhs.is_zero());
        }
}

TEST_CASE("star products") {
    Engine eng(cur_sl2());
    ZhuAlgebra z(eng);
    size_t n = eng.gens().size();
    // a *_{-1} |0> = a
    for (size_t a = 0; a < n; a++)
        CHECK(z.star_product(Expr::gen((int)a), -1, Expr::vacuum()) == Expr::gen((int)a));
    // a *_{-k-1} b expansion through T-derivatives for k = 1..3
    for (size_t a = 0; a < n; a++)
        for (size_t b = 0; b < n; b++) {
            Expr ea = Expr::gen((int)a), eb = Expr::gen((int)b);
            Rat da = eng.gens()[a].delta;
            for (long k = 1; k <= 3; k++) {
                Expr lhs = z.star_product(ea, -k - 1, eb);
                Expr rhs;
                for (long j = 1; j <= k; j++) {
                    Expr tja = eng.apply_T_divided(ea, j);
                    rhs += z.star_product(tja, -1, eb).scaled(Scalar(binom_rat(da, k - j)));
                    rhs += z.star_product(ea, -1, eb)
                               .scaled(Scalar(binom_rat(da, k - j) * binom_rat(-da, j)).neg());
                }
                CHECK(lhs == rhs);
            }
        }
    // Virasoro: [L_* L] = TL + 2L
    Engine ev(virasoro());
    ZhuAlgebra zv(ev);
    Expr st = zv.star_bracket(Expr::gen(0), Expr::gen(0));
    CHECK(st == Expr::single(Monomial{{Term{0, 1}}}) + Expr::gen(0, Scalar(2)));
}

TEST_CASE("pi_Z basics") {
    Engine eng(cur_sl2());
    ZhuAlgebra z(eng);
    int e = 0, h = 1, f = 2;
    // pi(Ta) = -Delta_a abar
    CHECK(z.pi_Z(eng.apply_T(Expr::gen(e))) == ZhuExpr::gen(e, Scalar(-1)));
    // pi(T^(k)a) = binom(-Delta,k) abar
    CHECK(z.pi_Z(Expr::single(Monomial{{Term{h, 2}}})) ==
          ZhuExpr::gen(h, Scalar(binom_rat(Rat(-1), 2))));
    // pi(a *_{-2} b) = 0
    for (int a = 0; a < 3; a++)
        for (int b = 0; b < 3; b++)
            CHECK(z.pi_Z(z.star_product(Expr::gen(a), -2, Expr::gen(b))).is_zero());
    // currents: pi(:ab:) = abar bbar - [a,b]bar
    ZhuExpr r = z.pi_Z(eng.product(Expr::gen(e), Expr::gen(f)));
    ZhuExpr expect = ZhuExpr{{{ZWord{{e, f}}, Scalar(1)}, {ZWord{{h}}, Scalar(-1)}}};
    CHECK(r == expect);
}

TEST_CASE("zhu commutators reproduce U(sl2) and commutative Virasoro") {
    Engine eng(cur_sl2());
    ZhuAlgebra z(eng);
    int e = 0, h = 1, f = 2;
    // [abar,bbar] = [a,b]bar for currents
    CHECK(z.zhu_commutator(e, f) == ZhuExpr::gen(h));
    CHECK(z.zhu_commutator(h, e) == ZhuExpr::gen(e, Scalar(2)));
    CHECK(z.zhu_commutator(h, f) == ZhuExpr::gen(f, Scalar(-2)));
    // Virasoro: [Lbar, Lbar] = 0
    Engine ev(virasoro());
    ZhuAlgebra zv(ev);
    CHECK(zv.zhu_commutator(0, 0).is_zero());
}

TEST_CASE("zhu normal form") {
    Engine eng(cur_sl2());
    ZhuAlgebra z(eng);
    int e = 0, h = 1, f = 2;
    // fbar ebar = ebar fbar - hbar_word
    ZhuExpr r = z.zhu_normal_form_raw({f, e}, Scalar(1));
    ZhuExpr expect = ZhuExpr{{{ZWord{{e, f}}, Scalar(1)}, {ZWord{{h}}, Scalar(-1)}}};
    CHECK(r == expect);
    // already ordered words are unchanged
    CHECK(z.zhu_normal_form_raw({e, h, f}, Scalar(1)) ==
          ZhuExpr{{{ZWord{{e, h, f}}, Scalar(1)}}});
    // odd square for a zero self-bracket is zero
    Engine ene(neutral_pair());
    ZhuAlgebra zn(ene);
    CHECK(zn.zhu_normal_form_raw({0, 0}, Scalar(1)).is_zero());
    // Bbar Abar = -Abar Bbar + [B_* A]bar with <B|A> = 1
    ZhuExpr ba = zn.zhu_normal_form_raw({1, 0}, Scalar(1));
    ZhuExpr ex = ZhuExpr{{{ZWord{{0, 1}}, Scalar(-1)}, {ZWord{}, Scalar(1)}}};
    CHECK(ba == ex);
    // associativity of the PBW product on triples
    for (int a = 0; a < 3; a++)
        for (int b = 0; b < 3; b++)
            for (int c = 0; c < 3; c++) {
                ZhuExpr xy = z.mul(ZhuExpr::gen(a), ZhuExpr::gen(b));
                ZhuExpr lhs = z.mul(xy, ZhuExpr::gen(c));
                ZhuExpr yz = z.mul(ZhuExpr::gen(b), ZhuExpr::gen(c));
                CHECK(lhs == z.mul(ZhuExpr::gen(a), yz));
            }
}

TEST_CASE("Zhu quotient: star commutators and associators vanish under pi_Z") {
    for (auto spec : {cur_sl2(), virasoro(), charged_pair(), neutral_pair()}) {
        Engine eng(spec);
        ZhuAlgebra z(eng);
        size_t n = eng.gens().size();
        for (size_t a = 0; a < n; a++)
            for (size_t b = 0; b < n; b++) {
                Expr ea = Expr::gen((int)a), eb = Expr::gen((int)b);
                int p = eng.koszul_sign(ea, eb);
                Expr x = z.star_product(ea, -1, eb) -
                         z.star_product(eb, -1, ea).scaled(Scalar((long)p)) -
                         z.star_bracket(ea, eb);
                CHECK(z.pi_Z(x).is_zero());
            }
        // the outer left slot is Delta-inhomogeneous: extend by linearity
        auto star_lin = [&](const Expr& x, long nn, const Expr& y) {
            TermMeta meta(eng.gens());
            std::map<Rat, Expr> slices;
            for (auto& [m, c] : x.t) {
                Expr e;
                e.add(m, c);
                slices[meta.delta(m)] += e;
            }
            Expr r;
            for (auto& [d, e] : slices) r += z.star_product(e, nn, y);
            return r;
        };
        for (size_t a = 0; a < n; a++)
            for (size_t b = 0; b < n; b++)
                for (size_t c = 0; c < n; c++) {
                    Expr ea = Expr::gen((int)a), eb = Expr::gen((int)b), ec = Expr::gen((int)c);
                    Expr lhs = star_lin(z.star_product(ea, -1, eb), -1, ec);
                    Expr rhs = z.star_product(ea, -1, z.star_product(eb, -1, ec));
                    CHECK(z.pi_Z(lhs - rhs).is_zero());
                }
    }
}

TEST_CASE("hbar bracket is a derivation of deformed products") {
    for (auto spec : {cur_sl2(), charged_pair()}) {
        Engine eng(spec);
        ZhuAlgebra z(eng);
        GammaData g = GammaData::h_induced(eng.gens());
        size_t ngen = eng.gens().size();
        for (size_t a = 0; a < ngen; a++)
            for (size_t b = 0; b < ngen; b++)
                for (size_t c = 0; c < ngen; c++) {
                    Expr ea = Expr::gen((int)a), eb = Expr::gen((int)b), ec = Expr::gen((int)c);
                    int p = eng.koszul_sign(ea, eb);
                    for (long n = -2; n <= 1; n++) {
                        Expr lhs = hbar_linear(z, ea, z.deformed_product(eb, n, ec, g), g);
                        Expr rhs = deformed_linear(z, z.hbar_bracket(ea, eb, g), n, ec, g) +
                                   deformed_linear(z, eb, n, z.hbar_bracket(ea, ec, g), g)
                                       .scaled(Scalar((long)p));
                        CHECK(lhs == rhs);
                    }
                }
    }
}

TEST_CASE("deformed quasi-associativity") {
    for (auto spec : {cur_sl2(), virasoro()}) {
        Engine eng(spec);
        ZhuAlgebra z(eng);
        GammaData g = GammaData::h_induced(eng.gens());
        size_t ngen = eng.gens().size();
        for (size_t a = 0; a < ngen; a++)
            for (size_t b = 0; b < ngen; b++)
                for (size_t c = 0; c < ngen; c++) {
                    Expr ea = Expr::gen((int)a), eb = Expr::gen((int)b), ec = Expr::gen((int)c);
                    int p = eng.koszul_sign(ea, eb);
                    Expr lhs =
                        deformed_linear(z, z.deformed_product(ea, -1, eb, g), -1, ec, g) -
                        z.deformed_product(ea, -1, z.deformed_product(eb, -1, ec, g), g);
                    Expr rhs;
                    for (long j = 0; j <= 6; j++) {
                        Expr bj = z.deformed_product(eb, j, ec, g);
                        if (!bj.is_zero()) rhs += z.deformed_product(ea, -j - 2, bj, g);
                        Expr aj = z.deformed_product(ea, j, ec, g);
                        if (!aj.is_zero())
                            rhs += z.deformed_product(eb, -j - 2, aj, g).scaled(Scalar((long)p));
                    }
                    CHECK(lhs == rhs);
                }
    }
}

TEST_CASE("general Gamma data") {
    // Ramond-twisted charged pair: coset 0 on weight-1/2 fermions
    LcaSpec ch = charged_pair();
    Engine eng(ch);
    GammaData g = GammaData::with_cosets(eng.gens(), {Rat(0), Rat(0)});
    CHECK(g.eps(0) == Rat(-1, 2));
    CHECK(g.gamma(0) == Rat(0));
    CHECK(g.chi(0, 1) == 1);
    // H-induced has eps = 0, chi = 0
    GammaData gh = GammaData::h_induced(eng.gens());
    CHECK(gh.eps(0) == 0);
    CHECK(gh.gamma(0) == Rat(1, 2));
    CHECK(gh.chi(0, 1) == 0);
    // gamma = 0 degenerates the deformed product to the plain one
    ZhuAlgebra z(eng);
    for (long n = -2; n <= 1; n++)
        CHECK(z.deformed_product(Expr::gen(0), n, Expr::gen(1), g) ==
              eng.nth(Expr::gen(0), n, Expr::gen(1)));
    // the Gamma-bracket uses binom(gamma-1, j); only the j = 0 term survives
    Expr br = z.hbar_bracket(Expr::gen(0), Expr::gen(1), g);
    CHECK(br == Expr::vacuum());
}

TEST_CASE("classical Zhu algebra") {
    Engine eng(cur_sl2());
    ZhuAlgebra z(eng);
    PoissonPresentation p = z.classical_zhu();
    int e = 0, h = 1, f = 2;
    // {abar,bbar} = [a,b]bar
    CHECK(p.bracket_table.at({e, f}) == ZhuExpr::gen(h));
    // Virasoro: {Lbar, Lbar} = pi(TL) = 0
    Engine ev(virasoro());
    ZhuAlgebra zv(ev);
    PoissonPresentation pv = zv.classical_zhu();
    CHECK(pv.bracket_table.count({0, 0}) == 0);
    // Leibniz evaluation: {e, ff} = {e,f}f + f{e,f} = 2 h f
    ZhuExpr ff = p.mul(ZhuExpr::gen(f), ZhuExpr::gen(f));
    ZhuExpr br = p.bracket(ZhuExpr::gen(e), ff);
    ZhuExpr expect = p.mul(ZhuExpr::gen(h), ZhuExpr::gen(f)).scaled(Scalar(2));
    CHECK(br == expect);
}
