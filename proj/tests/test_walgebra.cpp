#include <doctest.h>

#include "common.hpp"
#include "lambdaforge/walgebra.hpp"

using namespace lf;
using namespace lf::testutil;

namespace {
Scalar K() { return Scalar::param("k"); }

WComplex sl2_complex() {
    LieAlgData g = make_sl2();
    auto [x, f] = principal_pair(g);
    return build_complex(g, grading_from_pair(g, x, f), K());
}
} // namespace

TEST_CASE("sl2 principal complex: weights, charges, central charge") {
    WComplex wc = sl2_complex();
    const LieAlgData& g = wc.g;
    auto& gens = wc.spec.gens;
    // generators {e,h,f,phi_e,phi^e}, Delta(e)=0, Delta(h)=1, Delta(f)=2,
    // Delta(phi_e)=0, Delta(phi^e)=1
    CHECK(gens.size() == 5);
    CHECK(gens[wc.curIdx[g.index_of("e")]].delta == 0);
    CHECK(gens[wc.curIdx[g.index_of("h")]].delta == 1);
    CHECK(gens[wc.curIdx[g.index_of("f")]].delta == 2);
    CHECK(gens[wc.phIdx.at(g.index_of("e"))].delta == 0);
    CHECK(gens[wc.psIdx.at(g.index_of("e"))].delta == 1);
    CHECK(gens[wc.phIdx.at(g.index_of("e"))].charge == -1);
    CHECK(gens[wc.psIdx.at(g.index_of("e"))].charge == 1);
    CHECK(gens[wc.phIdx.at(g.index_of("e"))].parity == Parity::Odd);
    // c_k(sl2, principal) = 3k/(k+2) - 6k - 2 = 1 - 6(k+1)^2/(k+2)
    Scalar direct = Scalar(3) * K() / (K() + Scalar(2)) - Scalar(6) * K() - Scalar(2);
    Scalar closed = Scalar(1) - Scalar(6) * (K() + Scalar(1)) * (K() + Scalar(1)) / (K() + Scalar(2));
    CHECK(wc.ck == direct);
    CHECK(wc.ck == closed);
    // the spec passes the Jacobi battery
    CHECK(wc.eng->check_jacobi().pass);
}

TEST_CASE("sl2 complex: differential and energy-momentum field") {
    WComplex wc = sl2_complex();
    // d is odd, charge +1, weight 1
    TermMeta meta(wc.spec.gens);
    for (auto& [m, c] : wc.d.t) {
        CHECK(meta.parity(m) == Parity::Odd);
        CHECK(meta.charge(m) == 1);
        CHECK(meta.delta(m) == 1);
    }
    // [d_lam d] = 0
    CHECK(wc.eng->bracket(wc.d, wc.d).is_zero());
    // d_(0) squares to zero on every generator
    for (size_t i = 0; i < wc.spec.gens.size(); i++) {
        Expr once = wc.eng->nth(wc.d, 0, Expr::gen((int)i));
        CHECK(wc.eng->nth(wc.d, 0, once).is_zero());
    }
    // L has the Virasoro shape with c_k
    CHECK(em_residual(*wc.eng, wc.L).is_zero());
    // [L_lam d] = (T+lam)d so d_(0) L = 0
    CHECK(primary_residual(*wc.eng, wc.L, wc.d, Rat(1)).is_zero());
    CHECK(wc.eng->nth(wc.d, 0, wc.L.L).is_zero());
    // closed forms of [d_lam gen] match the engine
    for (size_t i = 0; i < wc.spec.gens.size(); i++) {
        Lambda1 engine = wc.eng->bracket(wc.d, Expr::gen((int)i));
        Lambda1 closed = wc.d_gen_closed((int)i);
        CHECK(engine == closed);
    }
}

TEST_CASE("building blocks and psi pairing") {
    WComplex wc = sl2_complex();
    const LieAlgData& g = wc.g;
    int e = g.index_of("e"), h = g.index_of("h"), f = g.index_of("f");
    // J_h = h + 2 :ph_e ps_e:
    Expr jh = wc.J(g.unit(h));
    Expr expect = Expr::gen(wc.curIdx[h]);
    Monomial w;
    w.w = {Term{wc.phIdx.at(e), 0}, Term{wc.psIdx.at(e), 0}};
    expect.add(w, Scalar(2));
    CHECK(jh == expect);
    // psi_k(h|h) = 2k + 4
    CHECK(wc.psi(g.unit(h), g.unit(h)) == Scalar(2) * K() + Scalar(4));
    // psi_k(f|e) = k(f|e) + str(pi+ ad f pi+ ad e) = k
    CHECK(wc.psi(g.unit(f), g.unit(e)) == K());
    // [J_a lam J_b] = J_[a,b] + lam psi for a,b in g_<=
    for (int a : {h, f})
        for (int b : {h, f}) {
            Lambda1 br = wc.eng->bracket(wc.J(g.unit(a)), wc.J(g.unit(b)));
            Lambda1 want;
            want.add(0, wc.J(g.bracket(g.unit(a), g.unit(b))));
            want.add(1, Expr::vacuum(wc.psi(g.unit(a), g.unit(b))));
            want.trim();
            CHECK(br == want);
        }
}

TEST_CASE("J-current brackets termwise for random pairs") {
    WComplex wc = sl2_complex();
    const LieAlgData& g = wc.g;
    Rng rng(321);
    auto plus = [&](const Rat& r) { return r > 0; };
    auto le = [&](const Rat& r) { return r <= 0; };
    for (int trial = 0; trial < 10; trial++) {
        Vec a(g.dim(), Scalar(0)), b(g.dim(), Scalar(0));
        for (size_t i = 0; i < g.dim(); i++) {
            a[i] = Scalar(rng.below(5) - 2);
            b[i] = Scalar(rng.below(5) - 2);
        }
        Lambda1 lhs = wc.eng->bracket(wc.J(a), wc.J(b));
        Lambda1 rhs;
        rhs.add(0, wc.J(g.bracket(a, b)));
        // lam coefficient: k(a|b) + str_{g+}(pi+ ad a pi+ ad b)
        Scalar psiFull = wc.k * g.pair(a, b);
        for (int alpha : wc.gr.s_plus()) {
            Vec wv = wc.gr.project(g.bracket(b, g.unit(alpha)), plus);
            wv = wc.gr.project(g.bracket(a, wv), plus);
            Scalar diag = wv[alpha];
            if (!diag.is_zero())
                psiFull = psiFull + (g.parity[alpha] == Parity::Odd ? diag.neg() : diag);
        }
        rhs.add(1, Expr::vacuum(psiFull));
        // correction term, engine-determined orientation: the two phi-pieces
        // appear with the opposite order to a literal reading of the printed
        // formula (mixed pairs only; both orientations agree on g_<= pairs)
        Expr corr;
        for (int alpha : wc.gr.s_plus()) {
            Vec la = wc.gr.project(g.bracket(g.unit(alpha), a), le);
            Vec lb = wc.gr.project(g.bracket(g.unit(alpha), b), le);
            Expr inner = wc.phi_of(g.bracket(lb, a)) - wc.phi_of(g.bracket(la, b));
            if (inner.is_zero()) continue;
            corr += wc.eng->product(Expr::gen(wc.psIdx.at(alpha)), inner);
        }
        rhs.add(0, corr);
        rhs.trim();
        CHECK(lhs == rhs);
    }
}

TEST_CASE("reduced spec: tables, differential, embedding consistency") {
    WComplex wc = sl2_complex();
    ReducedSpec rs = reduced_spec(wc);
    const LieAlgData& g = wc.g;
    int h = g.index_of("h"), f = g.index_of("f"), e = g.index_of("e");
    CHECK(rs.spec.gens.size() == 3); // J_h, J_f, ps_e
    CHECK(rs.eng->check_jacobi().pass);
    // d(phi^a) = 0 for sl2 (g_+ abelian)
    CHECK(rs.dTable.at(rs.psgen(e)).is_zero());
    // d(J_f) = :J_h ps_e: + (k+2) T ps_e  (the psi_k(f|e) T phi^e piece plus
    // the reordering correction from :ps_e J_h:)
    Expr df = rs.dTable.at(rs.jgen(f));
    Expr want = Expr::single(Monomial{{Term{rs.jgen(h), 0}, Term{rs.psgen(e), 0}}});
    want.add(Monomial{{Term{rs.psgen(e), 1}}}, K() + Scalar(2));
    CHECK(df == want);
    // d(J_h) = 2 ps_e  (no phi^{[h,h]} = 0 piece, psi_k(h|e) = 0)
    CHECK(rs.dTable.at(rs.jgen(h)) == Expr::gen(rs.psgen(e), Scalar(2)));
    // embedding consistency: embed(d(gen)) = d_(0) embed(gen) in the full complex
    for (size_t i = 0; i < rs.spec.gens.size(); i++) {
        Expr lhs = rs.embed(rs.dTable.at((int)i));
        Expr rhs = wc.eng->nth(wc.d, 0, rs.embed(Expr::gen((int)i)));
        CHECK(lhs == rhs);
    }
    // d is a square-zero odd derivation on sample words
    Expr sample = rs.eng->product(Expr::gen(rs.jgen(h)), Expr::gen(rs.jgen(f)));
    CHECK(rs.d_of(rs.d_of(sample)).is_zero());
    Expr sample2 = rs.eng->product(Expr::gen(rs.psgen(e)), Expr::gen(rs.jgen(h)));
    CHECK(rs.d_of(rs.d_of(sample2)).is_zero());
}

TEST_CASE("solve_generators for sl2") {
    WComplex wc = sl2_complex();
    ReducedSpec rs = reduced_spec(wc);
    // no g^f component at weight <= 1
    CHECK(solve_generators(rs, Rat(1)).empty());
    auto gens = solve_generators(rs, Rat(2));
    REQUIRE(gens.size() == 1);
    const WGenerator& wg = gens[0];
    CHECK(wg.weight == 2);
    // d(E) = 0 exactly
    CHECK(rs.d_of(wg.E).is_zero());
    // leading term J_f with coefficient 1, corrections of larger p-degree
    const LieAlgData& g = wc.g;
    int f = g.index_of("f");
    Monomial jf;
    jf.w = {Term{rs.jgen(f), 0}};
    REQUIRE(wg.E.t.count(jf));
    CHECK(wg.E.t.at(jf) == Scalar(1));
    TermMeta meta(rs.spec.gens);
    for (auto& [m, c] : wg.E.t) {
        CHECK(meta.charge(m) == 0);
        CHECK(meta.delta(m) == 2);
        if (m != jf) CHECK(meta.pdeg(m) > Rat(-3, 2));
    }
}

TEST_CASE("W_k(sl2) bracket closes to Virasoro with c_k") {
    WComplex wc = sl2_complex();
    ReducedSpec rs = reduced_spec(wc);
    auto gens = solve_generators(rs, Rat(2));
    REQUIRE(gens.size() == 1);
    Lambda1 br = w_bracket(rs, gens[0], gens[0]);
    // shape: a*TE + b lam E + 0 lam^2 + d lam^3 |0> with b = 2a and the
    // rescaled central charge matching c_k
    Expr TE = rs.eng->apply_T(gens[0].E);
    // coeff 0 must be proportional to TE
    REQUIRE_FALSE(br.coeff(0).is_zero());
    Scalar aCoef;
    {
        auto& [m0, c0] = *TE.t.begin();
        aCoef = br.coeff(0).t.at(m0) / c0;
        CHECK(br.coeff(0) == TE.scaled(aCoef));
    }
    CHECK(br.coeff(1) == gens[0].E.scaled(Scalar(2) * aCoef));
    CHECK(br.coeff(2).is_zero());
    // lam^3 coefficient: rescaling E' = E/a gives central term (c/12)|0>
    Expr l3 = br.coeff(3);
    REQUIRE(l3.t.size() == 1);
    Scalar cc = l3.t.at(Monomial{}) / (aCoef * aCoef) * Scalar(12);
    CHECK(cc == wc.ck);
}

TEST_CASE("finite W for sl2: both routes agree and are commutative") {
    WComplex wc = sl2_complex();
    ReducedSpec rs = reduced_spec(wc);
    auto gens = solve_generators(rs, Rat(2));
    WAlgebraSpec ws = w_spec(rs, gens);
    FiniteW fw = finite_w(rs, ws);
    CHECK(fw.agree);
    REQUIRE(fw.ebar.size() == 1);
    CHECK(fw.table_finite.at({0, 0}).is_zero());
    CHECK(fw.table_zhuW.at({0, 0}).is_zero());
    // dbar kills the Zhu image of E
    ZhuAlgebra zr(*rs.eng);
    CHECK(zhu_d(rs, zr, fw.ebar[0]).is_zero());
    // pi_Z of a d-exact element vanishes in cohomology terms: dbar(pi_Z(x)) = pi_Z(d x)
    Expr sample = rs.eng->product(Expr::gen(0), Expr::gen(1));
    CHECK(zhu_d(rs, zr, zr.pi_Z(sample)) == zr.pi_Z(rs.d_of(sample)));
}

TEST_CASE("pi_Z images of ghost bilinears") {
    WComplex wc = sl2_complex();
    ZhuAlgebra z(*wc.eng);
    const LieAlgData& g = wc.g;
    int e = g.index_of("e");
    // pi(:phi^a phi_b:) = phibar^a phibar_b + (x|[pi_- a, pi_+ b])
    // take a = u^e = f, b = e: phi^f-part pairs with phi_e
    Expr lhs = wc.eng->product(Expr::gen(wc.psIdx.at(e)), Expr::gen(wc.phIdx.at(e)));
    ZhuExpr r = z.pi_Z(lhs);
    ZhuExpr want;
    want.add(ZWord{{wc.phIdx.at(e), wc.psIdx.at(e)}}, Scalar(-1)); // reorder sign
    // (x|[f, e]) = (x|-h) = -(x|h) = -1
    want.add(ZWord{}, Scalar(-1));
    // hbar-side: pi(:ps ph:) straightened onto PBW order ph < ps gives
    // -phibar phibar^ + <...> terms; compare against an independent route:
    // pi(:ps ph:) = psbar phbar computed in U(rbar) with its commutator
    ZhuExpr direct = z.mul(z.pi_Z(Expr::gen(wc.psIdx.at(e))), z.pi_Z(Expr::gen(wc.phIdx.at(e))));
    // pi is an algebra map for the star product, and :ps ph: = ps *_{-1} ph -
    // correction; here we simply check internal consistency of both Zhu routes
    Expr star = z.star_product(Expr::gen(wc.psIdx.at(e)), -1, Expr::gen(wc.phIdx.at(e)));
    CHECK(z.pi_Z(star) == direct);
    // and the x-correction between :ps ph: and the star product
    Expr diff = star - lhs;
    // star - :ab: = (x|[pi_-a, pi_+b])-type constant for weight reasons
    CHECK(z.pi_Z(diff) == direct - r);
}

TEST_CASE("whittaker model sl2") {
    LieAlgData g = make_sl2();
    auto [x, f] = principal_pair(g);
    GoodGrading gr = grading_from_pair(g, x, f);
    auto rep = whittaker_invariants(g, gr, {}, Rat(4));
    REQUIRE(rep.degrees.size() == 5);
    CHECK(rep.dims == std::vector<long>{1, 0, 1, 0, 1});
    CHECK(rep.match);
    auto rep0 = whittaker_invariants(g, gr, {}, Rat(0));
    CHECK(rep0.dims == std::vector<long>{1});
    CHECK(rep0.match);
}

TEST_CASE("whittaker model sl3 minimal: independence of l") {
    LieAlgData g = make_sl3();
    auto [x, f] = minimal_pair_sl3(g);
    GoodGrading gr = grading_from_pair(g, x, f);
    auto rep0 = whittaker_invariants(g, gr, {}, Rat(2));
    // an isotropic line in g_{1/2}: single basis vector (pairing is skew, so
    // any line is isotropic)
    auto half = gr.s_half();
    REQUIRE(half.size() == 2);
    std::vector<Vec> l{g.unit(half[0])};
    auto repl = whittaker_invariants(g, gr, l, Rat(2));
    CHECK(rep0.dims == repl.dims);
    CHECK(rep0.match);
    CHECK(repl.match);
}

TEST_CASE("sl3 principal: brackets close on the solved generators") {
    LieAlgData g = make_sl3();
    auto [x, f] = principal_pair(g);
    GoodGrading gr = grading_from_pair(g, x, f);
    WComplex wc = build_complex(g, gr, K());
    ReducedSpec rs = reduced_spec(wc);
    auto gens = solve_generators(rs, Rat(3));
    REQUIRE(gens.size() == 2);
    // [E2 lam E3] and [E3 lam E3] close on E-monomials up to weight 4 --
    // w_spec throws InsufficientGenerators otherwise
    WAlgebraSpec ws = w_spec(rs, gens);
    CHECK(ws.spec.table.size() == 3);
    // the re-expressed table itself passes skewsymmetry and Jacobi
    CHECK(ws.eng->check_skewsymmetry().pass);
    CHECK(ws.eng->check_jacobi().pass);
    // [E lam |0>] = 0
    CHECK(ws.eng->bracket(Expr::gen(0), Expr::vacuum()).is_zero());
    // the re-expressed table is polynomial in k (the Sugawara poles cancel),
    // and its lam^3 Virasoro coefficient recovers c_k(sl3) exactly:
    // coeff = a^2 c_k / 12 with the normalization a = -(k+3)
    {
        Expr l3 = ws.spec.table.at({0, 0}).coeff(3);
        REQUIRE(l3.t.count(Monomial{}));
        Scalar a = (K() + Scalar(3)).neg();
        CHECK(l3.t.at(Monomial{}) * Scalar(12) / (a * a) == wc.ck);
    }
    // c_k(sl3) itself has the critical-level pole
    std::map<int, Scalar> crit{{Params::intern("k"), Scalar(-3)}};
    bool pole = false;
    try {
        (void)wc.ck.substitute(crit);
    } catch (const Error& e) {
        pole = e.code == Errc::PoleAtSubstitution;
    }
    CHECK(pole);
    // away from the critical level the tables specialize cleanly
    std::map<int, Scalar> reg{{Params::intern("k"), Scalar(1)}};
    for (auto& [key, lam] : ws.spec.table)
        for (auto& c : lam.c) (void)c.substitute(reg);
}

TEST_CASE("express_in_generators fails outside the solved span") {
    WComplex wc = sl2_complex();
    ReducedSpec rs = reduced_spec(wc);
    auto gens = solve_generators(rs, Rat(2));
    WAlgebraSpec ws = w_spec(rs, gens);
    // weight-1 element J_h is not a polynomial in the weight-2 generator
    int h = wc.g.index_of("h");
    CHECK_THROWS_AS(
        (void)express_in_generators(rs, ws.gens, Expr::gen(rs.jgen(h)), ws.spec.gens), Error);
}

TEST_CASE("sl3 minimal grading: neutral sector and half-integer weights") {
    LieAlgData g = make_sl3();
    auto [x, f] = minimal_pair_sl3(g);
    GoodGrading gr = grading_from_pair(g, x, f);
    WComplex wc = build_complex(g, gr, K());
    // two neutral generators of weight 1/2
    CHECK(wc.PhIdx.size() == 2);
    for (auto& [b, gi] : wc.PhIdx) CHECK(wc.spec.gens[gi].delta == Rat(1, 2));
    CHECK(wc.eng->check_skewsymmetry().pass);
    CHECK(wc.eng->check_jacobi().pass);
    // the differential squares to zero
    CHECK(wc.eng->bracket(wc.d, wc.d).is_zero());
    for (size_t i = 0; i < wc.spec.gens.size(); i++)
        CHECK(wc.eng->nth(wc.d, 0, wc.eng->nth(wc.d, 0, Expr::gen((int)i))).is_zero());
    // closed forms of [d_lam gen] match the engine (exercises the Phi branch)
    for (size_t i = 0; i < wc.spec.gens.size(); i++)
        CHECK(wc.eng->bracket(wc.d, Expr::gen((int)i)) == wc.d_gen_closed((int)i));
    // energy-momentum field keeps the Virasoro shape
    CHECK(em_residual(*wc.eng, wc.L).is_zero());
    // reduced complex consistency on the minimal grading
    ReducedSpec rs = reduced_spec(wc);
    CHECK(rs.eng->check_jacobi().pass);
    for (size_t i = 0; i < rs.spec.gens.size(); i++) {
        Expr lhs = rs.embed(rs.dTable.at((int)i));
        Expr rhs = wc.eng->nth(wc.d, 0, rs.embed(Expr::gen((int)i)));
        CHECK(lhs == rhs);
    }
}

TEST_CASE("sl3 minimal grading: four generators close on a non-linear algebra") {
    LieAlgData g = make_sl3();
    auto [x, f] = minimal_pair_sl3(g);
    GoodGrading gr = grading_from_pair(g, x, f);
    WComplex wc = build_complex(g, gr, K());
    ReducedSpec rs = reduced_spec(wc);
    auto gens = solve_generators(rs, Rat(2));
    REQUIRE(gens.size() == 4);
    std::vector<Rat> weights;
    for (auto& wg : gens) {
        CHECK(rs.d_of(wg.E).is_zero());
        weights.push_back(wg.weight);
    }
    CHECK(weights == std::vector<Rat>{Rat(1), Rat(3, 2), Rat(3, 2), Rat(2)});
    // the bracket table closes on E-monomials and gives a consistent
    // non-linear Lie conformal algebra
    WAlgebraSpec ws = w_spec(rs, gens);
    CHECK(ws.eng->check_skewsymmetry().pass);
    CHECK(ws.eng->check_jacobi().pass);
}
