#include "lambdaforge/constructions.hpp"

namespace lf {

Lambda1 em_residual(Engine& eng, const EMField& em) {
    Lambda1 br = eng.bracket(em.L, em.L);
    Lambda1 expect;
    expect.add(0, eng.apply_T(em.L));
    expect.add(1, em.L.scaled(Scalar(2)));
    expect.add(3, Expr::vacuum(em.central_charge * Scalar(Rat(1, 12))));
    Lambda1 r = br + expect.scaled(Scalar(-1));
    r.trim();
    return r;
}

Lambda1 primary_residual(Engine& eng, const EMField& em, const Expr& a, const Rat& delta) {
    Lambda1 br = eng.bracket(em.L, a);
    Lambda1 expect;
    expect.add(0, eng.apply_T(a));
    expect.add(1, a.scaled(Scalar(delta)));
    Lambda1 r = br + expect.scaled(Scalar(-1));
    r.trim();
    return r;
}

LcaSpec cur(const LieAlgData& g, const Scalar& level) {
    std::vector<GeneratorDecl> decls;
    for (size_t i = 0; i < g.dim(); i++) {
        GeneratorDecl d;
        d.id = g.basis[i];
        d.parity = g.parity[i];
        d.delta = 1;
        d.zeta = 1;
        decls.push_back(d);
    }
    GenSet gs(decls);
    std::map<std::pair<int, int>, Lambda1> table;
    for (size_t i = 0; i < g.dim(); i++)
        for (size_t j = i; j < g.dim(); j++) {
            Lambda1 l;
            Expr lin;
            for (size_t m = 0; m < g.dim(); m++)
                if (!g.c[i][j][m].is_zero()) lin += Expr::gen((int)m, g.c[i][j][m]);
            l.add(0, lin);
            l.add(1, Expr::vacuum(level * g.form.at(i, j)));
            l.trim();
            if (!l.is_zero()) table.emplace(std::make_pair((int)i, (int)j), l);
        }
    return LcaSpec(std::move(gs), std::move(table), true, "cur_" + g.name);
}

LcaSpec fermion_charged(const std::vector<ChargedPair>& pairs) {
    std::vector<GeneratorDecl> decls;
    size_t n = pairs.size();
    for (auto& p : pairs) {
        GeneratorDecl d;
        d.id = "ph_" + p.base;
        d.parity = p.parity;
        d.delta = Rat(1) - p.m;
        d.zeta = 1;
        decls.push_back(d);
    }
    for (auto& p : pairs) {
        GeneratorDecl d;
        d.id = "ps_" + p.base;
        d.parity = p.parity;
        d.delta = p.m;
        d.zeta = 1;
        decls.push_back(d);
    }
    GenSet gs(decls);
    std::map<std::pair<int, int>, Lambda1> table;
    for (size_t i = 0; i < n; i++) {
        Lambda1 l;
        l.add(0, Expr::vacuum(Scalar(1)));
        table.emplace(std::make_pair((int)i, (int)(n + i)), l);
    }
    return LcaSpec(std::move(gs), std::move(table), true, "fermion_charged");
}

LcaSpec fermion_neutral(const std::vector<std::string>& names, const std::vector<Parity>& parities,
                        const Mat& pairing) {
    size_t n = names.size();
    if (det(pairing).is_zero()) fail(Errc::DegeneratePairing, "neutral pairing is degenerate");
    std::vector<GeneratorDecl> decls;
    for (size_t i = 0; i < n; i++) {
        GeneratorDecl d;
        d.id = "Ph_" + names[i];
        d.parity = parities[i];
        d.delta = Rat(1, 2);
        d.zeta = 1;
        decls.push_back(d);
    }
    GenSet gs(decls);
    std::map<std::pair<int, int>, Lambda1> table;
    for (size_t i = 0; i < n; i++)
        for (size_t j = i; j < n; j++) {
            if (pairing.at(i, j).is_zero()) continue;
            Lambda1 l;
            l.add(0, Expr::vacuum(pairing.at(i, j)));
            table.emplace(std::make_pair((int)i, (int)j), l);
        }
    return LcaSpec(std::move(gs), std::move(table), true, "fermion_neutral");
}

EMField sugawara(Engine& eng, const LieAlgData& g, const Scalar& level) {
    Scalar hd = g.dual_coxeter();
    Scalar denom = level + hd;
    if (denom.is_zero()) fail(Errc::CriticalLevel, "level + dual Coxeter number vanishes");
    auto inv = inverse(g.form);
    if (!inv) fail(Errc::DegenerateForm, "form not invertible");
    Expr sum;
    for (size_t i = 0; i < g.dim(); i++) {
        // u^i = sum_m (B^{-1})_{mi} u_m
        Expr ud;
        for (size_t m = 0; m < g.dim(); m++)
            if (!inv->at(m, i).is_zero()) ud += Expr::gen((int)m, inv->at(m, i));
        sum += eng.product(ud, Expr::gen((int)i));
    }
    EMField em;
    em.L = sum.scaled((Scalar(2) * denom).inv());
    em.central_charge = level * Scalar(g.sdim()) / denom;
    return em;
}

EMField fermionic_em_neutral(Engine& eng, const Mat& pairing) {
    auto inv = inverse(pairing);
    if (!inv) fail(Errc::DegeneratePairing, "neutral pairing is degenerate");
    size_t n = pairing.nr;
    long sdim = 0;
    for (size_t i = 0; i < n; i++)
        sdim += eng.gens()[i].parity == Parity::Even ? 1 : -1;
    Expr sum;
    for (size_t i = 0; i < n; i++) {
        // Ph^i = sum_m (N^{-1})_{mi} Ph_m ; L = 1/2 sum :(T Ph^i) Ph_i:
        Expr ud;
        for (size_t m = 0; m < n; m++)
            if (!inv->at(m, i).is_zero()) ud += Expr::gen((int)m, inv->at(m, i));
        sum += eng.product(eng.apply_T(ud), Expr::gen((int)i));
    }
    EMField em;
    em.L = sum.scaled(Scalar(Rat(1, 2)));
    em.central_charge = Scalar(Rat(-sdim, 2));
    return em;
}

EMField fermionic_em_charged(Engine& eng, const std::vector<ChargedPair>& pairs) {
    size_t n = pairs.size();
    Expr sum;
    Scalar c(0);
    for (size_t i = 0; i < n; i++) {
        Expr ph = Expr::gen((int)i), ps = Expr::gen((int)(n + i));
        sum += eng.product(ps, eng.apply_T(ph)).scaled(Scalar(pairs[i].m).neg());
        sum += eng.product(eng.apply_T(ps), ph).scaled(Scalar(Rat(1) - pairs[i].m));
        Rat m = pairs[i].m;
        Rat cc = Rat(12) * m * m - Rat(12) * m + 2;
        c = c + Scalar(parity_sign(pairs[i].parity) * cc);
    }
    EMField em;
    em.L = sum;
    em.central_charge = c;
    return em;
}

// ------------------------------------------------------------ Kac-Todorov

Expr KacTodorov::cur_of(const Vec& a) const {
    Expr e;
    for (size_t i = 0; i < g.dim(); i++)
        if (!a[i].is_zero()) e += Expr::gen((int)i, a[i]);
    return e;
}

Expr KacTodorov::bar_of(const Vec& a) const {
    Expr e;
    for (size_t i = 0; i < g.dim(); i++)
        if (!a[i].is_zero()) e += Expr::gen((int)(g.dim() + i), a[i]);
    return e;
}

KacTodorov kac_todorov(const LieAlgData& g, const Scalar& level) {
    KacTodorov kt;
    kt.g = g;
    Scalar hd = g.dual_coxeter();
    kt.kappa = level + hd;
    if (kt.kappa.is_zero()) fail(Errc::CriticalLevel, "k + h_dual = 0 in Kac-Todorov");
    size_t n = g.dim();
    std::vector<GeneratorDecl> decls;
    for (size_t i = 0; i < n; i++) {
        GeneratorDecl d;
        d.id = g.basis[i];
        d.parity = g.parity[i];
        d.delta = 1;
        decls.push_back(d);
    }
    for (size_t i = 0; i < n; i++) {
        GeneratorDecl d;
        d.id = "b" + g.basis[i];
        d.parity = g.parity[i] == Parity::Even ? Parity::Odd : Parity::Even;
        d.delta = Rat(1, 2);
        decls.push_back(d);
    }
    GenSet gs(decls);
    std::map<std::pair<int, int>, Lambda1> table;
    auto lin = [&](const Vec& v, size_t off) {
        Expr e;
        for (size_t m = 0; m < n; m++)
            if (!v[m].is_zero()) e += Expr::gen((int)(off + m), v[m]);
        return e;
    };
    for (size_t i = 0; i < n; i++)
        for (size_t j = 0; j < n; j++) {
            Vec br = g.bracket(g.unit(i), g.unit(j));
            if (j >= i) {
                Lambda1 l;
                l.add(0, lin(br, 0));
                l.add(1, Expr::vacuum(kt.kappa * g.form.at(i, j)));
                l.trim();
                if (!l.is_zero()) table.emplace(std::make_pair((int)i, (int)j), l);
                Lambda1 lb;
                lb.add(0, Expr::vacuum(kt.kappa * g.form.at(i, j)));
                lb.trim();
                if (!lb.is_zero()) table.emplace(std::make_pair((int)(n + i), (int)(n + j)), lb);
            }
            // [a_lam bbar] = [a,b]bar for all pairs
            Lambda1 lab;
            lab.add(0, lin(br, n));
            lab.trim();
            if (!lab.is_zero()) table.emplace(std::make_pair((int)i, (int)(n + j)), lab);
        }
    kt.spec = LcaSpec(std::move(gs), std::move(table), true, "kt_" + g.name);
    kt.eng = std::make_shared<Engine>(kt.spec);
    Engine& eng = *kt.eng;
    // orthonormal-basis sums rewritten with dual bases
    auto inv = inverse(g.form);
    if (!inv) fail(Errc::DegenerateForm, "form not invertible");
    auto udual = [&](size_t i) {
        Vec v(n, Scalar(0));
        for (size_t m = 0; m < n; m++) v[m] = inv->at(m, i);
        return v;
    };
    Scalar kapInv = kt.kappa.inv();
    // G = 1/kappa ( sum_i :a^i bbar_i: + 1/(3 kappa) sum_{i,j} :[a^i,a^j]bar bbar_i bbar_j: )
    Expr G;
    for (size_t i = 0; i < n; i++) G += eng.product(kt.cur_of(udual(i)), kt.bar_of(g.unit(i)));
    Expr cubic;
    for (size_t i = 0; i < n; i++)
        for (size_t j = 0; j < n; j++) {
            Vec br = g.bracket(udual(i), udual(j));
            if (g.is_zero(br)) continue;
            Expr tail = eng.product(kt.bar_of(g.unit(i)), kt.bar_of(g.unit(j)));
            cubic += eng.product(kt.bar_of(br), tail);
        }
    G += cubic.scaled(kapInv * Scalar(Rat(1, 3)));
    kt.G = G.scaled(kapInv);
    // L = 1/(2 kappa)( sum_i :a^i a_i: + sum_i :(T bbar^i) bbar_i:
    //                  + 1/kappa sum_{i,j} :bbar^i [a_i,a_j] bbar^j: )
    Expr L;
    for (size_t i = 0; i < n; i++) L += eng.product(kt.cur_of(udual(i)), kt.cur_of(g.unit(i)));
    for (size_t i = 0; i < n; i++)
        L += eng.product(eng.apply_T(kt.bar_of(udual(i))), kt.bar_of(g.unit(i)));
    Expr quart;
    for (size_t i = 0; i < n; i++)
        for (size_t j = 0; j < n; j++) {
            Vec br = g.bracket(g.unit(i), g.unit(j));
            if (g.is_zero(br)) continue;
            Expr tail = eng.product(kt.cur_of(br), kt.bar_of(udual(j)));
            quart += eng.product(kt.bar_of(udual(i)), tail);
        }
    L += quart.scaled(kapInv);
    kt.L = L.scaled((Scalar(2) * kt.kappa).inv());
    kt.central_charge = level * Scalar((long)n) / kt.kappa + Scalar(Rat((long)n, 2));
    return kt;
}

DiracData dirac(const LieAlgData& g) {
    DiracData d;
    Scalar hd = g.dual_coxeter();
    d.hdual = hd;
    d.kt = kac_todorov(g, Scalar(1) - hd); // k + h_dual = 1
    d.zhu = std::make_shared<ZhuAlgebra>(*d.kt.eng);
    d.D = d.zhu->pi_Z(d.kt.G);
    d.C = d.zhu->pi_Z(d.kt.L);
    return d;
}

} // namespace lf
