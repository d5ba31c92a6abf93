#include "lambdaforge/walgebra.hpp"

#include <algorithm>
#include <functional>

namespace lf {

// ------------------------------------------------------------ WComplex

Expr WComplex::cur_of(const Vec& a) const {
    Expr e;
    for (size_t i = 0; i < g.dim(); i++)
        if (!a[i].is_zero()) e += Expr::gen(curIdx[i], a[i]);
    return e;
}

Expr WComplex::phi_of(const Vec& a) const {
    // phi_a = sum_{alpha in S+} (a|u^alpha) phi_alpha
    Expr e;
    for (auto& [alpha, gi] : phIdx) {
        Scalar c = g.pair(a, db.udual[alpha]);
        if (!c.is_zero()) e += Expr::gen(gi, c);
    }
    return e;
}

Expr WComplex::phiup_of(const Vec& a) const {
    // phi^a = sum_{alpha in S+} (u_alpha|a) phi^alpha
    Expr e;
    for (auto& [alpha, gi] : psIdx) {
        Scalar c = g.pair(g.unit(alpha), a);
        if (!c.is_zero()) e += Expr::gen(gi, c);
    }
    return e;
}

Expr WComplex::Phi_of(const Vec& a) const {
    // Phi_a = sum_{alpha in S1/2} (f|[a, v_alpha]) Phi_alpha
    Expr e;
    auto half = gr.s_half();
    for (size_t hi = 0; hi < half.size(); hi++) {
        Scalar c = g.pair(gr.f, g.bracket(a, db.vhalf[hi]));
        if (!c.is_zero()) e += Expr::gen(PhIdx.at(half[hi]), c);
    }
    return e;
}

Expr WComplex::J(const Vec& a) const {
    Expr e = cur_of(a);
    Expr corr;
    for (auto& [alpha, ps] : psIdx) {
        Vec br = g.bracket(g.unit(alpha), a);
        Expr ph = phi_of(br);
        for (auto& [m, c] : ph.t) {
            Monomial w;
            w.w.push_back(Term{ps, 0});
            w.w.insert(w.w.end(), m.w.begin(), m.w.end());
            corr.add(w, c);
        }
    }
    return e + eng->normal_form(corr);
}

Scalar WComplex::psi(const Vec& a, const Vec& b) const {
    Scalar s = k * g.pair(a, b);
    auto plus = [&](const Rat& r) { return r > 0; };
    for (int alpha : gr.s_plus()) {
        Vec w = gr.project(g.bracket(b, g.unit(alpha)), plus);
        w = gr.project(g.bracket(a, w), plus);
        Scalar diag = w[alpha];
        if (!diag.is_zero())
            s = s + (g.parity[alpha] == Parity::Odd ? diag.neg() : diag);
    }
    return s;
}

Lambda1 WComplex::d_gen_closed(int genIdx) const {
    Lambda1 r;
    size_t n = g.dim();
    auto splus = gr.s_plus();
    // currents
    for (size_t i = 0; i < n; i++) {
        if (curIdx[i] != genIdx) continue;
        Expr c0;
        for (int alpha : splus) {
            Expr cur = cur_of(g.bracket(g.unit(alpha), g.unit(i)));
            if (cur.is_zero()) continue;
            Expr w = eng->product(Expr::gen(psIdx.at(alpha)), cur);
            c0 += (g.parity[alpha] == Parity::Odd) ? w.neg() : w;
        }
        Expr pa = phiup_of(g.unit(i));
        int sa = parity_sign(g.parity[i]);
        c0 += eng->apply_T(pa).scaled(k * Scalar((long)sa));
        r.add(0, eng->normal_form(c0));
        r.add(1, pa.scaled(k * Scalar((long)sa)));
        r.trim();
        return r;
    }
    for (auto& [alpha, gi] : phIdx) {
        if (gi != genIdx) continue;
        // [d_lam phi_a] = pi_+ a + (a|f) + s(a) Phi_a + sum :phi^beta phi_{[u_beta, a]}:
        Vec a = g.unit(alpha);
        Expr c0 = cur_of(a) + Expr::vacuum(g.pair(a, gr.f));
        c0 += Phi_of(a).scaled(Scalar((long)parity_sign(g.parity[alpha])));
        for (int beta : splus) {
            Expr ph = phi_of(g.bracket(g.unit(beta), a));
            if (ph.is_zero()) continue;
            c0 += eng->product(Expr::gen(psIdx.at(beta)), ph);
        }
        r.add(0, eng->normal_form(c0));
        r.trim();
        return r;
    }
    for (auto& [alpha, gi] : psIdx) {
        if (gi != genIdx) continue;
        // [d_lam phi^a] = 1/2 sum s(beta) :phi^beta phi^{[u_beta, a]}:, a = u^alpha
        Expr c0;
        for (int beta : splus) {
            Expr ps = phiup_of(g.bracket(g.unit(beta), db.udual[alpha]));
            if (ps.is_zero()) continue;
            Expr w = eng->product(Expr::gen(psIdx.at(beta)), ps);
            c0 += (g.parity[beta] == Parity::Odd) ? w.neg() : w;
        }
        r.add(0, c0.scaled(Scalar(Rat(1, 2))));
        r.trim();
        return r;
    }
    for (auto& [alpha, gi] : PhIdx) {
        if (gi != genIdx) continue;
        // [d_lam Phi_a] = phi^{[a, f]}
        r.add(0, phiup_of(g.bracket(g.unit(alpha), gr.f)));
        r.trim();
        return r;
    }
    fail(Errc::BadArgument, "generator index out of range in d_gen_closed");
}

WComplex build_complex(const LieAlgData& g, const GoodGrading& gr, const Scalar& level) {
    WComplex wc;
    wc.g = g;
    wc.gr = gr;
    wc.db = dual_bases(g, gr);
    wc.k = level;
    size_t n = g.dim();
    auto splus = gr.s_plus();
    auto shalf = gr.s_half();

    std::vector<GeneratorDecl> decls;
    wc.curIdx.resize(n);
    for (size_t i = 0; i < n; i++) {
        GeneratorDecl d;
        d.id = g.basis[i];
        d.parity = g.parity[i];
        d.delta = Rat(1) - gr.j[i];
        d.zeta = 1;
        d.charge = 0;
        wc.curIdx[i] = (int)decls.size();
        decls.push_back(d);
    }
    for (int alpha : splus) {
        GeneratorDecl d;
        d.id = "ph_" + g.basis[alpha];
        d.parity = g.parity[alpha] == Parity::Even ? Parity::Odd : Parity::Even;
        d.delta = Rat(1) - gr.j[alpha];
        d.zeta = 1;
        d.charge = -1;
        wc.phIdx[alpha] = (int)decls.size();
        decls.push_back(d);
    }
    for (int alpha : splus) {
        GeneratorDecl d;
        d.id = "ps_" + g.basis[alpha];
        d.parity = g.parity[alpha] == Parity::Even ? Parity::Odd : Parity::Even;
        d.delta = gr.j[alpha];
        d.zeta = 1;
        d.charge = 1;
        wc.psIdx[alpha] = (int)decls.size();
        decls.push_back(d);
    }
    for (int alpha : shalf) {
        GeneratorDecl d;
        d.id = "Ph_" + g.basis[alpha];
        d.parity = g.parity[alpha];
        d.delta = Rat(1, 2);
        d.zeta = 1;
        d.charge = 0;
        wc.PhIdx[alpha] = (int)decls.size();
        decls.push_back(d);
    }
    GenSet gs(decls);

    std::map<std::pair<int, int>, Lambda1> table;
    // currents
    for (size_t i = 0; i < n; i++)
        for (size_t j = i; j < n; j++) {
            Lambda1 l;
            Expr lin;
            Vec br = g.bracket(g.unit(i), g.unit(j));
            for (size_t m = 0; m < n; m++)
                if (!br[m].is_zero()) lin += Expr::gen(wc.curIdx[m], br[m]);
            l.add(0, lin);
            l.add(1, Expr::vacuum(level * g.form.at(i, j)));
            l.trim();
            if (!l.is_zero()) table.emplace(std::make_pair(wc.curIdx[i], wc.curIdx[j]), l);
        }
    // charged: [phi_alpha lam phi^beta] = delta
    for (int alpha : splus) {
        Lambda1 l;
        l.add(0, Expr::vacuum(Scalar(1)));
        table.emplace(std::make_pair(wc.phIdx[alpha], wc.psIdx[alpha]), l);
    }
    // neutral: [Phi_alpha lam Phi_beta] = (f|[u_alpha, u_beta])
    for (size_t a = 0; a < shalf.size(); a++)
        for (size_t b = a; b < shalf.size(); b++) {
            Scalar c = g.pair(gr.f, g.bracket(g.unit(shalf[a]), g.unit(shalf[b])));
            if (c.is_zero()) continue;
            Lambda1 l;
            l.add(0, Expr::vacuum(c));
            table.emplace(std::make_pair(wc.PhIdx[shalf[a]], wc.PhIdx[shalf[b]]), l);
        }
    wc.spec = LcaSpec(std::move(gs), std::move(table), true, "C_" + g.name);
    wc.eng = std::make_shared<Engine>(wc.spec);

    // d = sum s(alpha):phi^alpha u_alpha: + sum :phi^alpha Phi_alpha: + phi^f
    //     + 1/2 sum s(alpha):phi^alpha phi^beta phi_{[u_beta,u_alpha]}:
    Expr draw;
    for (int alpha : splus) {
        Monomial w;
        w.w = {Term{wc.psIdx[alpha], 0}, Term{wc.curIdx[alpha], 0}};
        draw.add(w, Scalar((long)parity_sign(g.parity[alpha])));
    }
    for (int alpha : shalf) {
        Monomial w;
        w.w = {Term{wc.psIdx[alpha], 0}, Term{wc.PhIdx[alpha], 0}};
        draw.add(w, Scalar(1));
    }
    draw += wc.phiup_of(gr.f);
    for (int alpha : splus)
        for (int beta : splus) {
            Expr ph = wc.phi_of(g.bracket(g.unit(beta), g.unit(alpha)));
            if (ph.is_zero()) continue;
            int s = parity_sign(g.parity[alpha]);
            for (auto& [m, c] : ph.t) {
                Monomial w;
                w.w = {Term{wc.psIdx[alpha], 0}, Term{wc.psIdx[beta], 0}};
                w.w.insert(w.w.end(), m.w.begin(), m.w.end());
                draw.add(w, c * Scalar(Rat(s, 2)));
            }
        }
    wc.d = wc.eng->normal_form(draw);

    // L = L^g + Tx + L^ne + L^ch
    Expr L;
    {
        Scalar hd = g.dual_coxeter();
        Scalar denom = level + hd;
        if (denom.is_zero()) fail(Errc::CriticalLevel, "k = -h_dual in W-complex");
        auto inv = inverse(g.form);
        Expr sum;
        for (size_t i = 0; i < n; i++) {
            Expr ud;
            for (size_t m = 0; m < n; m++)
                if (!inv->at(m, i).is_zero()) ud += Expr::gen(wc.curIdx[m], inv->at(m, i));
            sum += wc.eng->product(ud, Expr::gen(wc.curIdx[i]));
        }
        L += sum.scaled((Scalar(2) * denom).inv());
        L += wc.eng->apply_T(wc.cur_of(gr.x));
        // L^ne = 1/2 sum :(T Phi^alpha) Phi_alpha:
        for (size_t hi = 0; hi < shalf.size(); hi++) {
            Expr up = wc.Phi_of(wc.db.vhalf[hi]);
            L += wc.eng->product(wc.eng->apply_T(up), Expr::gen(wc.PhIdx[shalf[hi]]))
                     .scaled(Scalar(Rat(1, 2)));
        }
        // L^ch = sum_alpha ( -j_alpha :phi^alpha (T phi_alpha): + (1-j_alpha) :(T phi^alpha) phi_alpha: )
        for (int alpha : splus) {
            Expr ps = Expr::gen(wc.psIdx[alpha]), ph = Expr::gen(wc.phIdx[alpha]);
            L += wc.eng->product(ps, wc.eng->apply_T(ph)).scaled(Scalar(gr.j[alpha]).neg());
            L += wc.eng->product(wc.eng->apply_T(ps), ph).scaled(Scalar(Rat(1) - gr.j[alpha]));
        }
        // c_k(g,x) = k sdim g/(k+hd) - 12k(x|x) - sum_{S+} s(a)(12j^2-12j+2) - 1/2 sdim g_1/2
        Scalar c = level * Scalar(g.sdim()) / denom - Scalar(12) * level * g.pair(gr.x, gr.x);
        for (int alpha : splus) {
            Rat j = gr.j[alpha];
            c = c - Scalar((Rat(12) * j * j - Rat(12) * j + 2) * parity_sign(g.parity[alpha]));
        }
        long sdimHalf = 0;
        for (int alpha : shalf) sdimHalf += parity_sign(g.parity[alpha]);
        c = c - Scalar(Rat(sdimHalf, 2));
        wc.L.L = wc.eng->normal_form(L);
        wc.L.central_charge = c;
        wc.ck = c;
    }
    return wc;
}

// ------------------------------------------------------------ ReducedSpec

int ReducedSpec::jgen(int basisIdx) const {
    for (size_t i = 0; i < sle.size(); i++)
        if (sle[i] == basisIdx) return (int)i;
    fail(Errc::BadArgument, "basis index not in g_<=");
}

int ReducedSpec::psgen(int basisIdx) const {
    for (size_t i = 0; i < splus.size(); i++)
        if (splus[i] == basisIdx) return (int)(sle.size() + i);
    fail(Errc::BadArgument, "basis index not in S_+");
}

int ReducedSpec::Phgen(int basisIdx) const {
    for (size_t i = 0; i < shalf.size(); i++)
        if (shalf[i] == basisIdx) return (int)(sle.size() + splus.size() + i);
    fail(Errc::BadArgument, "basis index not in S_1/2");
}

Expr ReducedSpec::J_of(const Vec& a) const {
    Expr e;
    for (size_t i = 0; i < sle.size(); i++)
        if (!a[sle[i]].is_zero()) e += Expr::gen((int)i, a[sle[i]]);
    // nothing above g_0 may appear
    for (size_t i = 0; i < a.size(); i++)
        if (!a[i].is_zero() && wc->gr.j[i] > 0) fail(Errc::BadArgument, "J_of needs a in g_<=");
    return e;
}

Expr ReducedSpec::phiup_of(const Vec& a) const {
    Expr e;
    for (size_t i = 0; i < splus.size(); i++) {
        Scalar c = wc->g.pair(wc->g.unit(splus[i]), a);
        if (!c.is_zero()) e += Expr::gen((int)(sle.size() + i), c);
    }
    return e;
}

Expr ReducedSpec::Phi_of(const Vec& a) const {
    Expr e;
    for (size_t i = 0; i < shalf.size(); i++) {
        Scalar c = wc->g.pair(wc->gr.f, wc->g.bracket(a, wc->db.vhalf[i]));
        if (!c.is_zero()) e += Expr::gen((int)(sle.size() + splus.size() + i), c);
    }
    return e;
}

Expr ReducedSpec::d_of(const Expr& x) const {
    Expr r;
    const TermMeta& meta = eng->meta();
    for (auto& [m, c] : x.t) {
        int sign = 1;
        for (size_t i = 0; i < m.w.size(); i++) {
            auto it = dTable.find(m.w[i].gen);
            if (it != dTable.end() && !it->second.is_zero()) {
                Expr dt = apply_T_divided_raw(it->second, m.w[i].tpow);
                std::vector<Term> prefix(m.w.begin(), m.w.begin() + i);
                Monomial suffix;
                suffix.w.assign(m.w.begin() + i + 1, m.w.end());
                // the prefix factors re-enter one by one (exact), never as a
                // composite product
                Expr piece = eng->splice(prefix, eng->product(dt, Expr::single(suffix)));
                r += piece.scaled(c * Scalar((long)sign));
            }
            if (meta.parity(m.w[i]) == Parity::Odd) sign = -sign;
        }
    }
    return r;
}

Expr ReducedSpec::embed(const Expr& x) const {
    Expr r;
    size_t nj = sle.size(), np = splus.size();
    for (auto& [m, c] : x.t) {
        Expr acc = Expr::vacuum();
        for (auto it = m.w.rbegin(); it != m.w.rend(); ++it) {
            Expr fac;
            int gi = it->gen;
            if (gi < (int)nj)
                fac = wc->J(wc->g.unit(sle[gi]));
            else if (gi < (int)(nj + np))
                fac = Expr::gen(wc->psIdx.at(splus[gi - nj]));
            else
                fac = Expr::gen(wc->PhIdx.at(shalf[gi - nj - np]));
            fac = wc->eng->apply_T_divided(fac, it->tpow);
            acc = wc->eng->product(fac, acc);
        }
        r += acc.scaled(c);
    }
    return r;
}

ReducedSpec reduced_spec(const WComplex& wc) {
    ReducedSpec rs;
    rs.wc = &wc;
    const LieAlgData& g = wc.g;
    rs.sle = wc.gr.s_le();
    rs.splus = wc.gr.s_plus();
    rs.shalf = wc.gr.s_half();

    std::vector<GeneratorDecl> decls;
    for (int b : rs.sle) {
        GeneratorDecl d;
        d.id = "J_" + g.basis[b];
        d.parity = g.parity[b];
        d.delta = Rat(1) - wc.gr.j[b];
        d.zeta = d.delta;
        d.charge = 0;
        d.bigrade = std::make_pair(wc.gr.j[b] - Rat(1, 2), -wc.gr.j[b] + Rat(1, 2));
        decls.push_back(d);
    }
    for (int b : rs.splus) {
        GeneratorDecl d;
        d.id = "ps_" + g.basis[b];
        d.parity = g.parity[b] == Parity::Even ? Parity::Odd : Parity::Even;
        d.delta = wc.gr.j[b];
        d.zeta = d.delta;
        d.charge = 1;
        d.bigrade = std::make_pair(-wc.gr.j[b] + Rat(1, 2), wc.gr.j[b] + Rat(1, 2));
        decls.push_back(d);
    }
    for (int b : rs.shalf) {
        GeneratorDecl d;
        d.id = "Ph_" + g.basis[b];
        d.parity = g.parity[b];
        d.delta = Rat(1, 2);
        d.zeta = d.delta;
        d.charge = 0;
        d.bigrade = std::make_pair(Rat(0), Rat(0));
        decls.push_back(d);
    }
    GenSet gs(decls);

    size_t nj = rs.sle.size();
    std::map<std::pair<int, int>, Lambda1> table;
    auto jof = [&](const Vec& v) {
        Expr e;
        for (size_t i = 0; i < nj; i++)
            if (!v[rs.sle[i]].is_zero()) e += Expr::gen((int)i, v[rs.sle[i]]);
        return e;
    };
    auto psof = [&](const Vec& v) {
        Expr e;
        for (size_t i = 0; i < rs.splus.size(); i++) {
            Scalar c = g.pair(g.unit(rs.splus[i]), v);
            if (!c.is_zero()) e += Expr::gen((int)(nj + i), c);
        }
        return e;
    };
    for (size_t a = 0; a < nj; a++)
        for (size_t b = a; b < nj; b++) {
            Lambda1 l;
            l.add(0, jof(g.bracket(g.unit(rs.sle[a]), g.unit(rs.sle[b]))));
            l.add(1, Expr::vacuum(wc.psi(g.unit(rs.sle[a]), g.unit(rs.sle[b]))));
            l.trim();
            if (!l.is_zero()) table.emplace(std::make_pair((int)a, (int)b), l);
        }
    for (size_t a = 0; a < nj; a++)
        for (size_t b = 0; b < rs.splus.size(); b++) {
            // [J_a lam phi^{u^beta}] = phi^{[a, u^beta]}
            Lambda1 l;
            l.add(0, psof(g.bracket(g.unit(rs.sle[a]), wc.db.udual[rs.splus[b]])));
            l.trim();
            if (!l.is_zero()) table.emplace(std::make_pair((int)a, (int)(nj + b)), l);
        }
    for (size_t a = 0; a < rs.shalf.size(); a++)
        for (size_t b = a; b < rs.shalf.size(); b++) {
            Scalar c = g.pair(wc.gr.f, g.bracket(g.unit(rs.shalf[a]), g.unit(rs.shalf[b])));
            if (c.is_zero()) continue;
            Lambda1 l;
            l.add(0, Expr::vacuum(c));
            table.emplace(std::make_pair((int)(nj + rs.splus.size() + a),
                                         (int)(nj + rs.splus.size() + b)),
                          l);
        }
    rs.spec = LcaSpec(std::move(gs), std::move(table), true, "W_" + g.name);
    rs.eng = std::make_shared<Engine>(rs.spec);

    // action of the differential on the reduced generators
    for (size_t a = 0; a < nj; a++) {
        Vec ua = g.unit(rs.sle[a]);
        int sa = parity_sign(g.parity[rs.sle[a]]);
        Expr dj;
        for (int alpha : rs.splus) {
            int s = parity_sign(g.parity[alpha]);
            Vec br = g.bracket(g.unit(alpha), ua);
            Vec le = br;
            for (size_t q = 0; q < le.size(); q++)
                if (wc.gr.j[q] > 0) le[q] = Scalar(0);
            Expr jj = jof(le);
            if (!jj.is_zero()) {
                Expr w = rs.eng->product(Expr::gen(rs.psgen(alpha)), jj);
                dj += (s < 0) ? w.neg() : w;
            }
            Expr Ph = rs.Phi_of(br);
            if (!Ph.is_zero()) {
                Expr w = rs.eng->product(Expr::gen(rs.psgen(alpha)), Ph);
                dj += (sa < 0) ? w : w.neg(); // -s(a) term
            }
            Scalar ps = wc.psi(ua, g.unit(alpha));
            if (!ps.is_zero()) dj += rs.eng->apply_T(Expr::gen(rs.psgen(alpha))).scaled(ps);
        }
        Expr tail = rs.phiup_of(g.bracket(ua, wc.gr.f)).scaled(Scalar((long)-sa));
        dj += tail;
        rs.dTable[(int)a] = rs.eng->normal_form(dj);
    }
    for (size_t b = 0; b < rs.splus.size(); b++) {
        // d(phi^a) = 1/2 sum s(alpha) :phi^alpha phi^{[u_alpha, a]}: , a = u^beta
        Expr dp;
        for (int alpha : rs.splus) {
            int s = parity_sign(g.parity[alpha]);
            Expr ps = rs.phiup_of(g.bracket(g.unit(alpha), wc.db.udual[rs.splus[b]]));
            if (ps.is_zero()) continue;
            Expr w = rs.eng->product(Expr::gen(rs.psgen(alpha)), ps);
            dp += (s < 0) ? w.neg() : w;
        }
        rs.dTable[(int)(nj + b)] = rs.eng->normal_form(dp.scaled(Scalar(Rat(1, 2))));
    }
    for (size_t a = 0; a < rs.shalf.size(); a++) {
        // d(Phi_a) = phi^{[a,f]}
        rs.dTable[(int)(nj + rs.splus.size() + a)] =
            rs.phiup_of(g.bracket(g.unit(rs.shalf[a]), wc.gr.f));
    }
    return rs;
}

// ------------------------------------------------------------ generator solving

namespace {

// ordered words over the reduced generators with given total Delta, zero
// charge and p-degree strictly above the threshold
void enumerate_words(const GenSet& gens, const Rat& delta, const Rat& pmin,
                     std::vector<Monomial>& out) {
    std::vector<Term> acc;
    std::function<void(Rat, Term)> rec = [&](Rat left, Term minTerm) {
        if (left == 0) {
            // check charge and p-degree
            long ch = 0;
            Rat p = 0;
            for (auto& t : acc) {
                ch += gens[t.gen].charge;
                if (gens[t.gen].bigrade) p += gens[t.gen].bigrade->first;
            }
            if (ch == 0 && p > pmin) out.push_back(Monomial{acc});
            return;
        }
        if (left < 0) return;
        for (int gi = minTerm.gen; gi < (int)gens.size(); gi++) {
            int tmin = (gi == minTerm.gen) ? minTerm.tpow : 0;
            Rat base = gens[gi].delta;
            for (int tp = tmin;; tp++) {
                Rat dt = base + tp;
                if (dt > left) break;
                if (dt <= 0) fail(Errc::GradingViolation, "non-positive weight generator");
                Term t{gi, tp};
                if (!acc.empty()) {
                    const Term& last = acc.back();
                    int cmp = compare_index(last, t);
                    if (cmp > 0) continue;
                    if (cmp == 0 && gens[t.gen].parity == Parity::Odd) continue;
                }
                acc.push_back(t);
                rec(left - dt, t);
                acc.pop_back();
            }
        }
    };
    rec(delta, Term{0, 0});
    std::sort(out.begin(), out.end());
}

} // namespace

std::vector<WGenerator> solve_generators(ReducedSpec& rs, const Rat& maxDelta) {
    std::vector<WGenerator> out;
    const GoodGrading& gr = rs.wc->gr;
    for (size_t i = 0; i < gr.gf_basis.size(); i++) {
        Rat weight = Rat(1) - gr.gf_j[i];
        if (weight > maxDelta) continue;
        Expr lead = rs.J_of(gr.gf_basis[i]);
        Rat pmin = gr.gf_j[i] - Rat(1, 2);
        std::vector<Monomial> cands;
        enumerate_words(rs.spec.gens, weight, pmin, cands);
        // drop candidates equal to a bare J that appears in the lead
        Expr dlead = rs.d_of(lead);
        std::vector<Expr> dm;
        dm.reserve(cands.size());
        for (auto& m : cands) dm.push_back(rs.d_of(Expr::single(m)));
        // collect target monomials
        std::map<Monomial, size_t> rows;
        auto note = [&](const Expr& e) {
            for (auto& [m, c] : e.t)
                if (!rows.count(m)) rows.emplace(m, rows.size());
        };
        note(dlead);
        for (auto& e : dm) note(e);
        Mat sys(rows.size(), cands.size());
        std::vector<Scalar> rhs(rows.size(), Scalar(0));
        for (size_t c = 0; c < cands.size(); c++)
            for (auto& [m, s] : dm[c].t) sys.at(rows.at(m), c) = s;
        for (auto& [m, s] : dlead.t) rhs[rows.at(m)] = s.neg();
        auto sol = solve(sys, rhs);
        if (!sol)
            fail(Errc::NoSolution, "no d-closed extension of J at weight " + rat_str(weight));
        Expr E = lead;
        for (size_t c = 0; c < cands.size(); c++)
            if (!(*sol)[c].is_zero()) E += Expr::single(cands[c], (*sol)[c]);
        WGenerator wg;
        wg.u = gr.gf_basis[i];
        wg.jdeg = gr.gf_j[i];
        wg.weight = weight;
        wg.E = E;
        out.push_back(std::move(wg));
    }
    std::sort(out.begin(), out.end(),
              [](const WGenerator& a, const WGenerator& b) { return a.weight < b.weight; });
    return out;
}

Lambda1 w_bracket(ReducedSpec& rs, const WGenerator& a, const WGenerator& b) {
    return rs.eng->bracket(a.E, b.E);
}

Expr express_in_generators(ReducedSpec& rs, const std::vector<WGenerator>& gens, const Expr& x,
                           const GenSet& egens) {
    if (x.is_zero()) return {};
    TermMeta meta(rs.spec.gens);
    Rat delta = *meta.homogeneous_delta(x);
    std::vector<Monomial> cands;
    enumerate_words(egens, delta, Rat(-1000000), cands);
    std::vector<Expr> expanded;
    for (auto& m : cands) {
        Expr acc = Expr::vacuum();
        for (auto it = m.w.rbegin(); it != m.w.rend(); ++it) {
            Expr fac = rs.eng->apply_T_divided(gens[it->gen].E, it->tpow);
            acc = rs.eng->product(fac, acc);
        }
        expanded.push_back(acc);
    }
    std::map<Monomial, size_t> rows;
    auto note = [&](const Expr& e) {
        for (auto& [m, c] : e.t)
            if (!rows.count(m)) rows.emplace(m, rows.size());
    };
    note(x);
    for (auto& e : expanded) note(e);
    Mat sys(rows.size(), cands.size());
    std::vector<Scalar> rhs(rows.size(), Scalar(0));
    for (size_t c = 0; c < cands.size(); c++)
        for (auto& [m, s] : expanded[c].t) sys.at(rows.at(m), c) = s;
    for (auto& [m, s] : x.t) rhs[rows.at(m)] = s;
    auto sol = solve(sys, rhs);
    if (!sol)
        fail(Errc::InsufficientGenerators,
             "element of weight " + rat_str(delta) + " is not a polynomial in the solved generators");
    Expr r;
    for (size_t c = 0; c < cands.size(); c++)
        if (!(*sol)[c].is_zero()) r.add(cands[c], (*sol)[c]);
    return r;
}

WAlgebraSpec w_spec(ReducedSpec& rs, std::vector<WGenerator> gens) {
    WAlgebraSpec ws;
    ws.gens = std::move(gens);
    std::vector<GeneratorDecl> decls;
    for (size_t i = 0; i < ws.gens.size(); i++) {
        GeneratorDecl d;
        d.id = "E" + std::to_string(i + 1);
        d.parity = Parity::Even;
        d.delta = ws.gens[i].weight;
        d.zeta = d.delta;
        decls.push_back(d);
    }
    GenSet egens(decls);
    std::map<std::pair<int, int>, Lambda1> table;
    for (size_t i = 0; i < ws.gens.size(); i++)
        for (size_t j = i; j < ws.gens.size(); j++) {
            Lambda1 br = w_bracket(rs, ws.gens[i], ws.gens[j]);
            Lambda1 re;
            for (size_t nn = 0; nn < br.c.size(); nn++) {
                if (br.c[nn].is_zero()) continue;
                re.add(nn, express_in_generators(rs, ws.gens, br.c[nn], egens));
            }
            re.trim();
            if (!re.is_zero()) table.emplace(std::make_pair((int)i, (int)j), re);
        }
    ws.spec = LcaSpec(GenSet(decls), std::move(table), true, "Walg");
    ws.eng = std::make_shared<Engine>(ws.spec);
    return ws;
}

FiniteW finite_w(ReducedSpec& rs, WAlgebraSpec& ws) {
    FiniteW fw;
    ZhuAlgebra zr(*rs.eng);
    for (auto& g : ws.gens) fw.ebar.push_back(zr.pi_Z(g.E));
    for (size_t i = 0; i < ws.gens.size(); i++)
        for (size_t j = 0; j < ws.gens.size(); j++) {
            fw.table_finite.emplace(std::make_pair((int)i, (int)j),
                                    zr.commutator(fw.ebar[i], fw.ebar[j]));
        }
    ZhuAlgebra zw(*ws.eng);
    for (size_t i = 0; i < ws.gens.size(); i++)
        for (size_t j = 0; j < ws.gens.size(); j++) {
            ZhuExpr tw = zw.zhu_commutator((int)i, (int)j);
            // map E-words through ebar into U(rbar)
            ZhuExpr mapped;
            for (auto& [w, c] : tw.t) {
                ZhuExpr acc = ZhuExpr::one();
                for (auto it = w.g.rbegin(); it != w.g.rend(); ++it)
                    acc = zr.mul(fw.ebar[*it], acc);
                mapped += acc.scaled(c);
            }
            fw.table_zhuW.emplace(std::make_pair((int)i, (int)j), mapped);
            if (mapped != fw.table_finite.at({(int)i, (int)j})) fw.agree = false;
        }
    return fw;
}

ZhuExpr zhu_d(ReducedSpec& rs, ZhuAlgebra& zhu, const ZhuExpr& x) {
    // dbar(gen) = pi_Z(d gen); extended as an odd derivation of U(rbar)
    ZhuExpr r;
    const GenSet& gens = rs.spec.gens;
    for (auto& [w, c] : x.t) {
        int sign = 1;
        for (size_t i = 0; i < w.g.size(); i++) {
            auto it = rs.dTable.find(w.g[i]);
            if (it != rs.dTable.end() && !it->second.is_zero()) {
                ZhuExpr dbar = zhu.pi_Z(it->second);
                ZWord prefix, suffix;
                prefix.g.assign(w.g.begin(), w.g.begin() + i);
                suffix.g.assign(w.g.begin() + i + 1, w.g.end());
                ZhuExpr piece =
                    zhu.mul(ZhuExpr{{{prefix, Scalar(1)}}},
                            zhu.mul(dbar, ZhuExpr{{{suffix, Scalar(1)}}}));
                r += piece.scaled(c * Scalar((long)sign));
            }
            if (gens[w.g[i]].parity == Parity::Odd) sign = -sign;
        }
    }
    return r;
}

// ------------------------------------------------------------ Whittaker model

namespace {

struct UState {
    std::map<std::vector<int>, Scalar> t; // ordered words in the complement basis

    void add(const std::vector<int>& w, const Scalar& c) {
        if (c.is_zero()) return;
        auto it = t.find(w);
        if (it == t.end())
            t.emplace(w, c);
        else {
            it->second = it->second + c;
            if (it->second.is_zero()) t.erase(it);
        }
    }
    UState& operator+=(const UState& o) {
        for (auto& [w, c] : o.t) add(w, c);
        return *this;
    }
    UState scaled(const Scalar& s) const {
        UState r;
        if (s.is_zero()) return r;
        for (auto& [w, c] : t) r.t.emplace(w, c * s);
        return r;
    }
};

struct WhittakerCtx {
    const LieAlgData* g;
    const GoodGrading* gr;
    std::vector<Vec> qbasis;   // complement of m_l (PBW generators of M^0)
    std::vector<Vec> mbasis;   // basis of m_l
    Mat toAdapted;             // inverse of [qbasis | mbasis] columns
    std::vector<Rat> qdeg;     // Kazhdan degree 1 - j of each q vector

    // decompose v: first |q| coords in q-basis, rest in m-basis
    std::vector<Scalar> decompose(const Vec& v) const {
        std::vector<Scalar> r(g->dim(), Scalar(0));
        for (size_t i = 0; i < g->dim(); i++) {
            if (v[i].is_zero()) continue;
            for (size_t row = 0; row < g->dim(); row++)
                r[row] = r[row] + toAdapted.at(row, i) * v[i];
        }
        return r;
    }
    Scalar chi(const Vec& m) const { return g->pair(gr->f, m); } // (f|m)

    UState act_vec(const Vec& v, const std::vector<int>& word) const;
    UState act_basis_q(int qi, const std::vector<int>& word) const;
    UState rightmul_vec(const std::vector<int>& word, const Vec& v) const;
};

UState WhittakerCtx::act_vec(const Vec& v, const std::vector<int>& word) const {
    UState r;
    auto dec = decompose(v);
    size_t nq = qbasis.size();
    if (word.empty()) {
        // v . 1 = q-part as words + m-part acting by -(f|m)
        for (size_t i = 0; i < nq; i++)
            if (!dec[i].is_zero()) r.add({(int)i}, dec[i]);
        Scalar mval(0);
        for (size_t i = nq; i < dec.size(); i++)
            if (!dec[i].is_zero()) mval = mval + dec[i] * chi(mbasis[i - nq]).neg();
        r.add({}, mval);
        return r;
    }
    for (size_t i = 0; i < nq; i++)
        if (!dec[i].is_zero()) r += act_basis_q((int)i, word).scaled(dec[i]);
    for (size_t i = nq; i < dec.size(); i++) {
        if (dec[i].is_zero()) continue;
        // m . (h word') = h (m . word') + [m, h] . word'
        const Vec& m = mbasis[i - nq];
        std::vector<int> tail(word.begin() + 1, word.end());
        UState inner = act_vec(m, tail);
        for (auto& [w, c] : inner.t) {
            UState pre = act_basis_q(word[0], w);
            r += pre.scaled(c * dec[i]);
        }
        UState br = act_vec(g->bracket(m, qbasis[word[0]]), tail);
        r += br.scaled(dec[i]);
    }
    return r;
}

UState WhittakerCtx::act_basis_q(int qi, const std::vector<int>& word) const {
    UState r;
    if (word.empty() || qi <= word[0]) {
        std::vector<int> w;
        w.push_back(qi);
        w.insert(w.end(), word.begin(), word.end());
        r.add(w, Scalar(1));
        return r;
    }
    // qi . (h word') = h (qi . word') + [qi, h] . word'
    std::vector<int> tail(word.begin() + 1, word.end());
    UState inner = act_basis_q(qi, tail);
    for (auto& [w, c] : inner.t) r += act_basis_q(word[0], w).scaled(c);
    r += act_vec(g->bracket(qbasis[qi], qbasis[word[0]]), tail);
    return r;
}

UState WhittakerCtx::rightmul_vec(const std::vector<int>& word, const Vec& v) const {
    UState r;
    auto dec = decompose(v);
    size_t nq = qbasis.size();
    // m-part hits the cyclic vector directly
    Scalar mval(0);
    for (size_t i = nq; i < dec.size(); i++)
        if (!dec[i].is_zero()) mval = mval + dec[i] * chi(mbasis[i - nq]).neg();
    r.add(word, mval);
    // q-part: insert from the right
    std::function<UState(const std::vector<int>&, int)> ins = [&](const std::vector<int>& w,
                                                                  int qi) -> UState {
        UState s;
        if (w.empty() || w.back() <= qi) {
            std::vector<int> nw = w;
            nw.push_back(qi);
            s.add(nw, Scalar(1));
            return s;
        }
        std::vector<int> head(w.begin(), w.end() - 1);
        int t = w.back();
        // w = head t ; (head t) q = head (q t) + head [t,q]
        UState hq = ins(head, qi);
        for (auto& [hw, c] : hq.t) {
            std::vector<int> nw = hw;
            nw.push_back(t);
            // appending t may break order only if hw グ got longer... insert properly
            if (nw.size() >= 2 && nw[nw.size() - 2] > t) {
                UState fix = ins(hw, t);
                s += fix.scaled(c);
            } else {
                s.add(nw, c);
            }
        }
        s += rightmul_vec(head, g->bracket(qbasis[t], qbasis[qi]));
        return s;
    };
    for (size_t i = 0; i < nq; i++)
        if (!dec[i].is_zero()) r += ins(word, (int)i).scaled(dec[i]);
    return r;
}

} // namespace

WhittakerReport whittaker_invariants(const LieAlgData& g, const GoodGrading& gr,
                                     const std::vector<Vec>& l_choice, const Rat& cutoff) {
    for (auto p : g.parity)
        if (p == Parity::Odd) fail(Errc::BadArgument, "Whittaker model is implemented for even g");
    WhittakerCtx ctx;
    ctx.g = &g;
    ctx.gr = &gr;
    size_t n = g.dim();
    // m_l = l + g_{>=1}; complement q = g_{<=0} basis + complement of l in g_{1/2}
    std::vector<int> half = gr.s_half();
    // echelon of l inside g_{1/2} coordinates
    Mat lmat(l_choice.size(), half.size());
    for (size_t r = 0; r < l_choice.size(); r++) {
        for (size_t c = 0; c < half.size(); c++) lmat.at(r, c) = l_choice[r][half[c]];
        // l must lie in g_{1/2}
        Vec test = l_choice[r];
        for (size_t c = 0; c < half.size(); c++) test[half[c]] = Scalar(0);
        if (!g.is_zero(test)) fail(Errc::BadArgument, "l is not a subspace of g_{1/2}");
    }
    Mat lech = lmat;
    auto lpiv = rref(lech);
    // isotropy: (f|[a,b]) = 0 on l
    for (size_t r1 = 0; r1 < l_choice.size(); r1++)
        for (size_t r2 = 0; r2 < l_choice.size(); r2++)
            if (!g.pair(gr.f, g.bracket(l_choice[r1], l_choice[r2])).is_zero())
                fail(Errc::BadArgument, "l is not isotropic");
    // q basis: g_{<=0} basis vectors, then g_{1/2} basis vectors away from the l-pivots
    for (size_t i = 0; i < n; i++)
        if (gr.j[i] <= 0) {
            ctx.qbasis.push_back(g.unit(i));
            ctx.qdeg.push_back(Rat(1) - gr.j[i]);
        }
    std::vector<char> isLpiv(half.size(), 0);
    for (auto c : lpiv) isLpiv[c] = 1;
    for (size_t c = 0; c < half.size(); c++)
        if (!isLpiv[c]) {
            ctx.qbasis.push_back(g.unit(half[c]));
            ctx.qdeg.push_back(Rat(1, 2));
        }
    // m basis: l vectors (echelon rows), then g_{>=1} basis vectors
    for (size_t r = 0; r < lpiv.size(); r++) {
        Vec v(n, Scalar(0));
        for (size_t c = 0; c < half.size(); c++) v[half[c]] = lech.at(r, c);
        ctx.mbasis.push_back(v);
    }
    for (size_t i = 0; i < n; i++)
        if (gr.j[i] >= 1) ctx.mbasis.push_back(g.unit(i));
    // adapted change of basis
    Mat cols(n, n);
    for (size_t c = 0; c < ctx.qbasis.size(); c++)
        for (size_t rr = 0; rr < n; rr++) cols.at(rr, c) = ctx.qbasis[c][rr];
    for (size_t c = 0; c < ctx.mbasis.size(); c++)
        for (size_t rr = 0; rr < n; rr++) cols.at(rr, ctx.qbasis.size() + c) = ctx.mbasis[c][rr];
    auto inv = inverse(cols);
    if (!inv) fail(Errc::BadArgument, "adapted basis is not a basis");
    ctx.toAdapted = *inv;

    // n_l = l^perp + g_{>=1}: l^perp inside g_{1/2} w.r.t. (f|[.,.])
    std::vector<Vec> nl;
    {
        Mat pairing(l_choice.size(), half.size());
        for (size_t r = 0; r < l_choice.size(); r++)
            for (size_t c = 0; c < half.size(); c++)
                pairing.at(r, c) = g.pair(gr.f, g.bracket(l_choice[r], g.unit(half[c])));
        auto ker = l_choice.empty() ? std::vector<std::vector<Scalar>>{} : nullspace(pairing);
        if (l_choice.empty()) {
            for (size_t c = 0; c < half.size(); c++) nl.push_back(g.unit(half[c]));
        } else {
            for (auto& kv : ker) {
                Vec v(n, Scalar(0));
                for (size_t c = 0; c < half.size(); c++) v[half[c]] = kv[c];
                nl.push_back(v);
            }
        }
        for (size_t i = 0; i < n; i++)
            if (gr.j[i] >= 1) nl.push_back(g.unit(i));
    }

    // monomial basis with Kazhdan degree <= cutoff
    std::vector<std::vector<int>> monos;
    std::vector<Rat> mdeg;
    std::function<void(int, Rat, std::vector<int>&)> enumloop = [&](int start, Rat left,
                                                                    std::vector<int>& acc) {
        monos.push_back(acc);
        mdeg.push_back(cutoff - left);
        for (int i = start; i < (int)ctx.qbasis.size(); i++) {
            if (ctx.qdeg[i] > left) continue;
            acc.push_back(i);
            enumloop(i, left - ctx.qdeg[i], acc);
            acc.pop_back();
        }
    };
    std::vector<int> acc0;
    enumloop(0, cutoff, acc0);
    std::map<std::vector<int>, size_t> midx;
    for (size_t i = 0; i < monos.size(); i++) midx.emplace(monos[i], i);

    // stacked ad-action matrix
    Mat act(nl.size() * monos.size(), monos.size());
    for (size_t u = 0; u < nl.size(); u++) {
        for (size_t mi = 0; mi < monos.size(); mi++) {
            UState s = ctx.act_vec(nl[u], monos[mi]);
            UState rm = ctx.rightmul_vec(monos[mi], nl[u]);
            s += rm.scaled(Scalar(-1));
            for (auto& [w, c] : s.t) {
                auto it = midx.find(w);
                if (it == midx.end()) fail(Errc::BadArgument, "ad action left the truncation");
                act.at(u * monos.size() + it->second, mi) =
                    act.at(u * monos.size() + it->second, mi) + c;
            }
        }
    }

    WhittakerReport rep;
    // filtered kernel dimensions
    Rat step = 1;
    for (auto& d : ctx.qdeg)
        if (d.get_den() == 2) step = Rat(1, 2);
    for (auto& d : gr.gf_j) {
        Rat w = Rat(1) - d;
        if (w.get_den() == 2) step = Rat(1, 2);
    }
    long prev = 0;
    for (Rat d = 0; d <= cutoff; d += step) {
        std::vector<size_t> cols2;
        for (size_t mi = 0; mi < monos.size(); mi++)
            if (mdeg[mi] <= d) cols2.push_back(mi);
        Mat sub(act.nr, cols2.size());
        for (size_t r = 0; r < act.nr; r++)
            for (size_t c = 0; c < cols2.size(); c++) sub.at(r, c) = act.at(r, cols2[c]);
        long kdim = (long)nullspace(sub).size();
        rep.degrees.push_back(d);
        rep.dims.push_back(kdim - prev);
        prev = kdim;
    }
    // S(g^f) graded dimensions
    std::vector<long> sl(rep.degrees.size(), 0);
    std::function<void(size_t, Rat)> count = [&](size_t gi, Rat used) {
        if (gi == gr.gf_basis.size()) {
            for (size_t di = 0; di < rep.degrees.size(); di++)
                if (rep.degrees[di] == used) sl[di]++;
            return;
        }
        Rat d = Rat(1) - gr.gf_j[gi];
        for (Rat tot = used; tot <= cutoff; tot += d) {
            count(gi + 1, tot);
            if (d == 0) break;
        }
    };
    count(0, Rat(0));
    rep.slodowy_dims = sl;
    rep.match = (rep.dims == rep.slodowy_dims);
    return rep;
}

} // namespace lf
