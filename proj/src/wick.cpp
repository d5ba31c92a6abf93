#include "lambdaforge/wick.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <thread>

#include "lambdaforge/io.hpp"

namespace lf {

LcaSpec::LcaSpec(GenSet g, std::map<std::pair<int, int>, Lambda1> tab, bool ham, std::string nm)
    : gens(std::move(g)), table(std::move(tab)), hamiltonian(ham), name(std::move(nm)) {}

void LcaSpec::validate() const {
    TermMeta meta(gens);
    for (auto& [key, lam] : table) {
        auto [i, j] = key;
        if (i < 0 || j < 0 || (size_t)i >= gens.size() || (size_t)j >= gens.size())
            fail(Errc::UnknownGenerator, "table index out of range");
        Rat zl = gens[i].zeta + gens[j].zeta;
        for (size_t n = 0; n < lam.c.size(); n++) {
            for (auto& [m, c] : lam.c[n].t) {
                if (!meta.is_ordered(m))
                    fail(Errc::ValidationError, "table entry for (" + gens[i].id + "," + gens[j].id +
                                                    ") contains a non-ordered monomial");
                if (meta.zeta(m) >= zl)
                    fail(Errc::GradingViolation, "zeta(" + rat_str(meta.zeta(m)) + ") >= zeta_a+zeta_b(" +
                                                     rat_str(zl) + ") in [" + gens[i].id + " lam " +
                                                     gens[j].id + "]");
                if (hamiltonian && meta.delta(m) != gens[i].delta + gens[j].delta - (long)n - 1)
                    fail(Errc::GradingViolation,
                         "non-Hamiltonian weight in [" + gens[i].id + " lam " + gens[j].id + "] at lam^" +
                             std::to_string(n) + ": Delta(" + rat_str(meta.delta(m)) + ") != " +
                             rat_str(gens[i].delta + gens[j].delta - (long)n - 1));
                // parity must match p(a)+p(b)
                if ((int)meta.parity(m) != (((int)gens[i].parity + (int)gens[j].parity) & 1))
                    fail(Errc::ValidationError,
                         "parity mismatch in table entry (" + gens[i].id + "," + gens[j].id + ")");
            }
        }
    }
}

Engine::Engine(LcaSpec spec) : spec_(std::move(spec)), meta_(spec_.gens) { spec_.validate(); }

// ------------------------------------------------------------ base brackets

Lambda1 Engine::base_bracket(int i, int j) {
    auto it = spec_.table.find({i, j});
    if (it != spec_.table.end()) return it->second;
    auto rit = spec_.table.find({j, i});
    if (rit == spec_.table.end()) return {};
    // skewsymmetry: [a_lam b] = -p(a,b) [b_{-lam-T} a]
    int p = (spec_.gens[i].parity == Parity::Odd && spec_.gens[j].parity == Parity::Odd) ? -1 : 1;
    Lambda1 sk = subst_affine(rit->second, -1, -1);
    return sk.scaled(Scalar((long)-p));
}

Lambda1 Engine::subst_affine(const Lambda1& l, long sgn, long tcoef) {
    // var^n -> (sgn*var + tcoef*T)^n, T acting on the coefficient
    Lambda1 r;
    for (size_t n = 0; n < l.c.size(); n++) {
        if (l.c[n].is_zero()) continue;
        for (size_t m = 0; m <= n; m++) {
            // binom(n,m) (sgn var)^m (tcoef T)^{n-m} X
            Rat coef = binom_rat(Rat((long)n), (long)m);
            long tp = (long)(n - m);
            Scalar s = Scalar(coef * factorial(tp)); // T^tp = tp! T^(tp)
            if (sgn < 0 && (m & 1)) s = s.neg();
            if (tcoef < 0 && (tp & 1)) s = s.neg();
            Expr piece = apply_T_divided_raw(l.c[n], tp).scaled(s);
            r.add(m, nf_expr(piece));
        }
    }
    r.trim();
    return r;
}

Lambda1 Engine::br_term(const Term& a, const Term& b) {
    Lambda1 base = base_bracket(a.gen, b.gen);
    if (base.is_zero()) return {};
    // sesquilinearity: [T^(h)a lam T^(k)b] = (-lam)^h/h! (lam+T)^k/k! [a lam b]
    Lambda1 cur;
    if (b.tpow == 0) {
        cur = base;
    } else {
        long k = b.tpow;
        for (size_t n = 0; n < base.c.size(); n++) {
            if (base.c[n].is_zero()) continue;
            for (long i = 0; i <= k; i++) {
                Scalar s = Scalar(factorial(i)).inv();
                Expr piece = apply_T_divided_raw(base.c[n], k - i).scaled(s);
                cur.add(n + i, nf_expr(piece));
            }
        }
    }
    if (a.tpow > 0) {
        long h = a.tpow;
        Lambda1 shifted;
        Scalar s = Scalar(factorial(h)).inv();
        if (h & 1) s = s.neg();
        for (size_t n = 0; n < cur.c.size(); n++) shifted.add(n + h, cur.c[n].scaled(s));
        cur = std::move(shifted);
    }
    cur.trim();
    return cur;
}

// ------------------------------------------------------------ normal form

namespace {
// first position with an out-of-order adjacent pair; -1 if ordered
int first_bad(const TermMeta& meta, const Monomial& m) {
    for (size_t i = 0; i + 1 < m.w.size(); i++) {
        int c = compare_index(m.w[i], m.w[i + 1]);
        if (c > 0) return (int)i;
        if (c == 0 && meta.parity(m.w[i]) == Parity::Odd) return (int)i;
    }
    return -1;
}

Expr prepend_terms(const std::vector<Term>& prefix, const Expr& e) {
    if (prefix.empty()) return e;
    Expr r;
    for (auto& [m, c] : e.t) {
        Monomial nm;
        nm.w = prefix;
        nm.w.insert(nm.w.end(), m.w.begin(), m.w.end());
        r.add(nm, c);
    }
    return r;
}
} // namespace

Expr Engine::nf_expr(const Expr& e) {
    Expr r;
    for (auto& [m, c] : e.t) r += nf_word(m).scaled(c);
    return r;
}

Expr Engine::splice(const std::vector<Term>& prefix, const Expr& x) {
    return nf_expr(prepend_terms(prefix, x));
}

Expr Engine::normal_form(const Expr& x) { return nf_expr(x); }

Expr Engine::nf_word(const Monomial& m) {
    {
        std::lock_guard<std::mutex> g(nfMx_);
        auto it = nfCache_.find(m);
        if (it != nfCache_.end()) return it->second;
    }
    Expr result;
    int p = first_bad(meta_, m);
    if (p < 0) {
        result = Expr::single(m);
    } else {
        const Term tp = m.w[p], tq = m.w[p + 1];
        std::vector<Term> prefix(m.w.begin(), m.w.begin() + p);
        Monomial tail;
        tail.w.assign(m.w.begin() + p + 2, m.w.end());
        // quasicommutativity correction int_{-T}^0 [tp lam tq]
        Expr corr = integrate_mT_to_0(br_term(tp, tq));
        bool equal_odd = compare_index(tp, tq) == 0;
        if (equal_odd) {
            // :aa: = 1/2 int_{-T}^0 [a lam a]  (odd a)
            Expr mid = prod_expr(corr.scaled(Scalar(Rat(1, 2))), Expr::single(tail));
            result = nf_expr(prepend_terms(prefix, mid));
        } else {
            Monomial sw = m;
            std::swap(sw.w[p], sw.w[p + 1]);
            int sign = meta_.koszul(tp, tq);
            Expr mid = prod_expr(corr, Expr::single(tail));
            result = nf_word(sw).scaled(Scalar((long)sign)) + nf_expr(prepend_terms(prefix, mid));
        }
    }
    std::lock_guard<std::mutex> g(nfMx_);
    nfCache_.emplace(m, result);
    return result;
}

// ------------------------------------------------------------ products

Expr Engine::prod_expr(const Expr& a, const Expr& b) {
    Expr r;
    for (auto& [ma, ca] : a.t)
        for (auto& [mb, cb] : b.t) r += prod_word(ma, mb).scaled(ca * cb);
    return r;
}

Expr Engine::product(const Expr& a, const Expr& b) { return prod_expr(a, b); }

Expr Engine::prod_word(const Monomial& a, const Monomial& b) {
    if (a.is_vacuum()) return nf_word(b);
    if (b.is_vacuum()) return nf_word(a);
    if (a.size() == 1) {
        Monomial m;
        m.w = a.w;
        m.w.insert(m.w.end(), b.w.begin(), b.w.end());
        return nf_word(m);
    }
    {
        std::lock_guard<std::mutex> g(prodMx_);
        auto it = prodCache_.find({a, b});
        if (it != prodCache_.end()) return it->second;
    }
    // :(t D) B: = :t(:DB:): + :(int_0^T dl t)[D_l B]: + p(t,D) :(int_0^T dl D)[t_l B]:
    const Term t = a.w[0];
    Monomial d;
    d.w.assign(a.w.begin() + 1, a.w.end());
    Expr result = nf_expr(prepend_terms({t}, prod_word(d, b)));
    Lambda1 db = br_word(d, b);
    for (size_t n = 0; n < db.c.size(); n++) {
        if (db.c[n].is_zero()) continue;
        // int_0^T lam^n dl = n! T^(n+1)
        Term tt = t;
        Rat bin = binom_rat(Rat(t.tpow + (long)n + 1), (long)n + 1); // T^(n+1) T^(h) e
        tt.tpow += (int)n + 1;
        Expr left = Expr::single(Monomial{{tt}}, Scalar(bin * factorial((long)n)));
        result += prod_expr(left, db.c[n]);
    }
    int p = meta_.koszul(t, d);
    Lambda1 tb = br_word(Monomial{{t}}, b);
    for (size_t n = 0; n < tb.c.size(); n++) {
        if (tb.c[n].is_zero()) continue;
        Expr left = apply_T_divided_raw(Expr::single(d), (long)n + 1).scaled(Scalar(factorial((long)n) * p));
        result += prod_expr(left, tb.c[n]);
    }
    std::lock_guard<std::mutex> g(prodMx_);
    prodCache_.emplace(std::make_pair(a, b), result);
    return result;
}

// ------------------------------------------------------------ brackets

Lambda1 Engine::br_expr(const Expr& a, const Expr& b) {
    Lambda1 r;
    for (auto& [ma, ca] : a.t)
        for (auto& [mb, cb] : b.t) {
            Lambda1 w = br_word(ma, mb).scaled(ca * cb);
            r = r + w;
        }
    return r;
}

Lambda1 Engine::bracket(const Expr& a, const Expr& b) { return br_expr(a, b); }

Lambda1 Engine::br_word(const Monomial& a, const Monomial& b) {
    if (a.is_vacuum() || b.is_vacuum()) return {};
    {
        std::lock_guard<std::mutex> g(brMx_);
        auto it = brCache_.find({a, b});
        if (it != brCache_.end()) return it->second;
    }
    Lambda1 result;
    if (a.size() == 1 && b.size() == 1) {
        result = br_term(a.w[0], b.w[0]);
    } else if (a.size() == 1) {
        // left Wick: [t_l (u C)] = :[t_l u]C: + p(t,u) :u[t_l C]: + int_0^l [[t_l u]_m C] dm
        const Term t = a.w[0], u = b.w[0];
        Monomial c;
        c.w.assign(b.w.begin() + 1, b.w.end());
        Lambda1 tu = br_term(t, u);
        for (size_t n = 0; n < tu.c.size(); n++)
            if (!tu.c[n].is_zero()) result.add(n, prod_expr(tu.c[n], Expr::single(c)));
        int p = meta_.koszul(t, u);
        Lambda1 tc = br_word(a, c);
        for (size_t n = 0; n < tc.c.size(); n++)
            if (!tc.c[n].is_zero())
                result.add(n, nf_expr(prepend_terms({u}, tc.c[n])).scaled(Scalar((long)p)));
        for (size_t n = 0; n < tu.c.size(); n++) {
            if (tu.c[n].is_zero()) continue;
            Lambda1 in = br_expr(tu.c[n], Expr::single(c));
            for (size_t m = 0; m < in.c.size(); m++) {
                if (in.c[m].is_zero()) continue;
                // lam^n * int_0^lam mu^m dmu = lam^(n+m+1)/(m+1)
                result.add(n + m + 1, in.c[m].scaled(Scalar(Rat(1, (long)m + 1))));
            }
        }
    } else {
        // right Wick: [(t D)_l B] = :(e^{T d_l} t)[D_l B]: + p(t,D) :(e^{T d_l} D)[t_l B]:
        //             + p(t,D) int_0^l [D_m [t_{l-m} B]] dm
        const Term t = a.w[0];
        Monomial d;
        d.w.assign(a.w.begin() + 1, a.w.end());
        int p = meta_.koszul(t, d);
        Lambda1 db = br_word(d, b);
        for (size_t n = 0; n < db.c.size(); n++) {
            if (db.c[n].is_zero()) continue;
            for (size_t m = 0; m <= n; m++) {
                // e^{T d_l} lam^n -> sum_m n!/(n-m)! lam^{n-m} T^(m)t (divided powers)
                Term tt = t;
                Rat bb = binom_rat(Rat(t.tpow + (long)m), (long)m);
                tt.tpow += (int)m;
                Rat coef = bb * factorial((long)n) / factorial((long)(n - m));
                result.add(n - m, prod_expr(Expr::single(Monomial{{tt}}, Scalar(coef)), db.c[n]));
            }
        }
        Lambda1 tb = br_word(Monomial{{t}}, b);
        for (size_t n = 0; n < tb.c.size(); n++) {
            if (tb.c[n].is_zero()) continue;
            for (size_t m = 0; m <= n; m++) {
                Rat coef = factorial((long)n) / factorial((long)(n - m));
                Expr left = apply_T_divided_raw(Expr::single(d), (long)m).scaled(Scalar(coef * p));
                result.add(n - m, prod_expr(left, tb.c[n]));
            }
        }
        for (size_t n = 0; n < tb.c.size(); n++) {
            if (tb.c[n].is_zero()) continue;
            Lambda1 in = br_expr(Expr::single(d), tb.c[n]);
            for (size_t m = 0; m < in.c.size(); m++) {
                if (in.c[m].is_zero()) continue;
                // sum_i binom(n,i)(-1)^i/(i+m+1) lam^{n+m+1}
                Rat coef = 0;
                for (size_t i = 0; i <= n; i++) {
                    Rat term = binom_rat(Rat((long)n), (long)i) / Rat((long)(i + m + 1));
                    coef += (i & 1) ? -term : term;
                }
                result.add(n + m + 1, in.c[m].scaled(Scalar(coef * p)));
            }
        }
    }
    result.trim();
    std::lock_guard<std::mutex> g(brMx_);
    brCache_.emplace(std::make_pair(a, b), result);
    return result;
}

// ------------------------------------------------------------ nth products, integrals

Expr Engine::nth(const Expr& a, long n, const Expr& b) {
    if (n >= 0) {
        Lambda1 l = br_expr(a, b);
        return l.coeff((size_t)n).scaled(Scalar(factorial(n)));
    }
    long m = -n - 1;
    return prod_expr(apply_T_divided(a, m), b);
}

Lambda1 Engine::integrate_0_to_var(const Lambda1& l) const {
    Lambda1 r;
    for (size_t n = 0; n < l.c.size(); n++)
        if (!l.c[n].is_zero()) r.add(n + 1, l.c[n].scaled(Scalar(Rat(1, (long)n + 1))));
    return r;
}

Expr Engine::integrate_mT_to_0(const Lambda1& l) {
    Expr r;
    for (size_t n = 0; n < l.c.size(); n++) {
        if (l.c[n].is_zero()) continue;
        // int_{-T}^0 lam^n dlam = (-1)^n T^{n+1}/(n+1) = (-1)^n n! T^(n+1)
        Scalar s(factorial((long)n));
        if (n & 1) s = s.neg();
        r += nf_expr(apply_T_divided_raw(l.c[n], (long)n + 1).scaled(s));
    }
    return r;
}

Lambda1 Engine::integrate(const Lambda1& l, const std::string& lower, const std::string& upper) {
    if (lower == "0" && (upper == "lam" || upper == "mu")) return integrate_0_to_var(l);
    if (lower == "-T" && upper == "0") {
        Lambda1 r;
        r.add(0, integrate_mT_to_0(l));
        r.trim();
        return r;
    }
    if (lower == upper) return {};
    fail(Errc::UnsupportedBound, "cannot integrate from " + lower + " to " + upper);
}

Lambda1 Engine::integral_bracket(const Expr& a, const Expr& b) {
    Lambda1 r;
    r.add(0, prod_expr(a, b));
    Lambda1 br = br_expr(a, b);
    for (size_t n = 0; n < br.c.size(); n++)
        if (!br.c[n].is_zero()) r.add(n + 1, br.c[n].scaled(Scalar(Rat(1, (long)n + 1))));
    r.trim();
    return r;
}

// ------------------------------------------------------------ checkers

int Engine::koszul_sign(const Expr& a, const Expr& b) const {
    return (parity_of(a) == Parity::Odd && parity_of(b) == Parity::Odd) ? -1 : 1;
}

Parity Engine::parity_of(const Expr& e) const {
    std::optional<Parity> p;
    for (auto& [m, c] : e.t) {
        Parity pm = meta_.parity(m);
        if (!p)
            p = pm;
        else if (*p != pm)
            fail(Errc::InhomogeneousInput, "mixed parity expression");
    }
    return p.value_or(Parity::Even);
}

CheckReport Engine::check_skewsymmetry() {
    CheckReport rep;
    size_t n = spec_.gens.size();
    std::vector<std::pair<int, int>> pairs;
    for (size_t i = 0; i < n; i++)
        for (size_t j = i; j < n; j++)
            if (spec_.has_entry((int)i, (int)j) || spec_.has_entry((int)j, (int)i))
                pairs.push_back({(int)i, (int)j});
    std::vector<CheckEntry> fails(pairs.size());
    std::vector<char> bad(pairs.size(), 0);
    parallel_for(pairs.size(), [&](size_t idx) {
        auto [i, j] = pairs[idx];
        Lambda1 lhs = base_bracket(i, j);
        Lambda1 rhs = subst_affine(base_bracket(j, i), -1, -1);
        int p = (spec_.gens[i].parity == Parity::Odd && spec_.gens[j].parity == Parity::Odd) ? -1 : 1;
        Lambda1 resid = lhs + rhs.scaled(Scalar((long)p));
        Lambda1 nf;
        for (size_t k = 0; k < resid.c.size(); k++) nf.add(k, nf_expr(resid.c[k]));
        nf.trim();
        if (!nf.is_zero()) {
            bad[idx] = 1;
            fails[idx] = {{i, j}, false, print_lambda1(spec_.gens, nf, "lam")};
        }
    });
    rep.checked = pairs.size();
    for (size_t k = 0; k < pairs.size(); k++)
        if (bad[k]) {
            rep.pass = false;
            rep.entries.push_back(fails[k]);
        }
    return rep;
}

Lambda2 Engine::jacobi_residual(int i, int j, int k) {
    Expr a = Expr::gen(i), b = Expr::gen(j), c = Expr::gen(k);
    Lambda2 J;
    // [a_l [b_m c]]
    Lambda1 bc = br_expr(b, c);
    for (size_t m = 0; m < bc.c.size(); m++) {
        if (bc.c[m].is_zero()) continue;
        Lambda1 abc = br_expr(a, bc.c[m]);
        for (size_t l = 0; l < abc.c.size(); l++) J.add((int)l, (int)m, abc.c[l]);
    }
    // - p(a,b) [b_m [a_l c]]
    int p = (spec_.gens[i].parity == Parity::Odd && spec_.gens[j].parity == Parity::Odd) ? -1 : 1;
    Lambda1 ac = br_expr(a, c);
    for (size_t l = 0; l < ac.c.size(); l++) {
        if (ac.c[l].is_zero()) continue;
        Lambda1 bac = br_expr(b, ac.c[l]);
        for (size_t m = 0; m < bac.c.size(); m++)
            J.add((int)l, (int)m, bac.c[m].scaled(Scalar((long)-p)));
    }
    // - [[a_l b]_{l+m} c]
    Lambda1 ab = br_expr(a, b);
    for (size_t l = 0; l < ab.c.size(); l++) {
        if (ab.c[l].is_zero()) continue;
        Lambda1 w = br_expr(ab.c[l], c);
        for (size_t s = 0; s < w.c.size(); s++) {
            if (w.c[s].is_zero()) continue;
            for (size_t t = 0; t <= s; t++) {
                Rat coef = -binom_rat(Rat((long)s), (long)t);
                J.add((int)(l + t), (int)(s - t), w.c[s].scaled(Scalar(coef)));
            }
        }
    }
    return J;
}

CheckReport Engine::check_jacobi() {
    CheckReport rep;
    size_t n = spec_.gens.size();
    std::vector<std::array<int, 3>> triples;
    for (size_t i = 0; i < n; i++)
        for (size_t j = i; j < n; j++)
            for (size_t k = 0; k < n; k++) triples.push_back({(int)i, (int)j, (int)k});
    std::vector<CheckEntry> fails(triples.size());
    std::vector<char> bad(triples.size(), 0);
    parallel_for(triples.size(), [&](size_t idx) {
        auto [i, j, k] = triples[idx];
        Lambda2 J = jacobi_residual(i, j, k);
        if (!J.is_zero()) {
            bad[idx] = 1;
            fails[idx] = {{i, j, k}, false, print_lambda2(spec_.gens, J)};
        }
    });
    rep.checked = triples.size();
    for (size_t t = 0; t < triples.size(); t++)
        if (bad[t]) {
            rep.pass = false;
            rep.entries.push_back(fails[t]);
        }
    return rep;
}

Expr Engine::borcherds_residual(const Expr& a, const Expr& b, const Expr& c, long m, long n, long k) {
    long degAB = (long)br_expr(a, b).c.size();
    long degAC = (long)br_expr(a, c).c.size();
    long degBC = (long)br_expr(b, c).c.size();
    long jmax = std::max({degAB + std::abs(n) + 1, degAC + std::abs(m) + 1, degBC + std::abs(k) + 1,
                          std::abs(m) + std::abs(n) + std::abs(k) + 2}) +
                2;
    int p = koszul_sign(a, b);
    Expr lhs, rhs;
    for (long j = 0; j <= jmax; j++) {
        Rat bnj = binom_rat(Rat(n), j);
        if (bnj != 0) {
            Expr inner = nth(b, k + j, c);
            if (!inner.is_zero()) {
                Expr t1 = nth(a, m + n - j, inner);
                if (j & 1) t1 = t1.neg();
                lhs += t1.scaled(Scalar(bnj));
            }
            Expr inner2 = nth(a, m + j, c);
            if (!inner2.is_zero()) {
                Expr t2 = nth(b, n + k - j, inner2).scaled(Scalar(bnj * p * ((n & 1) ? -1 : 1)));
                if (j & 1) t2 = t2.neg();
                lhs = lhs - t2;
            }
        }
        Rat bmj = binom_rat(Rat(m), j);
        if (bmj != 0) {
            Expr ab = nth(a, n + j, b);
            if (!ab.is_zero()) rhs += nth(ab, m + k - j, c).scaled(Scalar(bmj));
        }
    }
    return lhs - rhs;
}

// ------------------------------------------------------------ worker pool

unsigned worker_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("LAMBDA_FORGE_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1 && v < 1024) hw = std::min<unsigned>(hw, (unsigned)v);
    }
    return hw;
}

void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
    unsigned w = worker_count();
    if (w <= 1 || n <= 1) {
        for (size_t i = 0; i < n; i++) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr err;
    std::mutex errMx;
    auto work = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> g(errMx);
                if (!err) err = std::current_exception();
            }
        }
    };
    std::vector<std::thread> ts;
    for (unsigned i = 1; i < w; i++) ts.emplace_back(work);
    work();
    for (auto& t : ts) t.join();
    if (err) std::rethrow_exception(err);
}

} // namespace lf
