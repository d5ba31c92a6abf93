#include "lambdaforge/pva.hpp"

#include <algorithm>
#include <functional>

#include "lambdaforge/linalg.hpp"

namespace lf {

PvaExpr PvaExpr::constant(const Scalar& c) {
    PvaExpr e;
    e.add_raw(PvaMono{}, c);
    return e;
}

PvaExpr PvaExpr::var(int gen, int order, const Scalar& c) {
    PvaExpr e;
    e.add_raw(PvaMono{{{gen, order}}}, c);
    return e;
}

void PvaExpr::add_raw(const PvaMono& m, const Scalar& c) {
    if (c.is_zero()) return;
    auto it = t.find(m);
    if (it == t.end()) {
        t.emplace(m, c);
    } else {
        it->second = it->second + c;
        if (it->second.is_zero()) t.erase(it);
    }
}

PvaExpr PvaExpr::operator+(const PvaExpr& o) const {
    PvaExpr r = *this;
    r += o;
    return r;
}

PvaExpr& PvaExpr::operator+=(const PvaExpr& o) {
    for (auto& [m, c] : o.t) add_raw(m, c);
    return *this;
}

PvaExpr PvaExpr::operator-(const PvaExpr& o) const { return *this + o.scaled(Scalar(-1)); }

PvaExpr PvaExpr::scaled(const Scalar& c) const {
    PvaExpr r;
    if (c.is_zero()) return r;
    for (auto& [m, s] : t) r.t.emplace(m, s * c);
    return r;
}

void PvaLambda::add(size_t n, const PvaExpr& e) {
    if (e.is_zero()) return;
    if (c.size() <= n) c.resize(n + 1);
    c[n] += e;
}

bool PvaLambda::is_zero() const {
    for (auto& e : c)
        if (!e.is_zero()) return false;
    return true;
}

void PvaLambda::trim() {
    while (!c.empty() && c.back().is_zero()) c.pop_back();
}

bool PvaLambda::operator==(const PvaLambda& o) const {
    size_t n = std::max(c.size(), o.c.size());
    for (size_t i = 0; i < n; i++)
        if (coeff(i) != o.coeff(i)) return false;
    return true;
}

void PvaLambda2::add(int i, int j, const PvaExpr& e) {
    if (e.is_zero()) return;
    auto key = std::make_pair(i, j);
    auto it = t.find(key);
    if (it == t.end()) {
        t.emplace(key, e);
    } else {
        it->second += e;
        if (it->second.is_zero()) t.erase(it);
    }
}

int PvaSpec::index_of(const std::string& id) const {
    for (size_t i = 0; i < gens.size(); i++)
        if (gens[i].id == id) return (int)i;
    fail(Errc::UnknownGenerator, "'" + id + "' in pva " + name);
}

std::optional<int> PvaSpec::find(const std::string& id) const {
    for (size_t i = 0; i < gens.size(); i++)
        if (gens[i].id == id) return (int)i;
    return std::nullopt;
}

PvaEngine::PvaEngine(PvaSpec spec) : spec_(std::move(spec)) {}

PvaExpr PvaEngine::normalize(const PvaExpr& raw) const {
    PvaExpr out;
    for (auto& [m, c] : raw.t) {
        auto v = m.f;
        int sign = 1;
        for (size_t i = 1; i < v.size(); i++) {
            size_t j = i;
            while (j > 0 && v[j - 1] > v[j]) {
                if (spec_.gens[v[j - 1].first].parity == Parity::Odd &&
                    spec_.gens[v[j].first].parity == Parity::Odd)
                    sign = -sign;
                std::swap(v[j - 1], v[j]);
                j--;
            }
        }
        bool zero = false;
        for (size_t i = 0; i + 1 < v.size(); i++)
            if (v[i] == v[i + 1] && spec_.gens[v[i].first].parity == Parity::Odd) zero = true;
        if (zero) continue;
        out.add_raw(PvaMono{v}, sign < 0 ? c.neg() : c);
    }
    return out;
}

PvaExpr PvaEngine::mul(const PvaExpr& a, const PvaExpr& b) const {
    PvaExpr raw;
    for (auto& [ma, ca] : a.t)
        for (auto& [mb, cb] : b.t) {
            PvaMono m = ma;
            m.f.insert(m.f.end(), mb.f.begin(), mb.f.end());
            raw.add_raw(m, ca * cb);
        }
    return normalize(raw);
}

PvaExpr PvaEngine::apply_T(const PvaExpr& p) const {
    PvaExpr raw;
    for (auto& [m, c] : p.t)
        for (size_t i = 0; i < m.f.size(); i++) {
            PvaMono b = m;
            b.f[i].second++;
            raw.add_raw(b, c);
        }
    return normalize(raw);
}

PvaExpr PvaEngine::apply_T_pow(const PvaExpr& p, long n) const {
    PvaExpr r = p;
    for (long i = 0; i < n; i++) r = apply_T(r);
    return r;
}

PvaExpr PvaEngine::partial(const PvaExpr& p, int gen, int order) const {
    PvaExpr r;
    std::pair<int, int> key{gen, order};
    for (auto& [m, c] : p.t) {
        int sign = 1;
        for (size_t i = 0; i < m.f.size(); i++) {
            if (m.f[i] == key) {
                PvaMono b;
                b.f.reserve(m.f.size() - 1);
                for (size_t j = 0; j < m.f.size(); j++)
                    if (j != i) b.f.push_back(m.f[j]);
                r.add_raw(b, sign < 0 ? c.neg() : c);
            }
            if (spec_.gens[m.f[i].first].parity == Parity::Odd &&
                spec_.gens[gen].parity == Parity::Odd)
                sign = -sign;
        }
    }
    return r;
}

Parity PvaEngine::parity_of(const PvaExpr& p) const {
    std::optional<Parity> r;
    for (auto& [m, c] : p.t) {
        int s = 0;
        for (auto& [g, n] : m.f) s ^= (int)spec_.gens[g].parity;
        if (r && (int)*r != s) fail(Errc::InhomogeneousInput, "mixed parity differential polynomial");
        r = (Parity)s;
    }
    return r.value_or(Parity::Even);
}

PvaLambda PvaEngine::skew_image(const PvaLambda& l) const {
    // -{.}_{-lam-T}: lam^n -> (-lam-T)^n with T applied to coefficients
    PvaLambda r;
    for (size_t n = 0; n < l.c.size(); n++) {
        if (l.c[n].is_zero()) continue;
        for (size_t m = 0; m <= n; m++) {
            Rat coef = binom_rat(Rat((long)n), (long)m);
            if ((n % 2) == 1) coef = -coef; // (-1)^n from (-lam)^m (-T)^{n-m}
            r.add(m, apply_T_pow(l.c[n], (long)(n - m)).scaled(Scalar(coef)));
        }
    }
    r.trim();
    return r;
}

PvaLambda PvaEngine::table_bracket(int i, int j) const {
    auto it = spec_.table.find({i, j});
    if (it != spec_.table.end()) return it->second;
    auto rit = spec_.table.find({j, i});
    if (rit == spec_.table.end()) return {};
    int p = (spec_.gens[i].parity == Parity::Odd && spec_.gens[j].parity == Parity::Odd) ? -1 : 1;
    PvaLambda sk = skew_image(rit->second);
    PvaLambda r;
    for (size_t n = 0; n < sk.c.size(); n++) r.add(n, sk.c[n].scaled(Scalar((long)-p)));
    return r;
}

// {P_l Q} = sum dQ/du_j^(q) (l+T)^q {u_i_{l+T} u_j}-> (-l-T)^p dP/du_i^(p)
PvaLambda PvaEngine::bracket(const PvaExpr& p, const PvaExpr& q) {
    PvaLambda result;
    size_t ng = spec_.gens.size();
    for (size_t i = 0; i < ng; i++) {
        // B = sum_p (-lam-T)^p dP/du_i^(p), as lam-polynomial
        PvaLambda B;
        int maxp = 0;
        for (auto& [m, c] : p.t)
            for (auto& [g, n] : m.f)
                if (g == (int)i) maxp = std::max(maxp, n);
        for (int pp = 0; pp <= maxp; pp++) {
            PvaExpr dp = partial(p, (int)i, pp);
            if (dp.is_zero()) continue;
            for (int m = 0; m <= pp; m++) {
                Rat coef = binom_rat(Rat(pp), m);
                if (pp % 2 == 1) coef = -coef;
                B.add((size_t)m, apply_T_pow(dp, pp - m).scaled(Scalar(coef)));
            }
        }
        if (B.is_zero()) continue;
        for (size_t j = 0; j < ng; j++) {
            PvaLambda H = table_bracket((int)i, (int)j);
            if (H.is_zero()) continue;
            int maxq = 0;
            for (auto& [m, c] : q.t)
                for (auto& [g, n] : m.f)
                    if (g == (int)j) maxq = std::max(maxq, n);
            for (int qq = 0; qq <= maxq; qq++) {
                PvaExpr dq = partial(q, (int)j, qq);
                if (dq.is_zero()) continue;
                // inner = H(lam+T)-> applied to B  (T acts on everything to the right)
                PvaLambda inner;
                for (size_t s = 0; s < H.c.size(); s++) {
                    if (H.c[s].is_zero()) continue;
                    for (size_t bm = 0; bm < B.c.size(); bm++) {
                        if (B.c[bm].is_zero()) continue;
                        for (size_t tt = 0; tt <= s; tt++) {
                            Rat coef = binom_rat(Rat((long)s), (long)tt);
                            PvaExpr piece = mul(H.c[s], apply_T_pow(B.c[bm], (long)(s - tt)));
                            inner.add(tt + bm, piece.scaled(Scalar(coef)));
                        }
                    }
                }
                // term = dq * (lam+T)^qq inner
                for (size_t im = 0; im < inner.c.size(); im++) {
                    if (inner.c[im].is_zero()) continue;
                    for (int tt = 0; tt <= qq; tt++) {
                        Rat coef = binom_rat(Rat(qq), tt);
                        PvaExpr piece = mul(dq, apply_T_pow(inner.c[im], qq - tt));
                        result.add(im + (size_t)tt, piece.scaled(Scalar(coef)));
                    }
                }
            }
        }
    }
    result.trim();
    return result;
}

PvaExpr PvaEngine::variational(const PvaExpr& p, int gen) const {
    PvaExpr r;
    int maxp = 0;
    for (auto& [m, c] : p.t)
        for (auto& [g, n] : m.f)
            if (g == gen) maxp = std::max(maxp, n);
    for (int pp = 0; pp <= maxp; pp++) {
        PvaExpr dp = partial(p, gen, pp);
        if (dp.is_zero()) continue;
        PvaExpr t = apply_T_pow(dp, pp);
        r += (pp % 2) ? t.scaled(Scalar(-1)) : t;
    }
    return r;
}

// slices of fixed multidegree and total derivative order
namespace {
struct SliceKey {
    std::vector<int> degs; // per generator count
    int order = 0;
    friend auto operator<=>(const SliceKey&, const SliceKey&) = default;
};

SliceKey key_of(const PvaMono& m, size_t ngens) {
    SliceKey k;
    k.degs.assign(ngens, 0);
    for (auto& [g, n] : m.f) {
        k.degs[g]++;
        k.order += n;
    }
    return k;
}

// all monomials with the given multidegree and exact total order
void enumerate_slice(const std::vector<int>& degs, int order, size_t gen, PvaMono& acc,
                     std::vector<PvaMono>& out) {
    if (gen == degs.size()) {
        if (order == 0) out.push_back(acc);
        return;
    }
    int cnt = degs[gen];
    if (cnt == 0) {
        enumerate_slice(degs, order, gen + 1, acc, out);
        return;
    }
    // nondecreasing derivative orders for the cnt factors of this generator
    std::function<void(int, int, int)> rec = [&](int left, int minOrd, int budget) {
        if (left == 0) {
            enumerate_slice(degs, budget, gen + 1, acc, out);
            return;
        }
        for (int o = minOrd; o <= budget; o++) {
            acc.f.push_back({(int)gen, o});
            rec(left - 1, o, budget - o);
            acc.f.pop_back();
        }
    };
    rec(cnt, 0, order);
}
} // namespace

PvaExpr PvaEngine::reduce_mod_T(const PvaExpr& p) const {
    // group terms by slice
    std::map<SliceKey, PvaExpr> slices;
    for (auto& [m, c] : p.t) {
        PvaExpr e;
        e.add_raw(m, c);
        slices[key_of(m, spec_.gens.size())] += e;
    }
    PvaExpr out;
    for (auto& [k, comp] : slices) {
        if (k.order == 0) {
            out += comp; // T raises order; order-0 slice has no T-image
            continue;
        }
        // basis of source slice (order-1) and of this slice
        std::vector<PvaMono> src, dst;
        PvaMono acc;
        enumerate_slice(k.degs, k.order - 1, 0, acc, src);
        enumerate_slice(k.degs, k.order, 0, acc, dst);
        std::map<PvaMono, size_t> dstIdx;
        for (size_t i = 0; i < dst.size(); i++) dstIdx.emplace(dst[i], i);
        // rows = T(source basis) in dst coordinates
        std::vector<std::vector<Scalar>> rows;
        for (auto& sm : src) {
            PvaExpr im = apply_T(normalize(PvaExpr{{{sm, Scalar(1)}}}));
            if (im.is_zero()) continue;
            std::vector<Scalar> row(dst.size(), Scalar(0));
            for (auto& [m, c] : im.t) row[dstIdx.at(m)] = c;
            rows.push_back(std::move(row));
        }
        Mat m((rows.size()), dst.size());
        for (size_t r = 0; r < rows.size(); r++)
            for (size_t c = 0; c < dst.size(); c++) m.at(r, c) = rows[r][c];
        auto piv = rref(m);
        // eliminate pivot monomials from comp
        std::vector<Scalar> v(dst.size(), Scalar(0));
        for (auto& [mm, cc] : comp.t) v[dstIdx.at(mm)] = cc;
        for (size_t i = 0; i < piv.size(); i++) {
            Scalar f = v[piv[i]];
            if (f.is_zero()) continue;
            for (size_t c = 0; c < dst.size(); c++) v[c] = v[c] - f * m.at(i, c);
        }
        for (size_t c = 0; c < dst.size(); c++)
            if (!v[c].is_zero()) out.add_raw(dst[c], v[c]);
    }
    return out;
}

PvaExpr PvaEngine::hamiltonian_flow(const PvaExpr& h, const PvaExpr& p) {
    return bracket(h, p).coeff(0);
}

bool PvaEngine::involution_check(const PvaExpr& h1, const PvaExpr& h2) {
    return reduce_mod_T(bracket(h1, h2).coeff(0)).is_zero();
}

CheckReport PvaEngine::check_skewsymmetry() {
    CheckReport rep;
    size_t n = spec_.gens.size();
    for (size_t i = 0; i < n; i++)
        for (size_t j = i; j < n; j++) {
            int p = (spec_.gens[i].parity == Parity::Odd && spec_.gens[j].parity == Parity::Odd)
                        ? -1
                        : 1;
            PvaLambda lhs = table_bracket((int)i, (int)j);
            PvaLambda rhs = skew_image(table_bracket((int)j, (int)i));
            PvaLambda resid;
            for (size_t m = 0; m < std::max(lhs.c.size(), rhs.c.size()); m++)
                resid.add(m, lhs.coeff(m) + rhs.coeff(m).scaled(Scalar((long)p)));
            resid.trim();
            rep.checked++;
            if (!resid.is_zero()) {
                rep.pass = false;
                rep.entries.push_back({{(int)i, (int)j}, false, "nonzero"});
            }
        }
    return rep;
}

PvaLambda2 PvaEngine::jacobi_residual(int i, int j, int k) {
    PvaExpr a = PvaExpr::var(i), b = PvaExpr::var(j), c = PvaExpr::var(k);
    PvaLambda2 J;
    PvaLambda bc = bracket(b, c);
    for (size_t m = 0; m < bc.c.size(); m++) {
        if (bc.c[m].is_zero()) continue;
        PvaLambda abc = bracket(a, bc.c[m]);
        for (size_t l = 0; l < abc.c.size(); l++) J.add((int)l, (int)m, abc.c[l]);
    }
    int p = (spec_.gens[i].parity == Parity::Odd && spec_.gens[j].parity == Parity::Odd) ? -1 : 1;
    PvaLambda ac = bracket(a, c);
    for (size_t l = 0; l < ac.c.size(); l++) {
        if (ac.c[l].is_zero()) continue;
        PvaLambda bac = bracket(b, ac.c[l]);
        for (size_t m = 0; m < bac.c.size(); m++)
            J.add((int)l, (int)m, bac.c[m].scaled(Scalar((long)-p)));
    }
    PvaLambda ab = bracket(a, b);
    for (size_t l = 0; l < ab.c.size(); l++) {
        if (ab.c[l].is_zero()) continue;
        PvaLambda w = bracket(ab.c[l], c);
        for (size_t s = 0; s < w.c.size(); s++) {
            if (w.c[s].is_zero()) continue;
            for (size_t tt = 0; tt <= s; tt++) {
                Rat coef = -binom_rat(Rat((long)s), (long)tt);
                J.add((int)(l + tt), (int)(s - tt), w.c[s].scaled(Scalar(coef)));
            }
        }
    }
    return J;
}

CheckReport PvaEngine::check_jacobi() {
    CheckReport rep;
    size_t n = spec_.gens.size();
    for (size_t i = 0; i < n; i++)
        for (size_t j = i; j < n; j++)
            for (size_t k = 0; k < n; k++) {
                rep.checked++;
                if (!jacobi_residual((int)i, (int)j, (int)k).is_zero()) {
                    rep.pass = false;
                    rep.entries.push_back({{(int)i, (int)j, (int)k}, false, "nonzero"});
                }
            }
    return rep;
}

const GenSet& PvaEngine::zhu_gens() {
    if (!zgens_) {
        std::vector<GeneratorDecl> ds;
        for (auto& g : spec_.gens) {
            GeneratorDecl d;
            d.id = g.id;
            d.parity = g.parity;
            if (!g.delta) fail(Errc::BadArgument, "pva generator '" + g.id + "' needs delta for Zhu");
            d.delta = *g.delta;
            d.zeta = 1;
            ds.push_back(d);
        }
        zgens_.emplace(GenSet(ds));
    }
    return *zgens_;
}

PoissonPresentation PvaEngine::pva_zhu() {
    const GenSet& zg = zhu_gens();
    PoissonPresentation pres;
    pres.gens = &zg;
    // pi: monomial prod u^(n) -> prod n! binom(-gamma, n) ubar  (T^(n)a reduction at hbar=1)
    auto pi = [&](const PvaExpr& e) {
        ZhuExpr r;
        for (auto& [m, c] : e.t) {
            Scalar coef = c;
            ZWord w;
            for (auto& [g, n] : m.f) {
                coef = coef * Scalar(factorial(n) * binom_rat(-*spec_.gens[g].delta, n));
                w.g.push_back(g);
            }
            r.add(w, coef);
        }
        return pres.normalize(r);
    };
    size_t ng = spec_.gens.size();
    for (size_t i = 0; i < ng; i++)
        for (size_t j = 0; j < ng; j++) {
            PvaLambda br = table_bracket((int)i, (int)j);
            Rat ga = *spec_.gens[i].delta;
            ZhuExpr acc;
            for (size_t n = 0; n < br.c.size(); n++) {
                Rat bj = binom_rat(ga - 1, (long)n);
                if (bj == 0 || br.c[n].is_zero()) continue;
                // a_(n)b = n! * coeff
                acc += pi(br.c[n]).scaled(Scalar(bj * factorial((long)n)));
            }
            if (!acc.is_zero()) pres.bracket_table.emplace(std::make_pair((int)i, (int)j), acc);
        }
    return pres;
}

PvaSpec quasiclassical_limit(const LcaSpec& family, const std::string& eps_param) {
    int eps = Params::intern(eps_param);
    Scalar epsInv = Scalar::param_id(eps).inv();
    std::map<int, Scalar> at0{{eps, Scalar(0)}};
    PvaSpec out;
    out.name = family.name.empty() ? "limit" : family.name + "_cl";
    for (size_t i = 0; i < family.gens.size(); i++) {
        PvaGen g;
        g.id = family.gens[i].id;
        g.parity = family.gens[i].parity;
        g.delta = family.gens[i].delta;
        out.gens.push_back(g);
    }
    for (auto& [key, lam] : family.table) {
        PvaLambda pl;
        for (size_t n = 0; n < lam.c.size(); n++) {
            for (auto& [m, c] : lam.c[n].t) {
                Scalar lim;
                try {
                    lim = (c * epsInv).substitute(at0);
                } catch (const Error& e) {
                    if (e.code == Errc::PoleAtSubstitution)
                        fail(Errc::NotDivisibleByEpsilon,
                             "table entry for (" + family.gens[key.first].id + "," +
                                 family.gens[key.second].id + ") is not divisible by " + eps_param);
                    throw;
                }
                if (lim.is_zero()) continue;
                // Term T^(k)e is the divided power: contributes u^(k)/k!
                PvaMono pm;
                Scalar coef = lim;
                for (auto& t : m.w) {
                    pm.f.push_back({t.gen, t.tpow});
                    coef = coef * Scalar(factorial(t.tpow)).inv();
                }
                std::sort(pm.f.begin(), pm.f.end());
                PvaExpr e;
                e.add_raw(pm, coef);
                pl.add(n, e);
            }
        }
        pl.trim();
        if (!pl.is_zero()) out.table.emplace(key, pl);
    }
    return out;
}

PvaSpec make_gfz() {
    PvaSpec s;
    s.name = "gfz";
    PvaGen u;
    u.id = "u";
    u.delta = Rat(1);
    s.gens.push_back(u);
    PvaLambda l;
    l.add(1, PvaExpr::constant(Scalar(1)));
    s.table.emplace(std::make_pair(0, 0), l);
    return s;
}

PvaExpr gfz_h(const PvaSpec& s, int which) {
    int u = 0;
    (void)s;
    switch (which) {
    case 0: return PvaExpr::var(u);
    case 1: {
        PvaMono m{{{u, 0}, {u, 0}}};
        PvaExpr e;
        e.add_raw(m, Scalar(Rat(1, 2)));
        return e;
    }
    case 2: {
        PvaExpr e;
        e.add_raw(PvaMono{{{u, 0}, {u, 0}, {u, 0}}}, Scalar(Rat(1, 2)));
        e.add_raw(PvaMono{{{u, 1}, {u, 1}}}, Scalar(Rat(-1, 2)));
        return e;
    }
    default: fail(Errc::BadArgument, "gfz functional index must be 0,1,2");
    }
}

} // namespace lf
