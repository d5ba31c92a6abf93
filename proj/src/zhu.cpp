#include "lambdaforge/zhu.hpp"

#include <algorithm>

namespace lf {

// ------------------------------------------------------------ GammaData

GammaData GammaData::h_induced(const GenSet& g) {
    GammaData d;
    d.gens = &g;
    return d;
}

GammaData GammaData::with_cosets(const GenSet& g, std::vector<Rat> cosets) {
    if (cosets.size() != g.size()) fail(Errc::BadArgument, "coset vector size mismatch");
    GammaData d;
    d.gens = &g;
    d.coset = std::move(cosets);
    return d;
}

namespace {
Rat frac_mod1(const Rat& x) {
    // representative of x mod 1 in [0,1)
    Rat num = x.get_num(), den = x.get_den();
    mpz_class q, r;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    Rat rr(r, x.get_den());
    rr.canonicalize();
    return rr;
}
} // namespace

Rat GammaData::eps(int gen) const {
    if (h_induced_flag()) return 0;
    // maximal non-positive real in (coset - Delta) + Z
    Rat d = frac_mod1(coset[gen] - (*gens)[gen].delta);
    if (d == 0) return 0;
    return d - 1;
}

Rat GammaData::gamma(int gen) const { return (*gens)[gen].delta + eps(gen); }

int GammaData::chi(int g1, int g2) const { return (eps(g1) + eps(g2) <= -1) ? 1 : 0; }

// ------------------------------------------------------------ ZhuExpr

void ZhuExpr::add(const ZWord& w, const Scalar& c) {
    if (c.is_zero()) return;
    auto it = t.find(w);
    if (it == t.end()) {
        t.emplace(w, c);
    } else {
        it->second = it->second + c;
        if (it->second.is_zero()) t.erase(it);
    }
}

ZhuExpr ZhuExpr::operator+(const ZhuExpr& o) const {
    ZhuExpr r = *this;
    r += o;
    return r;
}

ZhuExpr& ZhuExpr::operator+=(const ZhuExpr& o) {
    for (auto& [w, c] : o.t) add(w, c);
    return *this;
}

ZhuExpr ZhuExpr::operator-(const ZhuExpr& o) const { return *this + o.scaled(Scalar(-1)); }

ZhuExpr ZhuExpr::scaled(const Scalar& c) const {
    ZhuExpr r;
    if (c.is_zero()) return r;
    for (auto& [w, s] : t) r.t.emplace(w, s * c);
    return r;
}

ZhuExpr ZhuExpr::one(const Scalar& c) {
    ZhuExpr r;
    r.add(ZWord{}, c);
    return r;
}

ZhuExpr ZhuExpr::gen(int g, const Scalar& c) {
    ZhuExpr r;
    r.add(ZWord{{g}}, c);
    return r;
}

ZhuExpr ZhuExpr::substitute(const std::map<int, Scalar>& a) const {
    ZhuExpr r;
    for (auto& [w, c] : t) r.add(w, c.substitute(a));
    return r;
}

// ------------------------------------------------------------ PoissonPresentation

Parity PoissonPresentation::parity_of(const ZWord& w) const {
    int p = 0;
    for (int g : w.g) p ^= (int)(*gens)[g].parity;
    return (Parity)p;
}

ZhuExpr PoissonPresentation::normalize(const ZhuExpr& raw) const {
    // supercommutative sort: insertion sort tracking Koszul signs; odd^2 = 0
    ZhuExpr out;
    for (auto& [w, c] : raw.t) {
        std::vector<int> v = w.g;
        int sign = 1;
        bool zero = false;
        for (size_t i = 1; i < v.size() && !zero; i++) {
            size_t j = i;
            while (j > 0 && v[j - 1] > v[j]) {
                if ((*gens)[v[j - 1]].parity == Parity::Odd && (*gens)[v[j]].parity == Parity::Odd)
                    sign = -sign;
                std::swap(v[j - 1], v[j]);
                j--;
            }
        }
        for (size_t i = 0; i + 1 < v.size(); i++)
            if (v[i] == v[i + 1] && (*gens)[v[i]].parity == Parity::Odd) zero = true;
        if (zero) continue;
        out.add(ZWord{v}, sign < 0 ? c.neg() : c);
    }
    return out;
}

ZhuExpr PoissonPresentation::mul(const ZhuExpr& a, const ZhuExpr& b) const {
    ZhuExpr raw;
    for (auto& [wa, ca] : a.t)
        for (auto& [wb, cb] : b.t) {
            ZWord w = wa;
            w.g.insert(w.g.end(), wb.g.begin(), wb.g.end());
            raw.add(w, ca * cb);
        }
    return normalize(raw);
}

ZhuExpr PoissonPresentation::bracket(const ZhuExpr& a, const ZhuExpr& b) const {
    ZhuExpr r;
    for (auto& [wa, ca] : a.t) {
        for (auto& [wb, cb] : b.t) {
            Scalar c = ca * cb;
            // expand Leibniz over both words
            std::function<ZhuExpr(const std::vector<int>&, const std::vector<int>&)> br2 =
                [&](const std::vector<int>& x, const std::vector<int>& y) -> ZhuExpr {
                if (x.empty() || y.empty()) return {};
                if (y.size() > 1) {
                    // {x, h rest} = {x,h} rest + p(x,h) h {x,rest}
                    std::vector<int> rest(y.begin() + 1, y.end());
                    ZhuExpr t1 = mul(br2(x, {y[0]}), ZhuExpr{{{ZWord{rest}, Scalar(1)}}});
                    int p = (parity_of(ZWord{x}) == Parity::Odd &&
                             (*gens)[y[0]].parity == Parity::Odd)
                                ? -1
                                : 1;
                    ZhuExpr t2 = mul(ZhuExpr::gen(y[0], Scalar((long)p)), br2(x, rest));
                    return t1 + t2;
                }
                if (x.size() > 1) {
                    // {g rest, y} = g {rest,y} + p(rest,y) {g,y} rest
                    std::vector<int> rest(x.begin() + 1, x.end());
                    ZhuExpr t1 = mul(ZhuExpr::gen(x[0]), br2(rest, y));
                    int p = (parity_of(ZWord{rest}) == Parity::Odd &&
                             (*gens)[y[0]].parity == Parity::Odd)
                                ? -1
                                : 1;
                    ZhuExpr t2 = mul(br2({x[0]}, y), ZhuExpr{{{ZWord{rest}, Scalar((long)p)}}});
                    return t1 + t2;
                }
                auto it = bracket_table.find({x[0], y[0]});
                return it == bracket_table.end() ? ZhuExpr{} : it->second;
            };
            r += br2(wa.g, wb.g).scaled(c);
        }
    }
    return r;
}

// ------------------------------------------------------------ ZhuAlgebra

ZhuAlgebra::ZhuAlgebra(Engine& eng) : eng_(eng), hbar_(Params::intern("hbar")) {}

Expr ZhuAlgebra::deformed_product(const Expr& a, long n, const Expr& b, const GammaData& gamma) {
    // gamma-homogeneity of a
    std::optional<Rat> ga;
    for (auto& [m, c] : a.t) {
        Rat g = 0;
        for (auto& t : m.w) g += gamma.gamma(t.gen) + t.tpow;
        if (!ga)
            ga = g;
        else if (*ga != g)
            fail(Errc::InhomogeneousInput, "deformed product needs gamma-homogeneous left factor");
    }
    if (!ga) return {};
    long jmax = (long)eng_.bracket(a, b).c.size() - n + 1;
    jmax = std::max(jmax, 1l);
    Expr r;
    Scalar hb = Scalar::param_id(hbar_);
    for (long j = 0; j <= jmax; j++) {
        Rat bj = binom_rat(*ga, j);
        if (bj == 0) continue;
        Expr term = eng_.nth(a, n + j, b);
        if (term.is_zero()) continue;
        r += term.scaled(Scalar(bj) * hb.pow(j));
    }
    return r;
}

Expr ZhuAlgebra::hbar_bracket(const Expr& a, const Expr& b, const GammaData& gamma) {
    std::optional<Rat> ga;
    for (auto& [m, c] : a.t) {
        Rat g = 0;
        for (auto& t : m.w) g += gamma.gamma(t.gen) + t.tpow;
        if (!ga)
            ga = g;
        else if (*ga != g)
            fail(Errc::InhomogeneousInput, "hbar bracket needs gamma-homogeneous left factor");
    }
    if (!ga) return {};
    Lambda1 br = eng_.bracket(a, b);
    Expr r;
    Scalar hb = Scalar::param_id(hbar_);
    for (size_t j = 0; j < br.c.size(); j++) {
        Rat bj = binom_rat(*ga - 1, (long)j);
        if (bj == 0) continue;
        // a_(j)b = j! * coeff_j
        r += br.c[j].scaled(Scalar(bj * factorial((long)j)) * hb.pow((long)j));
    }
    return r;
}

Expr ZhuAlgebra::star_product(const Expr& a, long n, const Expr& b) {
    GammaData g = GammaData::h_induced(gens());
    std::map<int, Scalar> one{{hbar_, Scalar(1)}};
    return deformed_product(a, n, b, g).substitute(one);
}

Expr ZhuAlgebra::star_bracket(const Expr& a, const Expr& b) {
    GammaData g = GammaData::h_induced(gens());
    std::map<int, Scalar> one{{hbar_, Scalar(1)}};
    return hbar_bracket(a, b, g).substitute(one);
}

// pi_Z(:(T^(k)a)B:) = binom(-Da,k) ( abar pi(B)
//                     - (Da+k) sum_j binom(Da-1,j)/(k+j+1) pi(a_(j)B) )
ZhuExpr ZhuAlgebra::pi_word(const Monomial& m) {
    if (m.is_vacuum()) return ZhuExpr::one();
    Term t = m.w[0];
    Monomial b;
    b.w.assign(m.w.begin() + 1, m.w.end());
    const Rat da = gens()[t.gen].delta;
    long k = t.tpow;
    Rat pref = binom_rat(-da, k);
    if (pref == 0) return {};
    Expr be = Expr::single(b);
    ZhuExpr r = mul(ZhuExpr::gen(t.gen), pi_Z(be));
    Lambda1 br = eng_.bracket(Expr::gen(t.gen), be);
    for (size_t j = 0; j < br.c.size(); j++) {
        Rat bj = binom_rat(da - 1, (long)j);
        if (bj == 0 || br.c[j].is_zero()) continue;
        // a_(j)B = j! coeff
        Rat coef = -(da + k) * bj * factorial((long)j) / Rat(k + (long)j + 1);
        r += pi_Z(br.c[j]).scaled(Scalar(coef));
    }
    return r.scaled(Scalar(pref));
}

ZhuExpr ZhuAlgebra::pi_Z(const Expr& x) {
    ZhuExpr r;
    for (auto& [m, c] : x.t) r += pi_word(m).scaled(c);
    return r;
}

const ZhuExpr& ZhuAlgebra::ztab(int i, int j) {
    {
        std::lock_guard<std::mutex> g(zMx_);
        auto it = ztab_.find({i, j});
        if (it != ztab_.end()) return it->second;
    }
    ZhuExpr v = pi_Z(star_bracket(Expr::gen(i), Expr::gen(j)));
    std::lock_guard<std::mutex> g(zMx_);
    return ztab_.try_emplace({i, j}, std::move(v)).first->second;
}

ZhuExpr ZhuAlgebra::zhu_commutator(int i, int j) { return ztab(i, j); }

Parity ZhuAlgebra::zparity(const ZWord& w) const {
    int p = 0;
    for (int g : w.g) p ^= (int)gens()[g].parity;
    return (Parity)p;
}

ZhuExpr ZhuAlgebra::zhu_normal_form_raw(const std::vector<int>& word, const Scalar& c) {
    // find first bad adjacent pair
    int bad = -1;
    for (size_t i = 0; i + 1 < word.size(); i++) {
        if (word[i] > word[i + 1] ||
            (word[i] == word[i + 1] && gens()[word[i]].parity == Parity::Odd)) {
            bad = (int)i;
            break;
        }
    }
    if (bad < 0) {
        ZhuExpr r;
        r.add(ZWord{word}, c);
        return r;
    }
    int x = word[bad], y = word[bad + 1];
    std::vector<int> prefix(word.begin(), word.begin() + bad);
    std::vector<int> suffix(word.begin() + bad + 2, word.end());
    ZhuExpr result;
    auto splice = [&](const ZhuExpr& mid, const Scalar& cc) {
        for (auto& [wm, cm] : mid.t) {
            std::vector<int> w = prefix;
            w.insert(w.end(), wm.g.begin(), wm.g.end());
            w.insert(w.end(), suffix.begin(), suffix.end());
            result += zhu_normal_form_raw(w, cc * cm);
        }
    };
    if (x == y) {
        // odd square: e e = 1/2 [e,e]
        splice(ztab(x, y), c * Scalar(Rat(1, 2)));
    } else {
        // x y = p(x,y) y x + [x,y]
        std::vector<int> sw = word;
        std::swap(sw[bad], sw[bad + 1]);
        int p = (gens()[x].parity == Parity::Odd && gens()[y].parity == Parity::Odd) ? -1 : 1;
        result += zhu_normal_form_raw(sw, c * Scalar((long)p));
        splice(ztab(x, y), c);
    }
    return result;
}

ZhuExpr ZhuAlgebra::mul(const ZhuExpr& a, const ZhuExpr& b) {
    ZhuExpr r;
    for (auto& [wa, ca] : a.t)
        for (auto& [wb, cb] : b.t) {
            std::vector<int> w = wa.g;
            w.insert(w.end(), wb.g.begin(), wb.g.end());
            r += zhu_normal_form_raw(w, ca * cb);
        }
    return r;
}

ZhuExpr ZhuAlgebra::commutator(const ZhuExpr& a, const ZhuExpr& b) {
    std::optional<Parity> pa, pb;
    for (auto& [w, c] : a.t) {
        Parity p = zparity(w);
        if (pa && *pa != p) fail(Errc::InhomogeneousInput, "mixed parity in commutator");
        pa = p;
    }
    for (auto& [w, c] : b.t) {
        Parity p = zparity(w);
        if (pb && *pb != p) fail(Errc::InhomogeneousInput, "mixed parity in commutator");
        pb = p;
    }
    int sgn = (pa.value_or(Parity::Even) == Parity::Odd && pb.value_or(Parity::Even) == Parity::Odd)
                  ? -1
                  : 1;
    return mul(a, b) - mul(b, a).scaled(Scalar((long)sgn));
}

ZhuExpr ZhuAlgebra::classical_image(const Expr& x) const {
    ZhuExpr r;
    for (auto& [m, c] : x.t) {
        bool hasT = false;
        ZWord w;
        for (auto& t : m.w) {
            if (t.tpow > 0) {
                hasT = true;
                break;
            }
            w.g.push_back(t.gen);
        }
        if (!hasT) r.add(w, c);
    }
    return r;
}

PoissonPresentation ZhuAlgebra::classical_zhu() {
    PoissonPresentation p;
    p.gens = &gens();
    size_t n = gens().size();
    for (size_t i = 0; i < n; i++)
        for (size_t j = 0; j < n; j++) {
            ZhuExpr v = classical_image(eng_.nth(Expr::gen((int)i), 0, Expr::gen((int)j)));
            if (!v.is_zero()) p.bracket_table.emplace(std::make_pair((int)i, (int)j), p.normalize(v));
        }
    return p;
}

} // namespace lf
