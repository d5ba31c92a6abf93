#include "lambdaforge/terms.hpp"

#include <algorithm>

namespace lf {

GenSet::GenSet(std::vector<GeneratorDecl> gens) : gens_(std::move(gens)) {
    for (size_t i = 0; i < gens_.size(); i++) {
        auto& g = gens_[i];
        if (g.id.empty()) fail(Errc::ValidationError, "generator with empty id");
        if (g.id == "lam" || g.id == "mu" || g.id == "hbar" || g.id == "T")
            fail(Errc::ValidationError, "generator id '" + g.id + "' is reserved");
        if (byName_.count(g.id)) fail(Errc::ValidationError, "duplicate generator id '" + g.id + "'");
        if (g.zeta == 0) g.zeta = g.delta;
        if (g.zeta <= 0)
            fail(Errc::ValidationError, "generator '" + g.id + "' needs zeta > 0 (got " + rat_str(g.zeta) + ")");
        byName_.emplace(g.id, (int)i);
    }
}

int GenSet::index_of(const std::string& id) const {
    auto it = byName_.find(id);
    if (it == byName_.end()) fail(Errc::UnknownGenerator, "'" + id + "'");
    return it->second;
}

std::optional<int> GenSet::find(const std::string& id) const {
    auto it = byName_.find(id);
    if (it == byName_.end()) return std::nullopt;
    return it->second;
}

Expr Expr::vacuum(const Scalar& c) { return single(Monomial{}, c); }

Expr Expr::single(Monomial m, Scalar c) {
    Expr e;
    if (!c.is_zero()) e.t.emplace(std::move(m), std::move(c));
    return e;
}

Expr Expr::gen(int genIdx, Scalar c) { return single(Monomial{{Term{genIdx, 0}}}, std::move(c)); }

void Expr::add(const Monomial& m, const Scalar& c) {
    if (c.is_zero()) return;
    auto it = t.find(m);
    if (it == t.end()) {
        t.emplace(m, c);
    } else {
        it->second = it->second + c;
        if (it->second.is_zero()) t.erase(it);
    }
}

Expr Expr::operator+(const Expr& o) const {
    Expr r = *this;
    r += o;
    return r;
}

Expr& Expr::operator+=(const Expr& o) {
    for (auto& [m, c] : o.t) add(m, c);
    return *this;
}

Expr Expr::operator-(const Expr& o) const { return *this + o.neg(); }

Expr Expr::scaled(const Scalar& c) const {
    Expr r;
    if (c.is_zero()) return r;
    for (auto& [m, s] : t) r.t.emplace(m, s * c);
    return r;
}

Expr Expr::substitute(const std::map<int, Scalar>& a) const {
    Expr r;
    for (auto& [m, s] : t) r.add(m, s.substitute(a));
    return r;
}

bool Lambda1::is_zero() const {
    for (auto& e : c)
        if (!e.is_zero()) return false;
    return true;
}

void Lambda1::trim() {
    while (!c.empty() && c.back().is_zero()) c.pop_back();
}

void Lambda1::add(size_t n, const Expr& e) {
    if (e.is_zero()) return;
    if (c.size() <= n) c.resize(n + 1);
    c[n] += e;
}

Lambda1 Lambda1::operator+(const Lambda1& o) const {
    Lambda1 r = *this;
    for (size_t n = 0; n < o.c.size(); n++) r.add(n, o.c[n]);
    r.trim();
    return r;
}

Lambda1 Lambda1::scaled(const Scalar& s) const {
    Lambda1 r;
    for (auto& e : c) r.c.push_back(e.scaled(s));
    r.trim();
    return r;
}

bool Lambda1::operator==(const Lambda1& o) const {
    size_t n = std::max(c.size(), o.c.size());
    for (size_t i = 0; i < n; i++)
        if (coeff(i) != o.coeff(i)) return false;
    return true;
}

bool Lambda2::is_zero() const { return t.empty(); }

void Lambda2::add(int i, int j, const Expr& e) {
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

Lambda2 Lambda2::operator+(const Lambda2& o) const {
    Lambda2 r = *this;
    for (auto& [k, e] : o.t) r.add(k.first, k.second, e);
    return r;
}

Lambda2 Lambda2::operator-(const Lambda2& o) const { return *this + o.scaled(Scalar(-1)); }

Lambda2 Lambda2::scaled(const Scalar& s) const {
    Lambda2 r;
    if (s.is_zero()) return r;
    for (auto& [k, e] : t) r.add(k.first, k.second, e.scaled(s));
    return r;
}

Rat TermMeta::delta(const Monomial& m) const {
    Rat d = 0;
    for (auto& t : m.w) d += delta(t);
    return d;
}

Rat TermMeta::zeta(const Monomial& m) const {
    Rat z = 0;
    for (auto& t : m.w) z += zeta(t);
    return z;
}

long TermMeta::charge(const Monomial& m) const {
    long c = 0;
    for (auto& t : m.w) c += g[t.gen].charge;
    return c;
}

Parity TermMeta::parity(const Monomial& m) const {
    int p = 0;
    for (auto& t : m.w) p ^= (int)parity(t);
    return (Parity)p;
}

Rat TermMeta::pdeg(const Monomial& m) const {
    Rat d = 0;
    for (auto& t : m.w)
        if (g[t.gen].bigrade) d += g[t.gen].bigrade->first;
    return d;
}

std::optional<Rat> TermMeta::homogeneous_delta(const Expr& e) const {
    std::optional<Rat> d;
    for (auto& [m, c] : e.t) {
        Rat dm = delta(m);
        if (!d)
            d = dm;
        else if (*d != dm)
            fail(Errc::InhomogeneousInput,
                 "mixed conformal weights " + rat_str(*d) + " and " + rat_str(dm));
    }
    return d;
}

bool TermMeta::is_ordered(const Monomial& m) const {
    for (size_t i = 0; i + 1 < m.w.size(); i++) {
        int c = compare_index(m.w[i], m.w[i + 1]);
        if (c > 0) return false;
        if (c == 0 && parity(m.w[i]) == Parity::Odd) return false;
    }
    return true;
}

Monomial make_monomial(const GenSet& g, const std::vector<Term>& terms) {
    for (auto& t : terms) {
        if (t.gen < 0 || (size_t)t.gen >= g.size())
            fail(Errc::UnknownGenerator, "generator index " + std::to_string(t.gen));
        if (t.tpow < 0) fail(Errc::BadArgument, "negative T power");
    }
    return Monomial{terms};
}

Expr apply_T_raw(const Expr& x) {
    Expr r;
    for (auto& [m, c] : x.t) {
        for (size_t i = 0; i < m.w.size(); i++) {
            Monomial b = m;
            b.w[i].tpow++;
            // divided powers: T (T^(n) e) = (n+1) T^(n+1) e
            r.add(b, c * Scalar((long)m.w[i].tpow + 1));
        }
    }
    return r;
}

Expr apply_T_divided_raw(const Expr& x, long k) {
    Expr r = x;
    for (long i = 0; i < k; i++) r = apply_T_raw(r);
    return r.scaled(Scalar(factorial(k)).inv());
}

} // namespace lf
