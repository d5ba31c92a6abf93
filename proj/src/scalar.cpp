#include "lambdaforge/scalar.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>

namespace lf {

const char* errc_name(Errc c) {
    switch (c) {
    case Errc::ZeroDenominator: return "ZeroDenominator";
    case Errc::PoleAtSubstitution: return "PoleAtSubstitution";
    case Errc::UnknownGenerator: return "UnknownGenerator";
    case Errc::GradingViolation: return "GradingViolation";
    case Errc::InhomogeneousInput: return "InhomogeneousInput";
    case Errc::NotFreelyGenerated: return "NotFreelyGenerated";
    case Errc::NotSemisimpleAmbiguity: return "NotSemisimpleAmbiguity";
    case Errc::NotGood: return "NotGood";
    case Errc::NotAdapted: return "NotAdapted";
    case Errc::DegenerateForm: return "DegenerateForm";
    case Errc::DegeneratePairing: return "DegeneratePairing";
    case Errc::CriticalLevel: return "CriticalLevel";
    case Errc::BadPolarization: return "BadPolarization";
    case Errc::NoSolution: return "NoSolution";
    case Errc::InsufficientGenerators: return "InsufficientGenerators";
    case Errc::NotDivisibleByEpsilon: return "NotDivisibleByEpsilon";
    case Errc::UnsupportedBound: return "UnsupportedBound";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
    case Errc::BadArgument: return "BadArgument";
    }
    return "Error";
}

Rat rat_of(long n, long d) {
    Rat r(n, d);
    r.canonicalize();
    return r;
}

Rat rat_parse(const std::string& s) {
    try {
        Rat r(s);
        r.canonicalize();
        return r;
    } catch (const std::invalid_argument&) {
        fail(Errc::ParseError, "bad rational '" + s + "'");
    }
}

std::string rat_str(const Rat& r) { return r.get_str(); }

bool rat_is_int(const Rat& r) { return r.get_den() == 1; }

long rat_to_long(const Rat& r) {
    if (!rat_is_int(r)) fail(Errc::BadArgument, "expected integer, got " + rat_str(r));
    return mpz_get_si(r.get_num_mpz_t());
}

Rat factorial(long n) {
    Rat r = 1;
    for (long i = 2; i <= n; i++) r *= i;
    return r;
}

Rat binom_rat(const Rat& x, long j) {
    Rat r = 1;
    for (long i = 0; i < j; i++) r *= (x - i);
    return r / factorial(j);
}

// ---------------------------------------------------------------- Params

namespace {
struct ParamTable {
    std::vector<std::string> names;
    std::map<std::string, int> byName;
    std::mutex mx;
};
ParamTable& ptab() {
    static ParamTable t;
    return t;
}
} // namespace

int Params::intern(const std::string& name) {
    auto& t = ptab();
    std::lock_guard<std::mutex> g(t.mx);
    auto it = t.byName.find(name);
    if (it != t.byName.end()) return it->second;
    int id = (int)t.names.size();
    t.names.push_back(name);
    t.byName.emplace(name, id);
    return id;
}

const std::string& Params::name(int id) {
    auto& t = ptab();
    std::lock_guard<std::mutex> g(t.mx);
    return t.names.at(id);
}

bool Params::name_less(int a, int b) {
    if (a == b) return false;
    return Params::name(a) < Params::name(b);
}

// ---------------------------------------------------------------- Pmono

int Pmono::total_deg() const {
    int d = 0;
    for (auto& [id, e] : pe) d += e;
    return d;
}

int Pmono::exp_of(int id) const {
    for (auto& [i, e] : pe)
        if (i == id) return e;
    return 0;
}

Pmono Pmono::mul(const Pmono& o) const {
    Pmono r;
    size_t i = 0, j = 0;
    while (i < pe.size() || j < o.pe.size()) {
        if (j == o.pe.size() || (i < pe.size() && Params::name_less(pe[i].first, o.pe[j].first)))
            r.pe.push_back(pe[i++]);
        else if (i == pe.size() || Params::name_less(o.pe[j].first, pe[i].first))
            r.pe.push_back(o.pe[j++]);
        else {
            r.pe.push_back({pe[i].first, pe[i].second + o.pe[j].second});
            i++, j++;
        }
    }
    return r;
}

std::optional<Pmono> Pmono::div(const Pmono& o) const {
    Pmono r;
    size_t i = 0;
    for (auto& [id, e] : o.pe) {
        while (i < pe.size() && Params::name_less(pe[i].first, id)) r.pe.push_back(pe[i++]);
        if (i == pe.size() || pe[i].first != id || pe[i].second < e) return std::nullopt;
        if (pe[i].second > e) r.pe.push_back({id, pe[i].second - e});
        i++;
    }
    while (i < pe.size()) r.pe.push_back(pe[i++]);
    return r;
}

bool PmonoLess::operator()(const Pmono& a, const Pmono& b) const {
    int da = a.total_deg(), db = b.total_deg();
    if (da != db) return da < db;
    // lexicographic along alphabetical names: bigger exponent on earlier name is larger
    size_t i = 0, j = 0;
    while (i < a.pe.size() && j < b.pe.size()) {
        if (a.pe[i].first == b.pe[j].first) {
            if (a.pe[i].second != b.pe[j].second)
                return a.pe[i].second < b.pe[j].second;
            i++, j++;
        } else if (Params::name_less(a.pe[i].first, b.pe[j].first)) {
            return false; // a has positive power on an earlier name: a is larger
        } else {
            return true;
        }
    }
    if (i < a.pe.size()) return false;
    if (j < b.pe.size()) return true;
    return false;
}

// ---------------------------------------------------------------- Poly

Poly Poly::constant(const Rat& r) {
    Poly p;
    if (r != 0) {
        Rat c = r;
        c.canonicalize();
        p.t.emplace(Pmono::one(), c);
    }
    return p;
}

Poly Poly::var(int id) {
    Poly p;
    Pmono m;
    m.pe.push_back({id, 1});
    p.t.emplace(m, Rat(1));
    return p;
}

bool Poly::is_constant() const {
    return t.empty() || (t.size() == 1 && t.begin()->first.pe.empty());
}

Rat Poly::constant_value() const {
    if (t.empty()) return Rat(0);
    return t.begin()->second;
}

int Poly::total_deg() const {
    int d = 0;
    for (auto& [m, c] : t) d = std::max(d, m.total_deg());
    return d;
}

Poly Poly::operator+(const Poly& o) const {
    Poly r = *this;
    for (auto& [m, c] : o.t) {
        auto it = r.t.find(m);
        if (it == r.t.end())
            r.t.emplace(m, c);
        else {
            it->second += c;
            if (it->second == 0) r.t.erase(it);
        }
    }
    return r;
}

Poly Poly::operator-(const Poly& o) const { return *this + o.neg(); }

Poly Poly::neg() const {
    Poly r;
    for (auto& [m, c] : t) r.t.emplace(m, -c);
    return r;
}

Poly Poly::scaled(const Rat& r) const {
    Poly p;
    if (r == 0) return p;
    for (auto& [m, c] : t) p.t.emplace(m, c * r);
    return p;
}

Poly Poly::operator*(const Poly& o) const {
    Poly r;
    for (auto& [m1, c1] : t)
        for (auto& [m2, c2] : o.t) {
            Pmono m = m1.mul(m2);
            auto it = r.t.find(m);
            if (it == r.t.end())
                r.t.emplace(m, c1 * c2);
            else {
                it->second += c1 * c2;
                if (it->second == 0) r.t.erase(it);
            }
        }
    return r;
}

std::pair<Pmono, Rat> Poly::lead() const { return *t.rbegin(); }

std::optional<Poly> Poly::divided_by(const Poly& d) const {
    if (d.is_zero()) return std::nullopt;
    Poly rem = *this, q;
    auto [dm, dc] = d.lead();
    while (!rem.is_zero()) {
        auto [rm, rc] = rem.lead();
        auto mq = rm.div(dm);
        if (!mq) return std::nullopt;
        Poly term;
        term.t.emplace(*mq, rc / dc);
        q = q + term;
        rem = rem - d * term;
    }
    return q;
}

std::vector<int> Poly::vars() const {
    std::vector<int> v;
    for (auto& [m, c] : t)
        for (auto& [id, e] : m.pe)
            if (std::find(v.begin(), v.end(), id) == v.end()) v.push_back(id);
    std::sort(v.begin(), v.end(), Params::name_less);
    return v;
}

bool Poly::operator<(const Poly& o) const {
    auto ia = t.begin(), ib = o.t.begin();
    PmonoLess less;
    for (; ia != t.end() && ib != o.t.end(); ++ia, ++ib) {
        if (less(ia->first, ib->first)) return true;
        if (less(ib->first, ia->first)) return false;
        if (ia->second != ib->second) return ia->second < ib->second;
    }
    return ia == t.end() && ib != o.t.end();
}

// gcd: recursive primitive PRS on the alphabetically first variable present.

namespace {

// view p as univariate in x: degree -> coefficient Poly
std::map<int, Poly> as_univar(const Poly& p, int x) {
    std::map<int, Poly> u;
    for (auto& [m, c] : p.t) {
        int e = m.exp_of(x);
        Pmono rest;
        for (auto& pr : m.pe)
            if (pr.first != x) rest.pe.push_back(pr);
        Poly term;
        term.t.emplace(rest, c);
        u[e] = u[e] + term;
        if (u[e].is_zero()) u.erase(e);
    }
    return u;
}

Poly from_univar(const std::map<int, Poly>& u, int x) {
    Poly xp = Poly::var(x), acc, pw = Poly::constant(1);
    int at = 0;
    for (auto& [e, c] : u) {
        while (at < e) pw = pw * xp, at++;
        acc = acc + c * pw;
    }
    return acc;
}

Poly content_wrt(const std::map<int, Poly>& u) {
    Poly g;
    for (auto& [e, c] : u) g = poly_gcd(g, c);
    return g;
}

} // namespace

Poly poly_gcd(const Poly& a, const Poly& b) {
    if (a.is_zero() && b.is_zero()) return Poly();
    if (a.is_zero() || b.is_zero()) {
        Poly r = a.is_zero() ? b : a;
        return r.scaled(Rat(1) / r.lead().second); // monic representative
    }
    if (a.is_constant() || b.is_constant()) return Poly::constant(Rat(1));
    auto va = a.vars(), vb = b.vars();
    int x = Params::name_less(va[0], vb[0]) ? va[0] : vb[0];
    auto ua = as_univar(a, x), ub = as_univar(b, x);
    Poly ca = content_wrt(ua), cb = content_wrt(ub);
    Poly cont = poly_gcd(ca, cb);
    // primitive parts
    auto prim = [&](std::map<int, Poly>& u, const Poly& c) {
        for (auto& [e, p] : u) p = *p.divided_by(c);
    };
    prim(ua, ca);
    prim(ub, cb);
    // primitive PRS via pseudo-remainders
    auto deg = [](const std::map<int, Poly>& u) { return u.empty() ? -1 : u.rbegin()->first; };
    auto* A = &ua;
    auto* B = &ub;
    std::map<int, Poly> t1, t2;
    if (deg(*A) < deg(*B)) std::swap(A, B);
    t1 = *A;
    t2 = *B;
    A = &t1;
    B = &t2;
    while (!B->empty()) {
        int da = deg(*A), db = deg(*B);
        Poly lb = B->rbegin()->second;
        // pseudo-remainder of lb^(da-db+1) * A by B
        std::map<int, Poly> R = *A;
        for (int i = 0; i <= da - db + 1 && !R.empty() && deg(R) >= db; i++) {
            // scale R by lb and cancel leading term
            for (auto& [e, c] : R) c = c * lb;
            int dr = deg(R);
            if (dr < db) break;
            Poly q = *R.rbegin()->second.divided_by(lb); // = old lead coeff
            // R -= q * x^(dr-db) * B
            for (auto& [e, c] : *B) {
                Poly sub = q * c;
                int te = e + dr - db;
                auto it = R.find(te);
                if (it == R.end()) {
                    if (!sub.is_zero()) R.emplace(te, sub.neg());
                } else {
                    it->second = it->second - sub;
                    if (it->second.is_zero()) R.erase(it);
                }
            }
        }
        if (!R.empty()) {
            Poly cr = content_wrt(R);
            for (auto& [e, c] : R) c = *c.divided_by(cr);
        }
        *A = std::move(*B);
        *B = std::move(R);
    }
    Poly g = cont * from_univar(*A, x);
    return g.scaled(Rat(1) / g.lead().second);
}

// ---------------------------------------------------------------- Scalar

Scalar::Scalar() : num(), den(Poly::constant(1)) {}
Scalar::Scalar(long n) : num(Poly::constant(Rat(n))), den(Poly::constant(1)) {}
Scalar::Scalar(const Rat& r) : num(Poly::constant(r)), den(Poly::constant(1)) {}

Scalar::Scalar(Poly n, Poly d) {
    if (d.is_zero()) fail(Errc::ZeroDenominator, "0 denominator");
    if (n.is_zero()) {
        num = Poly();
        den = Poly::constant(1);
        return;
    }
    Poly g = poly_gcd(n, d);
    if (!g.is_constant()) {
        n = *n.divided_by(g);
        d = *d.divided_by(g);
    }
    Rat lc = d.lead().second;
    num = n.scaled(Rat(1) / lc);
    den = d.scaled(Rat(1) / lc);
}

Scalar Scalar::param(const std::string& name) { return param_id(Params::intern(name)); }

Scalar Scalar::param_id(int id) {
    Scalar s;
    s.num = Poly::var(id);
    return s;
}

Scalar Scalar::of_poly(Poly p) {
    Scalar s;
    s.num = std::move(p);
    return s;
}

bool Scalar::is_one() const { return den.is_constant() && num.is_constant() && num.constant_value() == 1; }

bool Scalar::is_rational() const { return num.is_constant() && den.is_constant(); }

Rat Scalar::rational_value() const {
    if (!is_rational()) fail(Errc::BadArgument, "scalar '" + str() + "' is not a plain rational");
    return num.constant_value() / den.constant_value();
}

Scalar Scalar::operator+(const Scalar& o) const { return Scalar(num * o.den + o.num * den, den * o.den); }
Scalar Scalar::operator-(const Scalar& o) const { return Scalar(num * o.den - o.num * den, den * o.den); }
Scalar Scalar::operator*(const Scalar& o) const { return Scalar(num * o.num, den * o.den); }

Scalar Scalar::operator/(const Scalar& o) const {
    if (o.is_zero()) fail(Errc::ZeroDenominator, "division by zero scalar");
    return Scalar(num * o.den, den * o.num);
}

Scalar Scalar::neg() const {
    Scalar r = *this;
    r.num = r.num.neg();
    return r;
}

Scalar Scalar::inv() const {
    if (is_zero()) fail(Errc::ZeroDenominator, "inverse of zero");
    return Scalar(den, num);
}

Scalar Scalar::pow(long e) const {
    if (e < 0) return inv().pow(-e);
    Scalar r(1);
    for (long i = 0; i < e; i++) r = r * (*this);
    return r;
}

bool Scalar::operator<(const Scalar& o) const {
    if (num < o.num) return true;
    if (o.num < num) return false;
    return den < o.den;
}

namespace {
Scalar subst_poly(const Poly& p, const std::map<int, Scalar>& a) {
    Scalar acc;
    for (auto& [m, c] : p.t) {
        Scalar term(c);
        for (auto& [id, e] : m.pe) {
            auto it = a.find(id);
            Scalar base = (it == a.end()) ? Scalar::param_id(id) : it->second;
            term = term * base.pow(e);
        }
        acc = acc + term;
    }
    return acc;
}
} // namespace

Scalar Scalar::substitute(const std::map<int, Scalar>& a) const {
    Scalar n = subst_poly(num, a);
    Scalar d = subst_poly(den, a);
    if (d.is_zero()) fail(Errc::PoleAtSubstitution, "denominator of " + str() + " vanishes");
    return n / d;
}

Scalar operator*(const Rat& r, const Scalar& s) { return Scalar(r) * s; }

Scalar binom(const Scalar& x, long j) {
    Scalar r(1);
    for (long i = 0; i < j; i++) r = r * (x - Scalar(i));
    return r / Scalar(factorial(j));
}

// ---------------------------------------------------------------- printing

namespace {

void print_mono(std::ostringstream& os, const Pmono& m, const Rat& c, bool first) {
    Rat a = c < 0 ? Rat(-c) : c;
    if (first) {
        if (c < 0) os << "-";
    } else {
        os << (c < 0 ? " - " : " + ");
    }
    bool needcoef = (a != 1) || m.pe.empty();
    if (needcoef) os << rat_str(a);
    bool star = needcoef;
    for (auto& [id, e] : m.pe) {
        if (star) os << "*";
        os << Params::name(id);
        if (e != 1) os << "^" << e;
        star = true;
    }
}

std::string poly_str(const Poly& p) {
    if (p.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    // print highest-order terms first
    for (auto it = p.t.rbegin(); it != p.t.rend(); ++it) {
        print_mono(os, it->first, it->second, first);
        first = false;
    }
    return os.str();
}

} // namespace

std::string Scalar::str() const {
    if (den.is_constant()) {
        if (num.is_constant()) return rat_str(num.constant_value());
        if (num.t.size() == 1) return poly_str(num);
        return "(" + poly_str(num) + ")";
    }
    std::string n = num.t.size() == 1 ? poly_str(num) : "(" + poly_str(num) + ")";
    return n + "/(" + poly_str(den) + ")";
}

} // namespace lf
