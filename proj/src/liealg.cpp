#include "lambdaforge/liealg.hpp"

#include <functional>

namespace lf {

long LieAlgData::sdim() const {
    long s = 0;
    for (auto p : parity) s += (p == Parity::Even) ? 1 : -1;
    return s;
}

int LieAlgData::index_of(const std::string& id) const {
    for (size_t i = 0; i < basis.size(); i++)
        if (basis[i] == id) return (int)i;
    fail(Errc::UnknownGenerator, "'" + id + "' in algebra " + name);
}

Vec LieAlgData::unit(size_t i) const {
    Vec v(dim(), Scalar(0));
    v[i] = Scalar(1);
    return v;
}

Vec LieAlgData::bracket(const Vec& a, const Vec& b) const {
    Vec r(dim(), Scalar(0));
    for (size_t i = 0; i < dim(); i++) {
        if (a[i].is_zero()) continue;
        for (size_t j = 0; j < dim(); j++) {
            if (b[j].is_zero()) continue;
            Scalar f = a[i] * b[j];
            const Vec& cij = c[i][j];
            for (size_t m = 0; m < dim(); m++)
                if (!cij[m].is_zero()) r[m] = r[m] + f * cij[m];
        }
    }
    return r;
}

Scalar LieAlgData::pair(const Vec& a, const Vec& b) const {
    Scalar s(0);
    for (size_t i = 0; i < dim(); i++) {
        if (a[i].is_zero()) continue;
        for (size_t j = 0; j < dim(); j++)
            if (!b[j].is_zero()) s = s + a[i] * b[j] * form.at(i, j);
    }
    return s;
}

bool LieAlgData::is_zero(const Vec& v) const {
    for (auto& s : v)
        if (!s.is_zero()) return false;
    return true;
}

Vec LieAlgData::scaled(const Vec& v, const Scalar& s) const {
    Vec r = v;
    for (auto& x : r) x = x * s;
    return r;
}

Vec LieAlgData::add(const Vec& a, const Vec& b) const {
    Vec r = a;
    for (size_t i = 0; i < r.size(); i++) r[i] = r[i] + b[i];
    return r;
}

std::vector<std::string> LieAlgData::validate() const {
    std::vector<std::string> bad;
    size_t n = dim();
    auto ps = [&](size_t i, size_t j) {
        return (parity[i] == Parity::Odd && parity[j] == Parity::Odd) ? -1 : 1;
    };
    for (size_t i = 0; i < n; i++)
        for (size_t j = 0; j < n; j++) {
            // parity of the bracket
            for (size_t m = 0; m < n; m++)
                if (!c[i][j][m].is_zero() &&
                    (int)parity[m] != (((int)parity[i] + (int)parity[j]) & 1))
                    bad.push_back("parity([" + basis[i] + "," + basis[j] + "])");
            // super-antisymmetry
            Vec s = add(c[i][j], scaled(c[j][i], Scalar((long)ps(i, j))));
            if (!is_zero(s)) bad.push_back("antisymmetry([" + basis[i] + "," + basis[j] + "])");
        }
    for (size_t i = 0; i < n; i++)
        for (size_t j = 0; j < n; j++)
            for (size_t k = 0; k < n; k++) {
                // [ui,[uj,uk]] - [[ui,uj],uk] - p(i,j)[uj,[ui,uk]]
                Vec r = bracket(unit(i), c[j][k]);
                r = add(r, scaled(bracket(c[i][j], unit(k)), Scalar(-1)));
                r = add(r, scaled(bracket(unit(j), c[i][k]), Scalar((long)-ps(i, j))));
                if (!is_zero(r))
                    bad.push_back("jacobi(" + basis[i] + "," + basis[j] + "," + basis[k] + ")");
            }
    for (size_t i = 0; i < n; i++)
        for (size_t j = 0; j < n; j++) {
            if (parity[i] != parity[j] && !form.at(i, j).is_zero())
                bad.push_back("form parity (" + basis[i] + "|" + basis[j] + ")");
            Scalar other = ps(i, j) < 0 ? form.at(j, i).neg() : form.at(j, i);
            if (form.at(i, j) != other)
                bad.push_back("form supersymmetry (" + basis[i] + "|" + basis[j] + ")");
            for (size_t k = 0; k < n; k++) {
                // ([ui,uj]|uk) = (ui|[uj,uk])
                Scalar lhs = pair(c[i][j], unit(k));
                Scalar rhs = pair(unit(i), c[j][k]);
                if (lhs != rhs)
                    bad.push_back("invariance(" + basis[i] + "," + basis[j] + "," + basis[k] + ")");
            }
        }
    if (det(form).is_zero()) bad.push_back("form degenerate");
    return bad;
}

Scalar LieAlgData::dual_coxeter() const {
    auto inv = inverse(form);
    if (!inv) fail(Errc::DegenerateForm, "form not invertible");
    size_t n = dim();
    // u^j = sum_m (B^{-1})_{mj} u_m
    std::optional<Scalar> twoh;
    for (size_t k = 0; k < n; k++) {
        Vec acc(n, Scalar(0));
        for (size_t i = 0; i < n; i++) {
            Vec ud(n, Scalar(0));
            for (size_t m = 0; m < n; m++) ud[m] = inv->at(m, i);
            Vec t = bracket(ud, bracket(unit(i), unit(k)));
            acc = add(acc, t);
        }
        // acc must equal 2 h^vee * u_k
        for (size_t m = 0; m < n; m++) {
            if (m == k) continue;
            if (!acc[m].is_zero())
                fail(Errc::NotSemisimpleAmbiguity, "Casimir not scalar on " + basis[k]);
        }
        if (!twoh)
            twoh = acc[k];
        else if (*twoh != acc[k])
            fail(Errc::NotSemisimpleAmbiguity, "Casimir eigenvalue varies across basis");
    }
    return *twoh / Scalar(2);
}

std::vector<int> GoodGrading::indices_with(const std::function<bool(const Rat&)>& pred) const {
    std::vector<int> r;
    for (size_t i = 0; i < j.size(); i++)
        if (pred(j[i])) r.push_back((int)i);
    return r;
}

std::vector<int> GoodGrading::s_plus() const {
    return indices_with([](const Rat& r) { return r > 0; });
}
std::vector<int> GoodGrading::s_le() const {
    return indices_with([](const Rat& r) { return r <= 0; });
}
std::vector<int> GoodGrading::s_half() const {
    return indices_with([](const Rat& r) { return r == Rat(1, 2); });
}

Vec GoodGrading::project(const Vec& v, const std::function<bool(const Rat&)>& pred) const {
    Vec r = v;
    for (size_t i = 0; i < r.size(); i++)
        if (!pred(j[i])) r[i] = Scalar(0);
    return r;
}

GoodGrading grading_from_pair(const LieAlgData& g, const Vec& x, const Vec& f) {
    GoodGrading gr;
    gr.x = x;
    gr.f = f;
    size_t n = g.dim();
    gr.j.resize(n);
    for (size_t a = 0; a < n; a++) {
        Vec w = g.bracket(x, g.unit(a));
        // must be j * u_a
        Scalar ja = w[a];
        Vec resid = g.add(w, g.scaled(g.unit(a), ja.neg()));
        if (!g.is_zero(resid))
            fail(Errc::NotAdapted, "basis vector " + g.basis[a] + " is not an ad x eigenvector");
        if (!ja.is_rational())
            fail(Errc::NotAdapted, "non-numeric ad x eigenvalue on " + g.basis[a]);
        Rat jr = ja.rational_value();
        if (Rat(2) * jr != Rat(rat_to_long(Rat(2) * jr)))
            fail(Errc::NotAdapted, "eigenvalue " + rat_str(jr) + " is not half-integer");
        gr.j[a] = jr;
    }
    Vec xf = g.bracket(x, f);
    if (!g.is_zero(g.add(xf, f))) fail(Errc::NotGood, "[x,f] != -f");
    // centralizer of f, degreewise: ad f maps g_j -> g_{j-1}
    std::map<Rat, std::vector<int>> slices;
    for (size_t a = 0; a < n; a++) slices[gr.j[a]].push_back((int)a);
    for (auto& [deg, idx] : slices) {
        auto tgt = slices.find(deg - 1);
        std::vector<int> timg = tgt == slices.end() ? std::vector<int>{} : tgt->second;
        Mat m(timg.size(), idx.size());
        for (size_t col = 0; col < idx.size(); col++) {
            Vec w = g.bracket(f, g.unit(idx[col]));
            for (size_t row = 0; row < timg.size(); row++) m.at(row, col) = w[timg[row]];
            // sanity: nothing outside the target slice
            for (size_t q = 0; q < n; q++)
                if (!w[q].is_zero() && gr.j[q] != deg - 1)
                    fail(Errc::NotAdapted, "ad f not graded of degree -1");
        }
        for (auto& ker : nullspace(m)) {
            Vec v(n, Scalar(0));
            for (size_t col = 0; col < idx.size(); col++) v[idx[col]] = ker[col];
            if (deg > 0) fail(Errc::NotGood, "g^f has a component in degree " + rat_str(deg));
            gr.gf_basis.push_back(v);
            gr.gf_j.push_back(deg);
        }
    }
    return gr;
}

DualBases dual_bases(const LieAlgData& g, const GoodGrading& gr) {
    DualBases db;
    size_t n = g.dim();
    db.u.resize(n);
    db.udual.resize(n);
    std::map<Rat, std::vector<int>> slices;
    for (size_t a = 0; a < n; a++) {
        db.u[a] = g.unit(a);
        slices[gr.j[a]].push_back((int)a);
    }
    for (auto& [deg, idx] : slices) {
        auto dual = slices.find(-deg);
        if (dual == slices.end()) fail(Errc::DegenerateForm, "no dual slice for degree " + rat_str(deg));
        auto& didx = dual->second;
        if (didx.size() != idx.size()) fail(Errc::DegenerateForm, "slice dimension mismatch");
        Mat b(idx.size(), didx.size());
        for (size_t r = 0; r < idx.size(); r++)
            for (size_t cc = 0; cc < didx.size(); cc++)
                b.at(r, cc) = g.form.at(idx[r], didx[cc]);
        auto binv = inverse(b);
        if (!binv) fail(Errc::DegenerateForm, "form degenerate on degree " + rat_str(deg));
        // u^alpha = sum_gamma (B^{-1})_{gamma alpha} u_gamma  with (u_alpha|u^beta) = delta
        for (size_t a = 0; a < idx.size(); a++) {
            Vec ud(n, Scalar(0));
            for (size_t gI = 0; gI < didx.size(); gI++) ud[didx[gI]] = binv->at(gI, a);
            db.udual[idx[a]] = ud;
        }
    }
    db.half = gr.s_half();
    if (!db.half.empty()) {
        size_t hn = db.half.size();
        Mat ne(hn, hn);
        for (size_t a = 0; a < hn; a++)
            for (size_t b2 = 0; b2 < hn; b2++)
                ne.at(a, b2) = g.pair(gr.f, g.bracket(g.unit(db.half[a]), g.unit(db.half[b2])));
        auto inv = inverse(ne);
        if (!inv) fail(Errc::DegenerateForm, "neutral pairing degenerate on g_{1/2}");
        for (size_t b2 = 0; b2 < hn; b2++) {
            Vec v(n, Scalar(0));
            for (size_t gI = 0; gI < hn; gI++) v[db.half[gI]] = inv->at(gI, b2);
            db.vhalf.push_back(v);
        }
    }
    return db;
}

// ------------------------------------------------------------ built-ins

namespace {

/// build LieAlgData from explicit matrices with form (a|b) = tr(ab) * scale
LieAlgData from_matrices(const std::string& name, const std::vector<std::string>& ids,
                         const std::vector<std::vector<std::vector<Rat>>>& mats, const Rat& scale) {
    size_t n = ids.size(), d = mats[0].size();
    auto mul = [&](const std::vector<std::vector<Rat>>& A, const std::vector<std::vector<Rat>>& B) {
        std::vector<std::vector<Rat>> C(d, std::vector<Rat>(d, Rat(0)));
        for (size_t i = 0; i < d; i++)
            for (size_t k = 0; k < d; k++)
                for (size_t j = 0; j < d; j++) C[i][j] += A[i][k] * B[k][j];
        return C;
    };
    auto sub = [&](std::vector<std::vector<Rat>> A, const std::vector<std::vector<Rat>>& B) {
        for (size_t i = 0; i < d; i++)
            for (size_t j = 0; j < d; j++) A[i][j] -= B[i][j];
        return A;
    };
    auto tr = [&](const std::vector<std::vector<Rat>>& A) {
        Rat t = 0;
        for (size_t i = 0; i < d; i++) t += A[i][i];
        return t;
    };
    // expand a matrix in the basis: exact linear solve over the matrix entries
    Mat sys(d * d, n);
    for (size_t b = 0; b < n; b++)
        for (size_t i = 0; i < d; i++)
            for (size_t j = 0; j < d; j++) sys.at(i * d + j, b) = Scalar(mats[b][i][j]);
    auto expand = [&](const std::vector<std::vector<Rat>>& A) {
        std::vector<Scalar> rhs(d * d);
        for (size_t i = 0; i < d; i++)
            for (size_t j = 0; j < d; j++) rhs[i * d + j] = Scalar(A[i][j]);
        auto sol = solve(sys, rhs);
        if (!sol) fail(Errc::ValidationError, "matrix not in span of basis");
        return *sol;
    };
    LieAlgData g;
    g.name = name;
    g.basis = ids;
    g.parity.assign(n, Parity::Even);
    g.c.assign(n, std::vector<Vec>(n));
    g.form = Mat(n, n);
    for (size_t i = 0; i < n; i++)
        for (size_t j = 0; j < n; j++) {
            g.c[i][j] = expand(sub(mul(mats[i], mats[j]), mul(mats[j], mats[i])));
            g.form.at(i, j) = Scalar(tr(mul(mats[i], mats[j])) * scale);
        }
    return g;
}

std::vector<std::vector<Rat>> E(size_t d, size_t i, size_t j) {
    std::vector<std::vector<Rat>> m(d, std::vector<Rat>(d, Rat(0)));
    m[i][j] = 1;
    return m;
}

std::vector<std::vector<Rat>> diag3(const Rat& a, const Rat& b, const Rat& c) {
    std::vector<std::vector<Rat>> m(3, std::vector<Rat>(3, Rat(0)));
    m[0][0] = a;
    m[1][1] = b;
    m[2][2] = c;
    return m;
}

std::vector<std::vector<Rat>> diag2(const Rat& a, const Rat& b) {
    std::vector<std::vector<Rat>> m(2, std::vector<Rat>(2, Rat(0)));
    m[0][0] = a;
    m[1][1] = b;
    return m;
}

} // namespace

LieAlgData make_sl2() {
    // (e|f) = 1, (h|h) = 2: trace form of the fundamental representation
    return from_matrices("sl2", {"e", "h", "f"}, {E(2, 0, 1), diag2(1, -1), E(2, 1, 0)}, Rat(1));
}

LieAlgData make_sl3() {
    return from_matrices("sl3", {"e12", "e13", "e23", "h1", "h2", "f12", "f13", "f23"},
                         {E(3, 0, 1), E(3, 0, 2), E(3, 1, 2), diag3(1, -1, 0), diag3(0, 1, -1),
                          E(3, 1, 0), E(3, 2, 0), E(3, 2, 1)},
                         Rat(1));
}

LieAlgData make_abelian1() {
    LieAlgData g;
    g.name = "abelian1";
    g.basis = {"u"};
    g.parity = {Parity::Even};
    g.c.assign(1, std::vector<Vec>(1, Vec(1, Scalar(0))));
    g.form = Mat(1, 1);
    g.form.at(0, 0) = Scalar(1);
    return g;
}

std::pair<Vec, Vec> principal_pair(const LieAlgData& g) {
    if (g.name == "sl2") {
        Vec x(g.dim(), Scalar(0)), f(g.dim(), Scalar(0));
        x[g.index_of("h")] = Scalar(Rat(1, 2));
        f[g.index_of("f")] = Scalar(1);
        return {x, f};
    }
    if (g.name == "sl3") {
        Vec x(g.dim(), Scalar(0)), f(g.dim(), Scalar(0));
        // x = diag(1,0,-1) = h1 + h2
        x[g.index_of("h1")] = Scalar(1);
        x[g.index_of("h2")] = Scalar(1);
        f[g.index_of("f12")] = Scalar(1);
        f[g.index_of("f23")] = Scalar(1);
        return {x, f};
    }
    fail(Errc::BadArgument, "no principal pair for algebra '" + g.name + "'");
}

std::pair<Vec, Vec> minimal_pair_sl3(const LieAlgData& g) {
    Vec x(g.dim(), Scalar(0)), f(g.dim(), Scalar(0));
    // x = diag(1/2, 0, -1/2), f = E31
    x[g.index_of("h1")] = Scalar(Rat(1, 2));
    x[g.index_of("h2")] = Scalar(Rat(1, 2));
    f[g.index_of("f13")] = Scalar(1);
    return {x, f};
}

} // namespace lf
