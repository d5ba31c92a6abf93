#include "lambdaforge/session.hpp"

#include <sstream>

namespace lf {

void Session::load_path(const std::string& path) {
    SessionData d = parse_spec_file(path);
    for (auto& [k, v] : d.liealgs) data_.liealgs.insert_or_assign(k, v);
    for (auto& [k, v] : d.lcas) data_.lcas.insert_or_assign(k, v);
    for (auto& [k, v] : d.pvas) data_.pvas.insert_or_assign(k, v);
    for (auto& o : d.order) data_.order.push_back(o);
}

void Session::load_text(const std::string& text) {
    SessionData d = parse_spec_text(text);
    for (auto& [k, v] : d.liealgs) data_.liealgs.insert_or_assign(k, v);
    for (auto& [k, v] : d.lcas) data_.lcas.insert_or_assign(k, v);
    for (auto& [k, v] : d.pvas) data_.pvas.insert_or_assign(k, v);
    for (auto& o : d.order) data_.order.push_back(o);
}

void Session::load_builtin(const std::string& name) {
    if (data_.liealgs.count(name) || data_.lcas.count(name) || data_.pvas.count(name)) return;
    if (name == "sl2") {
        data_.liealgs.emplace("sl2", make_sl2());
    } else if (name == "sl3") {
        data_.liealgs.emplace("sl3", make_sl3());
    } else if (name == "abelian1") {
        data_.liealgs.emplace("abelian1", make_abelian1());
    } else if (name == "gfz") {
        data_.pvas.emplace("gfz", make_gfz());
    } else if (name == "virasoro") {
        std::vector<GeneratorDecl> gens;
        GeneratorDecl L;
        L.id = "L";
        L.delta = 2;
        L.zeta = 2;
        gens.push_back(L);
        Lambda1 l;
        l.add(0, Expr::single(Monomial{{Term{0, 1}}}));
        l.add(1, Expr::gen(0, Scalar(2)));
        l.add(3, Expr::vacuum(Scalar::param("c") * Scalar(Rat(1, 12))));
        std::map<std::pair<int, int>, Lambda1> table;
        table.emplace(std::make_pair(0, 0), l);
        data_.lcas.emplace("virasoro", LcaSpec(GenSet(gens), std::move(table), true, "virasoro"));
    } else if (name == "cur_sl2") {
        data_.lcas.emplace("cur_sl2", cur(make_sl2(), Scalar::param("k")));
    } else if (name == "cur_sl3") {
        data_.lcas.emplace("cur_sl3", cur(make_sl3(), Scalar::param("k")));
    } else if (name == "ff") {
        // one odd charged fermion pair
        data_.lcas.emplace("ff", fermion_charged({ChargedPair{"1", Parity::Odd, Rat(1, 2)}}));
    } else if (name == "nf") {
        // one odd neutral pair: <A|B> = 1 = <B|A> (symmetric on odd)
        Mat pair(2, 2);
        pair.at(0, 1) = Scalar(1);
        pair.at(1, 0) = Scalar(1);
        data_.lcas.emplace("nf", fermion_neutral({"A", "B"}, {Parity::Odd, Parity::Odd}, pair));
    } else {
        fail(Errc::BadArgument, "unknown builtin '" + name +
                                    "' (try sl2, sl3, abelian1, virasoro, cur_sl2, cur_sl3, ff, nf, gfz)");
    }
}

void Session::assign(const std::string& param, const std::string& value) {
    assign_[Params::intern(param)] = parse_scalar(value);
}

Engine& Session::engine_of(const std::string& spec) {
    auto it = engines_.find(spec);
    if (it != engines_.end()) return *it->second;
    auto sp = data_.lcas.find(spec);
    if (sp == data_.lcas.end()) fail(Errc::BadArgument, "no lca spec named '" + spec + "' loaded");
    auto eng = std::make_shared<Engine>(sp->second);
    engines_.emplace(spec, eng);
    return *eng;
}

const LcaSpec& Session::lca_of(const std::string& spec) {
    auto sp = data_.lcas.find(spec);
    if (sp == data_.lcas.end()) fail(Errc::BadArgument, "no lca spec named '" + spec + "' loaded");
    return sp->second;
}

const LieAlgData& Session::liealg_of(const std::string& name) {
    auto it = data_.liealgs.find(name);
    if (it == data_.liealgs.end()) fail(Errc::BadArgument, "no liealg named '" + name + "' loaded");
    return it->second;
}

PvaSpec& Session::pva_of(const std::string& name) {
    auto it = data_.pvas.find(name);
    if (it == data_.pvas.end()) fail(Errc::BadArgument, "no pva named '" + name + "' loaded");
    return it->second;
}

std::string Session::show(Engine& eng, const Expr& e) {
    Expr v = assign_.empty() ? e : e.substitute(assign_);
    return machine ? machine_expr(eng.gens(), v) : print_expr(eng.gens(), v);
}

std::string Session::show_lambda(Engine& eng, const Lambda1& l) {
    Lambda1 v = l;
    if (!assign_.empty())
        for (auto& c : v.c) c = c.substitute(assign_);
    v.trim();
    return machine ? machine_lambda1(eng.gens(), v) : print_lambda1(eng.gens(), v);
}

std::string Session::show_zhu(const GenSet& g, const ZhuExpr& z) {
    ZhuExpr v = assign_.empty() ? z : z.substitute(assign_);
    return machine ? machine_zhu(g, v) : print_zhu(g, v);
}

int Session::cmd_check(const std::string& spec, std::string& out) {
    std::ostringstream os;
    int code = 0;
    auto one_lca = [&](const std::string& name, const LcaSpec& s) {
        Engine eng(s);
        auto skew = eng.check_skewsymmetry();
        auto jac = eng.check_jacobi();
        os << "lca " << name << ": skewsymmetry " << (skew.pass ? "pass" : "FAIL") << " ("
           << skew.checked << " pairs), jacobi " << (jac.pass ? "pass" : "FAIL") << " ("
           << jac.checked << " triples)\n";
        for (auto& e : skew.entries) {
            os << "  skew (" << s.gens[e.gens[0]].id << "," << s.gens[e.gens[1]].id
               << "): " << e.residual << "\n";
        }
        for (auto& e : jac.entries) {
            os << "  jacobi (" << s.gens[e.gens[0]].id << "," << s.gens[e.gens[1]].id << ","
               << s.gens[e.gens[2]].id << "): " << e.residual << "\n";
        }
        if (!skew.pass || !jac.pass) code = 1;
    };
    auto one_lie = [&](const std::string& name, const LieAlgData& g) {
        auto bad = g.validate();
        os << "liealg " << name << ": " << (bad.empty() ? "pass" : "FAIL") << "\n";
        for (auto& b : bad) os << "  " << b << "\n";
        if (!bad.empty()) code = 1;
    };
    auto one_pva = [&](const std::string& name, PvaSpec& s) {
        PvaEngine pe(s);
        auto skew = pe.check_skewsymmetry();
        auto jac = pe.check_jacobi();
        os << "pva " << name << ": skewsymmetry " << (skew.pass ? "pass" : "FAIL") << ", jacobi "
           << (jac.pass ? "pass" : "FAIL") << "\n";
        if (!skew.pass || !jac.pass) code = 1;
    };
    if (spec.empty()) {
        for (auto& [k, v] : data_.liealgs) one_lie(k, v);
        for (auto& [k, v] : data_.lcas) one_lca(k, v);
        for (auto& [k, v] : data_.pvas) one_pva(k, v);
    } else if (data_.lcas.count(spec)) {
        one_lca(spec, data_.lcas.at(spec));
    } else if (data_.liealgs.count(spec)) {
        one_lie(spec, data_.liealgs.at(spec));
    } else if (data_.pvas.count(spec)) {
        one_pva(spec, pva_of(spec));
    } else {
        fail(Errc::BadArgument, "nothing named '" + spec + "' is loaded");
    }
    out = os.str();
    return code;
}

int Session::cmd_ope(const std::string& spec, const std::string& a, const std::string& b,
                     std::string& out) {
    Engine& eng = engine_of(spec);
    Expr ea = parse_expr(a, eng), eb = parse_expr(b, eng);
    out = show_lambda(eng, eng.bracket(ea, eb)) + "\n";
    return 0;
}

int Session::cmd_nf(const std::string& spec, const std::string& expr, std::string& out) {
    Engine& eng = engine_of(spec);
    out = show(eng, parse_expr(expr, eng)) + "\n";
    return 0;
}

int Session::cmd_zhu(const std::string& spec, const std::string& what, const std::string& a,
                     const std::string& b, long n, std::string& out) {
    Engine& eng = engine_of(spec);
    ZhuAlgebra zhu(eng);
    if (what == "product") {
        Expr ea = parse_expr(a, eng), eb = parse_expr(b, eng);
        out = show(eng, zhu.star_product(ea, n, eb)) + "\n";
        return 0;
    }
    if (what == "commutator") {
        Expr ea = parse_expr(a, eng), eb = parse_expr(b, eng);
        ZhuExpr z = zhu.commutator(zhu.pi_Z(ea), zhu.pi_Z(eb));
        out = show_zhu(eng.gens(), z) + "\n";
        return 0;
    }
    if (what == "pi") {
        Expr ea = parse_expr(a, eng);
        out = show_zhu(eng.gens(), zhu.pi_Z(ea)) + "\n";
        return 0;
    }
    fail(Errc::BadArgument, "zhu subcommand must be product, commutator or pi");
}

std::pair<Vec, Vec> Session::pair_for(const LieAlgData& g, const std::string& which) {
    if (which.empty() || which == "principal") return principal_pair(g);
    if (which == "minimal" && g.name == "sl3") return minimal_pair_sl3(g);
    fail(Errc::BadArgument, "unknown grading pair '" + which + "'");
}

int Session::cmd_walg(const std::string& algebra, const std::string& what,
                      const std::map<std::string, std::string>& opts, std::string& out) {
    load_builtin(algebra);
    const LieAlgData& g = liealg_of(algebra);
    auto opt = [&](const std::string& k, const std::string& dflt) {
        auto it = opts.find(k);
        return it == opts.end() ? dflt : it->second;
    };
    Scalar level = parse_scalar(opt("level", "k"));
    auto [x, f] = pair_for(g, opt("pair", "principal"));
    GoodGrading gr = grading_from_pair(g, x, f);
    std::ostringstream os;

    if (what == "whittaker") {
        Rat cutoff = rat_parse(opt("cutoff", "4"));
        auto rep = whittaker_invariants(g, gr, {}, cutoff);
        os << "whittaker graded dimensions up to Kazhdan degree " << rat_str(cutoff) << ":\n";
        for (size_t i = 0; i < rep.degrees.size(); i++)
            os << "  degree " << rat_str(rep.degrees[i]) << ": dim " << rep.dims[i]
               << "  (S(g^f): " << rep.slodowy_dims[i] << ")\n";
        os << "match with S(g^f): " << (rep.match ? "pass" : "FAIL") << "\n";
        out = os.str();
        return rep.match ? 0 : 1;
    }

    WComplex wc = build_complex(g, gr, level);
    if (what == "build") {
        os << "complex C_k(" << algebra << ", x): " << wc.spec.gens.size() << " generators\n";
        for (size_t i = 0; i < wc.spec.gens.size(); i++) {
            auto& d = wc.spec.gens[i];
            os << "  " << d.id << ": delta=" << rat_str(d.delta) << " charge=" << d.charge
               << (d.parity == Parity::Odd ? " odd" : "") << "\n";
        }
        os << "c_k = " << wc.ck.str() << "\n";
        Lambda1 dd = wc.eng->bracket(wc.d, wc.d);
        bool ddzero = dd.is_zero();
        os << "[d_lam d] = " << (ddzero ? "0 (pass)" : "NONZERO (FAIL)") << "\n";
        Lambda1 em = em_residual(*wc.eng, wc.L);
        os << "L Virasoro shape: " << (em.is_zero() ? "pass" : "FAIL") << "\n";
        out = os.str();
        return ddzero && em.is_zero() ? 0 : 1;
    }

    ReducedSpec rs = reduced_spec(wc);
    Rat maxd = rat_parse(opt("maxdelta", "3"));
    auto gens = solve_generators(rs, maxd);
    if (what == "generators") {
        int code = 0;
        os << gens.size() << " generator(s) up to weight " << rat_str(maxd) << "\n";
        for (auto& wg : gens) {
            Expr resid = rs.d_of(wg.E);
            os << "E (weight " << rat_str(wg.weight) << ") = " << show(*rs.eng, wg.E) << "\n";
            os << "  d(E) = " << (resid.is_zero() ? "0 (pass)" : show(*rs.eng, resid) + "  FAIL")
               << "\n";
            if (!resid.is_zero()) code = 1;
        }
        out = os.str();
        return code;
    }
    WAlgebraSpec ws = w_spec(rs, gens);
    if (what == "bracket") {
        for (auto& [key, l] : ws.spec.table) {
            os << "[" << ws.spec.gens[key.first].id << "_lam " << ws.spec.gens[key.second].id
               << "] = " << print_lambda1(ws.spec.gens, l) << "\n";
        }
        out = os.str();
        return 0;
    }
    if (what == "finite") {
        FiniteW fw = finite_w(rs, ws);
        for (size_t i = 0; i < fw.ebar.size(); i++)
            os << "Ebar" << (i + 1) << " = " << show_zhu(rs.spec.gens, fw.ebar[i]) << "\n";
        for (auto& [key, v] : fw.table_finite)
            os << "[Ebar" << (key.first + 1) << ", Ebar" << (key.second + 1)
               << "] = " << show_zhu(rs.spec.gens, v) << "\n";
        os << "Zhu(W) vs finite-complex tables: " << (fw.agree ? "agree (pass)" : "DISAGREE (FAIL)")
           << "\n";
        out = os.str();
        return fw.agree ? 0 : 1;
    }
    fail(Errc::BadArgument, "walg subcommand must be build, generators, bracket, finite or whittaker");
}

int Session::cmd_dirac(const std::string& algebra, std::string& out) {
    load_builtin(algebra);
    const LieAlgData& g = liealg_of(algebra);
    DiracData dd = dirac(g);
    std::ostringstream os;
    ZhuAlgebra& zhu = *dd.zhu;
    os << "D = " << show_zhu(dd.kt.spec.gens, dd.D) << "\n";
    os << "C = " << show_zhu(dd.kt.spec.gens, dd.C) << "\n";
    // D^2 = C + (h/24 - 1/16) dim g
    ZhuExpr d2 = zhu.mul(dd.D, dd.D);
    Scalar cst = (dd.hdual / Scalar(24) - Scalar(Rat(1, 16))) * Scalar((long)g.dim());
    ZhuExpr resid = d2 - dd.C - ZhuExpr::one(cst);
    bool ok = resid.is_zero();
    os << "D^2 - C = " << cst.str() << ": " << (ok ? "pass" : "FAIL") << "\n";
    bool okDa = true, okDbar = true, okC = true;
    for (size_t i = 0; i < g.dim(); i++) {
        ZhuExpr a = ZhuExpr::gen((int)i);
        ZhuExpr ab = ZhuExpr::gen((int)(g.dim() + i));
        if (!zhu.commutator(dd.D, a).is_zero()) okDa = false;
        if (zhu.commutator(dd.D, ab) != a) okDbar = false;
    }
    for (size_t i = 0; i < 2 * g.dim(); i++)
        if (!zhu.commutator(dd.C, ZhuExpr::gen((int)i)).is_zero()) okC = false;
    os << "[D,a] = 0: " << (okDa ? "pass" : "FAIL") << "\n";
    os << "[D,abar] = a: " << (okDbar ? "pass" : "FAIL") << "\n";
    os << "C central: " << (okC ? "pass" : "FAIL") << "\n";
    out = os.str();
    return ok && okDa && okDbar && okC ? 0 : 1;
}

int Session::cmd_pva(const std::string& spec, const std::string& what,
                     const std::map<std::string, std::string>& opts, std::string& out) {
    if (!spec.empty()) load_builtin(spec);
    PvaSpec& s = pva_of(spec.empty() ? "gfz" : spec);
    PvaEngine pe(s);
    auto functional = [&](const std::string& text) -> PvaExpr {
        if (s.name == "gfz" && (text == "h0" || text == "h1" || text == "h2"))
            return gfz_h(s, text[1] - '0');
        return parse_pva_expr(text, s);
    };
    std::ostringstream os;
    auto opt = [&](const std::string& k, const std::string& dflt) {
        auto it = opts.find(k);
        return it == opts.end() ? dflt : it->second;
    };
    if (what == "flow") {
        PvaExpr h = functional(opt("h", "h2"));
        std::string uname = opt("u", s.gens[0].id);
        PvaExpr flow = pe.hamiltonian_flow(h, PvaExpr::var(s.index_of(uname)));
        out = (machine ? machine_pva(s, flow) : print_pva(s, flow)) + "\n";
        return 0;
    }
    if (what == "involution") {
        PvaExpr h1 = functional(opt("h1", "h1")), h2 = functional(opt("h2", "h2"));
        PvaExpr br = pe.reduce_mod_T(pe.bracket(h1, h2).coeff(0));
        bool ok = br.is_zero();
        os << "{h1, h2} mod T = " << print_pva(s, br) << (ok ? "  (in involution)" : "") << "\n";
        out = os.str();
        return ok ? 0 : 1;
    }
    if (what == "zhu") {
        PoissonPresentation pres = pe.pva_zhu();
        const GenSet& zg = pe.zhu_gens();
        for (auto& [key, v] : pres.bracket_table)
            os << "{" << zg[key.first].id << ", " << zg[key.second].id
               << "} = " << print_zhu(zg, v) << "\n";
        if (pres.bracket_table.empty()) os << "all brackets vanish\n";
        out = os.str();
        return 0;
    }
    fail(Errc::BadArgument, "pva subcommand must be flow, involution or zhu");
}

} // namespace lf
