// lforge: command-line front end over the lambdaforge C API.
//
// Exit codes: 0 pass, 1 identity failure, 2 usage/parse errors.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

#include "lambdaforge.h"

namespace {

struct SessionHolder {
    lf_session* s = lf_session_new();
    ~SessionHolder() { lf_session_free(s); }
};

int finish(lf_session* s, lf_status st, char* out) {
    if (out) {
        std::fputs(out, stdout);
        lf_free_string(out);
    }
    switch (st) {
    case LF_OK: return 0;
    case LF_FAIL: return 1;
    default: std::fprintf(stderr, "error: %s\n", lf_last_error(s)); return 2;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lambda-bracket calculus on vertex algebras, Zhu algebras and W-algebras"};
    app.set_help_flag("--help", "print usage");
    app.require_subcommand(1);

    SessionHolder sh;
    std::vector<std::string> inputs;
    std::vector<std::string> builtins;
    std::vector<std::string> params;
    std::string output = "text";
    app.add_option("-i,--input", inputs, "definition file to load (repeatable)")->allow_extra_args(false);
    app.add_option("-b,--builtin", builtins, "built-in definitions to load (repeatable)")->allow_extra_args(false);
    app.add_option("-o,--output", output, "output mode: text or machine");
    app.add_option("-p,--param", params, "parameter assignment NAME=VALUE (repeatable)")->allow_extra_args(false);

    std::string spec, exprA, exprB, algebra = "sl2", what;
    long nprod = -1;
    std::string level = "k", pair = "principal", maxdelta = "3", cutoff = "4";
    std::string hOpt = "h2", h1Opt = "h1", h2Opt = "h2", uOpt;

    auto* cCheck = app.add_subcommand("check", "validate + skewsymmetry + Jacobi");
    cCheck->fallthrough();
    cCheck->add_option("spec", spec, "name of a loaded spec (default: all)");
    std::vector<std::string> checkFiles;
    cCheck->add_option("files", checkFiles, "definition files to check");

    auto* cOpe = app.add_subcommand("ope", "lambda bracket [A_lam B]");
    cOpe->fallthrough();
    cOpe->add_option("--spec", spec, "lca spec name")->required();
    cOpe->add_option("A", exprA)->required();
    cOpe->add_option("B", exprB)->required();

    auto* cNf = app.add_subcommand("nf", "normal form of an expression");
    cNf->fallthrough();
    cNf->add_option("--spec", spec, "lca spec name")->required();
    cNf->add_option("EXPR", exprA)->required();

    auto* cZhu = app.add_subcommand("zhu", "H-twisted Zhu algebra operations");
    cZhu->fallthrough();
    cZhu->add_option("what", what, "product | commutator | pi")->required();
    cZhu->add_option("--spec", spec, "lca spec name")->required();
    cZhu->add_option("-n", nprod, "product index n (zhu product)");
    cZhu->add_option("A", exprA)->required();
    cZhu->add_option("B", exprB);

    auto* cWalg = app.add_subcommand("walg", "quantum Hamiltonian reduction pipeline");
    cWalg->fallthrough();
    cWalg->add_option("what", what, "build | generators | bracket | finite | whittaker")
        ->required();
    cWalg->add_option("--algebra", algebra, "sl2 | sl3 | a loaded liealg");
    cWalg->add_option("--level", level, "level (scalar expression, default k)");
    cWalg->add_option("--pair", pair, "grading pair: principal | minimal");
    cWalg->add_option("--maxdelta", maxdelta, "solve generators up to this weight");
    cWalg->add_option("--cutoff", cutoff, "Kazhdan degree cutoff (whittaker)");

    auto* cDirac = app.add_subcommand("dirac", "cubic Dirac operator identities");
    cDirac->fallthrough();
    cDirac->add_option("--algebra", algebra, "sl2 | sl3 | a loaded liealg");

    auto* cPva = app.add_subcommand("pva", "Poisson vertex algebra operations");
    cPva->fallthrough();
    cPva->add_option("what", what, "flow | involution | zhu")->required();
    cPva->add_option("--spec", spec, "pva name (default gfz)");
    cPva->add_option("--builtin", spec, "alias of --spec for built-ins");
    cPva->add_option("--h", hOpt, "Hamiltonian functional (flow)");
    cPva->add_option("--h1", h1Opt, "first functional (involution)");
    cPva->add_option("--h2", h2Opt, "second functional (involution)");
    cPva->add_option("--u", uOpt, "flow variable (default: first generator)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    lf_session* s = sh.s;
    if (lf_set_output(s, output.c_str()) != LF_OK) return finish(s, LF_ERR_ARG, nullptr);
    for (auto& b : builtins)
        if (lf_load_builtin(s, b.c_str()) != LF_OK) return finish(s, LF_ERR_ARG, nullptr);
    for (auto& f : inputs)
        if (lf_load_path(s, f.c_str()) != LF_OK) return finish(s, LF_ERR_PARSE, nullptr);
    for (auto& p : params) {
        auto eq = p.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "error: --param needs NAME=VALUE\n");
            return 2;
        }
        if (lf_assign(s, p.substr(0, eq).c_str(), p.substr(eq + 1).c_str()) != LF_OK)
            return finish(s, LF_ERR_ARG, nullptr);
    }

    char* out = nullptr;
    if (cCheck->parsed()) {
        for (auto& f : checkFiles)
            if (lf_load_path(s, f.c_str()) != LF_OK) return finish(s, LF_ERR_PARSE, nullptr);
        // bare positional that names a file also works
        if (!spec.empty() && spec.find('.') != std::string::npos) {
            if (lf_load_path(s, spec.c_str()) != LF_OK) return finish(s, LF_ERR_PARSE, nullptr);
            spec.clear();
        }
        lf_status st = lf_check(s, spec.empty() ? nullptr : spec.c_str(), &out);
        return finish(s, st, out);
    }
    if (cOpe->parsed()) {
        lf_status st = lf_ope(s, spec.c_str(), exprA.c_str(), exprB.c_str(), &out);
        return finish(s, st, out);
    }
    if (cNf->parsed()) {
        lf_status st = lf_normal_form(s, spec.c_str(), exprA.c_str(), &out);
        return finish(s, st, out);
    }
    if (cZhu->parsed()) {
        lf_status st = lf_zhu(s, spec.c_str(), what.c_str(), exprA.c_str(), exprB.c_str(), nprod, &out);
        return finish(s, st, out);
    }
    if (cWalg->parsed()) {
        std::string opts = "level=" + level + ",pair=" + pair + ",maxdelta=" + maxdelta +
                           ",cutoff=" + cutoff;
        lf_status st = lf_walg(s, algebra.c_str(), what.c_str(), opts.c_str(), &out);
        return finish(s, st, out);
    }
    if (cDirac->parsed()) {
        lf_status st = lf_dirac(s, algebra.c_str(), &out);
        return finish(s, st, out);
    }
    if (cPva->parsed()) {
        std::string opts = "h=" + hOpt + ",h1=" + h1Opt + ",h2=" + h2Opt;
        if (!uOpt.empty()) opts += ",u=" + uOpt;
        lf_status st = lf_pva(s, spec.empty() ? nullptr : spec.c_str(), what.c_str(), opts.c_str(), &out);
        return finish(s, st, out);
    }
    return 2;
}
