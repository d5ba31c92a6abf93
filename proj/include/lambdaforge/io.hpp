#pragma once

#include <string>

#include "lambdaforge/liealg.hpp"
#include "lambdaforge/pva.hpp"
#include "lambdaforge/wick.hpp"
#include "lambdaforge/zhu.hpp"

namespace lf {

// ------------------------------------------------------------ printing

std::string print_expr(const GenSet& g, const Expr& e);
std::string print_lambda1(const GenSet& g, const Lambda1& l, const std::string& var = "lam");
std::string print_lambda2(const GenSet& g, const Lambda2& l);
std::string print_zhu(const GenSet& g, const ZhuExpr& z);
std::string print_pva(const PvaSpec& s, const PvaExpr& e);
std::string print_pva_lambda(const PvaSpec& s, const PvaLambda& l, const std::string& var = "lam");

/// machine mode: versioned JSON trees
std::string machine_expr(const GenSet& g, const Expr& e);
std::string machine_lambda1(const GenSet& g, const Lambda1& l);
std::string machine_zhu(const GenSet& g, const ZhuExpr& z);
std::string machine_pva(const PvaSpec& s, const PvaExpr& e);
std::string machine_report(const CheckReport& rep, const GenSet& g);

// ------------------------------------------------------------ parsing

Scalar parse_scalar(const std::string& text);

/// expression over a generator set; nested :...: groups are multiplied via the
/// engine (right-nested chains need no rewriting)
Expr parse_expr(const std::string& text, Engine& eng);
/// structural variant for table entries: plain right-nested words only
Expr parse_expr_structural(const std::string& text, const GenSet& g);
Lambda1 parse_lambda(const std::string& text, const GenSet& g);

PvaExpr parse_pva_expr(const std::string& text, const PvaSpec& s);

/// Parsed content of a declarative spec file (sections [params], [liealg N],
/// [lca N], [pva N]).
struct SessionData {
    std::map<std::string, LieAlgData> liealgs;
    std::map<std::string, LcaSpec> lcas;
    std::map<std::string, PvaSpec> pvas;
    std::vector<std::string> order; // "kind name" in file order
};

SessionData parse_spec_text(const std::string& text, const std::string& filename = "<input>");
SessionData parse_spec_file(const std::string& path);

std::string print_liealg(const LieAlgData& g);
std::string print_lca(const LcaSpec& s);
std::string print_pva_spec(const PvaSpec& s);

} // namespace lf
