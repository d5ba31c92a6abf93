#pragma once

#include <memory>

#include "lambdaforge/io.hpp"
#include "lambdaforge/walgebra.hpp"

namespace lf {

/// Dispatch layer shared by the C API and the CLI: loaded specs, engines,
/// parameter assignments and the command implementations. Every command
/// returns a pass/fail exit code (0 pass, 1 identity-fail) and deterministic
/// report text; usage problems throw Error (mapped to exit 2 upstream).
class Session {
  public:
    bool machine = false;

    void load_path(const std::string& path);
    void load_text(const std::string& text);
    void load_builtin(const std::string& name);
    void assign(const std::string& param, const std::string& value);

    int cmd_check(const std::string& spec, std::string& out);
    int cmd_ope(const std::string& spec, const std::string& a, const std::string& b,
                std::string& out);
    int cmd_nf(const std::string& spec, const std::string& expr, std::string& out);
    int cmd_zhu(const std::string& spec, const std::string& what, const std::string& a,
                const std::string& b, long n, std::string& out);
    int cmd_walg(const std::string& algebra, const std::string& what,
                 const std::map<std::string, std::string>& opts, std::string& out);
    int cmd_dirac(const std::string& algebra, std::string& out);
    int cmd_pva(const std::string& spec, const std::string& what,
                const std::map<std::string, std::string>& opts, std::string& out);

    // shared state accessors (used by tests)
    Engine& engine_of(const std::string& spec);
    const LcaSpec& lca_of(const std::string& spec);
    const LieAlgData& liealg_of(const std::string& name);
    PvaSpec& pva_of(const std::string& name);

  private:
    SessionData data_;
    std::map<std::string, std::shared_ptr<Engine>> engines_;
    std::map<int, Scalar> assign_;

    std::string show(Engine& eng, const Expr& e);
    std::string show_lambda(Engine& eng, const Lambda1& l);
    std::string show_zhu(const GenSet& g, const ZhuExpr& z);
    std::pair<Vec, Vec> pair_for(const LieAlgData& g, const std::string& which);
};

} // namespace lf
