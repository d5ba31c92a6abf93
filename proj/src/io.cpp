#include "lambdaforge/io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace lf {

// ------------------------------------------------------------ printers

namespace {

std::string factor_str(const GenSet& g, const Term& t) {
    if (t.tpow == 0) return g[t.gen].id;
    if (t.tpow == 1) return "T(" + g[t.gen].id + ")";
    return "T^" + std::to_string(t.tpow) + "(" + g[t.gen].id + ")";
}

std::string word_str(const GenSet& g, const Monomial& m) {
    if (m.is_vacuum()) return "|0>";
    if (m.w.size() == 1) return factor_str(g, m.w[0]);
    std::string s = ":";
    for (size_t i = 0; i < m.w.size(); i++) {
        if (i) s += " ";
        s += factor_str(g, m.w[i]);
    }
    return s + ":";
}

bool scalar_atomic(const Scalar& s) {
    if (!s.den.is_constant()) return false;
    if (s.num.t.size() != 1) return s.num.is_zero();
    auto& [m, c] = *s.num.t.begin();
    if (m.pe.empty()) return c > 0;                    // positive rational
    return c == 1 && m.pe.size() == 1 && m.pe[0].second == 1; // single parameter
}

// already fully wrapped in one pair of parentheses?
bool self_wrapped(const std::string& s) {
    if (s.size() < 2 || s.front() != '(' || s.back() != ')') return false;
    int depth = 0;
    for (size_t i = 0; i + 1 < s.size(); i++) {
        if (s[i] == '(') depth++;
        if (s[i] == ')') depth--;
        if (depth == 0) return false;
    }
    return true;
}

std::string wrap_scalar(const Scalar& s) {
    if (scalar_atomic(s)) return s.str();
    std::string str = s.str();
    return self_wrapped(str) ? str : "(" + str + ")";
}

// appends ". c word" handling signs; pre = extra textual factors (lam powers)
void append_term(std::string& out, const Scalar& c, const std::string& pre,
                 const std::string& word) {
    bool neg = false;
    Scalar cc = c;
    if (scalar_atomic(c.neg())) {
        neg = true;
        cc = c.neg();
    }
    if (out.empty())
        out += neg ? "- " : "";
    else
        out += neg ? " - " : " + ";
    std::string cs;
    if (!cc.is_one()) cs = wrap_scalar(cc);
    std::string body;
    for (auto& p : {cs, pre, word}) {
        if (p.empty()) continue;
        if (!body.empty()) body += " ";
        body += p;
    }
    // a bare coefficient with no word happens only for the vacuum
    out += body.empty() ? "|0>" : body;
}

} // namespace

std::string print_expr(const GenSet& g, const Expr& e) {
    if (e.is_zero()) return "0";
    std::string out;
    for (auto& [m, c] : e.t) append_term(out, c, "", m.is_vacuum() ? "|0>" : word_str(g, m));
    return out;
}

std::string print_lambda1(const GenSet& g, const Lambda1& l, const std::string& var) {
    std::string out;
    for (size_t n = 0; n < l.c.size(); n++) {
        if (l.c[n].is_zero()) continue;
        std::string pre = n == 0 ? "" : (n == 1 ? var : var + "^" + std::to_string(n));
        for (auto& [m, c] : l.c[n].t)
            append_term(out, c, pre, m.is_vacuum() ? "|0>" : word_str(g, m));
    }
    return out.empty() ? "0" : out;
}

std::string print_lambda2(const GenSet& g, const Lambda2& l) {
    std::string out;
    for (auto& [k, e] : l.t) {
        std::string pre;
        if (k.first == 1)
            pre = "lam";
        else if (k.first > 1)
            pre = "lam^" + std::to_string(k.first);
        if (k.second >= 1) {
            if (!pre.empty()) pre += " ";
            pre += k.second == 1 ? "mu" : "mu^" + std::to_string(k.second);
        }
        for (auto& [m, c] : e.t) append_term(out, c, pre, m.is_vacuum() ? "|0>" : word_str(g, m));
    }
    return out.empty() ? "0" : out;
}

std::string print_zhu(const GenSet& g, const ZhuExpr& z) {
    if (z.is_zero()) return "0";
    std::string out;
    for (auto& [w, c] : z.t) {
        std::string word;
        for (size_t i = 0; i < w.g.size(); i++) {
            if (i) word += " ";
            word += g[w.g[i]].id;
        }
        append_term(out, c, "", word.empty() ? "1" : word);
    }
    return out;
}

namespace {
std::string pva_factor(const PvaSpec& s, int gen, int order, int pow) {
    std::string f = s.gens[gen].id;
    if (order > 0 && order <= 3)
        f += std::string(order, '\'');
    else if (order > 3)
        f += "^(" + std::to_string(order) + ")";
    if (pow > 1) f += "^" + std::to_string(pow);
    return f;
}
} // namespace

std::string print_pva(const PvaSpec& s, const PvaExpr& e) {
    if (e.is_zero()) return "0";
    std::string out;
    for (auto& [m, c] : e.t) {
        std::string word;
        size_t i = 0;
        while (i < m.f.size()) {
            size_t j = i;
            while (j < m.f.size() && m.f[j] == m.f[i]) j++;
            if (!word.empty()) word += "*";
            word += pva_factor(s, m.f[i].first, m.f[i].second, (int)(j - i));
            i = j;
        }
        // coefficient joined with '*'
        bool neg = false;
        Scalar cc = c;
        if (scalar_atomic(c.neg())) {
            neg = true;
            cc = c.neg();
        }
        if (out.empty())
            out += neg ? "-" : "";
        else
            out += neg ? " - " : " + ";
        std::string cs;
        if (!cc.is_one() || word.empty()) cs = wrap_scalar(cc);
        if (cs.empty())
            out += word;
        else if (word.empty())
            out += cs;
        else
            out += cs + "*" + word;
    }
    return out;
}

std::string print_pva_lambda(const PvaSpec& s, const PvaLambda& l, const std::string& var) {
    std::string out;
    for (size_t n = 0; n < l.c.size(); n++) {
        if (l.c[n].is_zero()) continue;
        std::string pre = n == 0 ? "" : (n == 1 ? var : var + "^" + std::to_string(n));
        for (auto& [m, c] : l.c[n].t) {
            PvaExpr one;
            one.add_raw(m, Scalar(1));
            std::string w = print_pva(s, one);
            append_term(out, c, pre, w == "1" && !pre.empty() ? "" : w);
        }
    }
    return out.empty() ? "0" : out;
}

// ------------------------------------------------------------ machine output

namespace {
using nlohmann::json;

json jword(const GenSet& g, const Monomial& m) {
    json a = json::array();
    for (auto& t : m.w) {
        if (t.tpow == 0)
            a.push_back(g[t.gen].id);
        else
            a.push_back(json::array({"T", t.tpow, g[t.gen].id}));
    }
    return a;
}

json jexpr(const GenSet& g, const Expr& e) {
    json a = json::array();
    for (auto& [m, c] : e.t) a.push_back(json::array({c.str(), jword(g, m)}));
    return a;
}
} // namespace

std::string machine_expr(const GenSet& g, const Expr& e) {
    json j{{"lambdaforge", 1}, {"type", "expr"}, {"terms", jexpr(g, e)}};
    return j.dump();
}

std::string machine_lambda1(const GenSet& g, const Lambda1& l) {
    json terms = json::array();
    for (size_t n = 0; n < l.c.size(); n++)
        if (!l.c[n].is_zero()) terms.push_back(json::array({n, jexpr(g, l.c[n])}));
    json j{{"lambdaforge", 1}, {"type", "lambda"}, {"terms", terms}};
    return j.dump();
}

std::string machine_zhu(const GenSet& g, const ZhuExpr& z) {
    json terms = json::array();
    for (auto& [w, c] : z.t) {
        json word = json::array();
        for (int gi : w.g) word.push_back(g[gi].id);
        terms.push_back(json::array({c.str(), word}));
    }
    json j{{"lambdaforge", 1}, {"type", "zhu"}, {"terms", terms}};
    return j.dump();
}

std::string machine_pva(const PvaSpec& s, const PvaExpr& e) {
    json terms = json::array();
    for (auto& [m, c] : e.t) {
        json word = json::array();
        for (auto& [g, n] : m.f) word.push_back(json::array({s.gens[g].id, n}));
        terms.push_back(json::array({c.str(), word}));
    }
    json j{{"lambdaforge", 1}, {"type", "pva"}, {"terms", terms}};
    return j.dump();
}

std::string machine_report(const CheckReport& rep, const GenSet& g) {
    json fails = json::array();
    for (auto& e : rep.entries) {
        json names = json::array();
        for (int gi : e.gens) names.push_back(g[gi].id);
        fails.push_back(json{{"gens", names}, {"residual", e.residual}});
    }
    json j{{"lambdaforge", 1},
           {"type", "report"},
           {"pass", rep.pass},
           {"checked", rep.checked},
           {"failures", fails}};
    return j.dump();
}

// ------------------------------------------------------------ lexer

namespace {

struct Tok {
    enum Kind { Id, Int, Colon, LPar, RPar, Plus, Minus, Star, Slash, Caret, Vac, Prime, Eq,
                Comma, End } kind;
    std::string text;
    long num = 0;
    size_t pos = 0;
};

struct Lexer {
    std::string s;
    size_t i = 0;
    std::vector<Tok> toks;

    explicit Lexer(std::string text) : s(std::move(text)) { run(); }

    [[noreturn]] void err(const std::string& msg, size_t at) {
        fail(Errc::ParseError, msg + " at column " + std::to_string(at + 1) + " in '" + s + "'");
    }

    void run() {
        while (i < s.size()) {
            char c = s[i];
            if (isspace((unsigned char)c)) {
                i++;
                continue;
            }
            if (c == '#') break;
            size_t at = i;
            if (s.compare(i, 3, "|0>") == 0) {
                toks.push_back({Tok::Vac, "|0>", 0, at});
                i += 3;
                continue;
            }
            if (isalpha((unsigned char)c) || c == '_') {
                size_t j = i;
                while (j < s.size() && (isalnum((unsigned char)s[j]) || s[j] == '_')) j++;
                toks.push_back({Tok::Id, s.substr(i, j - i), 0, at});
                i = j;
                continue;
            }
            if (isdigit((unsigned char)c)) {
                size_t j = i;
                while (j < s.size() && isdigit((unsigned char)s[j])) j++;
                Tok t{Tok::Int, s.substr(i, j - i), 0, at};
                t.num = std::stol(t.text);
                toks.push_back(t);
                i = j;
                continue;
            }
            switch (c) {
            case ':': toks.push_back({Tok::Colon, ":", 0, at}); break;
            case '(': toks.push_back({Tok::LPar, "(", 0, at}); break;
            case ')': toks.push_back({Tok::RPar, ")", 0, at}); break;
            case '+': toks.push_back({Tok::Plus, "+", 0, at}); break;
            case '-': toks.push_back({Tok::Minus, "-", 0, at}); break;
            case '*': toks.push_back({Tok::Star, "*", 0, at}); break;
            case '/': toks.push_back({Tok::Slash, "/", 0, at}); break;
            case '^': toks.push_back({Tok::Caret, "^", 0, at}); break;
            case '\'': toks.push_back({Tok::Prime, "'", 0, at}); break;
            case '=': toks.push_back({Tok::Eq, "=", 0, at}); break;
            case ',': toks.push_back({Tok::Comma, ",", 0, at}); break;
            default: err(std::string("unexpected character '") + c + "'", at);
            }
            i++;
        }
        toks.push_back({Tok::End, "", 0, s.size()});
    }
};

// scalar expression parser (+ - * / ^ over rationals and parameters)
struct ScalarParser {
    Lexer& lx;
    size_t p = 0;
    // identifiers that are NOT parameters (generators, lam, mu) stop the scalar
    const std::vector<std::string>* stopIds;

    Tok& cur() { return lx.toks[p]; }
    bool is_stop(const std::string& id) const {
        if (!stopIds) return false;
        for (auto& s : *stopIds)
            if (s == id) return true;
        return false;
    }

    Scalar parse() {
        Scalar v = sum();
        return v;
    }

    Scalar sum() {
        Scalar v = product();
        while (cur().kind == Tok::Plus || cur().kind == Tok::Minus) {
            bool neg = cur().kind == Tok::Minus;
            p++;
            Scalar w = product();
            v = neg ? v - w : v + w;
        }
        return v;
    }

    Scalar product() {
        Scalar v = power();
        for (;;) {
            if (cur().kind == Tok::Star) {
                p++;
                v = v * power();
            } else if (cur().kind == Tok::Slash) {
                p++;
                v = v / power();
            } else {
                return v;
            }
        }
    }

    Scalar power() {
        Scalar v = atom();
        if (cur().kind == Tok::Caret) {
            p++;
            bool neg = false;
            if (cur().kind == Tok::Minus) {
                neg = true;
                p++;
            }
            if (cur().kind != Tok::Int) lx.err("expected integer exponent", cur().pos);
            long e = cur().num;
            p++;
            v = v.pow(neg ? -e : e);
        }
        return v;
    }

    Scalar atom() {
        if (cur().kind == Tok::Minus) {
            p++;
            return atom().neg();
        }
        if (cur().kind == Tok::Int) {
            long n = cur().num;
            p++;
            return Scalar(n);
        }
        if (cur().kind == Tok::Id) {
            if (is_stop(cur().text)) lx.err("'" + cur().text + "' is not a parameter", cur().pos);
            Scalar v = Scalar::param(cur().text);
            p++;
            return v;
        }
        if (cur().kind == Tok::LPar) {
            p++;
            Scalar v = sum();
            if (cur().kind != Tok::RPar) lx.err("expected ')'", cur().pos);
            p++;
            return v;
        }
        lx.err("expected scalar", cur().pos);
    }
};

} // namespace

Scalar parse_scalar(const std::string& text) {
    Lexer lx(text);
    ScalarParser sp{lx, 0, nullptr};
    Scalar v = sp.parse();
    if (lx.toks[sp.p].kind != Tok::End) lx.err("trailing input", lx.toks[sp.p].pos);
    return v;
}

// ------------------------------------------------------------ expression parser

namespace {

// expression term: coefficient * lam^i mu^j * (product tree of words)
struct ENode {
    // leaf: generator term; group: product of children (right-nested)
    bool leaf = true;
    Term t;
    bool vac = false;
    std::vector<ENode> kids;
};

struct ETerm {
    Scalar coef = Scalar(1);
    int lpow = 0, mpow = 0;
    std::optional<ENode> node;
};

struct ExprParser {
    Lexer& lx;
    const GenSet& g;
    size_t p = 0;

    Tok& cur() { return lx.toks[p]; }

    std::vector<ETerm> parse() {
        std::vector<ETerm> terms;
        bool neg = false;
        if (cur().kind == Tok::Minus) {
            neg = true;
            p++;
        } else if (cur().kind == Tok::Plus) {
            p++;
        }
        for (;;) {
            ETerm t = term();
            if (neg) t.coef = t.coef.neg();
            terms.push_back(std::move(t));
            if (cur().kind == Tok::Plus) {
                neg = false;
                p++;
            } else if (cur().kind == Tok::Minus) {
                neg = true;
                p++;
            } else {
                break;
            }
        }
        if (cur().kind != Tok::End) lx.err("trailing input", cur().pos);
        return terms;
    }

    bool starts_scalar_atom() {
        if (cur().kind == Tok::Int) return true;
        if (cur().kind == Tok::LPar)
            return lx.toks[p + 1].kind != Tok::Colon; // '(:' opens a nested word
        if (cur().kind == Tok::Id)
            return cur().text != "lam" && cur().text != "mu" && cur().text != "T" &&
                   !g.find(cur().text);
        return false;
    }

    ETerm term() {
        ETerm t;
        for (;;) {
            if (cur().kind == Tok::Id && (cur().text == "lam" || cur().text == "mu")) {
                bool mu = cur().text == "mu";
                p++;
                long e = 1;
                if (cur().kind == Tok::Caret) {
                    p++;
                    if (cur().kind != Tok::Int) lx.err("expected integer power", cur().pos);
                    e = cur().num;
                    p++;
                }
                (mu ? t.mpow : t.lpow) += (int)e;
                continue;
            }
            if (starts_scalar_atom()) {
                // a parenthesized or atomic scalar factor; may use * / ^ inside parens
                if (cur().kind == Tok::LPar) {
                    p++;
                    ScalarParser sp{lx, p, nullptr};
                    Scalar v = sp.sum();
                    p = sp.p;
                    if (cur().kind != Tok::RPar) lx.err("expected ')'", cur().pos);
                    p++;
                    t.coef = t.coef * v;
                } else if (cur().kind == Tok::Int) {
                    Rat num(cur().num);
                    p++;
                    if (cur().kind == Tok::Slash) {
                        p++;
                        if (cur().kind != Tok::Int) lx.err("expected denominator", cur().pos);
                        num /= Rat(cur().num);
                        num.canonicalize();
                        p++;
                    }
                    t.coef = t.coef * Scalar(num);
                } else {
                    t.coef = t.coef * Scalar::param(cur().text);
                    p++;
                    if (cur().kind == Tok::Caret) {
                        lx.err("parenthesize powered scalar factors", cur().pos);
                    }
                }
                continue;
            }
            if (cur().kind == Tok::Id || cur().kind == Tok::Colon || cur().kind == Tok::Vac) {
                if (t.node) lx.err("one word per term", cur().pos);
                t.node = node();
                continue;
            }
            break;
        }
        if (!t.node && t.coef.is_one() && t.lpow == 0 && t.mpow == 0)
            lx.err("empty term", cur().pos);
        return t;
    }

    ENode node() {
        if (cur().kind == Tok::Vac) {
            p++;
            ENode n;
            n.leaf = true;
            n.vac = true;
            return n;
        }
        if (cur().kind == Tok::LPar) {
            // parenthesized sub-product inside a word: (:x y:)
            p++;
            ENode n = node();
            if (cur().kind != Tok::RPar) lx.err("expected ')'", cur().pos);
            p++;
            return n;
        }
        if (cur().kind == Tok::Colon) {
            p++;
            ENode n;
            n.leaf = false;
            while (cur().kind != Tok::Colon) {
                if (cur().kind == Tok::End) lx.err("unterminated ':'", cur().pos);
                n.kids.push_back(node());
            }
            p++;
            if (n.kids.empty()) lx.err("empty normally ordered product", cur().pos);
            return n;
        }
        if (cur().kind == Tok::Id && cur().text == "T") {
            p++;
            long e = 1;
            if (cur().kind == Tok::Caret) {
                p++;
                if (cur().kind != Tok::Int) lx.err("expected T power", cur().pos);
                e = cur().num;
                p++;
            }
            if (cur().kind != Tok::LPar) lx.err("expected '(' after T", cur().pos);
            p++;
            if (cur().kind != Tok::Id || !g.find(cur().text))
                lx.err("T applies to a generator", cur().pos);
            ENode n;
            n.leaf = true;
            n.t = Term{g.index_of(cur().text), (int)e};
            p++;
            if (cur().kind != Tok::RPar) lx.err("expected ')'", cur().pos);
            p++;
            return n;
        }
        if (cur().kind == Tok::Id) {
            auto gi = g.find(cur().text);
            if (!gi) lx.err("unknown generator '" + cur().text + "'", cur().pos);
            ENode n;
            n.leaf = true;
            n.t = Term{*gi, 0};
            p++;
            return n;
        }
        lx.err("expected word", cur().pos);
    }
};

// structural evaluation: only right-nested chains allowed
void flatten_structural(const ENode& n, std::vector<Term>& out, Lexer& lx) {
    if (n.leaf) {
        if (!n.vac) out.push_back(n.t);
        return;
    }
    for (size_t i = 0; i < n.kids.size(); i++) {
        const ENode& k = n.kids[i];
        if (k.leaf) {
            if (!k.vac) out.push_back(k.t);
        } else {
            if (i + 1 != n.kids.size())
                lx.err("nested products must be right-nested in table entries", 0);
            flatten_structural(k, out, lx);
        }
    }
}

Expr eval_with_engine(const ENode& n, Engine& eng) {
    if (n.leaf) return n.vac ? Expr::vacuum() : Expr::single(Monomial{{n.t}});
    Expr acc = Expr::vacuum();
    for (auto it = n.kids.rbegin(); it != n.kids.rend(); ++it)
        acc = eng.product(eval_with_engine(*it, eng), acc);
    return acc;
}

} // namespace

Expr parse_expr(const std::string& text, Engine& eng) {
    Lexer lx(text);
    ExprParser ep{lx, eng.gens(), 0};
    auto terms = ep.parse();
    Expr r;
    for (auto& t : terms) {
        if (t.lpow || t.mpow) fail(Errc::ParseError, "lambda powers are not allowed here");
        Expr e = t.node ? eval_with_engine(*t.node, eng) : Expr::vacuum();
        r += e.scaled(t.coef);
    }
    return eng.normal_form(r);
}

Expr parse_expr_structural(const std::string& text, const GenSet& g) {
    Lexer lx(text);
    ExprParser ep{lx, g, 0};
    auto terms = ep.parse();
    Expr r;
    for (auto& t : terms) {
        if (t.lpow || t.mpow) fail(Errc::ParseError, "lambda powers are not allowed here");
        std::vector<Term> w;
        if (t.node) flatten_structural(*t.node, w, lx);
        r.add(Monomial{w}, t.coef);
    }
    return r;
}

Lambda1 parse_lambda(const std::string& text, const GenSet& g) {
    Lexer lx(text);
    ExprParser ep{lx, g, 0};
    auto terms = ep.parse();
    Lambda1 r;
    for (auto& t : terms) {
        if (t.mpow) fail(Errc::ParseError, "mu is not allowed in a table entry");
        std::vector<Term> w;
        if (t.node) flatten_structural(*t.node, w, lx);
        Expr e;
        e.add(Monomial{w}, t.coef);
        r.add((size_t)t.lpow, e);
    }
    r.trim();
    return r;
}

// ------------------------------------------------------------ pva expressions

PvaExpr parse_pva_expr(const std::string& text, const PvaSpec& s) {
    Lexer lx(text);
    size_t p = 0;
    auto& toks = lx.toks;
    PvaExpr out;
    bool neg = false;
    if (toks[p].kind == Tok::Minus) {
        neg = true;
        p++;
    }
    for (;;) {
        // term: factors joined by '*' or juxtaposition
        Scalar coef = neg ? Scalar(-1) : Scalar(1);
        PvaMono mono;
        bool any = false;
        for (;;) {
            if (toks[p].kind == Tok::Star) {
                p++;
                continue;
            }
            if (toks[p].kind == Tok::Int) {
                Rat num(toks[p].num);
                p++;
                if (toks[p].kind == Tok::Slash) {
                    p++;
                    if (toks[p].kind != Tok::Int) lx.err("expected denominator", toks[p].pos);
                    num /= Rat(toks[p].num);
                    num.canonicalize();
                    p++;
                }
                coef = coef * Scalar(num);
                any = true;
                continue;
            }
            if (toks[p].kind == Tok::LPar) {
                p++;
                ScalarParser sp{lx, p, nullptr};
                Scalar v = sp.sum();
                p = sp.p;
                if (toks[p].kind != Tok::RPar) lx.err("expected ')'", toks[p].pos);
                p++;
                coef = coef * v;
                any = true;
                continue;
            }
            if (toks[p].kind == Tok::Id && toks[p].text == "lam")
                fail(Errc::ParseError, "lam not allowed in a pva polynomial");
            if (toks[p].kind == Tok::Id) {
                auto gi = s.find(toks[p].text);
                if (!gi) {
                    // parameter factor
                    coef = coef * Scalar::param(toks[p].text);
                    p++;
                    any = true;
                    continue;
                }
                p++;
                int order = 0;
                while (toks[p].kind == Tok::Prime) {
                    order++;
                    p++;
                }
                long pw = 1;
                if (toks[p].kind == Tok::Caret) {
                    p++;
                    if (toks[p].kind == Tok::LPar) {
                        p++;
                        if (toks[p].kind != Tok::Int) lx.err("expected derivative order", toks[p].pos);
                        order += (int)toks[p].num;
                        p++;
                        if (toks[p].kind != Tok::RPar) lx.err("expected ')'", toks[p].pos);
                        p++;
                        if (toks[p].kind == Tok::Caret) { // power after derivative
                            p++;
                            if (toks[p].kind != Tok::Int) lx.err("expected power", toks[p].pos);
                            pw = toks[p].num;
                            p++;
                        }
                    } else {
                        if (toks[p].kind != Tok::Int) lx.err("expected power", toks[p].pos);
                        pw = toks[p].num;
                        p++;
                    }
                }
                for (long q = 0; q < pw; q++) mono.f.push_back({*gi, order});
                any = true;
                continue;
            }
            break;
        }
        if (!any) lx.err("empty term", toks[p].pos);
        std::sort(mono.f.begin(), mono.f.end());
        out.add_raw(mono, coef);
        if (toks[p].kind == Tok::Plus) {
            neg = false;
            p++;
        } else if (toks[p].kind == Tok::Minus) {
            neg = true;
            p++;
        } else {
            break;
        }
    }
    if (toks[p].kind != Tok::End) lx.err("trailing input", toks[p].pos);
    return out;
}

// ------------------------------------------------------------ spec files

namespace {

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string w;
    while (is >> w) out.push_back(w);
    return out;
}

std::string strip(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

struct LcaDraft {
    std::string name;
    std::vector<GeneratorDecl> gens;
    std::vector<std::tuple<std::string, std::string, std::string>> brackets;
    bool hamiltonian = true;
};

struct PvaDraft {
    std::string name;
    PvaSpec s;
    std::vector<std::tuple<std::string, std::string, std::string>> brackets;
};

struct LieDraft {
    std::string name;
    LieAlgData g;
    bool haveBasis = false;
    std::vector<std::tuple<std::string, std::string, std::string>> brackets;
    std::vector<std::tuple<std::string, std::string, std::string>> forms;
};

Rat parse_rat_str(const std::string& s) { return rat_parse(s); }

} // namespace

SessionData parse_spec_text(const std::string& text, const std::string& filename) {
    SessionData out;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    std::string section, secname;
    std::optional<LieDraft> lie;
    std::optional<LcaDraft> lca;
    std::optional<PvaDraft> pva;

    auto perr = [&](const std::string& msg) {
        fail(Errc::ParseError, filename + ":" + std::to_string(lineno) + ": " + msg);
    };

    auto finish_lie = [&]() {
        if (!lie) return;
        LieAlgData& g = lie->g;
        if (!lie->haveBasis) perr("liealg '" + lie->name + "' has no basis line");
        size_t n = g.dim();
        g.c.assign(n, std::vector<Vec>(n, Vec(n, Scalar(0))));
        g.form = Mat(n, n);
        for (auto& [a, b, rhs] : lie->brackets) {
            int i = g.index_of(a), j = g.index_of(b);
            // rhs: linear combination of basis ids
            std::vector<GeneratorDecl> ds;
            for (size_t q = 0; q < n; q++) {
                GeneratorDecl d;
                d.id = g.basis[q];
                d.parity = g.parity[q];
                d.delta = 1;
                d.zeta = 1;
                ds.push_back(d);
            }
            GenSet tmp(ds);
            Expr e = parse_expr_structural(rhs, tmp);
            Vec v(n, Scalar(0));
            for (auto& [m, c] : e.t) {
                if (m.w.size() != 1 || m.w[0].tpow != 0)
                    perr("liealg bracket right side must be a linear combination of basis elements");
                v[m.w[0].gen] = v[m.w[0].gen] + c;
            }
            g.c[i][j] = v;
            int p = (g.parity[i] == Parity::Odd && g.parity[j] == Parity::Odd) ? -1 : 1;
            g.c[j][i] = g.scaled(v, Scalar((long)-p));
        }
        for (auto& [a, b, rhs] : lie->forms) {
            int i = g.index_of(a), j = g.index_of(b);
            Scalar v = parse_scalar(rhs);
            g.form.at(i, j) = v;
            int p = (g.parity[i] == Parity::Odd && g.parity[j] == Parity::Odd) ? -1 : 1;
            g.form.at(j, i) = p < 0 ? v.neg() : v;
        }
        auto bad = g.validate();
        if (!bad.empty()) fail(Errc::ValidationError, "liealg '" + lie->name + "': " + bad[0]);
        out.liealgs.emplace(lie->name, g);
        out.order.push_back("liealg " + lie->name);
        lie.reset();
    };

    auto finish_lca = [&]() {
        if (!lca) return;
        GenSet gs(lca->gens);
        std::map<std::pair<int, int>, Lambda1> table;
        for (auto& [a, b, rhs] : lca->brackets) {
            int i = gs.index_of(a), j = gs.index_of(b);
            Lambda1 l = parse_lambda(rhs, gs);
            if (table.count({i, j})) perr("duplicate bracket (" + a + "," + b + ")");
            table.emplace(std::make_pair(i, j), l);
        }
        LcaSpec spec(std::move(gs), std::move(table), lca->hamiltonian, lca->name);
        spec.validate();
        // eager skewsymmetry check per the cli contract
        Engine eng(spec);
        auto rep = eng.check_skewsymmetry();
        if (!rep.pass)
            fail(Errc::ValidationError,
                 "lca '" + lca->name + "': skewsymmetry fails on (" +
                     spec.gens[rep.entries[0].gens[0]].id + "," + spec.gens[rep.entries[0].gens[1]].id +
                     "): residual " + rep.entries[0].residual);
        out.lcas.emplace(lca->name, std::move(spec));
        out.order.push_back("lca " + lca->name);
        lca.reset();
    };

    auto finish_pva = [&]() {
        if (!pva) return;
        for (auto& [a, b, rhs] : pva->brackets) {
            int i = pva->s.index_of(a), j = pva->s.index_of(b);
            // rhs: sum of lam^n * pva polynomial pieces: parse by splitting on lam powers
            // reuse the generic lexer through a tiny wrapper grammar: terms of the form
            // [scalar/poly] [lam[^n]]
            Lexer lx(rhs);
            // simplest: parse as pva polynomial in an extended spec with a fake
            // generator is brittle; instead parse term-by-term on '+'/'-' at depth 0
            PvaLambda l;
            std::string cur;
            std::vector<std::pair<int, std::string>> pieces; // sign, text
            int depth = 0;
            std::string buf;
            int sign = 1;
            for (size_t q = 0; q <= rhs.size(); q++) {
                char ch = q < rhs.size() ? rhs[q] : '\0';
                if (ch == '(') depth++;
                if (ch == ')') depth--;
                if ((ch == '+' || ch == '-' || ch == '\0') && depth == 0) {
                    if (!strip(buf).empty()) pieces.push_back({sign, strip(buf)});
                    sign = ch == '-' ? -1 : 1;
                    buf.clear();
                } else {
                    buf += ch;
                }
            }
            auto find_lam = [](const std::string& s) -> size_t {
                for (size_t p = 0; (p = s.find("lam", p)) != std::string::npos; p++) {
                    bool lb = p == 0 || (!isalnum((unsigned char)s[p - 1]) && s[p - 1] != '_');
                    bool rb = p + 3 >= s.size() ||
                              (!isalnum((unsigned char)s[p + 3]) && s[p + 3] != '_');
                    if (lb && rb) return p;
                }
                return std::string::npos;
            };
            for (auto& [sg, piece] : pieces) {
                // extract a lam power factor if present
                std::string rest = piece;
                int lp = 0;
                size_t pos = find_lam(rest);
                if (pos != std::string::npos) {
                    lp = 1;
                    std::string after = rest.substr(pos + 3);
                    rest = strip(rest.substr(0, pos));
                    after = strip(after);
                    if (!after.empty() && after[0] == '^') {
                        size_t w = 1;
                        while (w < after.size() && isdigit((unsigned char)after[w])) w++;
                        lp = std::stoi(after.substr(1, w - 1));
                        after = strip(after.substr(w));
                    }
                    if (!after.empty()) rest = strip(rest + " " + after);
                }
                PvaExpr e = rest.empty() ? PvaExpr::constant(Scalar(1)) : parse_pva_expr(rest, pva->s);
                if (sg < 0) e = e.scaled(Scalar(-1));
                l.add((size_t)lp, e);
            }
            l.trim();
            pva->s.table.emplace(std::make_pair(i, j), l);
            (void)cur;
        }
        // eager skewsymmetry check
        PvaEngine pe(pva->s);
        auto rep = pe.check_skewsymmetry();
        if (!rep.pass) fail(Errc::ValidationError, "pva '" + pva->name + "': skewsymmetry fails");
        out.pvas.emplace(pva->name, pva->s);
        out.order.push_back("pva " + pva->name);
        pva.reset();
    };

    auto finish = [&]() {
        finish_lie();
        finish_lca();
        finish_pva();
    };

    while (std::getline(is, line)) {
        lineno++;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = strip(line);
        if (line.empty()) continue;
        if (line[0] == '[') {
            auto close = line.find(']');
            if (close == std::string::npos) perr("unterminated section header");
            auto inside = split_ws(line.substr(1, close - 1));
            if (inside.empty()) perr("empty section header");
            finish();
            section = inside[0];
            secname = inside.size() > 1 ? inside[1] : "";
            if (section == "liealg") {
                if (secname.empty()) perr("liealg section needs a name");
                lie.emplace();
                lie->name = secname;
                lie->g.name = secname;
            } else if (section == "lca") {
                if (secname.empty()) perr("lca section needs a name");
                lca.emplace();
                lca->name = secname;
            } else if (section == "pva") {
                if (secname.empty()) perr("pva section needs a name");
                pva.emplace();
                pva->name = secname;
                pva->s.name = secname;
            } else if (section == "params") {
                // declarative only
            } else {
                perr("unknown section '" + section + "'");
            }
            continue;
        }
        auto words = split_ws(line);
        if (section == "params") {
            for (auto& w : words) Params::intern(w);
            continue;
        }
        if (section == "liealg") {
            if (words[0] == "basis") {
                lie->g.basis.assign(words.begin() + 1, words.end());
                lie->g.parity.assign(lie->g.basis.size(), Parity::Even);
                lie->haveBasis = true;
            } else if (words[0] == "odd") {
                for (size_t q = 1; q < words.size(); q++)
                    lie->g.parity[lie->g.index_of(words[q])] = Parity::Odd;
            } else if (words[0] == "bracket" || words[0] == "form") {
                if (words.size() < 3) perr("expected '" + words[0] + " a b = expr'");
                auto eq = line.find('=');
                if (eq == std::string::npos) perr("expected '='");
                std::string rhs = strip(line.substr(eq + 1));
                if (words[0] == "bracket")
                    lie->brackets.push_back({words[1], words[2], rhs});
                else
                    lie->forms.push_back({words[1], words[2], rhs});
            } else {
                perr("unknown liealg line '" + words[0] + "'");
            }
            continue;
        }
        if (section == "lca") {
            if (words[0] == "generator") {
                if (words.size() < 2) perr("generator needs a name");
                GeneratorDecl d;
                d.id = words[1];
                for (size_t q = 2; q < words.size(); q++) {
                    auto eq = words[q].find('=');
                    if (eq == std::string::npos) perr("expected key=value, got '" + words[q] + "'");
                    std::string key = words[q].substr(0, eq), val = words[q].substr(eq + 1);
                    if (key == "delta")
                        d.delta = parse_rat_str(val);
                    else if (key == "zeta")
                        d.zeta = parse_rat_str(val);
                    else if (key == "charge")
                        d.charge = std::stol(val);
                    else if (key == "coset")
                        d.coset = parse_rat_str(val);
                    else if (key == "parity")
                        d.parity = (val == "odd" || val == "1") ? Parity::Odd : Parity::Even;
                    else
                        perr("unknown generator attribute '" + key + "'");
                }
                lca->gens.push_back(d);
            } else if (words[0] == "bracket") {
                if (words.size() < 3) perr("expected 'bracket a b = expr'");
                auto eq = line.find('=');
                if (eq == std::string::npos) perr("expected '='");
                lca->brackets.push_back({words[1], words[2], strip(line.substr(eq + 1))});
            } else if (words[0] == "option" && words.size() == 2 && words[1] == "nonhamiltonian") {
                lca->hamiltonian = false;
            } else {
                perr("unknown lca line '" + words[0] + "'");
            }
            continue;
        }
        if (section == "pva") {
            if (words[0] == "generator") {
                PvaGen d;
                d.id = words[1];
                for (size_t q = 2; q < words.size(); q++) {
                    auto eq = words[q].find('=');
                    if (eq == std::string::npos) perr("expected key=value");
                    std::string key = words[q].substr(0, eq), val = words[q].substr(eq + 1);
                    if (key == "delta")
                        d.delta = parse_rat_str(val);
                    else if (key == "parity")
                        d.parity = (val == "odd" || val == "1") ? Parity::Odd : Parity::Even;
                    else
                        perr("unknown generator attribute '" + key + "'");
                }
                pva->s.gens.push_back(d);
            } else if (words[0] == "bracket") {
                auto eq = line.find('=');
                if (eq == std::string::npos) perr("expected '='");
                pva->brackets.push_back({words[1], words[2], strip(line.substr(eq + 1))});
            } else {
                perr("unknown pva line '" + words[0] + "'");
            }
            continue;
        }
        perr("content outside of any section");
    }
    finish();
    return out;
}

SessionData parse_spec_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) fail(Errc::ParseError, "cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_spec_text(ss.str(), path);
}

// ------------------------------------------------------------ spec printers

std::string print_liealg(const LieAlgData& g) {
    std::ostringstream os;
    os << "[liealg " << g.name << "]\n";
    os << "basis";
    for (auto& b : g.basis) os << " " << b;
    os << "\n";
    bool anyOdd = false;
    for (auto p : g.parity) anyOdd |= p == Parity::Odd;
    if (anyOdd) {
        os << "odd";
        for (size_t i = 0; i < g.dim(); i++)
            if (g.parity[i] == Parity::Odd) os << " " << g.basis[i];
        os << "\n";
    }
    std::vector<GeneratorDecl> ds;
    for (size_t q = 0; q < g.dim(); q++) {
        GeneratorDecl d;
        d.id = g.basis[q];
        d.delta = 1;
        d.zeta = 1;
        ds.push_back(d);
    }
    GenSet tmp(ds);
    for (size_t i = 0; i < g.dim(); i++)
        for (size_t j = i; j < g.dim(); j++) {
            Expr e;
            for (size_t m = 0; m < g.dim(); m++)
                if (!g.c[i][j][m].is_zero()) e += Expr::gen((int)m, g.c[i][j][m]);
            if (!e.is_zero())
                os << "bracket " << g.basis[i] << " " << g.basis[j] << " = " << print_expr(tmp, e)
                   << "\n";
        }
    for (size_t i = 0; i < g.dim(); i++)
        for (size_t j = i; j < g.dim(); j++)
            if (!g.form.at(i, j).is_zero())
                os << "form " << g.basis[i] << " " << g.basis[j] << " = " << g.form.at(i, j).str()
                   << "\n";
    return os.str();
}

std::string print_lca(const LcaSpec& s) {
    std::ostringstream os;
    os << "[lca " << s.name << "]\n";
    for (size_t i = 0; i < s.gens.size(); i++) {
        auto& d = s.gens[i];
        os << "generator " << d.id << " delta=" << rat_str(d.delta);
        if (d.zeta != d.delta) os << " zeta=" << rat_str(d.zeta);
        if (d.charge) os << " charge=" << d.charge;
        if (d.parity == Parity::Odd) os << " parity=odd";
        os << "\n";
    }
    for (auto& [key, l] : s.table)
        os << "bracket " << s.gens[key.first].id << " " << s.gens[key.second].id << " = "
           << print_lambda1(s.gens, l) << "\n";
    return os.str();
}

std::string print_pva_spec(const PvaSpec& s) {
    std::ostringstream os;
    os << "[pva " << s.name << "]\n";
    for (auto& d : s.gens) {
        os << "generator " << d.id;
        if (d.delta) os << " delta=" << rat_str(*d.delta);
        if (d.parity == Parity::Odd) os << " parity=odd";
        os << "\n";
    }
    for (auto& [key, l] : s.table)
        os << "bracket " << s.gens[key.first].id << " " << s.gens[key.second].id << " = "
           << print_pva_lambda(s, l) << "\n";
    return os.str();
}

} // namespace lf
