/* lambdaforge C API: exact lambda-bracket calculus on freely generated vertex
 * algebras, Zhu algebras, W-algebras and Poisson vertex algebras.
 *
 * All state lives behind an opaque session handle. Expressions cross the
 * boundary as text in the engine grammar; results come back as heap strings
 * owned by the caller (release with lf_free_string). Functions return LF_OK on
 * success, LF_FAIL when a checked identity fails, and an error code otherwise;
 * lf_last_error() describes the most recent failure on the session.
 */
#ifndef LAMBDAFORGE_H
#define LAMBDAFORGE_H

#ifdef __cplusplus
extern "C" {
#endif

typedef struct lf_session lf_session;

typedef enum {
    LF_OK = 0,
    LF_FAIL = 1,    /* an identity check failed; output still valid */
    LF_ERR_PARSE = 2,
    LF_ERR_ARG = 3,
    LF_ERR_MATH = 4 /* domain errors: poles, degenerate forms, ... */
} lf_status;

int lf_version(void);

lf_session* lf_session_new(void);
void lf_session_free(lf_session* s);
const char* lf_last_error(const lf_session* s);
void lf_free_string(char* s);

/* Load declarative definitions ([liealg],[lca],[pva] sections). */
lf_status lf_load_path(lf_session* s, const char* path);
lf_status lf_load_string(lf_session* s, const char* text);
/* sl2, sl3, abelian1, virasoro, cur_sl2, cur_sl3, ff, nf, gfz */
lf_status lf_load_builtin(lf_session* s, const char* name);

/* "text" (default) or "machine" (versioned JSON) */
lf_status lf_set_output(lf_session* s, const char* mode);
/* substitute a parameter in printed results, e.g. lf_assign(s, "k", "1") */
lf_status lf_assign(lf_session* s, const char* param, const char* value);

/* skewsymmetry + Jacobi (lca/pva) or structure validation (liealg); spec may
 * be NULL to check everything loaded */
lf_status lf_check(lf_session* s, const char* spec, char** report);
/* lambda bracket [a_lam b] over the named lca spec */
lf_status lf_ope(lf_session* s, const char* spec, const char* a, const char* b, char** out);
/* normal form of an expression */
lf_status lf_normal_form(lf_session* s, const char* spec, const char* expr, char** out);
/* what = "product" (uses n), "commutator", "pi" (b ignored) */
lf_status lf_zhu(lf_session* s, const char* spec, const char* what, const char* a, const char* b,
                 long n, char** out);
/* what = "build", "generators", "bracket", "finite", "whittaker";
 * options: comma-separated key=value list (level=k, pair=principal|minimal,
 * maxdelta=3, cutoff=4), may be NULL */
lf_status lf_walg(lf_session* s, const char* algebra, const char* what, const char* options,
                  char** out);
/* cubic Dirac operator checks over the named algebra */
lf_status lf_dirac(lf_session* s, const char* algebra, char** out);
/* what = "flow", "involution", "zhu"; options: h=..., h1=..., h2=..., u=... */
lf_status lf_pva(lf_session* s, const char* spec, const char* what, const char* options,
                 char** out);

#ifdef __cplusplus
}
#endif

#endif /* LAMBDAFORGE_H */
