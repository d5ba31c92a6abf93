#include "lambdaforge.h"

#include <cstring>
#include <string>

#include "lambdaforge/session.hpp"

#if defined(_WIN32)
#define LF_EXPORT __declspec(dllexport)
#else
#define LF_EXPORT __attribute__((visibility("default")))
#endif

struct lf_session {
    lf::Session impl;
    std::string lastError;
};

namespace {

char* dup_string(const std::string& s) {
    char* p = (char*)std::malloc(s.size() + 1);
    if (p) std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

lf_status status_of(const lf::Error& e) {
    switch (e.code) {
    case lf::Errc::ParseError: return LF_ERR_PARSE;
    case lf::Errc::BadArgument:
    case lf::Errc::UnknownGenerator: return LF_ERR_ARG;
    default: return LF_ERR_MATH;
    }
}

template <typename F>
lf_status guarded(lf_session* s, char** out, F&& fn) {
    if (!s) return LF_ERR_ARG;
    if (out) *out = nullptr;
    try {
        std::string text;
        int code = fn(text);
        if (out) *out = dup_string(text);
        return code == 0 ? LF_OK : LF_FAIL;
    } catch (const lf::Error& e) {
        s->lastError = e.what();
        return status_of(e);
    } catch (const std::exception& e) {
        s->lastError = e.what();
        return LF_ERR_MATH;
    }
}

} // namespace

extern "C" {

LF_EXPORT int lf_version(void) { return 10000; }

LF_EXPORT lf_session* lf_session_new(void) { return new (std::nothrow) lf_session(); }

LF_EXPORT void lf_session_free(lf_session* s) { delete s; }

LF_EXPORT const char* lf_last_error(const lf_session* s) {
    return s ? s->lastError.c_str() : "null session";
}

LF_EXPORT void lf_free_string(char* s) { std::free(s); }

LF_EXPORT lf_status lf_load_path(lf_session* s, const char* path) {
    if (!path) return LF_ERR_ARG;
    return guarded(s, nullptr, [&](std::string&) {
        s->impl.load_path(path);
        return 0;
    });
}

LF_EXPORT lf_status lf_load_string(lf_session* s, const char* text) {
    if (!text) return LF_ERR_ARG;
    return guarded(s, nullptr, [&](std::string&) {
        s->impl.load_text(text);
        return 0;
    });
}

LF_EXPORT lf_status lf_load_builtin(lf_session* s, const char* name) {
    if (!name) return LF_ERR_ARG;
    return guarded(s, nullptr, [&](std::string&) {
        s->impl.load_builtin(name);
        return 0;
    });
}

LF_EXPORT lf_status lf_set_output(lf_session* s, const char* mode) {
    if (!s || !mode) return LF_ERR_ARG;
    std::string m = mode;
    if (m == "text")
        s->impl.machine = false;
    else if (m == "machine")
        s->impl.machine = true;
    else {
        s->lastError = "output mode must be text or machine";
        return LF_ERR_ARG;
    }
    return LF_OK;
}

LF_EXPORT lf_status lf_assign(lf_session* s, const char* param, const char* value) {
    if (!param || !value) return LF_ERR_ARG;
    return guarded(s, nullptr, [&](std::string&) {
        s->impl.assign(param, value);
        return 0;
    });
}

LF_EXPORT lf_status lf_check(lf_session* s, const char* spec, char** report) {
    return guarded(s, report,
                   [&](std::string& out) { return s->impl.cmd_check(spec ? spec : "", out); });
}

LF_EXPORT lf_status lf_ope(lf_session* s, const char* spec, const char* a, const char* b,
                           char** out) {
    if (!spec || !a || !b) return LF_ERR_ARG;
    return guarded(s, out, [&](std::string& o) { return s->impl.cmd_ope(spec, a, b, o); });
}

LF_EXPORT lf_status lf_normal_form(lf_session* s, const char* spec, const char* expr, char** out) {
    if (!spec || !expr) return LF_ERR_ARG;
    return guarded(s, out, [&](std::string& o) { return s->impl.cmd_nf(spec, expr, o); });
}

LF_EXPORT lf_status lf_zhu(lf_session* s, const char* spec, const char* what, const char* a,
                           const char* b, long n, char** out) {
    if (!spec || !what || !a) return LF_ERR_ARG;
    return guarded(s, out, [&](std::string& o) {
        return s->impl.cmd_zhu(spec, what, a, b ? b : "", n, o);
    });
}

namespace {
std::map<std::string, std::string> parse_options(const char* options) {
    std::map<std::string, std::string> opts;
    if (!options) return opts;
    std::string s = options;
    size_t i = 0;
    while (i < s.size()) {
        size_t j = s.find(',', i);
        if (j == std::string::npos) j = s.size();
        std::string kv = s.substr(i, j - i);
        auto eq = kv.find('=');
        if (eq != std::string::npos) opts[kv.substr(0, eq)] = kv.substr(eq + 1);
        i = j + 1;
    }
    return opts;
}
} // namespace

LF_EXPORT lf_status lf_walg(lf_session* s, const char* algebra, const char* what,
                            const char* options, char** out) {
    if (!algebra || !what) return LF_ERR_ARG;
    return guarded(s, out, [&](std::string& o) {
        return s->impl.cmd_walg(algebra, what, parse_options(options), o);
    });
}

LF_EXPORT lf_status lf_dirac(lf_session* s, const char* algebra, char** out) {
    if (!algebra) return LF_ERR_ARG;
    return guarded(s, out, [&](std::string& o) { return s->impl.cmd_dirac(algebra, o); });
}

LF_EXPORT lf_status lf_pva(lf_session* s, const char* spec, const char* what, const char* options,
                           char** out) {
    if (!what) return LF_ERR_ARG;
    return guarded(s, out, [&](std::string& o) {
        return s->impl.cmd_pva(spec ? spec : "", what, parse_options(options), o);
    });
}

} // extern "C"
