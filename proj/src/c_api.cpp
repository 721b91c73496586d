#include "opea.h"

#include <cstdlib>
#include <cstring>
#include <sstream>

#include "opea/session.hpp"

struct opea_session {
    std::unique_ptr<opea::Session> s;
};

namespace {

thread_local std::string last_error;

char* dup(const std::string& s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

opea_status fail(opea_status st, const std::string& msg) {
    last_error = msg;
    return st;
}

opea_status status_of(const opea::Error& e) {
    using opea::ErrorKind;
    switch (e.kind()) {
        case ErrorKind::ParseError:
        case ErrorKind::InvalidSpec:
        case ErrorKind::UnknownField: return OPEA_SPEC_ERROR;
        case ErrorKind::NotLocal: return OPEA_NOT_LOCAL;
        case ErrorKind::NotSpanning: return OPEA_NOT_SPANNING;
        default: return OPEA_INTERNAL;
    }
}

// Runs f, mapping exceptions to status codes.
template <class F>
opea_status guarded(F&& f) {
    try {
        last_error.clear();
        return f();
    } catch (const opea::Error& e) {
        return fail(status_of(e), std::string(opea::error_kind_name(e.kind())) + ": " + e.what());
    } catch (const std::exception& e) {
        return fail(OPEA_INTERNAL, e.what());
    }
}

opea_status need(bool ok, const char* what) {
    return ok ? OPEA_OK : fail(OPEA_BAD_ARGUMENT, std::string("missing argument: ") + what);
}

}  // namespace

extern "C" {

const char* opea_version(void) { return opea::tool_version(); }

const char* opea_last_error(void) { return last_error.c_str(); }

opea_status opea_session_open(const char* spec_text, opea_session** out) {
    if (auto st = need(spec_text && out, "spec text"); st != OPEA_OK) return st;
    return guarded([&] {
        *out = new opea_session{std::make_unique<opea::Session>(spec_text)};
        return OPEA_OK;
    });
}

opea_status opea_session_open_file(const char* path, opea_session** out) {
    if (auto st = need(path && out, "path"); st != OPEA_OK) return st;
    return guarded([&] {
        *out = new opea_session{std::make_unique<opea::Session>(opea::read_spec_text(path))};
        return OPEA_OK;
    });
}

void opea_session_close(opea_session* s) { delete s; }

static opea_status set_rational(opea_session* s, const char* q, bool window) {
    if (auto st = need(s && q, "value"); st != OPEA_OK) return st;
    auto r = opea::try_parse_rational(q);
    if (!r || sgn(*r) < 0) return fail(OPEA_BAD_ARGUMENT, std::string("not a nonnegative rational: ") + q);
    if (window) s->s->set_window(*r);
    else s->s->set_max_weight(*r);
    return OPEA_OK;
}

opea_status opea_set_max_weight(opea_session* s, const char* L) { return set_rational(s, L, false); }
opea_status opea_set_window(opea_session* s, const char* depth) { return set_rational(s, depth, true); }

opea_status opea_check(opea_session* s, const char* only, const char* format, int timing, char** report) {
    if (auto st = need(s && report, "session or output"); st != OPEA_OK) return st;
    return guarded([&] {
        std::vector<std::string> names;
        if (only) {
            std::stringstream in(only);
            std::string n;
            while (std::getline(in, n, ','))
                if (!n.empty()) names.push_back(n);
        }
        std::string fmt = format ? format : s->s->spec().format;
        if (fmt != "text" && fmt != "json-lines") return fail(OPEA_BAD_ARGUMENT, "unknown format '" + fmt + "'");
        opea::Report r = s->s->check(names);
        *report = dup(r.render(fmt, timing != 0));
        if (!r.all_hold()) return fail(OPEA_CHECK_FAILED, "some verdicts do not hold");
        return OPEA_OK;
    });
}

opea_status opea_ope(opea_session* s, const char* a, const char* b, char** out) {
    if (auto st = need(s && a && b && out, "field names"); st != OPEA_OK) return st;
    return guarded([&] {
        *out = dup(s->s->ope(a, b));
        return OPEA_OK;
    });
}

opea_status opea_product(opea_session* s, const char* a, const char* n, const char* nbar, const char* b, char** out) {
    if (auto st = need(s && a && n && nbar && b && out, "product arguments"); st != OPEA_OK) return st;
    auto qn = opea::try_parse_rational(n), qb = opea::try_parse_rational(nbar);
    if (!qn || !qb) return fail(OPEA_BAD_ARGUMENT, "mode components must be rationals");
    return guarded([&] {
        *out = dup(s->s->product(a, opea::ExpPair(*qn, *qb), b));
        return OPEA_OK;
    });
}

opea_status opea_construct(opea_session* s, char** out) {
    if (auto st = need(s && out, "session or output"); st != OPEA_OK) return st;
    return guarded([&] {
        bool holds = false;
        *out = dup(s->s->construct(&holds));
        return holds ? OPEA_OK : fail(OPEA_CHECK_FAILED, "construction verdict does not hold");
    });
}

opea_status opea_closure(opea_session* s, char** out) {
    if (auto st = need(s && out, "session or output"); st != OPEA_OK) return st;
    return guarded([&] {
        *out = dup(s->s->closure());
        return OPEA_OK;
    });
}

void opea_string_free(char* p) { std::free(p); }

}  // extern "C"
