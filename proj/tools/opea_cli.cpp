// opea: command-line front end over the C interface.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "opea.h"

namespace {

int exit_code(opea_status st) {
    switch (st) {
        case OPEA_OK: return 0;
        case OPEA_CHECK_FAILED:
        case OPEA_NOT_LOCAL:
        case OPEA_NOT_SPANNING: return 1;
        case OPEA_SPEC_ERROR:
        case OPEA_BAD_ARGUMENT: return 2;
        default: return 3;
    }
}

struct Output {
    std::string path;
    void write(const char* text) const {
        if (path.empty()) {
            std::fputs(text, stdout);
            return;
        }
        std::ofstream out(path, std::ios::binary);
        out << text;
    }
};

// Opens the session, runs f, prints the result and the error.
template <class F>
int with_session(const std::string& spec, const Output& out, F&& f) {
    opea_session* s = nullptr;
    opea_status st = opea_session_open_file(spec.c_str(), &s);
    if (st != OPEA_OK) {
        std::cerr << "opea: " << spec << ": " << opea_last_error() << "\n";
        return exit_code(st);
    }
    char* text = nullptr;
    st = f(s, &text);
    if (text) {
        out.write(text);
        opea_string_free(text);
    }
    if (st != OPEA_OK) std::cerr << "opea: " << opea_last_error() << "\n";
    opea_session_close(s);
    return exit_code(st);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact OPE-algebra engine: OPE extraction, products, closure and axiom checks"};
    app.set_version_flag("--version", opea_version());
    app.require_subcommand(1);
    Output out;
    app.add_option("-o,--output", out.path, "write the result to a file instead of stdout");

    std::string spec, only, max_weight, window, format, a, b, n, nbar;
    bool timing = false;

    auto* check = app.add_subcommand("check", "run axiom and proposition checks; exit 0 iff all hold");
    check->add_option("--only", only, "comma-separated check names");
    check->add_option("--max-weight", max_weight, "corpus weight bound L (p/q)");
    check->add_option("--window", window, "OPE window depth (p/q)");
    check->add_option("--format", format, "text or json-lines")->check(CLI::IsMember({"text", "json-lines"}));
    check->add_flag("--timing", timing, "include per-check seconds in json-lines output");
    check->add_option("spec", spec, "spec file")->required();

    auto* ope = app.add_subcommand("ope", "print the reduced OPE of two fields");
    ope->add_option("spec", spec)->required();
    ope->add_option("a", a)->required();
    ope->add_option("b", b)->required();

    auto* product = app.add_subcommand("product", "print a_(n,nbar) b as a state and as a field");
    product->add_option("spec", spec)->required();
    product->add_option("a", a)->required();
    product->add_option("n", n)->required();
    product->add_option("nbar", nbar)->required();
    product->add_option("b", b)->required();

    auto* construct = app.add_subcommand("construct", "build Y from the generators by the existence theorem");
    construct->add_option("spec", spec)->required();

    auto* closure = app.add_subcommand("closure", "print the Dong closure of the generators");
    closure->add_option("spec", spec)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (check->parsed()) {
        return with_session(spec, out, [&](opea_session* s, char** text) {
            if (!max_weight.empty()) {
                if (opea_status st = opea_set_max_weight(s, max_weight.c_str()); st != OPEA_OK) return st;
            }
            if (!window.empty()) {
                if (opea_status st = opea_set_window(s, window.c_str()); st != OPEA_OK) return st;
            }
            return opea_check(s, only.empty() ? nullptr : only.c_str(), format.empty() ? nullptr : format.c_str(),
                              timing ? 1 : 0, text);
        });
    }
    if (ope->parsed())
        return with_session(spec, out, [&](opea_session* s, char** text) { return opea_ope(s, a.c_str(), b.c_str(), text); });
    if (product->parsed())
        return with_session(spec, out, [&](opea_session* s, char** text) {
            return opea_product(s, a.c_str(), n.c_str(), nbar.c_str(), b.c_str(), text);
        });
    if (construct->parsed())
        return with_session(spec, out, [&](opea_session* s, char** text) { return opea_construct(s, text); });
    return with_session(spec, out, [&](opea_session* s, char** text) { return opea_closure(s, text); });
}
