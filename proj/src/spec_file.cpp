#include "opea/spec_file.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <regex>
#include <set>
#include <sstream>

namespace opea {

namespace {

struct Item {
    std::string value;
    std::size_t line, key_col, value_col;
};

struct Section {
    std::string kind;  // algebra | backend | checks | corrupt
    std::string name;  // backend sections only
    std::size_t line;
    std::map<std::string, Item> items;
};

const std::map<std::string, std::set<std::string>> kAllowed = {
    {"algebra", {"backend", "max-weight", "window", "internal-weight", "generators"}},
    {"backend", {"kind", "level", "generator", "left", "right", "bar-swap"}},
    {"checks", {"names", "format", "seed", "sample"}},
    {"corrupt", {"field", "mode", "scale"}},
};

std::string trim(const std::string& s, std::size_t* lead = nullptr) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) {
        if (lead) *lead = s.size();
        return {};
    }
    std::size_t b = s.find_last_not_of(" \t\r");
    if (lead) *lead = a;
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::stringstream in(s);
    while (std::getline(in, cur, ',')) {
        cur = trim(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

Rational need_rational(const Item& it) {
    auto q = try_parse_rational(it.value);
    if (!q) throw SpecError(it.line, it.value_col, "expected an exact rational, got '" + it.value + "'");
    return *q;
}

std::vector<Section> lex(const std::string& text) {
    std::vector<Section> out;
    std::istringstream in(text);
    std::string raw;
    std::size_t line = 0;
    static const std::regex header(R"(\[\s*([a-z]+)(?:\s+([A-Za-z0-9_.-]+))?\s*\])");
    while (std::getline(in, raw)) {
        ++line;
        // '#' or ';' at the start or after whitespace begins a comment
        for (std::size_t i = 0; i < raw.size(); ++i)
            if ((raw[i] == '#' || raw[i] == ';') && (i == 0 || std::isspace(static_cast<unsigned char>(raw[i - 1])))) {
                raw.erase(i);
                break;
            }
        std::size_t lead = 0;
        std::string s = trim(raw, &lead);
        if (s.empty()) continue;
        if (s[0] == '[') {
            std::smatch m;
            if (!std::regex_match(s, m, header)) throw SpecError(line, lead + 1, "malformed section header");
            std::string kind = m[1];
            if (!kAllowed.count(kind)) throw SpecError(line, lead + 2, "unknown section '" + kind + "'");
            std::string name = m[2];
            if (kind == "backend" && name.empty()) throw SpecError(line, lead + 1, "backend section needs a name");
            if (kind != "backend" && !name.empty())
                throw SpecError(line, lead + 1, "section '" + kind + "' takes no name");
            for (const auto& sec : out)
                if (sec.kind == kind && sec.name == name)
                    throw SpecError(line, lead + 1, "duplicate section '" + s + "'");
            out.push_back({kind, name, line, {}});
            continue;
        }
        std::size_t eq = raw.find('=');
        if (eq == std::string::npos) throw SpecError(line, lead + 1, "expected 'key = value'");
        if (out.empty()) throw SpecError(line, lead + 1, "key outside of any section");
        std::string key = trim(raw.substr(0, eq));
        std::size_t vlead = 0;
        std::string value = trim(raw.substr(eq + 1), &vlead);
        Section& sec = out.back();
        if (key.empty()) throw SpecError(line, lead + 1, "empty key");
        if (!kAllowed.at(sec.kind).count(key))
            throw SpecError(line, lead + 1, "unknown key '" + key + "' in [" + sec.kind + "]");
        if (sec.items.count(key)) throw SpecError(line, lead + 1, "duplicate key '" + key + "'");
        if (value.empty()) throw SpecError(line, eq + 2, "missing value for '" + key + "'");
        sec.items[key] = Item{value, line, lead + 1, eq + 2 + vlead};
    }
    return out;
}

const Item* find(const Section& s, const std::string& key) {
    auto it = s.items.find(key);
    return it == s.items.end() ? nullptr : &it->second;
}

bool parse_bool(const Item& it) {
    if (it.value == "true" || it.value == "yes" || it.value == "1") return true;
    if (it.value == "false" || it.value == "no" || it.value == "0") return false;
    throw SpecError(it.line, it.value_col, "expected true or false");
}

}  // namespace

std::optional<Rational> try_parse_rational(const std::string& s) {
    static const std::regex re(R"([+-]?\d+(/\d+)?)");
    if (!std::regex_match(s, re)) return std::nullopt;
    try {
        return parse_rational(s);
    } catch (const Error&) {
        return std::nullopt;  // zero denominator
    }
}

Rational SpecFile::effective_internal_weight() const {
    if (internal_weight) return *internal_weight;
    Rational L = std::max(max_weight, effective_window());
    return 4 * L + 2;
}

SpecFile parse_spec(const std::string& text) {
    auto sections = lex(text);
    SpecFile spec;
    const Section* algebra = nullptr;
    std::map<std::string, const Section*> backends;
    for (const auto& s : sections) {
        if (s.kind == "algebra") algebra = &s;
        if (s.kind == "backend") backends[s.name] = &s;
    }
    if (!algebra) throw SpecError(1, 1, "missing [algebra] section");
    const Item* b = find(*algebra, "backend");
    if (!b) throw SpecError(algebra->line, 1, "[algebra] needs 'backend'");
    spec.backend_name = b->value;

    std::function<BackendSpec(const std::string&, const Item&, std::set<std::string>&)> resolve =
        [&](const std::string& name, const Item& ref, std::set<std::string>& seen) -> BackendSpec {
        auto it = backends.find(name);
        if (it == backends.end()) throw SpecError(ref.line, ref.value_col, "no [backend " + name + "] section");
        if (!seen.insert(name).second) throw SpecError(ref.line, ref.value_col, "backend '" + name + "' refers to itself");
        const Section& s = *it->second;
        BackendSpec out;
        const Item* kind = find(s, "kind");
        if (!kind) throw SpecError(s.line, 1, "[backend " + name + "] needs 'kind'");
        static const std::set<std::string> kinds = {"heisenberg", "boson", "fermion", "tensor"};
        if (!kinds.count(kind->value))
            throw SpecError(kind->line, kind->value_col, "unknown backend kind '" + kind->value + "'");
        out.kind = kind->value == "boson" ? "heisenberg" : kind->value;
        if (const Item* l = find(s, "level")) {
            if (out.kind != "heisenberg") throw SpecError(l->line, l->key_col, "'level' applies to heisenberg only");
            out.level = need_rational(*l);
            if (sgn(out.level) == 0) throw SpecError(l->line, l->value_col, "level must be nonzero");
        }
        if (const Item* g = find(s, "generator")) {
            if (out.kind == "tensor") throw SpecError(g->line, g->key_col, "a tensor backend takes its factors' generators");
            static const std::regex ident(R"([A-Za-z][A-Za-z0-9_]*)");
            if (!std::regex_match(g->value, ident)) throw SpecError(g->line, g->value_col, "bad generator name");
            out.generator = g->value;
        }
        const Item* left = find(s, "left");
        const Item* right = find(s, "right");
        const Item* swap = find(s, "bar-swap");
        if (out.kind == "tensor") {
            if (!left || !right) throw SpecError(s.line, 1, "tensor backend '" + name + "' needs 'left' and 'right'");
            auto ls = seen, rs = seen;
            out.left = std::make_shared<BackendSpec>(resolve(left->value, *left, ls));
            out.right = std::make_shared<BackendSpec>(resolve(right->value, *right, rs));
            if (swap) out.bar_swap = parse_bool(*swap);
        } else {
            for (const Item* x : {left, right, swap})
                if (x) throw SpecError(x->line, x->key_col, "only tensor backends take factors");
        }
        return out;
    };
    std::set<std::string> seen;
    spec.backend = resolve(spec.backend_name, *b, seen);

    if (const Item* x = find(*algebra, "max-weight")) spec.max_weight = need_rational(*x);
    if (const Item* x = find(*algebra, "window")) spec.window = need_rational(*x);
    if (const Item* x = find(*algebra, "internal-weight")) spec.internal_weight = need_rational(*x);
    if (const Item* x = find(*algebra, "generators")) spec.generators = split_list(x->value);
    if (sgn(spec.max_weight) < 0) throw SpecError(algebra->line, 1, "max-weight must be nonnegative");
    if (spec.internal_weight && *spec.internal_weight < std::max(spec.max_weight, spec.effective_window())) {
        const Item* x = find(*algebra, "internal-weight");
        throw SpecError(x->line, x->value_col, "internal-weight is below max-weight");
    }

    for (const auto& s : sections) {
        if (s.kind == "checks") {
            if (const Item* x = find(s, "names")) spec.checks = split_list(x->value);
            if (const Item* x = find(s, "format")) {
                if (x->value != "text" && x->value != "json-lines")
                    throw SpecError(x->line, x->value_col, "format must be text or json-lines");
                spec.format = x->value;
            }
            if (const Item* x = find(s, "seed")) {
                if (!std::regex_match(x->value, std::regex(R"(\d{1,19})")))
                    throw SpecError(x->line, x->value_col, "seed must be a nonnegative integer");
                spec.seed = std::stoull(x->value);
            }
            if (const Item* x = find(s, "sample")) {
                if (!std::regex_match(x->value, std::regex(R"(\d{1,9})")))
                    throw SpecError(x->line, x->value_col, "sample must be a nonnegative integer");
                spec.sample = std::stol(x->value);
            }
        }
        if (s.kind == "corrupt") {
            const Item* f = find(s, "field");
            const Item* m = find(s, "mode");
            if (!f || !m) throw SpecError(s.line, 1, "[corrupt] needs 'field' and 'mode'");
            CorruptSpec c{f->value, ExpPair(0, 0), Rational(2)};
            std::istringstream parts(m->value);
            std::string n, nbar, extra;
            parts >> n >> nbar;
            auto qn = try_parse_rational(n), qb = try_parse_rational(nbar);
            if (!qn || !qb || (parts >> extra)) throw SpecError(m->line, m->value_col, "mode is two rationals 'n nbar'");
            c.mode = ExpPair(*qn, *qb);
            if (const Item* x = find(s, "scale")) c.scale = need_rational(*x);
            spec.corrupt = c;
        }
    }
    return spec;
}

std::string read_spec_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::InvalidSpec, "cannot read spec file '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace opea
