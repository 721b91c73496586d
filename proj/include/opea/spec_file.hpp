#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "opea/backends.hpp"

namespace opea {

// Parse failure with a 1-based position in the spec text.
class SpecError : public Error {
public:
    SpecError(std::size_t line, std::size_t column, const std::string& what)
        : Error(ErrorKind::ParseError,
                "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
          line_(line),
          column_(column) {}
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_, column_;
};

struct CorruptSpec {
    std::string field;  // generator name or basis label
    ExpPair mode;
    Rational scale;
};

struct SpecFile {
    std::string backend_name;
    BackendSpec backend;
    Rational max_weight{3};
    std::optional<Rational> window;           // defaults to max_weight
    std::optional<Rational> internal_weight;  // defaults to 4 max(L, window) + 2
    std::vector<std::string> generators;      // empty: the backend's generators
    std::vector<std::string> checks;          // empty: every check
    std::string format = "text";
    std::uint64_t seed = 0;
    std::optional<long> sample;
    std::optional<CorruptSpec> corrupt;

    Rational effective_window() const { return window ? *window : max_weight; }
    Rational effective_internal_weight() const;
};

SpecFile parse_spec(const std::string& text);
// Reads the file; I/O failures are reported as InvalidSpec.
std::string read_spec_text(const std::string& path);

// "p/q" or an integer; nullopt on anything else.
std::optional<Rational> try_parse_rational(const std::string& s);

}  // namespace opea
