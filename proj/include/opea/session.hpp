#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "opea/axioms.hpp"
#include "opea/spec_file.hpp"

namespace opea {

const char* tool_version();

struct CheckRun {
    Verdict verdict;
    double seconds = 0;
};

struct Report {
    std::string version;
    std::string digest;
    std::uint64_t seed = 0;
    std::vector<CheckRun> runs;

    bool all_hold() const;
    std::string render(const std::string& format, bool timing) const;
};

// One algebra spec plus the state needed to answer commands on it.
class Session {
public:
    explicit Session(std::string spec_text);

    void set_max_weight(const Rational& L);
    void set_window(const Rational& w);
    const SpecFile& spec() const { return spec_; }
    // SHA-256 over the spec text, seed and overrides.
    std::string digest() const;

    const Algebra& algebra();
    const std::vector<FieldPtr>& generators();
    // generator name, "1", or a basis label
    FieldPtr field(const std::string& name);

    static const std::vector<std::string>& check_names();
    // Unknown names throw InvalidSpec.
    Report check(const std::vector<std::string>& only);

    std::string ope(const std::string& a, const std::string& b);
    std::string product(const std::string& a, const ExpPair& vn, const std::string& b);
    // Sets *holds to the construction verdict.
    std::string construct(bool* holds);
    std::string closure();

private:
    void build();
    std::vector<std::size_t> corpus();
    const Verdict& pair_verdict(const std::string& check, std::size_t a, std::size_t b, double* seconds);
    std::vector<CheckRun> run(const std::string& name);

    std::string text_;
    SpecFile spec_;
    std::optional<Algebra> alg_;
    std::vector<FieldPtr> generators_;
    std::map<std::tuple<std::string, std::size_t, std::size_t>, Verdict> pair_cache_;
};

}  // namespace opea
