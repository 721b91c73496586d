// Neveu-Schwarz free fermion: basis psi_{-r1} ... psi_{-rk} vac with r1 > ... > rk > 0
// half-odd integers; {psi_m, psi_n} = delta_{m+n,0}. Field mode (n, -1) is psi_{n+1/2}.

#include <map>

#include "opea/backends.hpp"

namespace opea {
namespace {

using Word = std::vector<int>;  // 2r for each occupied mode, decreasing
using Combo = std::map<Word, Rational>;

struct Exterior {
    std::string name;
    std::vector<Word> words;
    std::map<Word, std::size_t> index;
};

std::string half(int twice) {
    return twice % 2 ? std::to_string(twice) + "/2" : std::to_string(twice / 2);
}

std::string label_of(const std::string& name, const Word& w) {
    if (w.empty()) return "vac";
    std::string s;
    for (int x : w) s += name + "[-" + half(x) + "]";
    return s;
}

// Strict partitions of `twice` (in halves) into odd parts, each part <= max_part.
void words_of(int twice, int max_part, Word& cur, std::vector<Word>& out) {
    if (twice == 0) {
        out.push_back(cur);
        return;
    }
    for (int p = std::min(twice, max_part); p >= 1; --p) {
        if (p % 2 == 0) continue;
        cur.push_back(p);
        words_of(twice - p, p - 2, cur, out);
        cur.pop_back();
    }
}

// psi_m with 2m = twice_m, on a single word.
void apply_mode(int twice_m, const Word& w, const Rational& c, Combo& out) {
    if (twice_m < 0) {
        int r = -twice_m;
        if (std::find(w.begin(), w.end(), r) != w.end()) return;
        Word q = w;
        auto pos = std::upper_bound(q.begin(), q.end(), r, std::greater<int>());
        long before = pos - q.begin();
        q.insert(pos, r);
        out[q] += before % 2 ? Rational(-c) : c;
        return;
    }
    auto it = std::find(w.begin(), w.end(), twice_m);
    if (it == w.end()) return;
    long before = it - w.begin();
    Word q = w;
    q.erase(q.begin() + before);
    out[q] += before % 2 ? Rational(-c) : c;
}

StateVector to_vector(const Exterior& e, const Combo& c) {
    StateVector v;
    for (const auto& [w, x] : c) {
        if (sgn(x) == 0) continue;
        auto it = e.index.find(w);
        if (it == e.index.end()) return StateVector::unknown();
        v.add_entry(it->second, x);
    }
    return v;
}

Combo apply_all(int twice_m, const Combo& in) {
    Combo out;
    for (const auto& [w, x] : in) apply_mode(twice_m, w, x, out);
    return out;
}

// Y(psi_{-r1} ... psi_{-rk} vac) = :prod_i d^{(r_i - 1/2)} psi(z):
class FermionVertex : public Field {
public:
    FermionVertex(SpacePtr space, std::shared_ptr<const Exterior> ext, Word word)
        : Field(std::move(space), label_of(ext->name, word), ExpPair(ratio(twice_sum(word), 2), Rational(0)),
                word.size() % 2 ? Parity::odd : Parity::even, Chirality::holomorphic),
          ext_(std::move(ext)),
          word_(std::move(word)) {}

    static int twice_sum(const Word& w) {
        int s = 0;
        for (int x : w) s += x;
        return s;
    }

protected:
    StateVector compute(const ExpPair& mode, std::size_t j) const override {
        if (mode.nbar != -1) return {};
        const long k = static_cast<long>(word_.size());
        long dsum = 0;
        for (int x : word_) dsum += (x - 1) / 2;
        const long total = to_long(mode.n) + 1 - k - dsum;  // sum of field mode indices n_i
        Combo result;
        for (unsigned mask = 0; mask < (1u << k); ++mask) {
            std::vector<std::size_t> ann, cre;
            for (long i = 0; i < k; ++i) ((mask >> i) & 1u ? ann : cre).push_back(static_cast<std::size_t>(i));
            int swaps = 0;  // annihilators moved right past later creators
            for (std::size_t a : ann)
                for (std::size_t c : cre)
                    if (a < c) ++swaps;
            Rational sign(swaps % 2 ? -1 : 1);
            Combo start{{ext_->words[j], Rational(1)}};
            std::vector<long> modes(k);
            annihilate(ann, ann.size(), start, sign, 0, cre, total, modes, result);
        }
        return to_vector(*ext_, result);
    }

private:
    Rational factor(long n, std::size_t i) const {
        return gen_binom(Rational(-n - 1), static_cast<unsigned long>((word_[i] - 1) / 2));
    }

    // Annihilators act rightmost first: ann[pos-1] is the next one to apply.
    void annihilate(const std::vector<std::size_t>& ann, std::size_t pos, const Combo& state, const Rational& coef,
                    long used, const std::vector<std::size_t>& cre, long total, std::vector<long>& modes,
                    Combo& result) const {
        if (pos == 0) {
            long c = used - total;  // creators: n_i = -s_i with s_i >= 1, sum s_i = c
            if (c < static_cast<long>(cre.size())) return;
            if (cre.empty() && c != 0) return;
            create(cre, 0, c, modes, state, coef, result);
            return;
        }
        std::set<int> candidates;
        for (const auto& [w, x] : state)
            for (int r2 : w) candidates.insert(r2);
        for (int r2 : candidates) {
            long n = (r2 - 1) / 2;  // psi_{r} = psi_{(r - 1/2)}
            Combo next = apply_all(r2, state);
            if (next.empty()) continue;
            annihilate(ann, pos - 1, next, coef * factor(n, ann[pos - 1]), used + n, cre, total, modes, result);
        }
    }

    void create(const std::vector<std::size_t>& cre, std::size_t pos, long remaining, std::vector<long>& modes,
                const Combo& state, const Rational& coef, Combo& result) const {
        if (pos == cre.size()) {
            if (remaining != 0) return;
            Combo cur = state;
            Rational c = coef;
            for (std::size_t i = cre.size(); i-- > 0;) {
                long s = modes[i];
                cur = apply_all(-(2 * s - 1), cur);  // psi_{(-s)} = psi_{-s+1/2}
                c *= factor(-s, cre[i]);
                if (cur.empty()) return;
            }
            for (const auto& [w, x] : cur) result[w] += c * x;
            return;
        }
        long left = static_cast<long>(cre.size() - pos - 1);
        for (long s = 1; s <= remaining - left; ++s) {
            modes[pos] = s;
            create(cre, pos + 1, remaining - s, modes, state, coef, result);
        }
    }

    std::shared_ptr<const Exterior> ext_;
    Word word_;
};

}  // namespace

Backend build_fermion(const Rational& truncation, const std::string& name) {
    if (truncation < Rational(1, 2)) throw Error(ErrorKind::InvalidSpec, "fermion truncation must be at least 1/2");
    auto ext = std::make_shared<Exterior>();
    ext->name = name;
    const int top = static_cast<int>(to_long(floor_of(truncation * 2)));
    std::vector<BasisState> basis;
    for (int t = 0; t <= top; ++t) {
        Word cur;
        std::vector<Word> ws;
        words_of(t, t, cur, ws);
        for (auto& w : ws) {
            ext->index.emplace(w, ext->words.size());
            basis.push_back({label_of(name, w), ExpPair(ratio(t, 2), Rational(0)),
                             w.size() % 2 ? Parity::odd : Parity::even});
            ext->words.push_back(std::move(w));
        }
    }
    auto space = std::make_shared<GradedSpace>(std::move(basis), truncation);

    Backend b;
    b.space = space;
    b.description = "fermion";
    std::shared_ptr<const Exterior> ce = ext;
    b.generators.push_back(std::make_shared<FunctionField>(
        space, name, ExpPair(Rational(1, 2), Rational(0)), Parity::odd, Chirality::holomorphic,
        CosetKey{Rational(0), Rational(0)}, [ce](const ExpPair& mode, std::size_t j) {
            if (mode.nbar != -1) return StateVector();
            Combo out;
            apply_mode(static_cast<int>(2 * to_long(mode.n) + 1), ce->words[j], Rational(1), out);
            return to_vector(*ce, out);
        }));
    // [T, psi_{-r}] = (r + 1/2) psi_{-r-1}
    b.T = std::make_shared<LinearOperator>(space, ExpPair(1, 0), [ce](std::size_t j) {
        const Word& w = ce->words[j];
        Combo out;
        for (std::size_t i = 0; i < w.size(); ++i) {
            // rebuild the word with the i-th mode raised, keeping operator order, then sort with signs
            Combo cur{{Word{}, Rational(1)}};
            for (std::size_t k = w.size(); k-- > 0;) cur = apply_all(-(k == i ? w[k] + 2 : w[k]), cur);
            for (const auto& [q, x] : cur) out[q] += x * ratio(w[i] + 1, 2);
        }
        return to_vector(*ce, out);
    });
    b.Tbar = std::make_shared<LinearOperator>(space, ExpPair(0, 1), [](std::size_t) { return StateVector(); });
    b.native = memoize([space, ce](std::size_t j) -> FieldPtr {
        if (ce->words[j].empty()) return identity_field(space);
        return std::make_shared<FermionVertex>(space, ce, ce->words[j]);
    });
    return b;
}

}  // namespace opea
