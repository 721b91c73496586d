// Free boson Fock space: basis alpha_{-l1} ... alpha_{-lk} vac with l1 >= ... >= lk >= 1.

#include <map>

#include "opea/backends.hpp"

namespace opea {
namespace {

using Partition = std::vector<int>;  // parts in decreasing order

struct Fock {
    Rational level;
    std::string name;
    std::vector<Partition> parts;
    std::map<Partition, std::size_t> index;
};

void partitions_of(int n, int max_part, Partition& cur, std::vector<Partition>& out) {
    if (n == 0) {
        out.push_back(cur);
        return;
    }
    for (int p = std::min(n, max_part); p >= 1; --p) {
        cur.push_back(p);
        partitions_of(n - p, p, cur, out);
        cur.pop_back();
    }
}

std::string label_of(const std::string& name, const Partition& p) {
    if (p.empty()) return "vac";
    std::string s;
    for (std::size_t i = 0; i < p.size();) {
        std::size_t j = i;
        while (j < p.size() && p[j] == p[i]) ++j;
        s += name + "[-" + std::to_string(p[i]) + "]";
        if (j - i > 1) s += "^" + std::to_string(j - i);
        i = j;
    }
    return s;
}

using Combo = std::map<Partition, Rational>;

// alpha_m on a single partition.
void apply_mode(const Fock& f, int m, const Partition& p, const Rational& c, Combo& out) {
    if (m == 0) return;
    if (m < 0) {
        Partition q = p;
        q.insert(std::upper_bound(q.begin(), q.end(), -m, std::greater<int>()), -m);
        out[q] += c;
        return;
    }
    long mult = std::count(p.begin(), p.end(), m);
    if (mult == 0) return;
    Partition q = p;
    q.erase(std::find(q.begin(), q.end(), m));
    out[q] += c * f.level * m * mult;
}

StateVector to_vector(const Fock& f, const Combo& c) {
    StateVector v;
    for (const auto& [p, x] : c) {
        if (sgn(x) == 0) continue;
        auto it = f.index.find(p);
        if (it == f.index.end()) return StateVector::unknown();
        v.add_entry(it->second, x);
    }
    return v;
}

// Y(alpha_{-l1} ... alpha_{-lk} vac) = :prod_i d^{(l_i - 1)} alpha(z): applied to a basis state.
class BosonVertex : public Field {
public:
    BosonVertex(SpacePtr space, std::shared_ptr<const Fock> fock, Partition lambda)
        : Field(std::move(space), label_of(fock->name, lambda), ExpPair(Rational(sum(lambda)), Rational(0)),
                Parity::even, Chirality::holomorphic),
          fock_(std::move(fock)),
          lambda_(std::move(lambda)) {}

    static int sum(const Partition& p) {
        int s = 0;
        for (int x : p) s += x;
        return s;
    }

protected:
    StateVector compute(const ExpPair& mode, std::size_t j) const override {
        if (mode.nbar != -1) return {};
        const long total = to_long(mode.n) + 1 - sum(lambda_);  // sum of the alpha mode indices
        const std::size_t k = lambda_.size();
        Combo result;
        for (unsigned mask = 0; mask < (1u << k); ++mask) {
            // bit set = annihilator (positive mode)
            std::vector<std::size_t> ann, cre;
            for (std::size_t i = 0; i < k; ++i) ((mask >> i) & 1u ? ann : cre).push_back(i);
            Combo start{{fock_->parts[j], Rational(1)}};
            annihilate(ann, 0, start, Rational(1), 0, cre, total, result);
        }
        return to_vector(*fock_, result);
    }

private:
    static Rational factor(int n, int l) { return gen_binom(Rational(-n - 1), static_cast<unsigned long>(l - 1)); }

    void annihilate(const std::vector<std::size_t>& ann, std::size_t pos, const Combo& state, const Rational& coef,
                    long used, const std::vector<std::size_t>& cre, long total, Combo& result) const {
        if (pos == ann.size()) {
            long c = used - total;  // creators carry modes summing to -c
            if (c < static_cast<long>(cre.size())) return;
            if (cre.empty() && c != 0) return;
            std::vector<int> modes(cre.size());
            create(cre, 0, c, modes, state, coef, result);
            return;
        }
        std::set<int> candidates;
        for (const auto& [p, x] : state)
            for (int part : p) candidates.insert(part);
        for (int n : candidates) {
            Combo next;
            for (const auto& [p, x] : state) apply_mode(*fock_, n, p, x, next);
            annihilate(ann, pos + 1, next, coef * factor(n, lambda_[ann[pos]]), used + n, cre, total, result);
        }
    }

    void create(const std::vector<std::size_t>& cre, std::size_t pos, long remaining, std::vector<int>& modes,
                const Combo& state, const Rational& coef, Combo& result) const {
        if (pos == cre.size()) {
            if (remaining != 0) return;
            Combo cur = state;
            Rational c = coef;
            for (std::size_t i = cre.size(); i-- > 0;) {
                Combo next;
                for (const auto& [p, x] : cur) apply_mode(*fock_, -modes[i], p, x, next);
                cur = std::move(next);
                c *= factor(-modes[i], lambda_[cre[i]]);
            }
            for (const auto& [p, x] : cur) result[p] += c * x;
            return;
        }
        long left = static_cast<long>(cre.size() - pos - 1);
        for (long m = 1; m <= remaining - left; ++m) {
            modes[pos] = static_cast<int>(m);
            create(cre, pos + 1, remaining - m, modes, state, coef, result);
        }
    }

    std::shared_ptr<const Fock> fock_;
    Partition lambda_;
};

}  // namespace

Backend build_heisenberg(const Rational& level, const Rational& truncation, const std::string& name) {
    if (sgn(level) == 0) throw Error(ErrorKind::InvalidSpec, "heisenberg level must be nonzero");
    if (truncation < 1) throw Error(ErrorKind::InvalidSpec, "heisenberg truncation must be at least 1");
    auto fock = std::make_shared<Fock>();
    fock->level = level;
    fock->name = name;
    const int top = static_cast<int>(to_long(floor_of(truncation)));
    std::vector<BasisState> basis;
    for (int n = 0; n <= top; ++n) {
        Partition cur;
        std::vector<Partition> ps;
        partitions_of(n, n, cur, ps);
        for (auto& p : ps) {
            fock->index.emplace(p, fock->parts.size());
            basis.push_back({label_of(name, p), ExpPair(n, 0), Parity::even});
            fock->parts.push_back(std::move(p));
        }
    }
    auto space = std::make_shared<GradedSpace>(std::move(basis), truncation);

    Backend b;
    b.space = space;
    b.description = "heisenberg(level=" + to_string(level) + ")";
    std::shared_ptr<const Fock> cf = fock;
    b.generators.push_back(std::make_shared<FunctionField>(
        space, name, ExpPair(1, 0), Parity::even, Chirality::holomorphic, CosetKey{Rational(0), Rational(0)},
        [cf](const ExpPair& mode, std::size_t j) {
            if (mode.nbar != -1) return StateVector();
            Combo out;
            apply_mode(*cf, static_cast<int>(to_long(mode.n)), cf->parts[j], Rational(1), out);
            return to_vector(*cf, out);
        }));
    // [T, alpha_{-m}] = m alpha_{-m-1}, T vac = 0
    b.T = std::make_shared<LinearOperator>(space, ExpPair(1, 0), [cf](std::size_t j) {
        const Partition& p = cf->parts[j];
        Combo out;
        for (std::size_t i = 0; i < p.size(); ++i) {
            Partition q = p;
            q[i] += 1;
            std::sort(q.begin(), q.end(), std::greater<int>());
            out[q] += p[i];
        }
        return to_vector(*cf, out);
    });
    b.Tbar = std::make_shared<LinearOperator>(space, ExpPair(0, 1), [](std::size_t) { return StateVector(); });
    b.native = memoize([space, cf](std::size_t j) -> FieldPtr {
        if (cf->parts[j].empty()) return identity_field(space);
        return std::make_shared<BosonVertex>(space, cf, cf->parts[j]);
    });
    return b;
}

}  // namespace opea
