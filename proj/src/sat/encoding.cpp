#include "mlex/sat/encoding.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

namespace mlex::sat {

namespace {

void exactly_one(std::vector<Clause>& out, const std::vector<Var>& vars, const VarAllocator& fresh_aux) {
    Clause at_least;
    at_least.reserve(vars.size());
    for (Var v : vars) at_least.push_back(pos(v));
    out.push_back(std::move(at_least));

    const int n = static_cast<int>(vars.size());
    if (n <= kPairwiseExactlyOneLimit) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) out.push_back({neg(vars[i]), neg(vars[j])});
        return;
    }
    // Sequential (ladder) at-most-one: s_i = "one of vars[0..i] is set".
    std::vector<Var> s(n - 1);
    for (auto& v : s) v = fresh_aux();
    out.push_back({neg(vars[0]), pos(s[0])});
    for (int i = 1; i < n - 1; ++i) {
        out.push_back({neg(vars[i]), pos(s[i])});
        out.push_back({neg(s[i - 1]), pos(s[i])});
        out.push_back({neg(vars[i]), neg(s[i - 1])});
    }
    out.push_back({neg(vars[n - 1]), neg(s[n - 2])});
}

// Canonical key of a clause: sorted DIMACS literals. Returns empty for
// tautologies (both polarities of one variable present).
std::vector<int> canonical_key(const Clause& clause) {
    std::vector<int> key;
    key.reserve(clause.size());
    for (const Lit& l : clause) key.push_back(l.to_dimacs());
    std::sort(key.begin(), key.end(), [](int a, int b) {
        return std::abs(a) != std::abs(b) ? std::abs(a) < std::abs(b) : a < b;
    });
    key.erase(std::unique(key.begin(), key.end()), key.end());
    for (size_t i = 0; i + 1 < key.size(); ++i)
        if (key[i] == -key[i + 1]) return {};
    return key;
}

struct KeyHash {
    size_t operator()(const std::vector<int>& key) const {
        uint64_t h = 1469598103934665603ull;
        for (int v : key) {
            h ^= static_cast<uint64_t>(static_cast<uint32_t>(v));
            h *= 1099511628211ull;
        }
        return static_cast<size_t>(h);
    }
};

}  // namespace

std::vector<Clause> build_bijection_constraints(const PermVarMap& map, const VarAllocator& fresh_aux) {
    std::vector<Clause> out;
    const int n = map.order();
    std::vector<Var> group(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) group[j] = map.var(i, j);
        exactly_one(out, group, fresh_aux);  // f(i) has exactly one image
    }
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) group[i] = map.var(i, j);
        exactly_one(out, group, fresh_aux);  // j has exactly one pre-image
    }
    return out;
}

std::vector<Clause> encode_value_set(const PermVarMap& map, const Magma& m, Elem r, Elem c,
                                     std::span<const Elem> values) {
    if (values.empty()) throw std::invalid_argument("value set must be nonempty");
    const int n = m.order();
    std::vector<Clause> out;
    out.reserve(static_cast<size_t>(n) * n);
    std::unordered_set<std::vector<int>, KeyHash> seen;
    seen.reserve(static_cast<size_t>(n) * n * 2);
    for (Elem i = 0; i < n; ++i) {
        for (Elem j = 0; j < n; ++j) {
            Clause clause{neg(map.var(i, r)), neg(map.var(j, c))};
            const Elem product = m.at(i, j);
            for (Elem v : values) clause.push_back(pos(map.var(product, v)));
            auto key = canonical_key(clause);
            if (key.empty()) continue;  // tautologous
            if (!seen.insert(key).second) continue;
            // Emit the canonical form so duplicate literals collapse.
            Clause canonical;
            canonical.reserve(key.size());
            for (int d : key) canonical.push_back(Lit::from_dimacs(d));
            out.push_back(std::move(canonical));
        }
    }
    return out;
}

std::vector<Clause> encode_assignment(const PermVarMap& map, const Magma& m, Elem r, Elem c, Elem v) {
    return encode_value_set(map, m, r, c, std::span<const Elem>(&v, 1));
}

Var ExplicitEncoding::cell_var(Elem i, Elem j, Elem v) const {
    return order * order + (i * order + j) * order + v + 1;
}

ExplicitEncoding build_explicit_encoding(const Magma& m) {
    const int n = m.order();
    if (n > 8) throw std::invalid_argument("explicit encoding is a reference path limited to order 8");
    ExplicitEncoding enc;
    enc.order = n;
    enc.perm = PermVarMap(n);
    enc.var_count = n * n + n * n * n;

    auto fail_aux = []() -> Var { throw std::logic_error("explicit encoding allocates no auxiliaries"); };
    enc.clauses = build_bijection_constraints(enc.perm, fail_aux);

    std::unordered_set<std::vector<int>, KeyHash> seen;
    // (x_{r->r'} & x_{c->c'} & x_{(r*c)->v'}) => t_{r',c',v'}
    for (Elem r = 0; r < n; ++r) {
        for (Elem c = 0; c < n; ++c) {
            const Elem product = m.at(r, c);
            for (Elem rp = 0; rp < n; ++rp)
                for (Elem cp = 0; cp < n; ++cp)
                    for (Elem vp = 0; vp < n; ++vp) {
                        Clause clause{neg(enc.perm.var(r, rp)), neg(enc.perm.var(c, cp)),
                                      neg(enc.perm.var(product, vp)), pos(enc.cell_var(rp, cp, vp))};
                        auto key = canonical_key(clause);
                        if (key.empty() || !seen.insert(key).second) continue;
                        Clause canonical;
                        canonical.reserve(key.size());
                        for (int d : key) canonical.push_back(Lit::from_dimacs(d));
                        enc.clauses.push_back(std::move(canonical));
                    }
        }
    }
    // 1-hot cell values.
    std::vector<Var> group(n);
    for (Elem i = 0; i < n; ++i)
        for (Elem j = 0; j < n; ++j) {
            for (Elem v = 0; v < n; ++v) group[v] = enc.cell_var(i, j, v);
            exactly_one(enc.clauses, group, fail_aux);
        }
    return enc;
}

void write_dimacs(std::ostream& out, int var_count, std::span<const Clause> clauses) {
    out << "p cnf " << var_count << " " << clauses.size() << "\n";
    for (const Clause& clause : clauses) {
        for (const Lit& l : clause) out << l.to_dimacs() << " ";
        out << "0\n";
    }
}

}  // namespace mlex::sat
