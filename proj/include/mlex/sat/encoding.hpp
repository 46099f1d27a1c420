#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "mlex/magma.hpp"
#include "mlex/sat/literal.hpp"

namespace mlex::sat {

// Dense map of the permutation variables x_{i->j} ("f(i) = j") for a domain
// of the given order. Ids are contiguous: x_{i->j} = i*n + j + 1 (0-based i,j),
// occupying 1..n^2. Auxiliary variables go after n^2.
class PermVarMap {
public:
    explicit PermVarMap(int order) : order_(order) {}

    int order() const { return order_; }
    Var var(Elem i, Elem j) const { return i * order_ + j + 1; }
    int var_count() const { return order_ * order_; }

    // Inverse lookup for model decoding; id must be in 1..n^2.
    std::pair<Elem, Elem> decode(Var v) const { return {(v - 1) / order_, (v - 1) % order_}; }

private:
    int order_;
};

// Past this order, exactly-one constraints switch from pairwise to the
// sequential (ladder) encoding with auxiliary variables.
inline constexpr int kPairwiseExactlyOneLimit = 32;

// Allocates fresh auxiliary variables on demand.
using VarAllocator = std::function<Var()>;

// Exactly-one constraints making the x_{i->j} matrix a permutation: one per
// row and one per column of the variable matrix.
std::vector<Clause> build_bijection_constraints(const PermVarMap& map, const VarAllocator& fresh_aux);

// Clauses for "the copy's cell (r,c) takes a value in V":
//   (x_{i->r} & x_{j->c}) => OR_{v in V} x_{(i*j)->v}   for all i,j.
// Tautologous clauses are dropped and duplicates (after literal-set
// canonicalization) are emitted once.
std::vector<Clause> encode_value_set(const PermVarMap& map, const Magma& m, Elem r, Elem c,
                                     std::span<const Elem> values);

// Single-value special case: the copy's cell (r,c) equals v.
std::vector<Clause> encode_assignment(const PermVarMap& map, const Magma& m, Elem r, Elem c, Elem v);

// Reference encoding with explicit cell variables t_{i,j,v} ("i<>j = v",
// 1-hot). Test-only path; Theta(n^5) clauses. Throws for order > 8.
struct ExplicitEncoding {
    PermVarMap perm{0};
    int var_count = 0;
    std::vector<Clause> clauses;
    Var cell_var(Elem i, Elem j, Elem v) const;
    int order = 0;
};
ExplicitEncoding build_explicit_encoding(const Magma& m);

// Standard DIMACS CNF ("p cnf V C" followed by zero-terminated clauses).
void write_dimacs(std::ostream& out, int var_count, std::span<const Clause> clauses);

}  // namespace mlex::sat
