#pragma once

#include <cstdint>
#include <cstdlib>
#include <vector>

namespace mlex::sat {

// Variables are positive integers, DIMACS style.
using Var = int;

struct Lit {
    Var var = 0;
    bool neg = false;

    friend Lit operator~(Lit l) { return {l.var, !l.neg}; }
    bool operator==(const Lit&) const = default;

    int to_dimacs() const { return neg ? -var : var; }
    static Lit from_dimacs(int d) { return {std::abs(d), d < 0}; }
};

inline Lit pos(Var v) { return {v, false}; }
inline Lit neg(Var v) { return {v, true}; }

using Clause = std::vector<Lit>;

}  // namespace mlex::sat
