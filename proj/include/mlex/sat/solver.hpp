#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mlex/sat/literal.hpp"

namespace mlex::sat {

// Minimal incremental solver contract: add clauses, solve under assumptions,
// read the model back. Backends are interchangeable black boxes.
class SatSolver {
public:
    virtual ~SatSolver() = default;

    virtual Var new_var() = 0;
    virtual int num_vars() const = 0;

    // Clauses are permanent for the solver's lifetime.
    virtual void add_clause(std::span<const Lit> lits) = 0;
    void add_clause(std::initializer_list<Lit> lits) { add_clause(std::span<const Lit>(lits.begin(), lits.size())); }

    // True = satisfiable; the model is readable until the next add/solve.
    virtual bool solve(std::span<const Lit> assumptions) = 0;
    bool solve() { return solve({}); }

    virtual bool model_value(Var v) const = 0;
};

// Registered backend ids, default first.
std::vector<std::string> solver_backends();

// Throws std::invalid_argument for an unknown id.
std::unique_ptr<SatSolver> make_solver(std::string_view backend);

}  // namespace mlex::sat
