#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "mlex/magma.hpp"
#include "mlex/sat/encoding.hpp"
#include "mlex/sat/solver.hpp"

namespace mlex::sat {

// One trial query "cell (row,col) takes a value in values", guarded by a
// fresh activation literal so it can be assumed, committed, or retired.
struct TrialGuard {
    Var guard = 0;
    Elem row = 0;
    Elem col = 0;
    std::vector<Elem> values;
};

// Incremental solving context for one canonization run: owns the backend
// solver, the permutation variables, and the activation-literal protocol.
// Permanent clauses are never retracted; every trial clause set is guarded by
// exactly one activation literal.
class SolverSession {
public:
    explicit SolverSession(const Magma& m, std::string_view backend = "cdcl", bool record_clauses = false);

    const PermVarMap& perm_vars() const { return perm_; }
    const Magma& magma() const { return magma_; }

    TrialGuard make_trial(Elem r, Elem c, std::vector<Elem> values);

    // Solve under the guard's activation literal (plus all permanent
    // clauses). Returns the model's permutation on SAT, nullopt on UNSAT.
    std::optional<Permutation> solve_with(const TrialGuard& trial);

    // Solve with no assumptions.
    std::optional<Permutation> solve();

    // Makes the trial's clauses permanent (asserts the guard as a unit).
    void commit(const TrialGuard& trial);

    // Permanently disables the trial's clauses.
    void retire(const TrialGuard& trial);

    // Unguarded permanent commitment of one cell value; used when the value
    // is already known feasible and no solver call is wanted.
    void add_permanent_assignment(Elem r, Elem c, Elem v);

    void add_permanent_unit(Lit l);

    uint64_t sat_calls() const { return sat_calls_; }
    uint64_t unsat_calls() const { return unsat_calls_; }

    // Units added so far (first-row restrictions, invariant fixes, guards).
    const std::vector<Lit>& permanent_units() const { return permanent_units_; }

    // Permanent clause set plus the most recent trial, as DIMACS. Requires
    // record_clauses = true at construction.
    void dump_dimacs(std::ostream& out) const;
    bool recording() const { return record_; }

private:
    Var fresh_var();
    void add_permanent_clause(Clause clause);
    std::optional<Permutation> solve_assuming(std::span<const Lit> assumptions);

    Magma magma_;
    PermVarMap perm_;
    std::unique_ptr<SatSolver> solver_;
    bool record_ = false;
    uint64_t sat_calls_ = 0;
    uint64_t unsat_calls_ = 0;
    std::vector<Lit> permanent_units_;
    std::vector<Clause> recorded_permanent_;
    std::vector<Clause> recorded_trial_;
};

}  // namespace mlex::sat
