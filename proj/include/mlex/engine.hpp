#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlex/magma.hpp"
#include "mlex/sat/session.hpp"

namespace mlex {

enum class Strategy { LinearUnsatSat, ModifiedBinary };

std::string to_string(Strategy s);
Strategy parse_strategy(std::string_view name);  // "lus" | "bin2"

// Test hook for the oracle-check mutation canary; never exposed as a
// documented CLI option. OvertightBudgets makes every budget maximum one too
// small, which provokes wrong skips.
enum class FaultInjection { None, OvertightBudgets };

struct EngineConfig {
    Strategy strategy = Strategy::ModifiedBinary;
    bool first_row = true;           // candidate restriction for row 1
    bool budgets = true;             // occurrence budgets
    bool row_invariants = true;      // row fixing/exclusion on completion
    bool midrow_refinement = true;   // budget class switch at the diagonal
    bool witness_upper_bound = true; // cross-cell bound from SAT models
    std::string solver = "cdcl";
    std::chrono::milliseconds timeout{std::chrono::minutes{30}};
    bool record_cnf = false;         // keep clauses for a DIMACS dump
    std::string dump_cnf_path;       // written after the run when non-empty
    FaultInjection fault = FaultInjection::None;

    // bit0 first_row .. bit4 witness_upper_bound; 31 = everything on
    int toggle_mask() const {
        return (first_row ? 1 : 0) | (budgets ? 2 : 0) | (row_invariants ? 4 : 0) |
               (midrow_refinement ? 8 : 0) | (witness_upper_bound ? 16 : 0);
    }
    static EngineConfig from_toggle_mask(int mask, Strategy s = Strategy::ModifiedBinary) {
        EngineConfig cfg;
        cfg.strategy = s;
        cfg.first_row = mask & 1;
        cfg.budgets = mask & 2;
        cfg.row_invariants = mask & 4;
        cfg.midrow_refinement = mask & 8;
        cfg.witness_upper_bound = mask & 16;
        return cfg;
    }
};

struct RunStats {
    uint64_t sat_calls = 0;
    uint64_t unsat_calls = 0;
    uint64_t budget_skips = 0;            // trials suppressed by a zero budget
    uint64_t witness_skips = 0;           // commits taken from a bound, no call
    uint64_t invariant_row_fixes = 0;     // unit f(r')=r additions
    uint64_t invariant_exclusions = 0;    // rows barred from later images
    int64_t wall_ms = 0;

    uint64_t solver_calls() const { return sat_calls + unsat_calls; }
};

// Committed cells of the copy under construction, contiguous in row-major
// order.
class PartialTable {
public:
    explicit PartialTable(int n) : n_(n) { cells_.reserve(static_cast<size_t>(n) * n); }

    int order() const { return n_; }
    int committed() const { return static_cast<int>(cells_.size()); }
    bool complete() const { return committed() == n_ * n_; }
    Elem current_row() const { return committed() / n_; }
    Elem current_col() const { return committed() % n_; }
    Elem at(Elem r, Elem c) const { return cells_[static_cast<size_t>(r) * n_ + c]; }
    const std::vector<Elem>& cells() const { return cells_; }
    void push(Elem v) { cells_.push_back(v); }

private:
    int n_;
    std::vector<Elem> cells_;
};

// Remaining-occurrence accounting for the row in progress, the columns, and
// the table, per row class and value class. All maxima come from the input
// table's occurrence profile, so a zero remainder proves the trial
// unsatisfiable.
class BudgetState {
public:
    BudgetState(const Magma& m, std::optional<Elem> first_row_preimage, int tighten = 0);

    // Learn the pre-image of row 1 later (unique invariant match of the
    // completed first row): profiles are rebuilt and all committed rows are
    // replayed. Only valid between rows.
    void set_first_row_preimage(Elem k, const PartialTable& committed);

    bool allows(Elem col, Elem v) const;
    void on_commit(Elem col, Elem v);
    void refine_row_class(RowClass cls);
    void end_row(RowClass cls);

    RowClass active_row_class() const { return active_; }
    std::optional<Elem> first_row_preimage() const { return first_row_preimage_; }

private:
    ValueClass value_class_of(Elem v) const;
    int capped(int max) const { return max > tighten_ ? max - tighten_ : 0; }

    Magma magma_;
    OccurrenceProfile profile_;
    std::optional<Elem> first_row_preimage_;
    int tighten_ = 0;
    RowClass active_ = RowClass::All;
    std::vector<int> row_spent_;
    std::vector<int> total_spent_;
    std::vector<std::vector<int>> col_spent_;    // [col][value]
    std::vector<std::vector<int>> class_spent_;  // [Idempotent|NonIdempotent][value]
};

// Matches completed copy rows against input-row invariants: a unique carrier
// pins f(r') = r; an exhausted invariant bars its carriers from later rows.
class InvariantTracker {
public:
    explicit InvariantTracker(const Magma& m);

    struct RowCompletion {
        std::optional<Elem> matched_preimage;
        std::vector<Elem> exhausted_rows;  // exclude from all rows after r
    };
    RowCompletion on_row_complete(const std::vector<Elem>& copy_row, Elem r);

private:
    struct Group {
        RowInvariant invariant;
        uint64_t fingerprint;
        std::vector<Elem> rows;
        int seen = 0;
        bool exhaustion_emitted = false;
    };
    std::vector<Group> groups_;
};

// Adds the unit clauses restricting which input rows may map to row 1.
// Returns the unique pre-image when there is exactly one candidate.
std::optional<Elem> apply_first_row_restriction(sat::SolverSession& session, const Magma& m);

struct CanonizeResult {
    Magma lexmin;
    Permutation witness;  // apply_permutation(input, witness) == lexmin
    RunStats stats;
};

class TimeoutError : public std::runtime_error {
public:
    TimeoutError(PartialTable partial, RunStats stats)
        : std::runtime_error("canonization timed out"), partial_(std::move(partial)), stats_(stats) {}
    const PartialTable& partial() const { return partial_; }
    const RunStats& stats() const { return stats_; }

private:
    PartialTable partial_;
    RunStats stats_;
};

// The lexicographically smallest isomorphic copy of m, built cell by cell.
// The table is unique; the witness is one valid isomorphism onto it. Toggles
// in cfg change cost, never the table.
CanonizeResult canonize(const Magma& m, const EngineConfig& cfg = {});

}  // namespace mlex
