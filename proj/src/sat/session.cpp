#include "mlex/sat/session.hpp"

#include <cassert>
#include <ostream>
#include <stdexcept>

namespace mlex::sat {

SolverSession::SolverSession(const Magma& m, std::string_view backend, bool record_clauses)
    : magma_(m), perm_(m.order()), solver_(make_solver(backend)), record_(record_clauses) {
    for (int i = 0; i < perm_.var_count(); ++i) {
        Var v = solver_->new_var();
        assert(v == i + 1);
        (void)v;
    }
    auto fresh = [this]() { return solver_->new_var(); };
    for (auto& clause : build_bijection_constraints(perm_, fresh)) {
        solver_->add_clause(clause);
        if (record_) recorded_permanent_.push_back(std::move(clause));
    }
}

Var SolverSession::fresh_var() { return solver_->new_var(); }

void SolverSession::add_permanent_clause(Clause clause) {
    solver_->add_clause(clause);
    if (record_) recorded_permanent_.push_back(std::move(clause));
}

TrialGuard SolverSession::make_trial(Elem r, Elem c, std::vector<Elem> values) {
    TrialGuard trial{fresh_var(), r, c, std::move(values)};
    if (record_) recorded_trial_.clear();
    for (auto& clause : encode_value_set(perm_, magma_, r, c, trial.values)) {
        clause.push_back(neg(trial.guard));
        solver_->add_clause(clause);
        if (record_) recorded_trial_.push_back(std::move(clause));
    }
    return trial;
}

std::optional<Permutation> SolverSession::solve_assuming(std::span<const Lit> assumptions) {
    if (!solver_->solve(assumptions)) {
        ++unsat_calls_;
        return std::nullopt;
    }
    ++sat_calls_;
    const int n = magma_.order();
    std::vector<Elem> image(n, -1);
    for (Elem i = 0; i < n; ++i) {
        for (Elem j = 0; j < n; ++j) {
            if (solver_->model_value(perm_.var(i, j))) {
                assert(image[i] == -1);
                image[i] = j;
            }
        }
    }
    return Permutation(std::move(image));
}

std::optional<Permutation> SolverSession::solve_with(const TrialGuard& trial) {
    Lit assumption = pos(trial.guard);
    return solve_assuming(std::span<const Lit>(&assumption, 1));
}

std::optional<Permutation> SolverSession::solve() { return solve_assuming({}); }

void SolverSession::commit(const TrialGuard& trial) {
    add_permanent_unit(pos(trial.guard));
    if (record_) {
        for (auto& clause : recorded_trial_) recorded_permanent_.push_back(std::move(clause));
        recorded_trial_.clear();
    }
}

void SolverSession::retire(const TrialGuard& trial) { add_permanent_unit(neg(trial.guard)); }

void SolverSession::add_permanent_assignment(Elem r, Elem c, Elem v) {
    for (auto& clause : encode_assignment(perm_, magma_, r, c, v)) add_permanent_clause(std::move(clause));
}

void SolverSession::add_permanent_unit(Lit l) {
    permanent_units_.push_back(l);
    solver_->add_clause(std::span<const Lit>(&l, 1));
    if (record_) recorded_permanent_.push_back(Clause{l});
}

void SolverSession::dump_dimacs(std::ostream& out) const {
    if (!record_) throw std::logic_error("session was not recording clauses");
    std::vector<Clause> all = recorded_permanent_;
    all.insert(all.end(), recorded_trial_.begin(), recorded_trial_.end());
    write_dimacs(out, solver_->num_vars(), all);
}

}  // namespace mlex::sat
