#include "mlex/engine.hpp"

#include <algorithm>
#include <cassert>
#include <fstream>
#include <stdexcept>

namespace mlex {

std::string to_string(Strategy s) { return s == Strategy::LinearUnsatSat ? "lus" : "bin2"; }

Strategy parse_strategy(std::string_view name) {
    if (name == "lus") return Strategy::LinearUnsatSat;
    if (name == "bin2") return Strategy::ModifiedBinary;
    throw std::invalid_argument("unknown strategy '" + std::string(name) + "' (expected lus or bin2)");
}

// --------------------------------------------------------------------------
// BudgetState

namespace {
int class_slot(RowClass cls) {
    assert(cls != RowClass::All);
    return cls == RowClass::Idempotent ? 0 : 1;
}
}  // namespace

BudgetState::BudgetState(const Magma& m, std::optional<Elem> first_row_preimage, int tighten)
    : magma_(m),
      profile_(occurrence_profile(m, first_row_preimage)),
      first_row_preimage_(first_row_preimage),
      tighten_(tighten),
      row_spent_(m.order(), 0),
      total_spent_(m.order(), 0),
      col_spent_(m.order(), std::vector<int>(m.order(), 0)),
      class_spent_(2, std::vector<int>(m.order(), 0)) {}

ValueClass BudgetState::value_class_of(Elem v) const {
    if (!first_row_preimage_) return ValueClass::All;
    return v == 0 ? ValueClass::FirstRow : ValueClass::Other;
}

bool BudgetState::allows(Elem col, Elem v) const {
    const ValueClass vc = value_class_of(v);
    if (row_spent_[v] >= capped(profile_.row_max(active_, vc))) return false;
    if (col_spent_[col][v] >= capped(profile_.col_max(vc))) return false;
    if (total_spent_[v] >= capped(profile_.total_max(RowClass::All, vc))) return false;
    if (active_ != RowClass::All &&
        class_spent_[class_slot(active_)][v] >= capped(profile_.total_max(active_, vc)))
        return false;
    return true;
}

void BudgetState::on_commit(Elem col, Elem v) {
    ++row_spent_[v];
    ++col_spent_[col][v];
    ++total_spent_[v];
    if (active_ != RowClass::All) ++class_spent_[class_slot(active_)][v];
}

void BudgetState::refine_row_class(RowClass cls) {
    assert(active_ == RowClass::All);
    active_ = cls;
    for (Elem v = 0; v < magma_.order(); ++v) class_spent_[class_slot(cls)][v] += row_spent_[v];
}

void BudgetState::end_row(RowClass cls) {
    if (active_ == RowClass::All)
        for (Elem v = 0; v < magma_.order(); ++v) class_spent_[class_slot(cls)][v] += row_spent_[v];
    std::fill(row_spent_.begin(), row_spent_.end(), 0);
    active_ = RowClass::All;
}

void BudgetState::set_first_row_preimage(Elem k, const PartialTable& committed) {
    assert(committed.current_col() == 0 && "rebuild is only valid between rows");
    first_row_preimage_ = k;
    profile_ = occurrence_profile(magma_, k);
    std::fill(row_spent_.begin(), row_spent_.end(), 0);
    std::fill(total_spent_.begin(), total_spent_.end(), 0);
    for (auto& col : col_spent_) std::fill(col.begin(), col.end(), 0);
    for (auto& cls : class_spent_) std::fill(cls.begin(), cls.end(), 0);
    active_ = RowClass::All;
    const int n = magma_.order();
    for (Elem r = 0; r < committed.current_row(); ++r) {
        const int slot = class_slot(committed.at(r, r) == r ? RowClass::Idempotent : RowClass::NonIdempotent);
        for (Elem c = 0; c < n; ++c) {
            const Elem v = committed.at(r, c);
            ++col_spent_[c][v];
            ++total_spent_[v];
            ++class_spent_[slot][v];
        }
    }
}

// --------------------------------------------------------------------------
// InvariantTracker

InvariantTracker::InvariantTracker(const Magma& m) {
    for (Elem r = 0; r < m.order(); ++r) {
        RowInvariant inv = row_invariant(m, r);
        const uint64_t fp = inv.fingerprint();
        Group* group = nullptr;
        for (auto& g : groups_)
            if (g.fingerprint == fp && g.invariant == inv) {
                group = &g;
                break;
            }
        if (!group) {
            groups_.push_back({std::move(inv), fp, {}, 0, false});
            group = &groups_.back();
        }
        group->rows.push_back(r);
    }
}

InvariantTracker::RowCompletion InvariantTracker::on_row_complete(const std::vector<Elem>& copy_row, Elem r) {
    RowCompletion out;
    RowInvariant inv = row_invariant_of_row(copy_row, r);
    const uint64_t fp = inv.fingerprint();
    for (auto& g : groups_) {
        if (g.fingerprint != fp || !(g.invariant == inv)) continue;
        ++g.seen;
        if (g.rows.size() == 1) out.matched_preimage = g.rows[0];
        if (g.seen == static_cast<int>(g.rows.size()) && !g.exhaustion_emitted) {
            g.exhaustion_emitted = true;
            out.exhausted_rows = g.rows;
        }
        return out;
    }
    // A completed row of a genuine copy always matches some input row; an
    // unmatched invariant means the run has gone wrong (fault injection), and
    // the output comparison downstream will flag it.
    return out;
}

// --------------------------------------------------------------------------
// First-row restriction

std::optional<Elem> apply_first_row_restriction(sat::SolverSession& session, const Magma& m) {
    auto candidates = first_row_candidates(m);
    if (!candidates) return std::nullopt;
    const auto& vars = session.perm_vars();
    for (Elem a = 0; a < m.order(); ++a)
        if (!candidates->contains(a)) session.add_permanent_unit(sat::neg(vars.var(a, 0)));
    if (candidates->size() == 1) return *candidates->begin();
    return std::nullopt;
}

// --------------------------------------------------------------------------
// The gradual-construction loop

namespace {

class EngineRun {
public:
    EngineRun(const Magma& m, const EngineConfig& cfg)
        : m_(m),
          cfg_(cfg),
          n_(m.order()),
          session_(m, cfg.solver, cfg.record_cnf || !cfg.dump_cnf_path.empty()),
          partial_(n_),
          budgets_(m, std::nullopt, cfg.fault == FaultInjection::OvertightBudgets ? 1 : 0),
          deadline_(std::chrono::steady_clock::now() + cfg.timeout),
          started_(std::chrono::steady_clock::now()) {}

    CanonizeResult run() {
        if (cfg_.first_row) {
            auto k = apply_first_row_restriction(session_, m_);
            if (k && cfg_.budgets) budgets_.set_first_row_preimage(*k, partial_);
        }
        if (cfg_.row_invariants) invariants_.emplace(m_);

        for (Elem r = 0; r < n_; ++r) {
            for (Elem c = 0; c < n_; ++c) {
                check_deadline();
                const Elem v = cfg_.strategy == Strategy::LinearUnsatSat ? next_value_linear(r, c)
                                                                         : next_value_binary(r, c);
                partial_.push(v);
                if (cfg_.budgets) {
                    budgets_.on_commit(c, v);
                    if (cfg_.midrow_refinement && c == r)
                        budgets_.refine_row_class(v == r ? RowClass::Idempotent : RowClass::NonIdempotent);
                }
            }
            if (cfg_.budgets)
                budgets_.end_row(partial_.at(r, r) == r ? RowClass::Idempotent : RowClass::NonIdempotent);
            if (cfg_.row_invariants) handle_row_complete(r);
        }

        Magma lexmin(n_, partial_.cells());
        finalize_stats();
        if (!have_model_) throw std::logic_error("finished without any satisfying model");
        assert(apply_permutation(m_, best_perm_) == lexmin);
        write_dump();
        return {std::move(lexmin), best_perm_, stats_};
    }

private:
    void check_deadline() {
        if (std::chrono::steady_clock::now() <= deadline_) return;
        finalize_stats();
        write_dump();
        throw TimeoutError(partial_, stats_);
    }

    void finalize_stats() {
        stats_.sat_calls = session_.sat_calls();
        stats_.unsat_calls = session_.unsat_calls();
        stats_.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - started_)
                             .count();
    }

    void write_dump() {
        if (cfg_.dump_cnf_path.empty()) return;
        std::ofstream out(cfg_.dump_cnf_path);
        session_.dump_dimacs(out);
    }

    // Keep the lexicographically smallest copy seen; it always agrees with
    // the committed prefix. Returns the copy's value at (r,c).
    Elem offer_model(const Permutation& f, Elem r, Elem c) {
        Magma copy = apply_permutation(m_, f);
        const Elem value = copy.at(r, c);
        if (!have_model_ || lex_compare(copy, best_copy_) == Ordering::Less) {
            best_copy_ = std::move(copy);
            best_perm_ = f;
            have_model_ = true;
        }
        return value;
    }

    // Single-value trial; commits it on success.
    bool probe_commit(Elem r, Elem c, Elem v) {
        auto trial = session_.make_trial(r, c, {v});
        auto model = session_.solve_with(trial);
        if (!model) {
            session_.retire(trial);
            return false;
        }
        offer_model(*model, r, c);
        session_.commit(trial);
        return true;
    }

    // Value-set trial; never committed. Returns the model's value at (r,c).
    std::optional<Elem> probe_set(Elem r, Elem c, std::vector<Elem> values) {
        auto trial = session_.make_trial(r, c, std::move(values));
        auto model = session_.solve_with(trial);
        session_.retire(trial);
        if (!model) return std::nullopt;
        return offer_model(*model, r, c);
    }

    // The bound is the first value we already know achievable at (r,c);
    // n_ encodes "none".
    Elem cell_bound(Elem r, Elem c) const {
        if (cfg_.witness_upper_bound && have_model_) return best_copy_.at(r, c);
        return n_;
    }

    void commit_at_bound(Elem r, Elem c, Elem v) {
        session_.add_permanent_assignment(r, c, v);
        ++stats_.witness_skips;
    }

    Elem next_value_linear(Elem r, Elem c) {
        const Elem bound = cell_bound(r, c);
        for (Elem v = 0; v < bound; ++v) {
            if (cfg_.budgets && !budgets_.allows(c, v)) {
                ++stats_.budget_skips;
                continue;
            }
            check_deadline();
            if (probe_commit(r, c, v)) return v;
        }
        if (bound == n_) throw std::logic_error("no feasible value for cell");
        commit_at_bound(r, c, bound);
        return bound;
    }

    Elem next_value_binary(Elem r, Elem c) {
        Elem bound = cell_bound(r, c);
        bool have_bound = bound < n_;
        std::vector<Elem> cands;
        for (Elem v = 0; v < (have_bound ? bound : n_); ++v) {
            if (cfg_.budgets && !budgets_.allows(c, v)) {
                ++stats_.budget_skips;
                continue;
            }
            cands.push_back(v);
        }
        for (;;) {
            if (cands.empty()) {
                if (!have_bound) throw std::logic_error("no feasible value for cell");
                commit_at_bound(r, c, bound);
                return bound;
            }
            check_deadline();
            // Probe whether the optimum is already at hand.
            const Elem lo = cands.front();
            if (probe_commit(r, c, lo)) return lo;
            cands.erase(cands.begin());
            if (cands.empty()) continue;
            // Halve on the filtered candidate list's index space.
            const size_t mid = (cands.size() - 1) / 2;
            std::vector<Elem> lower(cands.begin(), cands.begin() + static_cast<long>(mid) + 1);
            check_deadline();
            auto model_value = probe_set(r, c, std::move(lower));
            if (model_value) {
                bound = *model_value;
                have_bound = true;
                auto cut = std::lower_bound(cands.begin(), cands.end(), bound);
                cands.erase(cut, cands.end());
            } else {
                cands.erase(cands.begin(), cands.begin() + static_cast<long>(mid) + 1);
            }
        }
    }

    void handle_row_complete(Elem r) {
        std::vector<Elem> row(n_);
        for (Elem c = 0; c < n_; ++c) row[c] = partial_.at(r, c);
        auto completion = invariants_->on_row_complete(row, r);
        const auto& vars = session_.perm_vars();
        if (completion.matched_preimage) {
            session_.add_permanent_unit(sat::pos(vars.var(*completion.matched_preimage, r)));
            ++stats_.invariant_row_fixes;
            if (r == 0 && cfg_.budgets && !budgets_.first_row_preimage())
                budgets_.set_first_row_preimage(*completion.matched_preimage, partial_);
        }
        if (!completion.exhausted_rows.empty() && r + 1 < n_) {
            for (Elem j : completion.exhausted_rows)
                for (Elem later = r + 1; later < n_; ++later)
                    session_.add_permanent_unit(sat::neg(vars.var(j, later)));
            stats_.invariant_exclusions += completion.exhausted_rows.size();
        }
    }

    const Magma& m_;
    const EngineConfig& cfg_;
    int n_;
    sat::SolverSession session_;
    PartialTable partial_;
    BudgetState budgets_;
    std::optional<InvariantTracker> invariants_;
    RunStats stats_;
    bool have_model_ = false;
    Permutation best_perm_;
    Magma best_copy_;
    std::chrono::steady_clock::time_point deadline_;
    std::chrono::steady_clock::time_point started_;
};

}  // namespace

CanonizeResult canonize(const Magma& m, const EngineConfig& cfg) {
    EngineRun run(m, cfg);
    return run.run();
}

}  // namespace mlex
