#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mlex/sat/solver.hpp"

namespace mlex::sat {

namespace {

// Plain DPLL with unit propagation and chronological backtracking. No clause
// learning, no heuristics beyond first-unassigned-variable ordering. Meant as
// the alternate, easily auditable backend; practical at small orders only.
class DpllSolver final : public SatSolver {
public:
    Var new_var() override { return ++num_vars_; }
    int num_vars() const override { return num_vars_; }

    void add_clause(std::span<const Lit> lits) override {
        std::vector<int> cl;
        cl.reserve(lits.size());
        for (const Lit& l : lits) {
            if (l.var < 1 || l.var > num_vars_) throw std::invalid_argument("literal references unknown variable");
            cl.push_back(l.to_dimacs());
        }
        std::sort(cl.begin(), cl.end(), [](int a, int b) { return std::abs(a) != std::abs(b) ? std::abs(a) < std::abs(b) : a < b; });
        cl.erase(std::unique(cl.begin(), cl.end()), cl.end());
        for (size_t i = 0; i + 1 < cl.size(); ++i)
            if (cl[i] == -cl[i + 1]) return;  // tautology
        if (cl.empty()) contradiction_ = true;
        clauses_.push_back(std::move(cl));
    }

    bool solve(std::span<const Lit> assumptions) override {
        model_.clear();
        if (contradiction_) return false;
        assigns_.assign(num_vars_ + 1, 0);  // 0 unknown, +1 true, -1 false
        trail_.clear();
        for (const Lit& l : assumptions)
            if (!enqueue(l.to_dimacs())) return false;
        if (!propagate()) return false;
        if (!search()) return false;
        model_.assign(assigns_.begin(), assigns_.end());
        return true;
    }

    bool model_value(Var v) const override {
        if (model_.empty() || v < 1 || v > num_vars_) throw std::logic_error("no model value for variable");
        return model_[v] > 0;
    }

private:
    bool value_true(int lit) const { return assigns_[std::abs(lit)] == (lit > 0 ? 1 : -1); }
    bool value_false(int lit) const { return assigns_[std::abs(lit)] == (lit > 0 ? -1 : 1); }
    bool unassigned(int lit) const { return assigns_[std::abs(lit)] == 0; }

    bool enqueue(int lit) {
        if (value_false(lit)) return false;
        if (value_true(lit)) return true;
        assigns_[std::abs(lit)] = lit > 0 ? 1 : -1;
        trail_.push_back(lit);
        return true;
    }

    // Scan-to-fixpoint unit propagation.
    bool propagate() {
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& cl : clauses_) {
                int unassigned_lit = 0;
                int free_count = 0;
                bool satisfied = false;
                for (int lit : cl) {
                    if (value_true(lit)) {
                        satisfied = true;
                        break;
                    }
                    if (unassigned(lit)) {
                        ++free_count;
                        unassigned_lit = lit;
                        if (free_count > 1) break;
                    }
                }
                if (satisfied || free_count > 1) continue;
                if (free_count == 0) return false;
                enqueue(unassigned_lit);
                changed = true;
            }
        }
        return true;
    }

    bool search() {
        int v = 1;
        while (v <= num_vars_ && assigns_[v] != 0) ++v;
        if (v > num_vars_) return true;
        for (int lit : {-v, v}) {
            size_t mark = trail_.size();
            enqueue(lit);
            if (propagate() && search()) return true;
            while (trail_.size() > mark) {
                assigns_[std::abs(trail_.back())] = 0;
                trail_.pop_back();
            }
        }
        return false;
    }

    int num_vars_ = 0;
    bool contradiction_ = false;
    std::vector<std::vector<int>> clauses_;
    std::vector<int8_t> assigns_;
    std::vector<int> trail_;
    std::vector<int8_t> model_;
};

}  // namespace

std::unique_ptr<SatSolver> make_dpll_solver() { return std::make_unique<DpllSolver>(); }

std::unique_ptr<SatSolver> make_cdcl_solver();

std::vector<std::string> solver_backends() { return {"cdcl", "dpll"}; }

std::unique_ptr<SatSolver> make_solver(std::string_view backend) {
    if (backend == "cdcl" || backend.empty()) return make_cdcl_solver();
    if (backend == "dpll") return make_dpll_solver();
    throw std::invalid_argument("unknown solver backend '" + std::string(backend) + "'");
}

}  // namespace mlex::sat
