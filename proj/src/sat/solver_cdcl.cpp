#include <algorithm>
#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mlex/sat/solver.hpp"

namespace mlex::sat {

namespace {

// Internal literal encoding: variable index v (0-based) -> 2v (positive) or
// 2v+1 (negated).
using ILit = int32_t;
inline ILit make_ilit(int v, bool neg) { return (v << 1) | (neg ? 1 : 0); }
inline int ivar(ILit l) { return l >> 1; }
inline ILit inegate(ILit l) { return l ^ 1; }

using CRef = uint32_t;
constexpr CRef kCRefUndef = UINT32_MAX;

enum : int8_t { kFalse = 0, kTrue = 1, kUndef = -1 };

// Clause layout in the arena: [header][activity?][lit0 lit1 ...]
// header = size<<2 | learnt<<1 | deleted. Learnt clauses carry one activity
// word (float bits) between header and literals.
class Arena {
public:
    CRef alloc(const std::vector<ILit>& lits, bool learnt) {
        CRef ref = static_cast<CRef>(data_.size());
        data_.push_back(static_cast<uint32_t>(lits.size()) << 2 | (learnt ? 2u : 0u));
        if (learnt) data_.push_back(0);
        for (ILit l : lits) data_.push_back(static_cast<uint32_t>(l));
        return ref;
    }
    int size(CRef c) const { return static_cast<int>(data_[c] >> 2); }
    bool learnt(CRef c) const { return data_[c] & 2u; }
    bool deleted(CRef c) const { return data_[c] & 1u; }
    void mark_deleted(CRef c) { data_[c] |= 1u; }
    ILit* lits(CRef c) { return reinterpret_cast<ILit*>(&data_[c + 1 + (learnt(c) ? 1 : 0)]); }
    const ILit* lits(CRef c) const { return reinterpret_cast<const ILit*>(&data_[c + 1 + (learnt(c) ? 1 : 0)]); }
    float& activity(CRef c) { return reinterpret_cast<float&>(data_[c + 1]); }
    void shrink(CRef c, int new_size) {
        data_[c] = static_cast<uint32_t>(new_size) << 2 | (data_[c] & 3u);
    }
    size_t footprint(CRef c) const { return 1 + (learnt(c) ? 1 : 0) + static_cast<size_t>(size(c)); }
    std::vector<uint32_t> data_;
};

struct Watcher {
    CRef cref;
    ILit blocker;
};

class CdclSolver final : public SatSolver {
public:
    Var new_var() override {
        assigns_.push_back(kUndef);
        level_.push_back(0);
        reason_.push_back(kCRefUndef);
        activity_.push_back(0.0);
        phase_.push_back(1);  // default polarity: false
        seen_.push_back(0);
        heap_pos_.push_back(-1);
        watches_.emplace_back();
        watches_.emplace_back();
        int v = num_vars_++;
        heap_insert(v);
        return v + 1;
    }

    int num_vars() const override { return num_vars_; }

    void add_clause(std::span<const Lit> lits) override {
        if (!ok_) return;
        assert(decision_level() == 0);
        tmp_clause_.clear();
        for (const Lit& l : lits) {
            if (l.var < 1 || l.var > num_vars_) throw std::invalid_argument("literal references unknown variable");
            tmp_clause_.push_back(make_ilit(l.var - 1, l.neg));
        }
        std::sort(tmp_clause_.begin(), tmp_clause_.end());
        tmp_clause_.erase(std::unique(tmp_clause_.begin(), tmp_clause_.end()), tmp_clause_.end());
        // Drop tautologies and literals already false at the root level.
        std::vector<ILit> cl;
        for (size_t i = 0; i < tmp_clause_.size(); ++i) {
            ILit l = tmp_clause_[i];
            if (i + 1 < tmp_clause_.size() && tmp_clause_[i + 1] == inegate(l)) return;  // p and ~p adjacent
            int8_t v = lit_value(l);
            if (v == kTrue) return;  // satisfied at root
            if (v == kUndef) cl.push_back(l);
        }
        if (cl.empty()) {
            ok_ = false;
            return;
        }
        if (cl.size() == 1) {
            unchecked_enqueue(cl[0], kCRefUndef);
            if (propagate() != kCRefUndef) ok_ = false;
            return;
        }
        CRef ref = arena_.alloc(cl, false);
        clauses_.push_back(ref);
        attach(ref);
    }

    bool solve(std::span<const Lit> assumptions) override {
        model_.clear();
        if (!ok_) return false;
        cancel_until(0);
        if (propagate() != kCRefUndef) {
            ok_ = false;
            return false;
        }
        if (static_cast<int>(trail_.size()) > last_simplify_trail_ + 32) simplify();
        if (!ok_) return false;

        assumptions_.clear();
        for (const Lit& l : assumptions) {
            if (l.var < 1 || l.var > num_vars_) throw std::invalid_argument("assumption references unknown variable");
            assumptions_.push_back(make_ilit(l.var - 1, l.neg));
        }

        int restarts = 0;
        int64_t conflict_budget = luby(restarts) * kRestartBase;
        int64_t conflicts = 0;
        std::vector<ILit> learnt;
        for (;;) {
            CRef confl = propagate();
            if (confl != kCRefUndef) {
                if (decision_level() == 0) {
                    ok_ = false;
                    return false;
                }
                ++conflicts;
                int bt_level;
                analyze(confl, learnt, bt_level);
                cancel_until(bt_level);
                if (learnt.size() == 1) {
                    unchecked_enqueue(learnt[0], kCRefUndef);
                } else {
                    CRef ref = arena_.alloc(learnt, true);
                    learnts_.push_back(ref);
                    arena_.activity(ref) = static_cast<float>(cla_inc_);
                    attach(ref);
                    unchecked_enqueue(learnt[0], ref);
                }
                var_inc_ /= kVarDecay;
                cla_inc_ /= kClaDecay;
                if (var_inc_ > 1e100) rescale_var_activity();
                if (cla_inc_ > 1e20) rescale_cla_activity();
                continue;
            }

            if (conflicts >= conflict_budget) {
                ++restarts;
                conflict_budget = conflicts + luby(restarts) * kRestartBase;
                cancel_until(0);
                continue;
            }
            if (static_cast<int64_t>(learnts_.size()) - static_cast<int64_t>(trail_.size()) >= max_learnts_)
                reduce_db();

            // Assumptions act as forced first decisions.
            bool enqueued = false;
            while (decision_level() < static_cast<int>(assumptions_.size())) {
                ILit a = assumptions_[decision_level()];
                int8_t v = lit_value(a);
                if (v == kTrue) {
                    trail_lim_.push_back(static_cast<int>(trail_.size()));  // dummy level
                } else if (v == kFalse) {
                    return false;  // no copy consistent with the guard
                } else {
                    trail_lim_.push_back(static_cast<int>(trail_.size()));
                    unchecked_enqueue(a, kCRefUndef);
                    enqueued = true;
                    break;
                }
            }
            if (enqueued) continue;

            int next = pick_branch_var();
            if (next == -1) {
                model_.assign(assigns_.begin(), assigns_.end());
                return true;
            }
            trail_lim_.push_back(static_cast<int>(trail_.size()));
            unchecked_enqueue(make_ilit(next, phase_[next]), kCRefUndef);
        }
    }

    bool model_value(Var v) const override {
        if (v < 1 || v > static_cast<Var>(model_.size())) throw std::logic_error("no model value for variable");
        return model_[v - 1] == kTrue;
    }

private:
    static constexpr double kVarDecay = 0.95;
    static constexpr double kClaDecay = 0.999;
    static constexpr int kRestartBase = 100;

    int decision_level() const { return static_cast<int>(trail_lim_.size()); }

    int8_t var_value(int v) const { return assigns_[v]; }
    int8_t lit_value(ILit l) const {
        int8_t v = assigns_[ivar(l)];
        if (v == kUndef) return kUndef;
        return static_cast<int8_t>(v ^ (l & 1));
    }

    void unchecked_enqueue(ILit l, CRef from) {
        int v = ivar(l);
        assert(assigns_[v] == kUndef);
        assigns_[v] = static_cast<int8_t>(1 ^ (l & 1));
        level_[v] = decision_level();
        reason_[v] = from;
        trail_.push_back(l);
    }

    void attach(CRef ref) {
        const ILit* c = arena_.lits(ref);
        watches_[inegate(c[0])].push_back({ref, c[1]});
        watches_[inegate(c[1])].push_back({ref, c[0]});
    }

    void detach(CRef ref) {
        const ILit* c = arena_.lits(ref);
        remove_watch(watches_[inegate(c[0])], ref);
        remove_watch(watches_[inegate(c[1])], ref);
    }

    static void remove_watch(std::vector<Watcher>& ws, CRef ref) {
        for (size_t i = 0; i < ws.size(); ++i) {
            if (ws[i].cref == ref) {
                ws[i] = ws.back();
                ws.pop_back();
                return;
            }
        }
        assert(false && "watcher not found");
    }

    CRef propagate() {
        while (qhead_ < trail_.size()) {
            ILit p = trail_[qhead_++];  // p is now true
            std::vector<Watcher>& ws = watches_[p];
            size_t i = 0, j = 0;
            while (i < ws.size()) {
                Watcher w = ws[i];
                if (lit_value(w.blocker) == kTrue) {
                    ws[j++] = ws[i++];
                    continue;
                }
                CRef ref = w.cref;
                ILit* c = arena_.lits(ref);
                const ILit false_lit = inegate(p);
                if (c[0] == false_lit) std::swap(c[0], c[1]);
                ++i;
                const ILit first = c[0];
                if (first != w.blocker && lit_value(first) == kTrue) {
                    ws[j++] = {ref, first};
                    continue;
                }
                const int size = arena_.size(ref);
                bool moved = false;
                for (int k = 2; k < size; ++k) {
                    if (lit_value(c[k]) != kFalse) {
                        std::swap(c[1], c[k]);
                        watches_[inegate(c[1])].push_back({ref, first});
                        moved = true;
                        break;
                    }
                }
                if (moved) continue;
                ws[j++] = {ref, first};
                if (lit_value(first) == kFalse) {
                    // conflict: restore remaining watchers and bail out
                    while (i < ws.size()) ws[j++] = ws[i++];
                    ws.resize(j);
                    qhead_ = trail_.size();
                    return ref;
                }
                unchecked_enqueue(first, ref);
            }
            ws.resize(j);
        }
        return kCRefUndef;
    }

    void analyze(CRef confl, std::vector<ILit>& out_learnt, int& out_btlevel) {
        out_learnt.clear();
        out_learnt.push_back(0);  // placeholder for the asserting literal
        int path_count = 0;
        ILit p = -1;
        int index = static_cast<int>(trail_.size()) - 1;
        do {
            assert(confl != kCRefUndef);
            const ILit* c = arena_.lits(confl);
            if (arena_.learnt(confl)) bump_clause(confl);
            for (int k = (p == -1 ? 0 : 1); k < arena_.size(confl); ++k) {
                ILit q = c[k];
                int v = ivar(q);
                if (!seen_[v] && level_[v] > 0) {
                    seen_[v] = 1;
                    bump_var(v);
                    if (level_[v] >= decision_level())
                        ++path_count;
                    else
                        out_learnt.push_back(q);
                }
            }
            while (!seen_[ivar(trail_[index])]) --index;
            p = trail_[index--];
            confl = reason_[ivar(p)];
            seen_[ivar(p)] = 0;
            --path_count;
        } while (path_count > 0);
        out_learnt[0] = inegate(p);

        if (out_learnt.size() == 1) {
            out_btlevel = 0;
        } else {
            int max_i = 1;
            for (size_t k = 2; k < out_learnt.size(); ++k)
                if (level_[ivar(out_learnt[k])] > level_[ivar(out_learnt[max_i])]) max_i = static_cast<int>(k);
            std::swap(out_learnt[1], out_learnt[max_i]);
            out_btlevel = level_[ivar(out_learnt[1])];
        }
        for (size_t k = 1; k < out_learnt.size(); ++k) seen_[ivar(out_learnt[k])] = 0;
    }

    void cancel_until(int lvl) {
        if (decision_level() <= lvl) return;
        for (int i = static_cast<int>(trail_.size()) - 1; i >= trail_lim_[lvl]; --i) {
            int v = ivar(trail_[i]);
            phase_[v] = static_cast<uint8_t>(trail_[i] & 1);
            assigns_[v] = kUndef;
            reason_[v] = kCRefUndef;
            if (heap_pos_[v] == -1) heap_insert(v);
        }
        trail_.resize(trail_lim_[lvl]);
        trail_lim_.resize(lvl);
        qhead_ = trail_.size();
    }

    int pick_branch_var() {
        while (!heap_.empty()) {
            int v = heap_[0];
            heap_remove_top();
            if (assigns_[v] == kUndef) return v;
        }
        return -1;
    }

    // --- activity ------------------------------------------------------

    void bump_var(int v) {
        activity_[v] += var_inc_;
        if (heap_pos_[v] != -1) heap_up(heap_pos_[v]);
    }
    void bump_clause(CRef c) { arena_.activity(c) += static_cast<float>(cla_inc_); }

    void rescale_var_activity() {
        for (double& a : activity_) a *= 1e-100;
        var_inc_ *= 1e-100;
    }
    void rescale_cla_activity() {
        for (CRef c : learnts_)
            if (!arena_.deleted(c)) arena_.activity(c) *= 1e-20f;
        cla_inc_ *= 1e-20;
    }

    // --- decision heap (max-heap on activity) ---------------------------

    bool heap_less(int a, int b) const { return activity_[a] > activity_[b]; }

    void heap_insert(int v) {
        heap_pos_[v] = static_cast<int>(heap_.size());
        heap_.push_back(v);
        heap_up(heap_pos_[v]);
    }
    void heap_up(int i) {
        int v = heap_[i];
        while (i > 0) {
            int parent = (i - 1) >> 1;
            if (!heap_less(v, heap_[parent])) break;
            heap_[i] = heap_[parent];
            heap_pos_[heap_[i]] = i;
            i = parent;
        }
        heap_[i] = v;
        heap_pos_[v] = i;
    }
    void heap_down(int i) {
        int v = heap_[i];
        const int sz = static_cast<int>(heap_.size());
        for (;;) {
            int child = 2 * i + 1;
            if (child >= sz) break;
            if (child + 1 < sz && heap_less(heap_[child + 1], heap_[child])) ++child;
            if (!heap_less(heap_[child], v)) break;
            heap_[i] = heap_[child];
            heap_pos_[heap_[i]] = i;
            i = child;
        }
        heap_[i] = v;
        heap_pos_[v] = i;
    }
    void heap_remove_top() {
        int v = heap_[0];
        heap_pos_[v] = -1;
        heap_[0] = heap_.back();
        heap_.pop_back();
        if (!heap_.empty()) {
            heap_pos_[heap_[0]] = 0;
            heap_down(0);
        }
    }

    // --- clause database maintenance ------------------------------------

    bool locked(CRef c) const {
        const ILit* lits = arena_.lits(c);
        int v = ivar(lits[0]);
        return reason_[v] == c && assigns_[v] != kUndef && lit_value(lits[0]) == kTrue;
    }

    void delete_clause(CRef c) {
        detach(c);
        wasted_ += arena_.footprint(c);
        arena_.mark_deleted(c);
    }

    void reduce_db() {
        std::sort(learnts_.begin(), learnts_.end(), [this](CRef a, CRef b) {
            bool ba = arena_.size(a) == 2, bb = arena_.size(b) == 2;
            if (ba != bb) return bb;  // binaries last (kept)
            return arena_.activity(a) < arena_.activity(b);
        });
        size_t deleted = 0;
        const size_t target = learnts_.size() / 2;
        std::vector<CRef> kept;
        kept.reserve(learnts_.size());
        for (size_t i = 0; i < learnts_.size(); ++i) {
            CRef c = learnts_[i];
            if (deleted < target && arena_.size(c) > 2 && !locked(c)) {
                delete_clause(c);
                ++deleted;
            } else {
                kept.push_back(c);
            }
        }
        learnts_.swap(kept);
        max_learnts_ = static_cast<int64_t>(max_learnts_ * 1.3);
    }

    // Root-level cleanup: drop satisfied clauses, trim false literals beyond
    // the watched pair, then compact the arena if enough space is wasted.
    void simplify() {
        assert(decision_level() == 0);
        for (auto* list : {&clauses_, &learnts_}) {
            size_t j = 0;
            for (CRef c : *list) {
                if (arena_.deleted(c)) continue;
                ILit* lits = arena_.lits(c);
                int size = arena_.size(c);
                bool satisfied = false;
                for (int k = 0; k < size && !satisfied; ++k) satisfied = lit_value(lits[k]) == kTrue;
                if (satisfied && !locked(c)) {
                    delete_clause(c);
                    continue;
                }
                if (!satisfied) {
                    for (int k = size - 1; k >= 2; --k) {
                        if (lit_value(lits[k]) == kFalse) {
                            std::swap(lits[k], lits[size - 1]);
                            --size;
                        }
                    }
                    if (size != arena_.size(c)) {
                        wasted_ += arena_.size(c) - size;
                        arena_.shrink(c, size);
                    }
                }
                (*list)[j++] = c;
            }
            list->resize(j);
        }
        last_simplify_trail_ = static_cast<int>(trail_.size());
        if (wasted_ * 4 > arena_.data_.size()) garbage_collect();
    }

    void garbage_collect() {
        for (ILit l : trail_) reason_[ivar(l)] = kCRefUndef;  // all at level 0 here
        Arena fresh;
        fresh.data_.reserve(arena_.data_.size() - wasted_);
        auto relocate = [&](std::vector<CRef>& list) {
            for (CRef& c : list) {
                std::vector<ILit> lits(arena_.lits(c), arena_.lits(c) + arena_.size(c));
                bool learnt = arena_.learnt(c);
                CRef fresh_ref = fresh.alloc(lits, learnt);
                if (learnt) fresh.activity(fresh_ref) = arena_.activity(c);
                c = fresh_ref;
            }
        };
        relocate(clauses_);
        relocate(learnts_);
        arena_.data_.swap(fresh.data_);
        wasted_ = 0;
        for (auto& ws : watches_) ws.clear();
        for (CRef c : clauses_) attach(c);
        for (CRef c : learnts_) attach(c);
    }

    static int64_t luby(int x) {
        // Luby sequence: 1 1 2 1 1 2 4 1 1 2 1 1 2 4 8 ...
        int size = 1, seq = 0;
        while (size < x + 1) {
            ++seq;
            size = 2 * size + 1;
        }
        while (size - 1 != x) {
            size = (size - 1) >> 1;
            --seq;
            x %= size;
        }
        return int64_t{1} << seq;
    }

    Arena arena_;
    std::vector<CRef> clauses_;
    std::vector<CRef> learnts_;
    std::vector<std::vector<Watcher>> watches_;  // indexed by internal literal
    std::vector<int8_t> assigns_;
    std::vector<int> level_;
    std::vector<CRef> reason_;
    std::vector<ILit> trail_;
    std::vector<int> trail_lim_;
    size_t qhead_ = 0;
    std::vector<ILit> assumptions_;

    std::vector<double> activity_;
    std::vector<uint8_t> phase_;
    std::vector<char> seen_;
    std::vector<int> heap_;
    std::vector<int> heap_pos_;
    double var_inc_ = 1.0;
    double cla_inc_ = 1.0;
    int64_t max_learnts_ = 8000;
    size_t wasted_ = 0;
    int last_simplify_trail_ = 0;
    int num_vars_ = 0;
    bool ok_ = true;

    std::vector<ILit> tmp_clause_;
    std::vector<int8_t> model_;
};

}  // namespace

std::unique_ptr<SatSolver> make_cdcl_solver() { return std::make_unique<CdclSolver>(); }

}  // namespace mlex::sat
