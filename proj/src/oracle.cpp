#include "mlex/oracle.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace mlex::oracle {

GeneratorKind parse_generator_kind(std::string_view name) {
    if (name == "random_magma") return GeneratorKind::RandomMagma;
    if (name == "latin_square") return GeneratorKind::LatinSquare;
    if (name == "cyclic_group") return GeneratorKind::CyclicGroup;
    if (name == "left_projection") return GeneratorKind::LeftProjection;
    if (name == "idempotent_free") return GeneratorKind::IdempotentFree;
    throw std::invalid_argument("unknown generator kind '" + std::string(name) + "'");
}

std::string to_string(GeneratorKind kind) {
    switch (kind) {
        case GeneratorKind::RandomMagma: return "random_magma";
        case GeneratorKind::LatinSquare: return "latin_square";
        case GeneratorKind::CyclicGroup: return "cyclic_group";
        case GeneratorKind::LeftProjection: return "left_projection";
        case GeneratorKind::IdempotentFree: return "idempotent_free";
    }
    return "?";
}

namespace {

Magma random_magma(int n, Rng& rng) {
    std::vector<Elem> cells(static_cast<size_t>(n) * n);
    for (auto& v : cells) v = static_cast<Elem>(rng.below(n));
    return Magma(n, std::move(cells));
}

// One row of a Latin rectangle by randomized backtracking over columns.
// Always completable (a Latin rectangle extends row by row), but randomized
// search may thrash; the step budget forces a retry instead.
bool fill_latin_row(int n, std::vector<Elem>& row, const std::vector<uint64_t>& col_used, Rng& rng,
                    int64_t step_budget) {
    std::vector<std::vector<Elem>> choices(n);
    std::vector<int> next_choice(n, 0);
    const uint64_t full = n == 64 ? ~0ull : (1ull << n) - 1;
    uint64_t row_used = 0;
    int c = 0;
    int64_t steps = 0;
    while (c < n) {
        if (++steps > step_budget) return false;
        if (next_choice[c] == 0) {
            uint64_t avail = full & ~row_used & ~col_used[c];
            auto& opts = choices[c];
            opts.clear();
            while (avail) {
                const int v = std::countr_zero(avail);
                avail &= avail - 1;
                opts.push_back(v);
            }
            for (size_t i = opts.size(); i > 1; --i) std::swap(opts[i - 1], opts[rng.below(i)]);
        }
        if (next_choice[c] == static_cast<int>(choices[c].size())) {
            // dead end: undo the previous column
            next_choice[c] = 0;
            if (c == 0) return false;
            --c;
            row_used &= ~(1ull << row[c]);
            continue;
        }
        const Elem v = choices[c][next_choice[c]++];
        row[c] = v;
        row_used |= 1ull << v;
        ++c;
    }
    return true;
}

Magma latin_square(int n, Rng& rng) {
    if (n > 64) throw std::invalid_argument("latin square generation supports order <= 64");
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::vector<uint64_t> col_used(n, 0);
        std::vector<Elem> cells;
        cells.reserve(static_cast<size_t>(n) * n);
        std::vector<Elem> row(n);
        bool ok = true;
        for (int r = 0; r < n && ok; ++r) {
            ok = false;
            for (int retry = 0; retry < 32 && !ok; ++retry)
                ok = fill_latin_row(n, row, col_used, rng, 64ll * n * n);
            if (!ok) break;
            for (int c = 0; c < n; ++c) col_used[c] |= 1ull << row[c];
            cells.insert(cells.end(), row.begin(), row.end());
        }
        if (ok) return Magma(n, std::move(cells));
    }
    throw GenerationError("latin square generation exceeded its retry bound");
}

Magma cyclic_group(int n) {
    std::vector<Elem> cells(static_cast<size_t>(n) * n);
    for (Elem r = 0; r < n; ++r)
        for (Elem c = 0; c < n; ++c) cells[static_cast<size_t>(r) * n + c] = (r + c) % n;
    return Magma(n, std::move(cells));
}

Magma left_projection(int n) {
    std::vector<Elem> cells(static_cast<size_t>(n) * n);
    for (Elem r = 0; r < n; ++r)
        for (Elem c = 0; c < n; ++c) cells[static_cast<size_t>(r) * n + c] = r;
    return Magma(n, std::move(cells));
}

Magma idempotent_free(int n, Rng& rng) {
    if (n < 2) throw std::invalid_argument("an order-1 magma always has an idempotent");
    for (int attempt = 0; attempt < 10000; ++attempt) {
        Magma m = random_magma(n, rng);
        bool has_idempotent = false;
        for (Elem a = 0; a < n && !has_idempotent; ++a) has_idempotent = m.at(a, a) == a;
        if (!has_idempotent) return m;
    }
    throw GenerationError("idempotent-free rejection sampling exceeded its retry bound");
}

}  // namespace

Magma generate(const GeneratorSpec& spec) {
    if (spec.order < 1 || spec.order > kMaxOrder) throw std::invalid_argument("generator order out of range");
    Rng rng(spec.seed);
    switch (spec.kind) {
        case GeneratorKind::RandomMagma: return random_magma(spec.order, rng);
        case GeneratorKind::LatinSquare: return latin_square(spec.order, rng);
        case GeneratorKind::CyclicGroup: return cyclic_group(spec.order);
        case GeneratorKind::LeftProjection: return left_projection(spec.order);
        case GeneratorKind::IdempotentFree: return idempotent_free(spec.order, rng);
    }
    throw std::invalid_argument("unknown generator kind");
}

namespace {

// Exhaustive search state: target elements 0..depth-1 have known pre-images.
// inv[t] = pre-image of t, fwd[x] = image of x (-1 while unassigned).
struct LexminSearch {
    const Magma& m;
    int n;
    std::vector<Elem> inv, fwd;
    std::vector<Elem> best;       // row-major cells of the best copy so far
    std::vector<Elem> best_perm;  // its fwd map

    explicit LexminSearch(const Magma& magma)
        : m(magma), n(magma.order()), inv(n, -1), fwd(n, -1) {
        best.assign(m.cells().begin(), m.cells().end());  // identity copy
        for (int i = 0; i < n; ++i) {
            inv[i] = i;
            fwd[i] = i;
        }
        best_perm = fwd;
        std::fill(inv.begin(), inv.end(), -1);
        std::fill(fwd.begin(), fwd.end(), -1);
    }

    enum class Status { Smaller, Open, Worse };

    // Compare the determined row-major prefix of the partial copy with best.
    // Walk stops at the first undetermined cell.
    Status compare_prefix(int depth) const {
        for (Elem r = 0; r < n; ++r) {
            if (r >= depth) return Status::Open;
            for (Elem c = 0; c < n; ++c) {
                if (c >= depth) return Status::Open;
                const Elem image = fwd[m.at(inv[r], inv[c])];
                if (image == -1) return Status::Open;
                if (image < best[static_cast<size_t>(r) * n + c]) return Status::Smaller;
                if (image > best[static_cast<size_t>(r) * n + c]) return Status::Worse;
            }
        }
        return Status::Open;  // depth == n handled by the caller
    }

    void extend(int depth) {
        if (depth == n) {
            std::vector<Elem> cells(static_cast<size_t>(n) * n);
            for (Elem r = 0; r < n; ++r)
                for (Elem c = 0; c < n; ++c)
                    cells[static_cast<size_t>(r) * n + c] = fwd[m.at(inv[r], inv[c])];
            if (std::lexicographical_compare(cells.begin(), cells.end(), best.begin(), best.end())) {
                best = std::move(cells);
                best_perm = fwd;
            }
            return;
        }
        for (Elem x = 0; x < n; ++x) {
            if (fwd[x] != -1) continue;
            inv[depth] = x;
            fwd[x] = depth;
            if (compare_prefix(depth + 1) != Status::Worse) extend(depth + 1);
            fwd[x] = -1;
            inv[depth] = -1;
        }
    }
};

}  // namespace

LexminResult brute_force_lexmin(const Magma& m) {
    if (m.order() > 8) throw std::invalid_argument("brute-force lexmin is limited to order 8");
    LexminSearch search(m);
    search.extend(0);
    return {Magma(m.order(), std::move(search.best)), Permutation(std::move(search.best_perm))};
}

bool verify_lexmin_certificate(const Magma& m, const Magma& claimed, const Permutation& f) {
    if (f.order() != m.order() || claimed.order() != m.order()) return false;
    return apply_permutation(m, f) == claimed;
}

}  // namespace mlex::oracle
