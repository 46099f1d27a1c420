#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlex {

// Domain elements are 0-based internally; all text I/O is 1-based.
using Elem = int;

enum class TableFormat { Native, Csv };

// Hard cap of the data model. The engine's practical range is far smaller.
inline constexpr int kMaxOrder = 1024;

class ParseError : public std::runtime_error {
public:
    ParseError(std::string msg, int line, int col)
        : std::runtime_error(std::move(msg)), line_(line), col_(col) {}
    int line() const { return line_; }
    int col() const { return col_; }

private:
    int line_;
    int col_;
};

// An n x n multiplication table over {0..n-1}; entry (r,c) is r*c.
class Magma {
public:
    Magma() : n_(0) {}
    Magma(int n, std::vector<Elem> cells);

    static Magma from_rows(const std::vector<std::vector<Elem>>& rows);

    int order() const { return n_; }
    Elem at(Elem r, Elem c) const { return cells_[static_cast<size_t>(r) * n_ + c]; }
    const std::vector<Elem>& cells() const { return cells_; }

    bool operator==(const Magma& other) const = default;

private:
    int n_;
    std::vector<Elem> cells_;  // row-major
};

// A bijection on {0..n-1}; image_[i] = f(i).
class Permutation {
public:
    Permutation() = default;
    explicit Permutation(std::vector<Elem> image);

    static Permutation identity(int n);

    int order() const { return static_cast<int>(image_.size()); }
    Elem operator()(Elem i) const { return image_[i]; }
    const std::vector<Elem>& image() const { return image_; }

    Permutation inverse() const;
    // g.compose(f) = g after f, i.e. x -> g(f(x)).
    Permutation compose(const Permutation& f) const;

    // Cycle notation with 1-based elements, fixed points omitted: "(1 2)(3 5 4)".
    // The identity renders as "()".
    std::string cycle_notation() const;

    bool operator==(const Permutation& other) const = default;

private:
    std::vector<Elem> image_;
};

// Isomorphism-invariant fingerprint of one row.
struct RowInvariant {
    int fixed_count = 0;               // |{c : r*c = c}|
    int self_count = 0;                // |{c : r*c = r}|
    bool is_idempotent = false;        // r*r = r
    std::vector<int> orbit_profile;    // sorted [m_r(c) | c], m_r = first repeat index

    bool operator==(const RowInvariant& other) const = default;
    uint64_t fingerprint() const;      // fast pre-filter; equality stays structural
};

enum class RowClass { All = 0, Idempotent = 1, NonIdempotent = 2 };
enum class ValueClass { All = 0, FirstRow = 1, Other = 2 };

// Max-occurrence statistics of a table, split by row class and (when the
// first-row pre-image is known) by value class.
class OccurrenceProfile {
public:
    OccurrenceProfile() = default;

    int row_max(RowClass rc, ValueClass vc) const { return row_max_[idx(rc)][idx(vc)]; }
    int col_max(ValueClass vc) const { return col_max_[idx(vc)]; }
    int total_max(RowClass rc, ValueClass vc) const { return total_max_[idx(rc)][idx(vc)]; }

    std::optional<Elem> first_row_element() const { return first_row_element_; }

    friend OccurrenceProfile occurrence_profile(const Magma& m, std::optional<Elem> first_row_element);

private:
    static int idx(RowClass rc) { return static_cast<int>(rc); }
    static int idx(ValueClass vc) { return static_cast<int>(vc); }

    int row_max_[3][3] = {};
    int col_max_[3] = {};
    int total_max_[3][3] = {};
    std::optional<Elem> first_row_element_;
};

// Parsing and serialization. Native format: first non-comment line is n,
// followed by n rows of n whitespace-separated 1-based entries; '#' starts a
// comment; blank lines separate tables. CSV: n rows of comma-separated
// entries, n inferred from the first row.
Magma parse_table(std::istream& in, TableFormat format = TableFormat::Native);
Magma parse_table(const std::string& text, TableFormat format = TableFormat::Native);

// Multi-table streams for batch commands. Each entry is either a table or the
// error that block produced (dedupe keeps going past bad tables).
struct ParsedBlock {
    std::optional<Magma> magma;
    std::string error;   // non-empty iff magma is empty
    int first_line = 0;  // 1-based line of the block start
};
std::vector<ParsedBlock> parse_table_stream(std::istream& in, TableFormat format = TableFormat::Native);

std::string serialize(const Magma& m, TableFormat format = TableFormat::Native);

// The isomorphic copy (D,<>)_f:  <>(a,b) = f( *(f^-1(a), f^-1(b)) ).
Magma apply_permutation(const Magma& m, const Permutation& f);

enum class Ordering { Less = -1, Equal = 0, Greater = 1 };

// Row-major lexicographic comparison of equal-order tables.
Ordering lex_compare(const Magma& a, const Magma& b);

// {a | a*a = a}
std::set<Elem> idempotents(const Magma& m);

// o(r,a) = |{c | r*c = a}|
int occurrence_count(const Magma& m, Elem r, Elem a);

// Largest o(e,e) over idempotents e; nullopt when there are none.
std::optional<int> idempotent_apex(const Magma& m);

// Idempotent rows achieving the apex; nullopt when there are no idempotents.
std::optional<std::set<Elem>> first_row_candidates(const Magma& m);

RowInvariant row_invariant(const Magma& m, Elem r);

// Invariant of one fully known row given as a value sequence (used for rows of
// the partially built copy, where only the row itself exists).
RowInvariant row_invariant_of_row(const std::vector<Elem>& row, Elem r);

OccurrenceProfile occurrence_profile(const Magma& m, std::optional<Elem> first_row_element = std::nullopt);

// FNV-1a over the dimensions and cells; stable across runs and platforms.
uint64_t table_hash(const Magma& m);

}  // namespace mlex
