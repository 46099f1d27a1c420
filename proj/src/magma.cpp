#include "mlex/magma.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <sstream>

namespace mlex {

namespace {

struct Line {
    std::string text;  // comment-stripped
    int number;        // 1-based
};

// Strip comments, keep line numbers. Blank (post-strip) lines are kept so the
// caller can split blocks on them.
std::vector<Line> read_lines(std::istream& in) {
    std::vector<Line> lines;
    std::string raw;
    int no = 0;
    while (std::getline(in, raw)) {
        ++no;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        lines.push_back({std::move(raw), no});
        raw.clear();
    }
    return lines;
}

bool is_blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

struct Token {
    std::string text;
    int line;
    int col;  // 1-based
};

std::vector<Token> split_ws(const Line& line) {
    std::vector<Token> out;
    size_t i = 0;
    while (i < line.text.size()) {
        while (i < line.text.size() && std::isspace(static_cast<unsigned char>(line.text[i]))) ++i;
        size_t start = i;
        while (i < line.text.size() && !std::isspace(static_cast<unsigned char>(line.text[i]))) ++i;
        if (i > start)
            out.push_back({line.text.substr(start, i - start), line.number, static_cast<int>(start) + 1});
    }
    return out;
}

std::vector<Token> split_csv(const Line& line) {
    std::vector<Token> out;
    size_t pos = 0;
    while (true) {
        size_t comma = line.text.find(',', pos);
        std::string field = line.text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        size_t lead = field.find_first_not_of(" \t");
        size_t tail = field.find_last_not_of(" \t");
        std::string trimmed = lead == std::string::npos ? "" : field.substr(lead, tail - lead + 1);
        out.push_back({trimmed, line.number, static_cast<int>(pos) + 1});
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

int parse_int(const Token& tok) {
    int value = 0;
    const char* first = tok.text.data();
    const char* last = first + tok.text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw ParseError("expected an integer, got '" + tok.text + "'", tok.line, tok.col);
    return value;
}

Elem parse_entry(const Token& tok, int n) {
    int v = parse_int(tok);
    if (v < 1 || v > n)
        throw ParseError("entry " + std::to_string(v) + " outside domain {1.." + std::to_string(n) + "}",
                         tok.line, tok.col);
    return v - 1;
}

// One table from a block of non-blank lines.
Magma parse_block(const std::vector<Line>& block, TableFormat format) {
    std::vector<std::vector<Token>> rows;
    int n;
    size_t row_start;
    if (format == TableFormat::Native) {
        auto header = split_ws(block[0]);
        if (header.size() != 1)
            throw ParseError("expected a single order on the first line", block[0].number, 1);
        n = parse_int(header[0]);
        row_start = 1;
    } else {
        rows.reserve(block.size());
        n = static_cast<int>(split_csv(block[0]).size());
        row_start = 0;
    }
    if (n < 1) throw ParseError("order must be positive", block[0].number, 1);
    if (n > kMaxOrder)
        throw ParseError("order " + std::to_string(n) + " exceeds supported maximum " + std::to_string(kMaxOrder),
                         block[0].number, 1);
    if (block.size() - row_start != static_cast<size_t>(n)) {
        int at = block.size() > row_start ? block[block.size() - 1].number : block[0].number;
        throw ParseError("expected " + std::to_string(n) + " rows, got " +
                             std::to_string(block.size() - row_start),
                         at, 1);
    }
    std::vector<Elem> cells;
    cells.reserve(static_cast<size_t>(n) * n);
    for (int r = 0; r < n; ++r) {
        const Line& line = block[row_start + r];
        auto toks = format == TableFormat::Native ? split_ws(line) : split_csv(line);
        if (toks.size() != static_cast<size_t>(n))
            throw ParseError("ragged row: expected " + std::to_string(n) + " entries, got " +
                                 std::to_string(toks.size()),
                             line.number, 1);
        for (const auto& tok : toks) cells.push_back(parse_entry(tok, n));
    }
    return Magma(n, std::move(cells));
}

std::vector<std::vector<Line>> split_blocks(const std::vector<Line>& lines) {
    std::vector<std::vector<Line>> blocks;
    std::vector<Line> current;
    for (const auto& line : lines) {
        if (is_blank(line.text)) {
            if (!current.empty()) blocks.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(line);
        }
    }
    if (!current.empty()) blocks.push_back(std::move(current));
    return blocks;
}

}  // namespace

Magma::Magma(int n, std::vector<Elem> cells) : n_(n), cells_(std::move(cells)) {
    if (n < 1) throw std::invalid_argument("magma order must be >= 1");
    if (n > kMaxOrder) throw std::invalid_argument("magma order exceeds supported maximum");
    if (cells_.size() != static_cast<size_t>(n) * n) throw std::invalid_argument("cell count must be n*n");
    for (Elem v : cells_)
        if (v < 0 || v >= n) throw std::invalid_argument("table entry outside domain");
}

Magma Magma::from_rows(const std::vector<std::vector<Elem>>& rows) {
    std::vector<Elem> cells;
    cells.reserve(rows.size() * rows.size());
    for (const auto& row : rows) {
        if (row.size() != rows.size()) throw std::invalid_argument("table must be square");
        cells.insert(cells.end(), row.begin(), row.end());
    }
    return Magma(static_cast<int>(rows.size()), std::move(cells));
}

Permutation::Permutation(std::vector<Elem> image) : image_(std::move(image)) {
    std::vector<char> seen(image_.size(), 0);
    for (Elem v : image_) {
        if (v < 0 || v >= static_cast<Elem>(image_.size()) || seen[v])
            throw std::invalid_argument("permutation image is not a bijection");
        seen[v] = 1;
    }
}

Permutation Permutation::identity(int n) {
    std::vector<Elem> img(n);
    for (int i = 0; i < n; ++i) img[i] = i;
    return Permutation(std::move(img));
}

Permutation Permutation::inverse() const {
    std::vector<Elem> inv(image_.size());
    for (size_t i = 0; i < image_.size(); ++i) inv[image_[i]] = static_cast<Elem>(i);
    return Permutation(std::move(inv));
}

Permutation Permutation::compose(const Permutation& f) const {
    if (order() != f.order()) throw std::invalid_argument("permutation order mismatch");
    std::vector<Elem> img(image_.size());
    for (size_t i = 0; i < image_.size(); ++i) img[i] = image_[f.image_[i]];
    return Permutation(std::move(img));
}

std::string Permutation::cycle_notation() const {
    const int n = order();
    std::vector<char> seen(n, 0);
    std::string out;
    for (int i = 0; i < n; ++i) {
        if (seen[i] || image_[i] == i) continue;
        out += '(';
        int j = i;
        bool first = true;
        do {
            if (!first) out += ' ';
            out += std::to_string(j + 1);
            seen[j] = 1;
            j = image_[j];
            first = false;
        } while (j != i);
        out += ')';
    }
    if (out.empty()) out = "()";
    return out;
}

Magma parse_table(std::istream& in, TableFormat format) {
    auto blocks = split_blocks(read_lines(in));
    if (blocks.empty()) throw ParseError("no table found", 1, 1);
    if (blocks.size() > 1)
        throw ParseError("unexpected content after table", blocks[1][0].number, 1);
    return parse_block(blocks[0], format);
}

Magma parse_table(const std::string& text, TableFormat format) {
    std::istringstream in(text);
    return parse_table(in, format);
}

std::vector<ParsedBlock> parse_table_stream(std::istream& in, TableFormat format) {
    std::vector<ParsedBlock> out;
    for (const auto& block : split_blocks(read_lines(in))) {
        ParsedBlock parsed;
        parsed.first_line = block[0].number;
        try {
            parsed.magma = parse_block(block, format);
        } catch (const ParseError& e) {
            parsed.error = std::string(e.what()) + " (line " + std::to_string(e.line()) + ", col " +
                           std::to_string(e.col()) + ")";
        }
        out.push_back(std::move(parsed));
    }
    return out;
}

std::string serialize(const Magma& m, TableFormat format) {
    std::string out;
    const int n = m.order();
    if (format == TableFormat::Native) out += std::to_string(n) + "\n";
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            if (c > 0) out += format == TableFormat::Native ? " " : ",";
            out += std::to_string(m.at(r, c) + 1);
        }
        out += "\n";
    }
    return out;
}

Magma apply_permutation(const Magma& m, const Permutation& f) {
    const int n = m.order();
    if (f.order() != n) throw std::invalid_argument("permutation order does not match magma order");
    Permutation inv = f.inverse();
    std::vector<Elem> cells(static_cast<size_t>(n) * n);
    for (Elem a = 0; a < n; ++a)
        for (Elem b = 0; b < n; ++b) cells[static_cast<size_t>(a) * n + b] = f(m.at(inv(a), inv(b)));
    return Magma(n, std::move(cells));
}

Ordering lex_compare(const Magma& a, const Magma& b) {
    if (a.order() != b.order()) throw std::invalid_argument("cannot compare magmas of different order");
    const auto& x = a.cells();
    const auto& y = b.cells();
    for (size_t i = 0; i < x.size(); ++i) {
        if (x[i] < y[i]) return Ordering::Less;
        if (x[i] > y[i]) return Ordering::Greater;
    }
    return Ordering::Equal;
}

std::set<Elem> idempotents(const Magma& m) {
    std::set<Elem> out;
    for (Elem a = 0; a < m.order(); ++a)
        if (m.at(a, a) == a) out.insert(a);
    return out;
}

int occurrence_count(const Magma& m, Elem r, Elem a) {
    int count = 0;
    for (Elem c = 0; c < m.order(); ++c)
        if (m.at(r, c) == a) ++count;
    return count;
}

std::optional<int> idempotent_apex(const Magma& m) {
    std::optional<int> apex;
    for (Elem e : idempotents(m)) {
        int o = occurrence_count(m, e, e);
        if (!apex || o > *apex) apex = o;
    }
    return apex;
}

std::optional<std::set<Elem>> first_row_candidates(const Magma& m) {
    auto apex = idempotent_apex(m);
    if (!apex) return std::nullopt;
    std::set<Elem> out;
    for (Elem e : idempotents(m))
        if (occurrence_count(m, e, e) == *apex) out.insert(e);
    return out;
}

RowInvariant row_invariant_of_row(const std::vector<Elem>& row, Elem r) {
    const int n = static_cast<int>(row.size());
    RowInvariant inv;
    for (Elem c = 0; c < n; ++c) {
        if (row[c] == c) ++inv.fixed_count;
        if (row[c] == r) ++inv.self_count;
    }
    inv.is_idempotent = row[r] == r;
    inv.orbit_profile.reserve(n);
    std::vector<char> visited(n);
    for (Elem a = 0; a < n; ++a) {
        std::fill(visited.begin(), visited.end(), 0);
        // x_{t+1} = g_r(x_t); m_r(a) is the first index whose value repeats an
        // earlier iterate (tail length + cycle length).
        Elem x = a;
        int k = 0;
        while (!visited[x]) {
            visited[x] = 1;
            x = row[x];
            ++k;
        }
        inv.orbit_profile.push_back(k);
    }
    std::sort(inv.orbit_profile.begin(), inv.orbit_profile.end());
    return inv;
}

RowInvariant row_invariant(const Magma& m, Elem r) {
    std::vector<Elem> row(m.order());
    for (Elem c = 0; c < m.order(); ++c) row[c] = m.at(r, c);
    return row_invariant_of_row(row, r);
}

uint64_t RowInvariant::fingerprint() const {
    uint64_t h = 1469598103934665603ull;
    auto mix = [&h](uint64_t v) {
        h ^= v;
        h *= 1099511628211ull;
    };
    mix(static_cast<uint64_t>(fixed_count));
    mix(static_cast<uint64_t>(self_count));
    mix(is_idempotent ? 1 : 2);
    for (int k : orbit_profile) mix(static_cast<uint64_t>(k));
    return h;
}

OccurrenceProfile occurrence_profile(const Magma& m, std::optional<Elem> first_row_element) {
    const int n = m.order();
    OccurrenceProfile p;
    p.first_row_element_ = first_row_element;

    auto value_classes = [&](Elem a) {
        std::vector<ValueClass> vcs{ValueClass::All};
        if (first_row_element) vcs.push_back(a == *first_row_element ? ValueClass::FirstRow : ValueClass::Other);
        return vcs;
    };

    std::vector<int> total(n, 0);
    std::vector<std::vector<int>> total_by_class(3, std::vector<int>(n, 0));
    std::vector<int> row_counts(n), col_counts(n);

    for (Elem r = 0; r < n; ++r) {
        std::fill(row_counts.begin(), row_counts.end(), 0);
        for (Elem c = 0; c < n; ++c) ++row_counts[m.at(r, c)];
        RowClass rc = m.at(r, r) == r ? RowClass::Idempotent : RowClass::NonIdempotent;
        for (Elem a = 0; a < n; ++a) {
            if (row_counts[a] == 0) continue;
            total[a] += row_counts[a];
            total_by_class[OccurrenceProfile::idx(rc)][a] += row_counts[a];
            for (ValueClass vc : value_classes(a)) {
                auto& all_max = p.row_max_[OccurrenceProfile::idx(RowClass::All)][OccurrenceProfile::idx(vc)];
                auto& cls_max = p.row_max_[OccurrenceProfile::idx(rc)][OccurrenceProfile::idx(vc)];
                all_max = std::max(all_max, row_counts[a]);
                cls_max = std::max(cls_max, row_counts[a]);
            }
        }
    }
    for (Elem c = 0; c < n; ++c) {
        std::fill(col_counts.begin(), col_counts.end(), 0);
        for (Elem r = 0; r < n; ++r) ++col_counts[m.at(r, c)];
        for (Elem a = 0; a < n; ++a) {
            if (col_counts[a] == 0) continue;
            for (ValueClass vc : value_classes(a)) {
                auto& mx = p.col_max_[OccurrenceProfile::idx(vc)];
                mx = std::max(mx, col_counts[a]);
            }
        }
    }
    for (Elem a = 0; a < n; ++a) {
        for (ValueClass vc : value_classes(a)) {
            auto& all_max = p.total_max_[OccurrenceProfile::idx(RowClass::All)][OccurrenceProfile::idx(vc)];
            all_max = std::max(all_max, total[a]);
            for (RowClass rc : {RowClass::Idempotent, RowClass::NonIdempotent}) {
                auto& cls_max = p.total_max_[OccurrenceProfile::idx(rc)][OccurrenceProfile::idx(vc)];
                cls_max = std::max(cls_max, total_by_class[OccurrenceProfile::idx(rc)][a]);
            }
        }
    }
    return p;
}

uint64_t table_hash(const Magma& m) {
    uint64_t h = 1469598103934665603ull;
    auto mix = [&h](uint64_t v) {
        h ^= v;
        h *= 1099511628211ull;
    };
    mix(static_cast<uint64_t>(m.order()));
    for (Elem v : m.cells()) mix(static_cast<uint64_t>(v));
    return h;
}

}  // namespace mlex
