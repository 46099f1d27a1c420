#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "mlex/magma.hpp"

namespace mlex::oracle {

// Deterministic splitmix64 stream; bit-exact across platforms, unlike the
// standard distributions.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, bound), bound >= 1.
    uint64_t below(uint64_t bound) {
        const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % bound;
    }

private:
    uint64_t state_;
};

enum class GeneratorKind { RandomMagma, LatinSquare, CyclicGroup, LeftProjection, IdempotentFree };

GeneratorKind parse_generator_kind(std::string_view name);
std::string to_string(GeneratorKind kind);

struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::RandomMagma;
    int order = 1;
    uint64_t seed = 0;
};

class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Seeded, reproducible instance generation. Latin squares use randomized
// row-by-row backtracking (order <= 64).
Magma generate(const GeneratorSpec& spec);

struct LexminResult {
    Magma lexmin;
    Permutation witness;
};

// Exact lexmin by exhaustive permutation search with prefix pruning.
// Order <= 8. Independent of the SAT path: copies are compared cell by cell
// as the mapping is extended.
LexminResult brute_force_lexmin(const Magma& m);

// Cheap certificate check, usable at any order: does f map m onto claimed?
bool verify_lexmin_certificate(const Magma& m, const Magma& claimed, const Permutation& f);

}  // namespace mlex::oracle
