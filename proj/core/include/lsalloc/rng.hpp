#pragma once

#include <cstdint>

namespace lsalloc {

// Purpose tags keep the random streams used by different parts of an
// experiment disjoint. The numeric values are part of the reproducibility
// contract: changing them changes every sampled trajectory.
enum class StreamPurpose : std::uint64_t {
    Birthplace = 1, // where ball i is born (also choice j of a d-choice ball)
    TieBreak = 2,   // neighbor priorities for uniform tie-breaking
    Rank = 3,       // rank draws for the majorization coupling
    GraphGen = 4,   // randomized graph construction
    Trial = 5,      // per-trial seed derivation in statistical experiments
};

// Counter-based random source: a keyed 64-bit mixing function instead of a
// stateful engine. Every draw is addressed by (seed, purpose, ball, vertex,
// counter), so any two runs that look up the same key see the same value
// regardless of call order. That property is what makes the process
// couplings in this library one-liners: two coupled runs share decisions by
// sharing keys. Cross-implementation bit-exactness is a non-goal; stability
// of this implementation given a seed is the contract.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    // Raw 64-bit word for a key. splitmix64 finalizer chained over the key
    // words; each word is absorbed through one full avalanche so low-entropy
    // keys (small counters, small ids) still decorrelate.
    std::uint64_t word(StreamPurpose purpose, std::uint64_t ball,
                       std::uint64_t vertex, std::uint64_t counter) const {
        std::uint64_t h = mix(seed_ ^ 0x6c73616c6c6f6355ULL);
        h = mix(h ^ static_cast<std::uint64_t>(purpose));
        h = mix(h ^ ball);
        h = mix(h ^ vertex);
        h = mix(h ^ counter);
        return h;
    }

    // Uniform draw from [0, bound) by rejection on successive counters,
    // so results are unbiased for every bound. bound must be positive.
    std::uint64_t uniform_below(StreamPurpose purpose, std::uint64_t ball,
                                std::uint64_t vertex, std::uint64_t bound,
                                std::uint64_t counter_base = 0) const {
        // Largest multiple of bound that fits in 2^64; values at or above it
        // would bias the low residues.
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound + 1) % bound;
        for (std::uint64_t c = counter_base;; ++c) {
            const std::uint64_t w = word(purpose, ball, vertex, c);
            if (w <= limit) return w % bound;
        }
    }

    // Derive an independent source, e.g. one per trial or per generation
    // attempt. Derivation goes through the same keyed construction.
    RandomSource derive(StreamPurpose purpose, std::uint64_t index) const {
        return RandomSource(word(purpose, index, 0, 0));
    }

    static std::uint64_t mix(std::uint64_t x) {
        // splitmix64 finalizer (Steele, Lea, Flood 2014).
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

private:
    std::uint64_t seed_;
};

// Sequential view of one keyed stream: fixed (purpose, a, b), counter
// increments per draw. Handy for shuffles and other inherently ordered
// sampling where counter-addressing would just be bookkeeping noise.
class KeyedStream {
public:
    KeyedStream(const RandomSource& rs, StreamPurpose purpose,
                std::uint64_t a, std::uint64_t b)
        : rs_(&rs), purpose_(purpose), a_(a), b_(b) {}

    std::uint64_t next_word() { return rs_->word(purpose_, a_, b_, counter_++); }

    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound + 1) % bound;
        for (;;) {
            const std::uint64_t w = next_word();
            if (w <= limit) return w % bound;
        }
    }

private:
    const RandomSource* rs_;
    StreamPurpose purpose_;
    std::uint64_t a_;
    std::uint64_t b_;
    std::uint64_t counter_ = 0;
};

} // namespace lsalloc
