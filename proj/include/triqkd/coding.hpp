#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "triqkd/gf2.hpp"
#include "triqkd/rng.hpp"

namespace triqkd {

// -q log2 q - (1-q) log2 (1-q), with h(0) = h(1) = 0
double binary_entropy(double q);

// 1 - h(q1) - h(q2); may be negative, callers treat <= 0 as abort
double key_rate(double q1, double q2);

struct SelectionError : std::runtime_error {
    SelectionError(const std::string& msg, double best_failure, std::string best_name)
        : std::runtime_error(msg), best_failure(best_failure), best_name(std::move(best_name)) {}
    double best_failure;
    std::string best_name;
};

struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// [n, k] binary linear code held as generator plus parity check, both full
// rank, with generator * parity_check^T = 0. A code assembled from smaller
// blocks keeps the parts so syndrome decoding can work per block.
struct LinearCode {
    std::string name;
    std::size_t n = 0;
    std::size_t k = 0;
    BitMatrix generator;     // k x n
    BitMatrix parity_check;  // (n-k) x n
    std::vector<LinearCode> blocks;  // nonempty iff block-diagonal composition

    static LinearCode from_generator(std::string name, BitMatrix g);
    static LinearCode from_parity_check(std::string name, BitMatrix h);
    static LinearCode trivial(std::size_t n);      // rate 1, empty parity check
    static LinearCode repetition(std::size_t n);   // [n, 1]
    static LinearCode hamming_7_4();
    static LinearCode ext_hamming_8_4();
    static LinearCode random_code(std::size_t n, std::size_t k, std::uint64_t seed);

    BitVector syndrome(const BitVector& word) const;
    bool contains(const BitVector& word) const;
    BitVector encode(const BitVector& message) const;  // message * generator
    std::vector<BitVector> codewords() const;          // all 2^k, small k only
};

// Direct sum: block-diagonal generator and parity check, syndromes segment
// per part in order.
LinearCode compose_blocks(std::vector<LinearCode> parts);

// Registry name forms: trivial_N, repetition_N, hamming_7_4, ext_hamming_8_4,
// random_N_K_SEED, blocks:<name>*<count>[,<name>*<count>...]
LinearCode code_by_name(const std::string& name);

// Exact maximum-likelihood syndrome decoding for the BSC: a precomputed
// coset-leader table per atomic code (minimum weight, ties broken by
// lexicographically smallest leader). Composed codes decode per block.
class CosetDecoder {
public:
    static CosetDecoder build(const LinearCode& code);

    // minimum-weight word with the given syndrome
    BitVector coset_leader(const BitVector& syndrome) const;

    const LinearCode& code() const { return *code_; }

private:
    struct Part {
        std::size_t n, redundancy;
        std::vector<std::uint32_t> leader_of;  // syndrome index -> leader index
    };
    std::shared_ptr<const LinearCode> code_;
    std::vector<std::size_t> part_index_;  // per block, into parts_
    std::vector<Part> parts_;

    static Part build_part(const LinearCode& code);
};

// Convenience forms matching the protocol steps; they build the decoder on
// the fly, so hot paths should hold a CosetDecoder instead.
BitVector decode_to_coset(const LinearCode& code, const BitVector& target_syndrome);
BitVector reconcile(const BitVector& own_bits, const BitVector& alice_syndrome,
                    const LinearCode& code);
BitVector reconcile(const BitVector& own_bits, const BitVector& alice_syndrome,
                    const CosetDecoder& decoder);

// Nested pair C2 inside C1 plus a fixed completion of C2's basis to a basis
// of C1; the completion is deterministic in (c1, c2) so every party labels
// cosets identically.
struct CodePair {
    LinearCode c1;
    LinearCode c2;
    std::vector<BitVector> complement_basis;  // k1 - k2 vectors

    static CodePair make(LinearCode c1, LinearCode c2);
    std::size_t key_length() const { return c1.k - c2.k; }
};

// C2 spanned by dim2 uniformly random independent codewords of c1
// (rejection-sampled until full rank).
CodePair random_subcode(const LinearCode& c1, std::size_t dim2, Rng& rng);

// Canonical label of the coset a + C2: reduce a to its C1-coset
// representative (minimum-weight leader of a's syndrome), then read off the
// coefficients on the complement basis.
BitVector coset_key(const BitVector& a, const CodePair& pair);

// Monte-Carlo estimate of P(table decoding fails) on BSC(q); per-trial
// seeding makes the result independent of thread count.
double estimate_decode_failure(const LinearCode& code, const CosetDecoder& decoder,
                               double q, std::size_t trials, std::uint64_t seed,
                               bool parallel = true);
double estimate_decode_failure_serial(const LinearCode& code, const CosetDecoder& decoder,
                                      double q, std::size_t trials, std::uint64_t seed);

struct CodeSelection {
    LinearCode code;
    CosetDecoder decoder;
    double estimated_failure = 0.0;
    std::size_t trials = 0;
};

// Step-9 rule: highest-rate length-n candidate whose estimated decoding
// failure on BSC(q1) is within target_failure, at >= 10/target_failure
// trials. Candidates come from the registry families, extended to length n
// by block composition where needed. Throws SelectionError when nothing
// qualifies.
CodeSelection select_code(double q1, std::size_t n, double target_failure,
                          std::uint64_t seed, const std::vector<std::string>& families,
                          bool parallel = true);

const std::vector<std::string>& standard_families();

}  // namespace triqkd
