#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "triqkd/coding.hpp"
#include "triqkd/gf2.hpp"
#include "triqkd/qubit.hpp"

namespace triqkd {

struct ConfigurationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One independent random stream per role; a single master seed fans out so
// no two roles ever share a stream.
struct Seeds {
    std::uint64_t alice = 0, bob = 0, charlie = 0;
    std::uint64_t channel_bob = 0, channel_charlie = 0;
    std::uint64_t sampling = 0, code_selection = 0, subcode = 0;

    static Seeds derive(std::uint64_t master);
};

struct SessionConfig {
    std::size_t num_pulses = 4096;
    ChannelModel channel_bob;
    ChannelModel channel_charlie;
    double target_failure = 0.05;
    std::vector<std::string> registry;  // empty means the standard families
    double abort_threshold = 0.0;
    double q_slack = 0.0;  // additive margin on q1/q2 before code choices
    Seeds seeds;
    bool parallel = true;
};

// Sifted bits: computational-basis triples (a, b, c), Hadamard-basis triples
// (alpha, beta, gamma); each group truncated to even length.
struct SiftedData {
    BitVector a, b, c;
    BitVector alpha, beta, gamma;
};

struct PulseRecords {
    std::vector<Bb84State> alice;
    std::vector<Basis> bob_basis;
    std::vector<std::uint8_t> bob_outcome;
    std::vector<Basis> charlie_basis;
    std::vector<std::uint8_t> charlie_outcome;
};

SiftedData sift(const PulseRecords& records);

// Uniformly random size-half subset of {0..total-1}, returned sorted.
std::vector<std::size_t> sample_subset(std::size_t total, std::size_t half, Rng& rng);

// max of Bob's and Charlie's sampled mismatch fractions
double estimate_q1(const SiftedData& s, const std::vector<std::size_t>& sample);

// fraction of sampled Hadamard positions where exactly one of beta, gamma
// differs from alpha; positions where both differ are not counted
double estimate_q2(const SiftedData& s, const std::vector<std::size_t>& sample);

// Public append-only log of everything announced over the classical channels.
class Transcript {
public:
    struct Entry {
        int step = 0;
        std::string party, kind, payload;
    };

    void append(int step, std::string party, std::string kind, std::string payload);
    const std::vector<Entry>& entries() const { return entries_; }

    std::string to_text() const;  // STEP <k> <party> <kind> <payload> lines
    static Transcript parse(const std::string& text);

private:
    std::vector<Entry> entries_;
};

struct Aborted {
    std::string reason;
    double q1 = 0.0, q2 = 0.0;
};

struct Completed {
    BitVector key_alice, key_bob, key_charlie;
    double q1 = 0.0, q2 = 0.0, rate = 0.0;
    // reconciled-bits match for Bob, for Charlie, and key equality across all
    std::array<bool, 3> ground_truth_match{true, true, true};
    std::string code_name;
};

struct SessionOutcome {
    std::variant<Aborted, Completed> result;

    bool completed() const { return std::holds_alternative<Completed>(result); }
    const Completed& as_completed() const { return std::get<Completed>(result); }
    const Aborted& as_aborted() const { return std::get<Aborted>(result); }
    double q1() const;
    double q2() const;

    std::string to_record() const;  // structured text, keys hex-encoded
};

struct SessionResult {
    SessionOutcome outcome;
    Transcript transcript;
    EveLog eve_bob, eve_charlie;
    std::size_t sifted_computational = 0;  // 2n
    std::size_t sifted_hadamard = 0;       // 2n'
    std::size_t kept_n = 0;                // n
};

// Steps 1-13 end to end. Aborts when the rate gate fails, code selection
// fails, or privacy amplification would consume the whole code.
SessionResult run_session(const SessionConfig& cfg);

// Checks all three parties hold the announced syndrome, then labels the coset.
BitVector privacy_amplify(const BitVector& reconciled, const CodePair& pair,
                          const BitVector& announced_syndrome);

}  // namespace triqkd
