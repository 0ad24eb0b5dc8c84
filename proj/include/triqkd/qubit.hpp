#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "triqkd/rng.hpp"

namespace triqkd {

enum class Basis : std::uint8_t { Computational = 0, Hadamard = 1 };

// One of |0>, |1>, |+>, |->; bit 0 maps to |0> and |+>
struct Bb84State {
    Basis basis = Basis::Computational;
    int bit = 0;

    bool operator==(const Bb84State& o) const { return basis == o.basis && bit == o.bit; }
};

// 2x2 density matrix, row-major
struct QubitState {
    std::array<std::complex<double>, 4> rho{};

    std::complex<double> at(int r, int c) const { return rho[r * 2 + c]; }
    double trace() const { return rho[0].real() + rho[3].real(); }
    bool is_valid(double tol = 1e-12) const;
};

QubitState prepare(const Bb84State& s);

// Born-rule projective measurement; the qubit is consumed (passed by value).
int measure(QubitState q, Basis basis, Rng& rng);

Bb84State random_bb84(Rng& rng);

struct EveRecord {
    std::size_t pulse = 0;
    Basis basis = Basis::Computational;
    int outcome = 0;
};
using EveLog = std::vector<EveRecord>;

struct ChannelModel;

struct Ideal {};
struct Depolarizing {
    double p = 0.0;
};
struct InterceptResend {};
struct Composed {
    std::vector<ChannelModel> stages;
};

// Per-qubit channel / adversary model. Depolarizing draws the replace-or-keep
// coin per qubit (Monte-Carlo trajectory); InterceptResend measures in a
// random basis, forwards the re-prepared state and logs what Eve saw.
struct ChannelModel {
    std::variant<Ideal, Depolarizing, InterceptResend, Composed> kind = Ideal{};
};

QubitState apply_channel(const ChannelModel& m, QubitState q, Rng& rng, EveLog* eve = nullptr,
                         std::size_t pulse_index = 0);

// Config syntax: ideal | depolarizing:p=<v> | intercept_resend | compose:[a,b,...]
ChannelModel parse_channel(const std::string& spec);
std::string channel_to_string(const ChannelModel& m);

}  // namespace triqkd
