#include "triqkd/qubit.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace triqkd {

bool QubitState::is_valid(double tol) const {
    if (std::abs(rho[1] - std::conj(rho[2])) > tol) return false;
    if (std::abs(rho[0].imag()) > tol || std::abs(rho[3].imag()) > tol) return false;
    if (std::abs(trace() - 1.0) > tol) return false;
    // eigenvalues of a 2x2 Hermitian matrix
    double tr = trace();
    double det = (rho[0] * rho[3] - rho[1] * rho[2]).real();
    double disc = tr * tr - 4.0 * det;
    if (disc < 0.0) disc = 0.0;
    double lo = 0.5 * (tr - std::sqrt(disc));
    return lo >= -tol;
}

QubitState prepare(const Bb84State& s) {
    QubitState q;
    if (s.basis == Basis::Computational) {
        q.rho = s.bit == 0 ? std::array<std::complex<double>, 4>{1.0, 0.0, 0.0, 0.0}
                           : std::array<std::complex<double>, 4>{0.0, 0.0, 0.0, 1.0};
    } else {
        double off = s.bit == 0 ? 0.5 : -0.5;  // |+><+| or |-><-|
        q.rho = {0.5, off, off, 0.5};
    }
    return q;
}

int measure(QubitState q, Basis basis, Rng& rng) {
    // P(outcome 1): <1|rho|1> in the computational basis, <-|rho|-> in the
    // Hadamard basis; the latter is 1/2 - Re(rho01) for Hermitian rho.
    double p1 = basis == Basis::Computational ? q.rho[3].real() : 0.5 - q.rho[1].real();
    if (p1 < 0.0) p1 = 0.0;
    if (p1 > 1.0) p1 = 1.0;
    return rng.bernoulli(p1) ? 1 : 0;
}

Bb84State random_bb84(Rng& rng) {
    Bb84State s;
    s.basis = rng.bit() ? Basis::Hadamard : Basis::Computational;
    s.bit = rng.bit();
    return s;
}

QubitState apply_channel(const ChannelModel& m, QubitState q, Rng& rng, EveLog* eve,
                         std::size_t pulse_index) {
    if (std::holds_alternative<Ideal>(m.kind)) return q;
    if (const auto* dep = std::get_if<Depolarizing>(&m.kind)) {
        if (rng.bernoulli(dep->p)) q.rho = {0.5, 0.0, 0.0, 0.5};
        return q;
    }
    if (std::holds_alternative<InterceptResend>(m.kind)) {
        Basis eve_basis = rng.bit() ? Basis::Hadamard : Basis::Computational;
        int outcome = measure(q, eve_basis, rng);
        if (eve) eve->push_back(EveRecord{pulse_index, eve_basis, outcome});
        return prepare(Bb84State{eve_basis, outcome});
    }
    const auto& stages = std::get<Composed>(m.kind).stages;
    for (const auto& stage : stages) q = apply_channel(stage, q, rng, eve, pulse_index);
    return q;
}

ChannelModel parse_channel(const std::string& spec) {
    if (spec == "ideal") return ChannelModel{Ideal{}};
    if (spec == "intercept_resend") return ChannelModel{InterceptResend{}};
    if (spec.rfind("depolarizing:p=", 0) == 0) {
        double p = 0.0;
        try {
            std::size_t pos = 0;
            std::string num = spec.substr(15);
            p = std::stod(num, &pos);
            if (pos != num.size()) throw std::invalid_argument(num);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad depolarizing probability in '" + spec + "'");
        }
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("depolarizing probability outside [0, 1]: " + spec);
        return ChannelModel{Depolarizing{p}};
    }
    if (spec.rfind("compose:[", 0) == 0 && spec.back() == ']') {
        std::string inner = spec.substr(9, spec.size() - 10);
        Composed comp;
        std::size_t start = 0;
        while (start < inner.size()) {
            std::size_t end = inner.find(',', start);
            if (end == std::string::npos) end = inner.size();
            comp.stages.push_back(parse_channel(inner.substr(start, end - start)));
            start = end + 1;
        }
        if (comp.stages.empty()) return ChannelModel{Ideal{}};
        return ChannelModel{std::move(comp)};
    }
    throw std::invalid_argument("unknown channel model: '" + spec + "'");
}

std::string channel_to_string(const ChannelModel& m) {
    if (std::holds_alternative<Ideal>(m.kind)) return "ideal";
    if (std::holds_alternative<InterceptResend>(m.kind)) return "intercept_resend";
    if (const auto* dep = std::get_if<Depolarizing>(&m.kind)) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "depolarizing:p=%g", dep->p);
        return buf;
    }
    std::string s = "compose:[";
    const auto& stages = std::get<Composed>(m.kind).stages;
    for (std::size_t i = 0; i < stages.size(); ++i) {
        if (i) s += ',';
        s += channel_to_string(stages[i]);
    }
    return s + "]";
}

}  // namespace triqkd
