#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "triqkd/coding.hpp"
#include "triqkd/gf2.hpp"

namespace triqkd {

// Dense state over n_qubits qubits; the leftmost qubit is the highest-order
// bit of the amplitude index.
struct StateVector {
    std::size_t n_qubits = 0;
    std::vector<std::complex<double>> amp;

    explicit StateVector(std::size_t qubits = 0)
        : n_qubits(qubits), amp(std::size_t(1) << qubits, 0.0) {}

    double norm() const;
    std::complex<double> dot(const StateVector& o) const;  // <this|o>
    double max_abs_diff(const StateVector& o) const;
};

struct DenseDensityMatrix {
    std::size_t dim = 0;
    std::vector<std::complex<double>> m;  // row-major dim x dim

    explicit DenseDensityMatrix(std::size_t dim = 0) : dim(dim), m(dim * dim, 0.0) {}

    std::complex<double>& at(std::size_t r, std::size_t c) { return m[r * dim + c]; }
    std::complex<double> at(std::size_t r, std::size_t c) const { return m[r * dim + c]; }
    double trace_real() const;
    double max_abs_diff(const DenseDensityMatrix& o) const;
    double max_off_diagonal() const;
    double hermiticity_error() const;  // max |rho - rho^dagger| entry

    void accumulate_outer(const StateVector& psi, double weight);  // += w |psi><psi|
};

// Doubled-code codeword over 2n qubits:
//   (1/sqrt|C2|) sum_{w in C2} (-1)^{(z,w)} |x+v+w>|x+v+w>
// x, z, v have length n and v must lie in C1.
StateVector css_codeword(const CodePair& pair, const BitVector& x, const BitVector& z,
                         const BitVector& v);

// Largest doubled-code size the dense representation accepts (2^(2n) amplitudes).
inline constexpr std::size_t kMaxCssN = 7;

// (1/2^n) sum_z |psi(x,z,v)><psi(x,z,v)|
DenseDensityMatrix average_over_z(const CodePair& pair, const BitVector& x, const BitVector& v);

// classical mixture (1/|C2|) sum_w |(x+v+w)(x+v+w)><...|
DenseDensityMatrix classical_mixture(const CodePair& pair, const BitVector& x,
                                     const BitVector& v);

// (1/4^n) sum over x and v ranging over the whole space
DenseDensityMatrix average_over_xv_literal(const CodePair& pair);

// average over x in coset representatives of C1 and v in C1
DenseDensityMatrix average_over_xv_restricted(const CodePair& pair);

// (1/2^n) sum_a |aa><aa|
DenseDensityMatrix uniform_doubled_mixture(std::size_t n);

// amplitude at basis index u picks up (-1)^{(e,u)}
StateVector apply_phase_error(const StateVector& psi, const BitVector& e);

// whether Z_i (x) Z_{n+i} leaves the codeword exactly unchanged (0-based i)
bool check_pairwise_stabilizer(const CodePair& pair, const BitVector& x, const BitVector& z,
                               const BitVector& v, std::size_t i, double tol = 1e-12);

// rows h of h2 become hh
BitMatrix doubled_parity_check(const BitMatrix& h2);

// vector of inner products (h_i h_i, e); equals h2 * fold(e)
BitVector phase_syndrome(const BitMatrix& h2, const BitVector& e);

// whether the two phase-error patterns act identically on every codeword of
// the pair (swept over all x and all v in C1; z does not affect equality)
bool phase_error_equivalence(const CodePair& pair, const BitVector& e, const BitVector& e_prime,
                             double tol = 1e-12);

// ---- verification suite -------------------------------------------------

enum class CssFault {
    None,
    Mix0Sign,  // drops the first coordinate of w from the codeword phase
};

struct CssIdentityReport {
    std::string name;
    std::string range;
    std::size_t tuples = 0;
    double max_deviation = 0.0;
    bool pass = false;
    std::string failing_case;  // empty when pass
};

struct CssVerifyOptions {
    std::size_t max_n = 3;  // base bound; per-identity offsets and hard caps apply
    bool parallel = true;
    CssFault fault = CssFault::None;
};

std::vector<CssIdentityReport> run_css_suite(const CssVerifyOptions& opts);
std::string format_css_report(const std::vector<CssIdentityReport>& reports);

// all subspaces of F_2^n (n <= 4), each as a basis-only LinearCode
std::vector<LinearCode> all_subspace_codes(std::size_t n);

// all nested pairs (C1, C2) with C2 inside C1 over F_2^n
std::vector<CodePair> all_code_pairs(std::size_t n);

}  // namespace triqkd
