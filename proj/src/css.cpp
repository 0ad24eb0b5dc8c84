#include "triqkd/css.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace triqkd {

double StateVector::norm() const {
    double s = 0.0;
    for (const auto& a : amp) s += std::norm(a);
    return std::sqrt(s);
}

std::complex<double> StateVector::dot(const StateVector& o) const {
    std::complex<double> s = 0.0;
    for (std::size_t i = 0; i < amp.size(); ++i) s += std::conj(amp[i]) * o.amp[i];
    return s;
}

double StateVector::max_abs_diff(const StateVector& o) const {
    double d = 0.0;
    for (std::size_t i = 0; i < amp.size(); ++i) d = std::max(d, std::abs(amp[i] - o.amp[i]));
    return d;
}

double DenseDensityMatrix::trace_real() const {
    double t = 0.0;
    for (std::size_t i = 0; i < dim; ++i) t += at(i, i).real();
    return t;
}

double DenseDensityMatrix::max_abs_diff(const DenseDensityMatrix& o) const {
    double d = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) d = std::max(d, std::abs(m[i] - o.m[i]));
    return d;
}

double DenseDensityMatrix::max_off_diagonal() const {
    double d = 0.0;
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c)
            if (r != c) d = std::max(d, std::abs(at(r, c)));
    return d;
}

double DenseDensityMatrix::hermiticity_error() const {
    double d = 0.0;
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = r; c < dim; ++c)
            d = std::max(d, std::abs(at(r, c) - std::conj(at(c, r))));
    return d;
}

void DenseDensityMatrix::accumulate_outer(const StateVector& psi, double weight) {
    for (std::size_t r = 0; r < dim; ++r) {
        if (psi.amp[r] == 0.0) continue;
        std::complex<double> wr = weight * psi.amp[r];
        for (std::size_t c = 0; c < dim; ++c) m[r * dim + c] += wr * std::conj(psi.amp[c]);
    }
}

namespace {

StateVector codeword_impl(const CodePair& pair, const BitVector& x, const BitVector& z,
                          const BitVector& v, CssFault fault) {
    const std::size_t n = pair.c1.n;
    if (x.size() != n || z.size() != n || v.size() != n)
        throw DimensionError("css_codeword: x, z, v must have the code length");
    if (n > kMaxCssN)
        throw CapacityError("css_codeword: n > " + std::to_string(kMaxCssN));
    if (!pair.c1.contains(v)) throw std::domain_error("css_codeword: v outside C1");

    StateVector psi(2 * n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(std::size_t(1) << pair.c2.k));
    for (std::uint64_t mi = 0; mi < (std::uint64_t(1) << pair.c2.k); ++mi) {
        BitVector w = pair.c2.encode(BitVector::from_index(pair.c2.k, mi));
        BitVector phase_w = w;
        if (fault == CssFault::Mix0Sign && n > 0) phase_w.set(0, false);
        double sign = inner_product(z, phase_w) ? -1.0 : 1.0;
        BitVector s = x + v + w;
        std::uint64_t half = s.to_index();
        psi.amp[(half << n) | half] += sign * scale;
    }
    return psi;
}

DenseDensityMatrix average_over_z_impl(const CodePair& pair, const BitVector& x,
                                       const BitVector& v, CssFault fault) {
    const std::size_t n = pair.c1.n;
    DenseDensityMatrix rho(std::size_t(1) << (2 * n));
    const double weight = 1.0 / static_cast<double>(std::size_t(1) << n);
    for (std::uint64_t zi = 0; zi < (std::uint64_t(1) << n); ++zi) {
        StateVector psi = codeword_impl(pair, x, BitVector::from_index(n, zi), v, fault);
        rho.accumulate_outer(psi, weight);
    }
    return rho;
}

}  // namespace

StateVector css_codeword(const CodePair& pair, const BitVector& x, const BitVector& z,
                         const BitVector& v) {
    return codeword_impl(pair, x, z, v, CssFault::None);
}

DenseDensityMatrix average_over_z(const CodePair& pair, const BitVector& x, const BitVector& v) {
    if (!pair.c1.contains(v)) throw std::domain_error("average_over_z: v outside C1");
    return average_over_z_impl(pair, x, v, CssFault::None);
}

DenseDensityMatrix classical_mixture(const CodePair& pair, const BitVector& x,
                                     const BitVector& v) {
    const std::size_t n = pair.c1.n;
    if (x.size() != n || v.size() != n)
        throw DimensionError("classical_mixture: x, v must have the code length");
    DenseDensityMatrix rho(std::size_t(1) << (2 * n));
    const double weight = 1.0 / static_cast<double>(std::size_t(1) << pair.c2.k);
    for (std::uint64_t mi = 0; mi < (std::uint64_t(1) << pair.c2.k); ++mi) {
        BitVector s = x + v + pair.c2.encode(BitVector::from_index(pair.c2.k, mi));
        std::uint64_t half = s.to_index();
        std::uint64_t idx = (half << n) | half;
        rho.at(idx, idx) += weight;
    }
    return rho;
}

DenseDensityMatrix average_over_xv_literal(const CodePair& pair) {
    const std::size_t n = pair.c1.n;
    if (n > 4) throw CapacityError("average_over_xv: n > 4");
    DenseDensityMatrix acc(std::size_t(1) << (2 * n));
    const std::uint64_t space = std::uint64_t(1) << n;
    const double weight = 1.0 / static_cast<double>(space * space);
    for (std::uint64_t xi = 0; xi < space; ++xi) {
        for (std::uint64_t vi = 0; vi < space; ++vi) {
            DenseDensityMatrix rho = classical_mixture(pair, BitVector::from_index(n, xi),
                                                       BitVector::from_index(n, vi));
            for (std::size_t i = 0; i < acc.m.size(); ++i) acc.m[i] += weight * rho.m[i];
        }
    }
    return acc;
}

DenseDensityMatrix average_over_xv_restricted(const CodePair& pair) {
    const std::size_t n = pair.c1.n;
    if (n > 4) throw CapacityError("average_over_xv: n > 4");

    // first numeric representative of each coset of C1
    std::vector<BitVector> reps;
    std::set<std::uint64_t> seen;
    for (std::uint64_t u = 0; u < (std::uint64_t(1) << n); ++u) {
        BitVector w = BitVector::from_index(n, u);
        std::uint64_t syn = pair.c1.syndrome(w).to_index();
        if (seen.insert(syn).second) reps.push_back(std::move(w));
    }
    std::vector<BitVector> c1_words = pair.c1.codewords();

    DenseDensityMatrix acc(std::size_t(1) << (2 * n));
    const double weight = 1.0 / static_cast<double>(reps.size() * c1_words.size());
    for (const auto& x : reps) {
        for (const auto& v : c1_words) {
            DenseDensityMatrix rho = classical_mixture(pair, x, v);
            for (std::size_t i = 0; i < acc.m.size(); ++i) acc.m[i] += weight * rho.m[i];
        }
    }
    return acc;
}

DenseDensityMatrix uniform_doubled_mixture(std::size_t n) {
    DenseDensityMatrix rho(std::size_t(1) << (2 * n));
    const double weight = 1.0 / static_cast<double>(std::size_t(1) << n);
    for (std::uint64_t a = 0; a < (std::uint64_t(1) << n); ++a) {
        std::uint64_t idx = (a << n) | a;
        rho.at(idx, idx) += weight;
    }
    return rho;
}

StateVector apply_phase_error(const StateVector& psi, const BitVector& e) {
    if (e.size() != psi.n_qubits)
        throw DimensionError("apply_phase_error: pattern length != qubit count");
    StateVector out = psi;
    const std::uint64_t mask = e.to_index();
    for (std::uint64_t u = 0; u < out.amp.size(); ++u) {
        if (std::popcount(mask & u) & 1) out.amp[u] = -out.amp[u];
    }
    return out;
}

bool check_pairwise_stabilizer(const CodePair& pair, const BitVector& x, const BitVector& z,
                               const BitVector& v, std::size_t i, double tol) {
    const std::size_t n = pair.c1.n;
    if (i >= n) throw std::invalid_argument("check_pairwise_stabilizer: index out of range");
    StateVector psi = css_codeword(pair, x, z, v);
    BitVector e = BitVector::unit(2 * n, i) + BitVector::unit(2 * n, n + i);
    return apply_phase_error(psi, e).max_abs_diff(psi) <= tol;
}

BitMatrix doubled_parity_check(const BitMatrix& h2) { return doubled_rows(h2); }

BitVector phase_syndrome(const BitMatrix& h2, const BitVector& e) {
    if (e.size() != 2 * h2.cols()) throw DimensionError("phase_syndrome: length mismatch");
    BitVector s(h2.rows());
    for (std::size_t i = 0; i < h2.rows(); ++i)
        if (inner_product(doubled(h2.row(i)), e)) s.set(i, true);
    return s;
}

bool phase_error_equivalence(const CodePair& pair, const BitVector& e, const BitVector& e_prime,
                             double tol) {
    const std::size_t n = pair.c1.n;
    BitVector z(n);
    std::vector<BitVector> c1_words = pair.c1.codewords();
    for (std::uint64_t xi = 0; xi < (std::uint64_t(1) << n); ++xi) {
        BitVector x = BitVector::from_index(n, xi);
        for (const auto& v : c1_words) {
            StateVector psi = css_codeword(pair, x, z, v);
            if (apply_phase_error(psi, e).max_abs_diff(apply_phase_error(psi, e_prime)) > tol)
                return false;
        }
    }
    return true;
}

std::vector<LinearCode> all_subspace_codes(std::size_t n) {
    if (n == 0 || n > 4) throw CapacityError("all_subspace_codes: supported for 1 <= n <= 4");
    const std::uint32_t space = 1u << n;

    // span of every n-tuple of vectors, deduplicated by membership mask
    std::set<std::uint64_t> masks;
    std::vector<std::uint32_t> gens(n);
    std::uint64_t tuples = 1;
    for (std::size_t i = 0; i < n; ++i) tuples *= space;
    for (std::uint64_t t = 0; t < tuples; ++t) {
        std::uint64_t tt = t;
        std::uint64_t mask = 1;  // zero vector
        for (std::size_t i = 0; i < n; ++i) {
            std::uint32_t g = static_cast<std::uint32_t>(tt % space);
            tt /= space;
            std::uint64_t translated = 0;
            for (std::uint32_t u = 0; u < space; ++u)
                if ((mask >> u) & 1) translated |= std::uint64_t(1) << (u ^ g);
            mask |= translated;
        }
        masks.insert(mask);
    }

    std::vector<LinearCode> codes;
    for (std::uint64_t mask : masks) {
        std::vector<BitVector> members;
        for (std::uint32_t u = 0; u < space; ++u)
            if ((mask >> u) & 1) members.push_back(BitVector::from_index(n, u));
        RowReduction rr = row_reduce(BitMatrix::from_rows(members));
        std::vector<BitVector> basis;
        for (std::size_t i = 0; i < rr.rank; ++i) basis.push_back(rr.reduced.row(i));

        char name[40];
        std::snprintf(name, sizeof name, "sub_%zu_%llx", n,
                      static_cast<unsigned long long>(mask));
        if (basis.empty()) {
            LinearCode c;
            c.name = name;
            c.n = n;
            c.k = 0;
            c.generator = BitMatrix(0, n);
            c.parity_check = BitMatrix::identity(n);
            codes.push_back(std::move(c));
        } else {
            codes.push_back(LinearCode::from_generator(name, BitMatrix::from_rows(basis)));
        }
    }
    return codes;
}

std::vector<CodePair> all_code_pairs(std::size_t n) {
    std::vector<LinearCode> codes = all_subspace_codes(n);

    // recover membership masks for the subset test
    auto mask_of = [&](const LinearCode& c) {
        std::uint64_t mask = 0;
        for (const auto& w : c.codewords()) mask |= std::uint64_t(1) << w.to_index();
        return mask;
    };
    std::vector<std::uint64_t> masks;
    masks.reserve(codes.size());
    for (const auto& c : codes) masks.push_back(mask_of(c));

    std::vector<CodePair> pairs;
    for (std::size_t i = 0; i < codes.size(); ++i)
        for (std::size_t j = 0; j < codes.size(); ++j)
            if ((masks[j] & ~masks[i]) == 0) pairs.push_back(CodePair::make(codes[i], codes[j]));
    return pairs;
}

// ---- verification suite -------------------------------------------------

namespace {

struct CaseTracker {
    double max_dev = 0.0;
    std::string failing;
    std::size_t tuples = 0;

    void observe(double dev, double tol, const std::string& what) {
        ++tuples;
        if (dev > max_dev) max_dev = dev;
        if (dev > tol && failing.empty()) failing = what;
    }
    void merge(const CaseTracker& o) {
        tuples += o.tuples;
        if (o.max_dev > max_dev) max_dev = o.max_dev;
        if (failing.empty()) failing = o.failing;
    }
};

std::string tuple_desc(std::size_t n, const CodePair& pair, const std::string& detail) {
    std::ostringstream os;
    os << "n=" << n << " c1=" << pair.c1.name << " c2=" << pair.c2.name << ' ' << detail;
    return os.str();
}

CssIdentityReport finish(std::string name, std::string range, const CaseTracker& t) {
    CssIdentityReport r;
    r.name = std::move(name);
    r.range = std::move(range);
    r.tuples = t.tuples;
    r.max_deviation = t.max_dev;
    r.pass = t.failing.empty();
    r.failing_case = t.failing;
    return r;
}

}  // namespace

std::vector<CssIdentityReport> run_css_suite(const CssVerifyOptions& opts) {
    std::vector<CssIdentityReport> reports;
    const double tol = 1e-12;

    std::size_t mix0_cap = std::min<std::size_t>(opts.max_n, 3);
    std::size_t mix_cap = std::min<std::size_t>(opts.max_n >= 1 ? opts.max_n - 1 : 0, 4);
    std::size_t stab_cap = std::min<std::size_t>(opts.max_n, 3);
    std::size_t fold_cap = std::min<std::size_t>(opts.max_n + 1, 8);
    std::size_t pair_fold_cap = std::min<std::size_t>(fold_cap, 4);

    // Eq. (mix0): z-average of codeword projectors equals the classical mixture
    {
        CaseTracker total;
        for (std::size_t n = 1; n <= mix0_cap; ++n) {
            std::vector<CodePair> pairs = all_code_pairs(n);
            std::vector<CaseTracker> per_pair(pairs.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (opts.parallel)
#endif
            for (long long pi = 0; pi < static_cast<long long>(pairs.size()); ++pi) {
                const CodePair& pair = pairs[pi];
                for (std::uint64_t xi = 0; xi < (std::uint64_t(1) << n); ++xi) {
                    BitVector x = BitVector::from_index(n, xi);
                    for (const auto& v : pair.c1.codewords()) {
                        DenseDensityMatrix lhs = average_over_z_impl(pair, x, v, opts.fault);
                        DenseDensityMatrix rhs = classical_mixture(pair, x, v);
                        per_pair[pi].observe(
                            lhs.max_abs_diff(rhs), tol,
                            tuple_desc(n, pair, "x=" + x.to_string() + " v=" + v.to_string()));
                    }
                }
            }
            for (const auto& t : per_pair) total.merge(t);
        }
        reports.push_back(finish("mix0", "n<=" + std::to_string(mix0_cap), total));
    }

    // Eq. (mix), literal form: x and v both range over the full space
    {
        CaseTracker total;
        for (std::size_t n = 1; n <= mix_cap; ++n) {
            DenseDensityMatrix uniform = uniform_doubled_mixture(n);
            for (const auto& pair : all_code_pairs(n)) {
                DenseDensityMatrix avg = average_over_xv_literal(pair);
                total.observe(avg.max_abs_diff(uniform), tol, tuple_desc(n, pair, "literal"));
                total.observe(avg.max_off_diagonal(), tol, tuple_desc(n, pair, "off-diagonal"));
                total.observe(std::abs(avg.trace_real() - 1.0), tol, tuple_desc(n, pair, "trace"));
            }
        }
        reports.push_back(finish("mix_literal", "n<=" + std::to_string(mix_cap), total));
    }

    // Eq. (mix), C1-restricted variant: x over coset representatives, v in C1
    {
        CaseTracker total;
        for (std::size_t n = 1; n <= mix_cap; ++n) {
            DenseDensityMatrix uniform = uniform_doubled_mixture(n);
            for (const auto& pair : all_code_pairs(n)) {
                DenseDensityMatrix avg = average_over_xv_restricted(pair);
                total.observe(avg.max_abs_diff(uniform), tol, tuple_desc(n, pair, "restricted"));
            }
        }
        reports.push_back(finish("mix_restricted", "n<=" + std::to_string(mix_cap), total));
    }

    // Z_i (x) Z_{n+i} never changes a codeword
    {
        CaseTracker total;
        for (std::size_t n = 1; n <= stab_cap; ++n) {
            std::vector<CodePair> pairs = all_code_pairs(n);
            std::vector<CaseTracker> per_pair(pairs.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (opts.parallel)
#endif
            for (long long pi = 0; pi < static_cast<long long>(pairs.size()); ++pi) {
                const CodePair& pair = pairs[pi];
                auto c1_words = pair.c1.codewords();
                for (std::uint64_t xi = 0; xi < (std::uint64_t(1) << n); ++xi) {
                    BitVector x = BitVector::from_index(n, xi);
                    for (std::uint64_t zi = 0; zi < (std::uint64_t(1) << n); ++zi) {
                        BitVector z = BitVector::from_index(n, zi);
                        for (const auto& v : c1_words) {
                            StateVector psi = css_codeword(pair, x, z, v);
                            for (std::size_t i = 0; i < n; ++i) {
                                BitVector e = BitVector::unit(2 * n, i) +
                                              BitVector::unit(2 * n, n + i);
                                double dev = apply_phase_error(psi, e).max_abs_diff(psi);
                                per_pair[pi].observe(
                                    dev, tol,
                                    tuple_desc(n, pair,
                                               "x=" + x.to_string() + " z=" + z.to_string() +
                                                   " v=" + v.to_string() +
                                                   " i=" + std::to_string(i)));
                            }
                        }
                    }
                }
            }
            for (const auto& t : per_pair) total.merge(t);
        }
        reports.push_back(finish("stabilizer_zz", "n<=" + std::to_string(stab_cap), total));
    }

    // Z_i and Z_{n+i} act identically on doubled-support codewords
    {
        CaseTracker total;
        for (std::size_t n = 1; n <= stab_cap; ++n) {
            for (const auto& pair : all_code_pairs(n)) {
                auto c1_words = pair.c1.codewords();
                for (std::uint64_t xi = 0; xi < (std::uint64_t(1) << n); ++xi) {
                    BitVector x = BitVector::from_index(n, xi);
                    for (std::uint64_t zi = 0; zi < (std::uint64_t(1) << n); ++zi) {
                        BitVector z = BitVector::from_index(n, zi);
                        for (const auto& v : c1_words) {
                            StateVector psi = css_codeword(pair, x, z, v);
                            for (std::size_t i = 0; i < n; ++i) {
                                StateVector left =
                                    apply_phase_error(psi, BitVector::unit(2 * n, i));
                                StateVector right =
                                    apply_phase_error(psi, BitVector::unit(2 * n, n + i));
                                total.observe(left.max_abs_diff(right), tol,
                                              tuple_desc(n, pair, "i=" + std::to_string(i)));
                            }
                        }
                    }
                }
            }
        }
        reports.push_back(
            finish("z_left_right_same", "n<=" + std::to_string(stab_cap), total));
    }

    // a lone Z_i must change some codeword once C2 is nontrivial
    {
        CaseTracker total;
        bool found = false;
        for (std::size_t n = 1; n <= stab_cap && !found; ++n) {
            for (const auto& pair : all_code_pairs(n)) {
                if (pair.c2.k == 0) continue;
                for (std::size_t i = 0; i < n && !found; ++i) {
                    bool coord_varies = false;
                    for (const auto& w : pair.c2.codewords())
                        if (w.get(i)) coord_varies = true;
                    if (!coord_varies) continue;
                    BitVector x(n), z(n), v(n);
                    StateVector psi = css_codeword(pair, x, z, v);
                    double dev =
                        apply_phase_error(psi, BitVector::unit(2 * n, i)).max_abs_diff(psi);
                    total.observe(dev, 2.0, tuple_desc(n, pair, "i=" + std::to_string(i)));
                    if (dev > 0.5) found = true;
                }
                if (found) break;
            }
        }
        CssIdentityReport r;
        r.name = "z_single_changes_codeword";
        r.range = "n<=" + std::to_string(stab_cap);
        r.tuples = total.tuples;
        r.max_deviation = total.max_dev;
        r.pass = found;
        if (!found) r.failing_case = "no single-Z counterexample found";
        reports.push_back(std::move(r));
    }

    // (hh, e) = (h, fold(e)) for every h and e
    {
        CaseTracker total;
        for (std::size_t n = 1; n <= fold_cap; ++n) {
            for (std::uint64_t hi = 0; hi < (std::uint64_t(1) << n); ++hi) {
                BitVector h = BitVector::from_index(n, hi);
                BitVector hh = doubled(h);
                for (std::uint64_t ei = 0; ei < (std::uint64_t(1) << (2 * n)); ++ei) {
                    BitVector e = BitVector::from_index(2 * n, ei);
                    int lhs = inner_product(hh, e);
                    int rhs = inner_product(h, fold(e));
                    total.observe(lhs == rhs ? 0.0 : 1.0, 0.5,
                                  "n=" + std::to_string(n) + " h=" + h.to_string() +
                                      " e=" + e.to_string());
                }
            }
        }
        reports.push_back(finish("syndrome_fold", "n<=" + std::to_string(fold_cap), total));
    }

    // phase_syndrome equals H2 * fold(e) for every pair's H2 = gen(C2)
    {
        CaseTracker total;
        for (std::size_t n = 1; n <= pair_fold_cap; ++n) {
            for (const auto& pair : all_code_pairs(n)) {
                const BitMatrix& h2 = pair.c2.generator;  // parity check of C2-perp
                for (std::uint64_t ei = 0; ei < (std::uint64_t(1) << (2 * n)); ++ei) {
                    BitVector e = BitVector::from_index(2 * n, ei);
                    bool equal = phase_syndrome(h2, e) == h2 * fold(e);
                    total.observe(equal ? 0.0 : 1.0, 0.5,
                                  tuple_desc(n, pair, "e=" + e.to_string()));
                }
            }
        }
        reports.push_back(
            finish("phase_syndrome_fold", "n<=" + std::to_string(pair_fold_cap), total));
    }

    // H2' = doubled rows: rank preserved, kills C2C2, kernel is (C2C2)-perp
    {
        CaseTracker total;
        for (std::size_t n = 1; n <= pair_fold_cap; ++n) {
            for (const auto& pair : all_code_pairs(n)) {
                const BitMatrix& h2 = pair.c2.generator;
                BitMatrix h2d = doubled_parity_check(h2);
                bool rank_ok = rank(h2d) == rank(h2);
                total.observe(rank_ok ? 0.0 : 1.0, 0.5, tuple_desc(n, pair, "rank"));
                for (const auto& w : pair.c2.codewords()) {
                    bool zero = (h2d * doubled(w)).is_zero();
                    total.observe(zero ? 0.0 : 1.0, 0.5,
                                  tuple_desc(n, pair, "w=" + w.to_string()));
                }
                // kernel of H2' is exactly {y : fold(y) in C2-perp}
                std::size_t expect_dim = 2 * n - pair.c2.k;
                auto kb = kernel_basis(h2d);
                bool dim_ok = kb.size() == expect_dim;
                total.observe(dim_ok ? 0.0 : 1.0, 0.5, tuple_desc(n, pair, "kernel-dim"));
                for (const auto& y : kb) {
                    bool in_dual = (h2 * fold(y)).is_zero();
                    total.observe(in_dual ? 0.0 : 1.0, 0.5,
                                  tuple_desc(n, pair, "y=" + y.to_string()));
                }
            }
        }
        reports.push_back(
            finish("doubled_parity", "n<=" + std::to_string(pair_fold_cap), total));
    }

    // phase-error round trip on the Steane pair: C2 = dual of Hamming(7,4),
    // so C2-perp decoding is Hamming decoding
    {
        CaseTracker total;
        LinearCode c1 = LinearCode::hamming_7_4();
        LinearCode c2 = LinearCode::from_generator("hamming_dual", c1.parity_check);
        CodePair pair = CodePair::make(c1, c2);
        const std::size_t n = pair.c1.n;
        const BitMatrix& h2 = pair.c2.generator;
        LinearCode c2perp = LinearCode::from_parity_check("c2perp", h2);
        CosetDecoder dec = CosetDecoder::build(c2perp);

        std::vector<std::pair<BitVector, BitVector>> contexts = {
            {BitVector(n), BitVector(n)},
            {BitVector::unit(n, 0), pair.c1.generator.row(0)},
        };
        BitVector z = BitVector::from_string("1010101");

        for (const auto& [x, v] : contexts) {
            StateVector psi = css_codeword(pair, x, z, v);
            std::vector<BitVector> errors;
            for (std::size_t d = 0; d < n; ++d) {
                for (std::uint64_t li = 0; li < (std::uint64_t(1) << n); ++li) {
                    BitVector left = BitVector::from_index(n, li);
                    BitVector right = left + BitVector::unit(n, d);
                    errors.push_back(concat(left, right));
                }
            }
            std::vector<double> fidelity(errors.size(), 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (opts.parallel)
#endif
            for (long long ei = 0; ei < static_cast<long long>(errors.size()); ++ei) {
                const BitVector& e = errors[ei];
                StateVector damaged = apply_phase_error(psi, e);
                BitVector folded_estimate = dec.coset_leader(phase_syndrome(h2, e));
                BitVector fix = concat(folded_estimate, BitVector(n));
                StateVector restored = apply_phase_error(damaged, fix);
                fidelity[ei] = std::norm(psi.dot(restored));
            }
            for (std::size_t ei = 0; ei < errors.size(); ++ei) {
                total.observe(1.0 - fidelity[ei], 1e-10,
                              tuple_desc(n, pair, "e=" + errors[ei].to_string()));
            }
        }
        reports.push_back(finish("phase_roundtrip", "steane n=7 weight(fold)=1", total));
    }

    return reports;
}

std::string format_css_report(const std::vector<CssIdentityReport>& reports) {
    std::ostringstream os;
    bool all_pass = true;
    for (const auto& r : reports) {
        char dev[32];
        std::snprintf(dev, sizeof dev, "%.3e", r.max_deviation);
        os << "identity " << r.name;
        for (std::size_t i = r.name.size(); i < 28; ++i) os << ' ';
        os << r.range;
        for (std::size_t i = r.range.size(); i < 26; ++i) os << ' ';
        os << "tuples=" << r.tuples << " max_dev=" << dev << ' '
           << (r.pass ? "PASS" : "FAIL") << '\n';
        if (!r.pass) {
            os << "  failing: " << r.failing_case << '\n';
            all_pass = false;
        }
    }
    os << "RESULT " << (all_pass ? "PASS" : "FAIL") << '\n';
    return os.str();
}

}  // namespace triqkd
