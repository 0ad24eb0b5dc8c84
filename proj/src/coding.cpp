#include "triqkd/coding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace triqkd {

double binary_entropy(double q) {
    if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("binary_entropy: q outside [0, 1]");
    if (q == 0.0 || q == 1.0) return 0.0;
    return -q * std::log2(q) - (1.0 - q) * std::log2(1.0 - q);
}

double key_rate(double q1, double q2) {
    if (!(q1 >= 0.0 && q1 <= 0.5) || !(q2 >= 0.0 && q2 <= 0.5))
        throw std::domain_error("key_rate: q outside [0, 0.5]");
    return 1.0 - binary_entropy(q1) - binary_entropy(q2);
}

LinearCode LinearCode::from_generator(std::string name, BitMatrix g) {
    LinearCode c;
    c.name = std::move(name);
    c.n = g.cols();
    c.k = g.rows();
    if (rank(g) != c.k) throw std::invalid_argument("LinearCode: generator not full rank");
    auto dual = kernel_basis(g);
    c.parity_check = dual.empty() ? BitMatrix(0, c.n) : BitMatrix::from_rows(std::move(dual));
    c.generator = std::move(g);
    return c;
}

LinearCode LinearCode::from_parity_check(std::string name, BitMatrix h) {
    LinearCode c;
    c.name = std::move(name);
    c.n = h.cols();
    if (rank(h) != h.rows()) throw std::invalid_argument("LinearCode: parity check not full rank");
    c.k = c.n - h.rows();
    auto gen = kernel_basis(h);
    c.generator = gen.empty() ? BitMatrix(0, c.n) : BitMatrix::from_rows(std::move(gen));
    c.parity_check = std::move(h);
    return c;
}

LinearCode LinearCode::trivial(std::size_t n) {
    LinearCode c;
    c.name = "trivial_" + std::to_string(n);
    c.n = n;
    c.k = n;
    c.generator = BitMatrix::identity(n);
    c.parity_check = BitMatrix(0, n);
    return c;
}

LinearCode LinearCode::repetition(std::size_t n) {
    if (n == 0) throw std::invalid_argument("repetition: n must be positive");
    BitMatrix g(1, n);
    for (std::size_t j = 0; j < n; ++j) g.set(0, j, true);
    return from_generator("repetition_" + std::to_string(n) + "_1", std::move(g));
}

LinearCode LinearCode::hamming_7_4() {
    return from_parity_check("hamming_7_4", BitMatrix::from_string("1010101\n"
                                                                   "0110011\n"
                                                                   "0001111"));
}

LinearCode LinearCode::ext_hamming_8_4() {
    return from_parity_check("ext_hamming_8_4", BitMatrix::from_string("10101010\n"
                                                                       "01100110\n"
                                                                       "00011110\n"
                                                                       "11111111"));
}

LinearCode LinearCode::random_code(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k > n) throw std::invalid_argument("random_code: k > n");
    std::string name = "random_" + std::to_string(n) + "_" + std::to_string(k) + "_" +
                       std::to_string(seed);
    if (k == 0) {
        LinearCode c;
        c.name = std::move(name);
        c.n = n;
        c.k = 0;
        c.generator = BitMatrix(0, n);
        c.parity_check = BitMatrix::identity(n);
        return c;
    }
    Rng rng(mix_seed(seed, n, k));
    for (;;) {
        BitMatrix g(k, n);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (rng.bit()) g.set(i, j, true);
        if (rank(g) == k) return from_generator(std::move(name), std::move(g));
    }
}

BitVector LinearCode::syndrome(const BitVector& word) const {
    if (word.size() != n) throw DimensionError("syndrome: word length != code length");
    return parity_check * word;
}

bool LinearCode::contains(const BitVector& word) const { return syndrome(word).is_zero(); }

BitVector LinearCode::encode(const BitVector& message) const {
    if (message.size() != k) throw DimensionError("encode: message length != code dimension");
    BitVector w(n);
    for (std::size_t i = 0; i < k; ++i)
        if (message.get(i)) w += generator.row(i);
    return w;
}

std::vector<BitVector> LinearCode::codewords() const {
    if (k > 24) throw CapacityError("codewords: dimension too large to enumerate");
    std::vector<BitVector> all;
    all.reserve(std::size_t(1) << k);
    for (std::uint64_t m = 0; m < (std::uint64_t(1) << k); ++m)
        all.push_back(encode(BitVector::from_index(k, m)));
    return all;
}

LinearCode compose_blocks(std::vector<LinearCode> parts) {
    if (parts.empty()) throw std::invalid_argument("compose_blocks: no parts");
    if (parts.size() == 1) return std::move(parts.front());

    std::size_t n = 0, k = 0;
    for (const auto& p : parts) {
        n += p.n;
        k += p.k;
    }
    LinearCode c;
    c.n = n;
    c.k = k;
    c.generator = BitMatrix(k, n);
    c.parity_check = BitMatrix(n - k, n);
    std::size_t coff = 0, groff = 0, hroff = 0;
    for (const auto& p : parts) {
        for (std::size_t i = 0; i < p.k; ++i)
            for (std::size_t j = 0; j < p.n; ++j)
                if (p.generator.get(i, j)) c.generator.set(groff + i, coff + j, true);
        for (std::size_t i = 0; i + p.k < p.n; ++i)
            for (std::size_t j = 0; j < p.n; ++j)
                if (p.parity_check.get(i, j)) c.parity_check.set(hroff + i, coff + j, true);
        coff += p.n;
        groff += p.k;
        hroff += p.n - p.k;
    }

    // run-length compressed name: blocks:<name>*<count>,...
    std::string name = "blocks:";
    for (std::size_t i = 0; i < parts.size();) {
        std::size_t j = i;
        while (j < parts.size() && parts[j].name == parts[i].name) ++j;
        if (i) name += ',';
        name += parts[i].name;
        if (j - i > 1) name += "*" + std::to_string(j - i);
        i = j;
    }
    c.name = std::move(name);
    c.blocks = std::move(parts);
    return c;
}

namespace {

bool consume_prefix(std::string& s, const std::string& prefix) {
    if (s.rfind(prefix, 0) != 0) return false;
    s.erase(0, prefix.size());
    return true;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t end = s.find(sep, start);
        out.push_back(s.substr(start, end == std::string::npos ? end : end - start));
        if (end == std::string::npos) break;
        start = end + 1;
    }
    return out;
}

std::uint64_t parse_u64(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        std::uint64_t v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad " + what + " in code name: '" + s + "'");
    }
}

}  // namespace

LinearCode code_by_name(const std::string& full_name) {
    std::string s = full_name;
    if (consume_prefix(s, "blocks:")) {
        std::vector<LinearCode> parts;
        for (const auto& item : split(s, ',')) {
            auto star = item.find('*');
            std::string base = item.substr(0, star);
            std::size_t count = star == std::string::npos
                                    ? 1
                                    : static_cast<std::size_t>(parse_u64(item.substr(star + 1), "count"));
            LinearCode part = code_by_name(base);
            for (std::size_t i = 0; i < count; ++i) parts.push_back(part);
        }
        return compose_blocks(std::move(parts));
    }
    if (s == "hamming_7_4") return LinearCode::hamming_7_4();
    if (s == "ext_hamming_8_4") return LinearCode::ext_hamming_8_4();
    if (consume_prefix(s, "trivial_"))
        return LinearCode::trivial(static_cast<std::size_t>(parse_u64(s, "length")));
    if (consume_prefix(s, "repetition_")) {
        auto fields = split(s, '_');
        // accept both repetition_N and repetition_N_1
        if (fields.size() == 2 && fields[1] != "1")
            throw std::invalid_argument("unknown code name: " + full_name);
        return LinearCode::repetition(static_cast<std::size_t>(parse_u64(fields[0], "length")));
    }
    if (consume_prefix(s, "random_")) {
        auto fields = split(s, '_');
        if (fields.size() != 3) throw std::invalid_argument("unknown code name: " + full_name);
        return LinearCode::random_code(static_cast<std::size_t>(parse_u64(fields[0], "length")),
                                       static_cast<std::size_t>(parse_u64(fields[1], "dimension")),
                                       parse_u64(fields[2], "seed"));
    }
    throw std::invalid_argument("unknown code name: " + full_name);
}

CosetDecoder::Part CosetDecoder::build_part(const LinearCode& code) {
    const std::size_t n = code.n;
    const std::size_t r = code.n - code.k;
    Part part;
    part.n = n;
    part.redundancy = r;
    if (r == 0) return part;  // full-rate block, nothing to correct
    if (r > 24) throw CapacityError("CosetDecoder: redundancy " + std::to_string(r) + " > 24");
    if (n > 32) throw CapacityError("CosetDecoder: block length " + std::to_string(n) + " > 32");

    // syndrome of the unit error at position j, as an MSB-first index
    std::vector<std::uint32_t> col(n, 0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < r; ++i)
            if (code.parity_check.get(i, j)) col[j] |= 1u << (r - 1 - i);

    const std::uint32_t empty = 0xffffffffu;
    part.leader_of.assign(std::size_t(1) << r, empty);
    std::size_t filled = 0;
    const std::size_t want = std::size_t(1) << r;

    // Enumerate words by weight, numerically ascending within a weight;
    // MSB-first indexing makes numeric order equal lexicographic order, so
    // the first word seen for a syndrome is the minimum-weight, lex-smallest
    // coset leader. Covering radius <= r bounds the needed weight.
    for (std::size_t w = 0; w <= n && filled < want; ++w) {
        if (w == 0) {
            part.leader_of[0] = 0;
            ++filled;
            continue;
        }
        std::uint64_t mask = (std::uint64_t(1) << w) - 1;
        const std::uint64_t limit = std::uint64_t(1) << n;
        while (mask < limit) {
            std::uint32_t syn = 0;
            std::uint64_t m = mask;
            while (m) {
                unsigned b = static_cast<unsigned>(__builtin_ctzll(m));
                syn ^= col[n - 1 - b];
                m &= m - 1;
            }
            if (part.leader_of[syn] == empty) {
                part.leader_of[syn] = static_cast<std::uint32_t>(mask);
                if (++filled == want) break;
            }
            // Gosper's hack: next mask with the same popcount
            std::uint64_t c = mask & -mask;
            std::uint64_t rr = mask + c;
            mask = (((rr ^ mask) >> 2) / c) | rr;
        }
    }
    return part;
}

CosetDecoder CosetDecoder::build(const LinearCode& code) {
    CosetDecoder d;
    d.code_ = std::make_shared<const LinearCode>(code);
    if (code.blocks.empty()) {
        d.parts_.push_back(build_part(code));
        d.part_index_.push_back(0);
    } else {
        std::vector<std::string> seen;
        for (const auto& b : code.blocks) {
            std::size_t idx = 0;
            for (; idx < seen.size(); ++idx)
                if (seen[idx] == b.name) break;
            if (idx == seen.size()) {
                seen.push_back(b.name);
                d.parts_.push_back(build_part(b));
            }
            d.part_index_.push_back(idx);
        }
    }
    return d;
}

BitVector CosetDecoder::coset_leader(const BitVector& syndrome) const {
    if (syndrome.size() != code_->n - code_->k)
        throw DimensionError("coset_leader: syndrome length mismatch");
    BitVector leader(code_->n);
    std::size_t soff = 0, noff = 0;
    for (std::size_t b = 0; b < part_index_.size(); ++b) {
        const Part& p = parts_[part_index_[b]];
        if (p.redundancy > 0) {
            std::uint32_t syn = 0;
            for (std::size_t i = 0; i < p.redundancy; ++i)
                if (syndrome.get(soff + i)) syn |= 1u << (p.redundancy - 1 - i);
            std::uint32_t mask = p.leader_of[syn];
            for (std::size_t i = 0; i < p.n; ++i)
                if ((mask >> (p.n - 1 - i)) & 1u) leader.set(noff + i, true);
        }
        soff += p.redundancy;
        noff += p.n;
    }
    return leader;
}

BitVector decode_to_coset(const LinearCode& code, const BitVector& target_syndrome) {
    return CosetDecoder::build(code).coset_leader(target_syndrome);
}

BitVector reconcile(const BitVector& own_bits, const BitVector& alice_syndrome,
                    const CosetDecoder& decoder) {
    BitVector f = decoder.coset_leader(decoder.code().syndrome(own_bits) + alice_syndrome);
    return own_bits + f;
}

BitVector reconcile(const BitVector& own_bits, const BitVector& alice_syndrome,
                    const LinearCode& code) {
    return reconcile(own_bits, alice_syndrome, CosetDecoder::build(code));
}

CodePair CodePair::make(LinearCode c1, LinearCode c2) {
    if (c1.n != c2.n) throw DimensionError("CodePair: block lengths differ");
    if (c2.k > c1.k) throw std::invalid_argument("CodePair: dim C2 > dim C1");

    // coordinates of C2's basis inside C1's generator basis
    BitMatrix g1t = c1.generator.transposed();
    std::vector<BitVector> coords;
    coords.reserve(c2.k);
    for (std::size_t i = 0; i < c2.k; ++i) {
        if (!c1.contains(c2.generator.row(i)))
            throw std::invalid_argument("CodePair: C2 generator row outside C1");
        auto x = solve(g1t, c2.generator.row(i));
        if (!x) throw std::invalid_argument("CodePair: C2 generator row outside C1");
        coords.push_back(std::move(*x));
    }

    CodePair pair;
    // complement basis: C1 generator rows at the non-pivot coordinates of the
    // reduced coordinate matrix; deterministic in (c1, c2), so all parties
    // derive the same coset labels from the announced C2
    std::vector<bool> is_pivot(c1.k, false);
    if (!coords.empty()) {
        RowReduction rr = row_reduce(BitMatrix::from_rows(std::move(coords)));
        if (rr.rank != c2.k) throw std::invalid_argument("CodePair: C2 generator not full rank");
        for (auto c : rr.pivot_cols) is_pivot[c] = true;
    }
    for (std::size_t j = 0; j < c1.k; ++j)
        if (!is_pivot[j]) pair.complement_basis.push_back(c1.generator.row(j));

    pair.c1 = std::move(c1);
    pair.c2 = std::move(c2);
    return pair;
}

CodePair random_subcode(const LinearCode& c1, std::size_t dim2, Rng& rng) {
    if (dim2 > c1.k) throw DimensionError("random_subcode: dim2 exceeds dim C1");

    LinearCode c2;
    if (dim2 == 0) {
        c2.name = c1.name + ":sub0";
        c2.n = c1.n;
        c2.k = 0;
        c2.generator = BitMatrix(0, c1.n);
        c2.parity_check = BitMatrix::identity(c1.n);
    } else {
        for (;;) {
            BitMatrix coeff(dim2, c1.k);
            for (std::size_t i = 0; i < dim2; ++i)
                for (std::size_t j = 0; j < c1.k; ++j)
                    if (rng.bit()) coeff.set(i, j, true);
            if (rank(coeff) != dim2) continue;
            std::vector<BitVector> rows;
            rows.reserve(dim2);
            for (std::size_t i = 0; i < dim2; ++i) rows.push_back(c1.encode(coeff.row(i)));
            c2 = LinearCode::from_generator(c1.name + ":sub" + std::to_string(dim2),
                                            BitMatrix::from_rows(std::move(rows)));
            break;
        }
    }
    return CodePair::make(c1, std::move(c2));
}

BitVector coset_key(const BitVector& a, const CodePair& pair) {
    // reduce to the C1-coset representative, then express in the
    // (complement basis | C2 basis) coordinates
    BitVector v = a + decode_to_coset(pair.c1, pair.c1.syndrome(a));

    std::vector<BitVector> basis_rows = pair.complement_basis;
    for (std::size_t i = 0; i < pair.c2.k; ++i) basis_rows.push_back(pair.c2.generator.row(i));
    std::size_t key_len = pair.complement_basis.size();
    if (basis_rows.empty()) return BitVector(0);

    auto coords = solve(BitMatrix::from_rows(std::move(basis_rows)).transposed(), v);
    if (!coords)
        throw std::logic_error("coset_key: word not expressible in C1 basis (reconciliation bug)");
    BitVector key(key_len);
    for (std::size_t i = 0; i < key_len; ++i) key.set(i, coords->get(i));
    return key;
}

namespace {

bool decode_trial_fails(const LinearCode& code, const CosetDecoder& decoder, double q,
                        std::uint64_t seed, std::size_t trial) {
    Rng rng(mix_seed(seed, trial));
    BitVector e(code.n);
    for (std::size_t i = 0; i < code.n; ++i)
        if (rng.bernoulli(q)) e.set(i, true);
    return decoder.coset_leader(code.syndrome(e)) != e;
}

}  // namespace

double estimate_decode_failure_serial(const LinearCode& code, const CosetDecoder& decoder,
                                      double q, std::size_t trials, std::uint64_t seed) {
    std::size_t failures = 0;
    for (std::size_t t = 0; t < trials; ++t)
        if (decode_trial_fails(code, decoder, q, seed, t)) ++failures;
    return static_cast<double>(failures) / static_cast<double>(trials);
}

double estimate_decode_failure(const LinearCode& code, const CosetDecoder& decoder, double q,
                               std::size_t trials, std::uint64_t seed, bool parallel) {
    if (!parallel) return estimate_decode_failure_serial(code, decoder, q, trials, seed);
    std::size_t failures = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(+ : failures)
#endif
    for (long long t = 0; t < static_cast<long long>(trials); ++t) {
        if (decode_trial_fails(code, decoder, q, seed, static_cast<std::size_t>(t))) ++failures;
    }
    return static_cast<double>(failures) / static_cast<double>(trials);
}

namespace {

// Extend a base code to total length n by block repetition. A remainder of
// one or two positions would be nearly uncorrectable as its own block, so it
// is merged into one longer repetition block instead.
LinearCode blockwise(const LinearCode& base, std::size_t n) {
    std::size_t m = n / base.n;
    std::size_t r = n % base.n;
    std::vector<LinearCode> parts;
    if (r == 0) {
        parts.assign(m, base);
    } else if (r >= 3) {
        parts.assign(m, base);
        parts.push_back(LinearCode::repetition(r));
    } else {
        parts.assign(m - 1, base);
        parts.push_back(LinearCode::repetition(base.n + r));
    }
    return compose_blocks(std::move(parts));
}

}  // namespace

const std::vector<std::string>& standard_families() {
    static const std::vector<std::string> fams = {"trivial",          "hamming_7_4",
                                                  "ext_hamming_8_4",  "repetition_3_1",
                                                  "repetition_5_1",   "random"};
    return fams;
}

CodeSelection select_code(double q1, std::size_t n, double target_failure, std::uint64_t seed,
                          const std::vector<std::string>& families, bool parallel) {
    if (!(q1 >= 0.0 && q1 < 0.5)) throw std::domain_error("select_code: q1 outside [0, 0.5)");
    if (n < 1) throw std::invalid_argument("select_code: n must be positive");
    if (!(target_failure > 0.0 && target_failure < 1.0))
        throw std::invalid_argument("select_code: target_failure outside (0, 1)");

    std::vector<LinearCode> candidates;
    auto add = [&](LinearCode c) {
        for (const auto& seen : candidates)
            if (seen.name == c.name) return;
        candidates.push_back(std::move(c));
    };

    for (const auto& fam : families) {
        if (fam == "trivial") {
            add(LinearCode::trivial(n));
        } else if (fam == "hamming_7_4") {
            if (n >= 7) add(blockwise(LinearCode::hamming_7_4(), n));
        } else if (fam == "ext_hamming_8_4") {
            if (n >= 8) add(blockwise(LinearCode::ext_hamming_8_4(), n));
        } else if (fam == "repetition_3_1") {
            if (n >= 3) add(blockwise(LinearCode::repetition(3), n));
        } else if (fam == "repetition_5_1") {
            if (n >= 5) add(blockwise(LinearCode::repetition(5), n));
        } else if (fam == "random") {
            if (n >= 3 && n <= 16) {
                for (std::size_t k = n - 1; k >= 1; --k)
                    add(LinearCode::random_code(n, k, mix_seed(seed, 1000 + k)));
            }
        } else {
            throw std::invalid_argument("select_code: unknown registry family '" + fam + "'");
        }
    }

    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const LinearCode& a, const LinearCode& b) { return a.k > b.k; });

    std::size_t trials = static_cast<std::size_t>(std::ceil(10.0 / target_failure));
    trials = std::max<std::size_t>(trials, 100);

    double best_failure = 1.0;
    std::string best_name = "(none)";
    for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
        CosetDecoder decoder;
        try {
            decoder = CosetDecoder::build(candidates[ci]);
        } catch (const CapacityError&) {
            continue;
        }
        double failure = estimate_decode_failure(candidates[ci], decoder, q1, trials,
                                                 mix_seed(seed, 7000 + ci), parallel);
        if (failure <= target_failure) {
            return CodeSelection{std::move(candidates[ci]), std::move(decoder), failure, trials};
        }
        if (failure < best_failure) {
            best_failure = failure;
            best_name = candidates[ci].name;
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "select_code: no length-%zu code met failure target %.6g (best %.6g from %s)",
                  n, target_failure, best_failure, best_name.c_str());
    throw SelectionError(buf, best_failure, best_name);
}

}  // namespace triqkd
