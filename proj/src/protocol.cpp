#include "triqkd/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace triqkd {

Seeds Seeds::derive(std::uint64_t master) {
    std::uint64_t s = master;
    Seeds out;
    out.alice = splitmix64(s);
    out.bob = splitmix64(s);
    out.charlie = splitmix64(s);
    out.channel_bob = splitmix64(s);
    out.channel_charlie = splitmix64(s);
    out.sampling = splitmix64(s);
    out.code_selection = splitmix64(s);
    out.subcode = splitmix64(s);
    return out;
}

SiftedData sift(const PulseRecords& records) {
    const std::size_t n = records.alice.size();
    if (records.bob_basis.size() != n || records.bob_outcome.size() != n ||
        records.charlie_basis.size() != n || records.charlie_outcome.size() != n)
        throw DimensionError("sift: pulse record arrays differ in length");

    std::vector<std::uint8_t> comp_a, comp_b, comp_c, had_a, had_b, had_c;
    for (std::size_t i = 0; i < n; ++i) {
        Basis basis = records.alice[i].basis;
        if (records.bob_basis[i] != basis || records.charlie_basis[i] != basis) continue;
        if (basis == Basis::Computational) {
            comp_a.push_back(static_cast<std::uint8_t>(records.alice[i].bit));
            comp_b.push_back(records.bob_outcome[i]);
            comp_c.push_back(records.charlie_outcome[i]);
        } else {
            had_a.push_back(static_cast<std::uint8_t>(records.alice[i].bit));
            had_b.push_back(records.bob_outcome[i]);
            had_c.push_back(records.charlie_outcome[i]);
        }
    }

    auto to_even_vector = [](const std::vector<std::uint8_t>& bits) {
        std::size_t len = bits.size() & ~std::size_t(1);  // drop a trailing odd element
        BitVector v(len);
        for (std::size_t i = 0; i < len; ++i)
            if (bits[i]) v.set(i, true);
        return v;
    };

    SiftedData sd;
    sd.a = to_even_vector(comp_a);
    sd.b = to_even_vector(comp_b);
    sd.c = to_even_vector(comp_c);
    sd.alpha = to_even_vector(had_a);
    sd.beta = to_even_vector(had_b);
    sd.gamma = to_even_vector(had_c);
    return sd;
}

std::vector<std::size_t> sample_subset(std::size_t total, std::size_t half, Rng& rng) {
    if (total % 2 != 0 || half != total / 2)
        throw std::invalid_argument("sample_subset: expected half = total/2 with even total");
    std::vector<std::size_t> idx(total);
    for (std::size_t i = 0; i < total; ++i) idx[i] = i;
    for (std::size_t i = 0; i < half; ++i) {
        std::size_t j = i + rng.below(total - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(half);
    std::sort(idx.begin(), idx.end());
    return idx;
}

double estimate_q1(const SiftedData& s, const std::vector<std::size_t>& sample) {
    if (sample.empty()) throw std::invalid_argument("estimate_q1: empty sample");
    std::size_t bob_err = 0, charlie_err = 0;
    for (auto i : sample) {
        if (s.a.get(i) != s.b.get(i)) ++bob_err;
        if (s.a.get(i) != s.c.get(i)) ++charlie_err;
    }
    double m = static_cast<double>(sample.size());
    return std::max(bob_err / m, charlie_err / m);
}

double estimate_q2(const SiftedData& s, const std::vector<std::size_t>& sample) {
    if (sample.empty()) throw std::invalid_argument("estimate_q2: empty sample");
    std::size_t count = 0;
    for (auto i : sample) {
        bool beta_differs = s.alpha.get(i) != s.beta.get(i);
        bool gamma_differs = s.alpha.get(i) != s.gamma.get(i);
        if (beta_differs != gamma_differs) ++count;  // exactly one differs
    }
    return static_cast<double>(count) / static_cast<double>(sample.size());
}

void Transcript::append(int step, std::string party, std::string kind, std::string payload) {
    entries_.push_back(Entry{step, std::move(party), std::move(kind), std::move(payload)});
}

std::string Transcript::to_text() const {
    std::ostringstream os;
    for (const auto& e : entries_)
        os << "STEP " << e.step << ' ' << e.party << ' ' << e.kind << ' ' << e.payload << '\n';
    return os.str();
}

Transcript Transcript::parse(const std::string& text) {
    Transcript t;
    std::istringstream is(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tag, party, kind;
        int step = 0;
        if (!(ls >> tag >> step >> party >> kind) || tag != "STEP")
            throw std::invalid_argument("Transcript::parse: bad line " + std::to_string(line_no));
        std::string payload;
        std::getline(ls, payload);
        if (!payload.empty() && payload.front() == ' ') payload.erase(0, 1);
        t.append(step, std::move(party), std::move(kind), std::move(payload));
    }
    return t;
}

double SessionOutcome::q1() const {
    return completed() ? as_completed().q1 : as_aborted().q1;
}

double SessionOutcome::q2() const {
    return completed() ? as_completed().q2 : as_aborted().q2;
}

std::string SessionOutcome::to_record() const {
    char buf[64];
    std::ostringstream os;
    auto real = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.6f", v);
        return std::string(buf);
    };
    if (completed()) {
        const auto& c = as_completed();
        os << "outcome completed\n";
        os << "q1 " << real(c.q1) << "\n";
        os << "q2 " << real(c.q2) << "\n";
        os << "rate " << real(c.rate) << "\n";
        os << "code " << c.code_name << "\n";
        os << "key_len " << c.key_alice.size() << "\n";
        os << "key_alice " << c.key_alice.to_hex() << "\n";
        os << "key_bob " << c.key_bob.to_hex() << "\n";
        os << "key_charlie " << c.key_charlie.to_hex() << "\n";
        os << "ground_truth_match " << c.ground_truth_match[0] << ' ' << c.ground_truth_match[1]
           << ' ' << c.ground_truth_match[2] << "\n";
    } else {
        const auto& a = as_aborted();
        os << "outcome aborted\n";
        os << "reason " << a.reason << "\n";
        os << "q1 " << real(a.q1) << "\n";
        os << "q2 " << real(a.q2) << "\n";
    }
    return os.str();
}

namespace {

std::string basis_string(const std::vector<Basis>& bases) {
    std::string s(bases.size(), '0');
    for (std::size_t i = 0; i < bases.size(); ++i)
        if (bases[i] == Basis::Hadamard) s[i] = '1';
    return s;
}

std::string index_list(const std::vector<std::size_t>& idx) {
    std::ostringstream os;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (i) os << ' ';
        os << idx[i];
    }
    return os.str();
}

std::string bits_at(const BitVector& v, const std::vector<std::size_t>& idx) {
    std::string s(idx.size(), '0');
    for (std::size_t i = 0; i < idx.size(); ++i)
        if (v.get(idx[i])) s[i] = '1';
    return s;
}

BitVector keep_complement(const BitVector& v, const std::vector<std::size_t>& sample) {
    BitVector out(v.size() - sample.size());
    std::size_t si = 0, oi = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (si < sample.size() && sample[si] == i) {
            ++si;
            continue;
        }
        out.set(oi++, v.get(i));
    }
    return out;
}

}  // namespace

BitVector privacy_amplify(const BitVector& reconciled, const CodePair& pair,
                          const BitVector& announced_syndrome) {
    if (pair.c1.syndrome(reconciled) != announced_syndrome)
        throw std::logic_error("privacy_amplify: word disagrees with the announced syndrome");
    return coset_key(reconciled, pair);
}

SessionResult run_session(const SessionConfig& cfg) {
    if (cfg.num_pulses < 1) throw ConfigurationError("num_pulses must be >= 1");
    const std::vector<std::string>& families =
        cfg.registry.empty() ? standard_families() : cfg.registry;
    if (families.empty()) throw ConfigurationError("code registry is empty");
    {
        const Seeds& s = cfg.seeds;
        std::uint64_t all[] = {s.alice,    s.bob,      s.charlie,       s.channel_bob,
                               s.channel_charlie, s.sampling, s.code_selection, s.subcode};
        for (std::size_t i = 0; i < 8; ++i)
            for (std::size_t j = i + 1; j < 8; ++j)
                if (all[i] == all[j]) throw ConfigurationError("per-role seeds must be distinct");
    }

    SessionResult res;
    Transcript& tr = res.transcript;

    Rng alice_rng(cfg.seeds.alice), bob_rng(cfg.seeds.bob), charlie_rng(cfg.seeds.charlie);
    Rng chan_bob_rng(cfg.seeds.channel_bob), chan_charlie_rng(cfg.seeds.channel_charlie);
    Rng sampling_rng(cfg.seeds.sampling), subcode_rng(cfg.seeds.subcode);

    // Steps 1-3: Alice prepares two independent qubits per pulse from the
    // same descriptor; Bob and Charlie measure in random bases.
    PulseRecords rec;
    const std::size_t N = cfg.num_pulses;
    rec.alice.resize(N);
    rec.bob_basis.resize(N);
    rec.bob_outcome.resize(N);
    rec.charlie_basis.resize(N);
    rec.charlie_outcome.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        rec.alice[i] = random_bb84(alice_rng);

        rec.bob_basis[i] = bob_rng.bit() ? Basis::Hadamard : Basis::Computational;
        QubitState qb = apply_channel(cfg.channel_bob, prepare(rec.alice[i]), chan_bob_rng,
                                      &res.eve_bob, i);
        rec.bob_outcome[i] = static_cast<std::uint8_t>(measure(qb, rec.bob_basis[i], bob_rng));

        rec.charlie_basis[i] = charlie_rng.bit() ? Basis::Hadamard : Basis::Computational;
        QubitState qc = apply_channel(cfg.channel_charlie, prepare(rec.alice[i]),
                                      chan_charlie_rng, &res.eve_charlie, i);
        rec.charlie_outcome[i] =
            static_cast<std::uint8_t>(measure(qc, rec.charlie_basis[i], charlie_rng));
    }

    // Step 4: basis announcements, then sifting
    {
        std::vector<Basis> alice_bases(N);
        for (std::size_t i = 0; i < N; ++i) alice_bases[i] = rec.alice[i].basis;
        tr.append(4, "alice", "bases", basis_string(alice_bases));
        tr.append(4, "bob", "bases", basis_string(rec.bob_basis));
        tr.append(4, "charlie", "bases", basis_string(rec.charlie_basis));
    }
    SiftedData sd = sift(rec);
    res.sifted_computational = sd.a.size();
    res.sifted_hadamard = sd.alpha.size();
    res.kept_n = sd.a.size() / 2;

    if (sd.a.size() < 2 || sd.alpha.size() < 2) {
        double nan = std::nan("");
        res.outcome.result = Aborted{"insufficient_sifted_bits", nan, nan};
        return res;
    }

    // Step 7: computational sample and q1
    auto sample1 = sample_subset(sd.a.size(), sd.a.size() / 2, sampling_rng);
    tr.append(7, "alice", "sample_set", index_list(sample1));
    tr.append(7, "alice", "sample_bits", bits_at(sd.a, sample1));
    tr.append(7, "bob", "sample_bits", bits_at(sd.b, sample1));
    tr.append(7, "charlie", "sample_bits", bits_at(sd.c, sample1));
    double q1 = estimate_q1(sd, sample1);

    // Step 8: Hadamard sample and q2
    auto sample2 = sample_subset(sd.alpha.size(), sd.alpha.size() / 2, sampling_rng);
    tr.append(8, "alice", "sample_set", index_list(sample2));
    tr.append(8, "alice", "sample_bits", bits_at(sd.alpha, sample2));
    tr.append(8, "bob", "sample_bits", bits_at(sd.beta, sample2));
    tr.append(8, "charlie", "sample_bits", bits_at(sd.gamma, sample2));
    double q2 = estimate_q2(sd, sample2);

    double q1_eff = std::min(q1 + cfg.q_slack, 0.5);
    double q2_eff = std::min(q2 + cfg.q_slack, 0.5);
    double rate = key_rate(q1_eff, q2_eff);
    if (rate <= cfg.abort_threshold || q1_eff >= 0.5) {
        res.outcome.result = Aborted{"rate_nonpositive", q1, q2};
        return res;
    }

    // Step 9: joint code choice over the announced q1
    const std::size_t n = res.kept_n;
    CodeSelection sel;
    try {
        sel = select_code(q1_eff, n, cfg.target_failure, cfg.seeds.code_selection, families,
                          cfg.parallel);
    } catch (const SelectionError&) {
        res.outcome.result = Aborted{"code_selection_failed", q1, q2};
        return res;
    }
    tr.append(9, "alice", "code_name", sel.code.name);
    for (std::size_t i = 0; i < sel.code.parity_check.rows(); ++i)
        tr.append(9, "alice", "parity_row", sel.code.parity_check.row(i).to_string());

    // Step 10: Alice's syndrome over the kept bits
    BitVector a_kept = keep_complement(sd.a, sample1);
    BitVector b_kept = keep_complement(sd.b, sample1);
    BitVector c_kept = keep_complement(sd.c, sample1);
    BitVector syn = sel.code.syndrome(a_kept);
    tr.append(10, "alice", "syndrome", syn.to_string());

    // Steps 11-12: Bob and Charlie reconcile against the syndrome
    BitVector b_rec = reconcile(b_kept, syn, sel.decoder);
    BitVector c_rec = reconcile(c_kept, syn, sel.decoder);

    // Step 13: random subcode, dim C2 = ceil(n h(q2)), then coset keys
    std::size_t dim2 = static_cast<std::size_t>(std::ceil(n * binary_entropy(q2_eff)));
    if (dim2 >= sel.code.k) {
        res.outcome.result = Aborted{"amplification_exhausts_code", q1, q2};
        return res;
    }
    CodePair pair = random_subcode(sel.code, dim2, subcode_rng);
    tr.append(13, "alice", "c2_dim", std::to_string(dim2));
    for (std::size_t i = 0; i < pair.c2.generator.rows(); ++i)
        tr.append(13, "alice", "c2_row", pair.c2.generator.row(i).to_string());

    Completed done;
    done.key_alice = privacy_amplify(a_kept, pair, syn);
    done.key_bob = privacy_amplify(b_rec, pair, syn);
    done.key_charlie = privacy_amplify(c_rec, pair, syn);
    done.q1 = q1;
    done.q2 = q2;
    done.rate = rate;
    done.code_name = sel.code.name;
    done.ground_truth_match = {b_rec == a_kept, c_rec == a_kept,
                               done.key_bob == done.key_alice &&
                                   done.key_charlie == done.key_alice};
    res.outcome.result = std::move(done);
    return res;
}

}  // namespace triqkd
