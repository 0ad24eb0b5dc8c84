#include "triqkd/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace triqkd {

SweepAxis SweepAxis::parse(const std::string& spec) {
    SweepAxis axis;
    std::istringstream is(spec);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(is, field, ':')) fields.push_back(field);
    if (fields.size() != 4)
        throw std::invalid_argument("axis spec must be NAME:MIN:MAX:STEPS, got '" + spec + "'");
    axis.parameter = fields[0];
    try {
        axis.min = std::stod(fields[1]);
        axis.max = std::stod(fields[2]);
        long steps = std::stol(fields[3]);
        if (steps < 1) throw std::invalid_argument(fields[3]);
        axis.steps = static_cast<std::size_t>(steps);
    } catch (const std::exception&) {
        throw std::invalid_argument("bad axis spec '" + spec + "'");
    }
    return axis;
}

std::vector<double> SweepAxis::values() const {
    std::vector<double> v;
    v.reserve(steps);
    if (steps == 1) {
        v.push_back(min);
        return v;
    }
    for (std::size_t i = 0; i < steps; ++i)
        v.push_back(min + static_cast<double>(i) * (max - min) / static_cast<double>(steps - 1));
    return v;
}

SessionConfig apply_axis(const SessionConfig& base, const std::string& parameter, double value) {
    SessionConfig cfg = base;
    auto depolarizing = [&](double p) {
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("depolarizing sweep value outside [0, 1]");
        return ChannelModel{Depolarizing{p}};
    };
    if (parameter == "depolarizing_p") {
        cfg.channel_bob = depolarizing(value);
        cfg.channel_charlie = depolarizing(value);
    } else if (parameter == "depolarizing_p_bob") {
        cfg.channel_bob = depolarizing(value);
    } else if (parameter == "depolarizing_p_charlie") {
        cfg.channel_charlie = depolarizing(value);
    } else if (parameter == "q_slack") {
        cfg.q_slack = value;
    } else if (parameter == "abort_threshold") {
        cfg.abort_threshold = value;
    } else if (parameter == "target_failure") {
        cfg.target_failure = value;
    } else if (parameter == "num_pulses") {
        if (value < 1.0) throw std::invalid_argument("num_pulses sweep value must be >= 1");
        cfg.num_pulses = static_cast<std::size_t>(std::llround(value));
    } else {
        throw std::invalid_argument("unknown sweep parameter '" + parameter + "'");
    }
    return cfg;
}

namespace {

struct TrialStat {
    double q1 = 0.0, q2 = 0.0;
    std::size_t key_bits = 0;
    std::size_t kept_bits = 0;
    bool aborted = false;
    bool estimated = false;  // q1/q2 defined (enough sifted bits)
};

TrialStat run_trial(const SessionConfig& cfg) {
    SessionResult res = run_session(cfg);
    TrialStat st;
    st.kept_bits = res.kept_n;
    st.aborted = !res.outcome.completed();
    if (res.outcome.completed()) {
        st.key_bits = res.outcome.as_completed().key_alice.size();
    }
    double q1 = res.outcome.q1();
    st.estimated = !std::isnan(q1);
    if (st.estimated) {
        st.q1 = q1;
        st.q2 = res.outcome.q2();
    }
    return st;
}

}  // namespace

std::vector<SweepPoint> run_sweep(const SessionConfig& base, const SweepAxis& axis,
                                  std::size_t trials, std::uint64_t sweep_seed, bool parallel) {
    if (trials < 1) throw std::invalid_argument("run_sweep: trials must be >= 1");
    std::vector<double> values = axis.values();

    std::vector<SessionConfig> configs(values.size());
    for (std::size_t p = 0; p < values.size(); ++p)
        configs[p] = apply_axis(base, axis.parameter, values[p]);

    const std::size_t jobs = values.size() * trials;
    std::vector<TrialStat> stats(jobs);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
    for (long long j = 0; j < static_cast<long long>(jobs); ++j) {
        std::size_t p = static_cast<std::size_t>(j) / trials;
        std::size_t t = static_cast<std::size_t>(j) % trials;
        SessionConfig cfg = configs[p];
        cfg.parallel = false;  // trials are the parallel axis here
        cfg.seeds = Seeds::derive(mix_seed(sweep_seed, p, t));
        stats[j] = run_trial(cfg);
    }

    std::vector<SweepPoint> points(values.size());
    for (std::size_t p = 0; p < values.size(); ++p) {
        SweepPoint& pt = points[p];
        pt.param = values[p];
        pt.trials = trials;
        std::size_t estimated = 0, aborts = 0, key_bits = 0, kept_bits = 0;
        double q1_sum = 0.0, q2_sum = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
            const TrialStat& st = stats[p * trials + t];
            if (st.estimated) {
                ++estimated;
                q1_sum += st.q1;
                q2_sum += st.q2;
            }
            if (st.aborted) ++aborts;
            key_bits += st.key_bits;
            kept_bits += st.kept_bits;
        }
        pt.mean_q1 = estimated ? q1_sum / static_cast<double>(estimated) : 0.0;
        pt.mean_q2 = estimated ? q2_sum / static_cast<double>(estimated) : 0.0;
        double q1c = std::min(pt.mean_q1, 0.5), q2c = std::min(pt.mean_q2, 0.5);
        pt.formula_rate = key_rate(q1c, q2c);
        pt.measured_rate =
            kept_bits ? static_cast<double>(key_bits) / static_cast<double>(kept_bits) : 0.0;
        pt.abort_fraction = static_cast<double>(aborts) / static_cast<double>(trials);
    }
    return points;
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
    std::ostringstream os;
    os << "param,trials,mean_q1,mean_q2,formula_rate,measured_rate,abort_fraction\n";
    char buf[160];
    for (const auto& p : points) {
        std::snprintf(buf, sizeof buf, "%.6f,%zu,%.6f,%.6f,%.6f,%.6f,%.6f\n", p.param, p.trials,
                      p.mean_q1, p.mean_q2, p.formula_rate, p.measured_rate, p.abort_fraction);
        os << buf;
    }
    return os.str();
}

}  // namespace triqkd
