#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "triqkd/protocol.hpp"

namespace triqkd {

// axis values are MIN + i * (MAX - MIN) / (STEPS - 1); a single step pins MIN
struct SweepAxis {
    std::string parameter;  // depolarizing_p | depolarizing_p_bob | depolarizing_p_charlie |
                            // q_slack | abort_threshold | target_failure | num_pulses
    double min = 0.0;
    double max = 0.0;
    std::size_t steps = 1;

    static SweepAxis parse(const std::string& spec);  // NAME:MIN:MAX:STEPS
    std::vector<double> values() const;
};

struct SweepPoint {
    double param = 0.0;
    std::size_t trials = 0;
    double mean_q1 = 0.0;
    double mean_q2 = 0.0;
    double formula_rate = 0.0;   // 1 - h(mean_q1) - h(mean_q2)
    double measured_rate = 0.0;  // completed key bits / sifted computational kept bits
    double abort_fraction = 0.0;
};

// Runs trials at every axis point with per-trial derived seeds; results are
// reduced in deterministic (point, trial) order regardless of thread count.
std::vector<SweepPoint> run_sweep(const SessionConfig& base, const SweepAxis& axis,
                                  std::size_t trials, std::uint64_t sweep_seed,
                                  bool parallel = true);

std::string sweep_csv(const std::vector<SweepPoint>& points);

SessionConfig apply_axis(const SessionConfig& base, const std::string& parameter, double value);

}  // namespace triqkd
