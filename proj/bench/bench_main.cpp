// Compares the OpenMP kernels against their serial reference implementations
// and checks both produce identical results.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

#include "triqkd/coding.hpp"
#include "triqkd/css.hpp"
#include "triqkd/sweep.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace triqkd;

namespace {

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

struct Timing {
    double serial_s = 0.0;
    double parallel_s = 0.0;
    bool identical = false;
};

void print_row(const char* name, const Timing& t) {
    std::printf("%-28s serial %8.3fs   parallel %8.3fs   speedup %5.2fx   results %s\n", name,
                t.serial_s, t.parallel_s, t.parallel_s > 0 ? t.serial_s / t.parallel_s : 0.0,
                t.identical ? "identical" : "DIFFER");
}

Timing bench_decode_failure() {
    LinearCode code = code_by_name("blocks:repetition_5_1*800,repetition_9");
    CosetDecoder dec = CosetDecoder::build(code);
    const std::size_t trials = 20000;

    Timing t;
    double t0 = now_s();
    double serial = estimate_decode_failure_serial(code, dec, 0.02, trials, 12345);
    t.serial_s = now_s() - t0;

    t0 = now_s();
    double parallel = estimate_decode_failure(code, dec, 0.02, trials, 12345, true);
    t.parallel_s = now_s() - t0;
    t.identical = serial == parallel;
    return t;
}

Timing bench_css_suite() {
    CssVerifyOptions serial_opts;
    serial_opts.max_n = 3;
    serial_opts.parallel = false;
    CssVerifyOptions parallel_opts = serial_opts;
    parallel_opts.parallel = true;

    Timing t;
    double t0 = now_s();
    auto serial = run_css_suite(serial_opts);
    t.serial_s = now_s() - t0;

    t0 = now_s();
    auto parallel = run_css_suite(parallel_opts);
    t.parallel_s = now_s() - t0;

    t.identical = serial.size() == parallel.size();
    for (std::size_t i = 0; t.identical && i < serial.size(); ++i) {
        t.identical = serial[i].pass == parallel[i].pass &&
                      serial[i].tuples == parallel[i].tuples &&
                      serial[i].max_deviation == parallel[i].max_deviation;
    }
    return t;
}

Timing bench_sweep() {
    SessionConfig base;
    base.num_pulses = 4096;
    base.seeds = Seeds::derive(1);

    SweepAxis axis;
    axis.parameter = "depolarizing_p";
    axis.min = 0.0;
    axis.max = 0.08;
    axis.steps = 4;
    const std::size_t trials = 8;

    Timing t;
    double t0 = now_s();
    auto serial = run_sweep(base, axis, trials, 99, false);
    t.serial_s = now_s() - t0;

    t0 = now_s();
    auto parallel = run_sweep(base, axis, trials, 99, true);
    t.parallel_s = now_s() - t0;

    t.identical = sweep_csv(serial) == sweep_csv(parallel);
    return t;
}

}  // namespace

int main(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; i += 2) {
        if (std::strcmp(argv[i], "--jobs") == 0) {
#ifdef _OPENMP
            omp_set_num_threads(std::atoi(argv[i + 1]));
#endif
        }
    }
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; parallel paths run serially\n");
#endif

    Timing decode = bench_decode_failure();
    print_row("mc-decode-failure", decode);
    Timing css = bench_css_suite();
    print_row("css-identity-suite", css);
    Timing sweep = bench_sweep();
    print_row("session-sweep", sweep);

    bool ok = decode.identical && css.identical && sweep.identical;
    if (!ok) std::printf("parallel and serial results disagree\n");
    return ok ? 0 : 1;
}
