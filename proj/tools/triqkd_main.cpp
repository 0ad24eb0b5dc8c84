#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "triqkd/config.hpp"
#include "triqkd/css.hpp"
#include "triqkd/protocol.hpp"
#include "triqkd/sweep.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitAbort = 2;
constexpr int kExitVerifyFail = 3;

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

void set_jobs(int jobs) {
#ifdef _OPENMP
    if (jobs > 0) omp_set_num_threads(jobs);
#else
    (void)jobs;
#endif
}

triqkd::SessionConfig load_session_config(const std::string& config_path,
                                          std::uint64_t seed_override, bool has_seed) {
    triqkd::Config cfg = triqkd::Config::parse_file(config_path);
    cfg.apply_env_overrides();
    if (has_seed) cfg.set("session.seed", std::to_string(seed_override));
    return triqkd::session_config_from(cfg);
}

int cmd_run(const std::string& config_path, const std::string& out_path,
            std::uint64_t seed_override, bool has_seed, int jobs) {
    set_jobs(jobs);
    triqkd::SessionConfig sc = load_session_config(config_path, seed_override, has_seed);
    triqkd::SessionResult res = triqkd::run_session(sc);
    std::string record = res.outcome.to_record();
    std::cout << record;
    if (!out_path.empty()) {
        write_file(out_path, record);
        write_file(out_path + ".transcript", res.transcript.to_text());
    }
    return res.outcome.completed() ? kExitOk : kExitAbort;
}

int cmd_sweep(const std::string& config_path, const std::string& out_path,
              const std::string& axis_spec, std::size_t trials, std::uint64_t seed_override,
              bool has_seed, int jobs) {
    set_jobs(jobs);
    triqkd::Config cfg = triqkd::Config::parse_file(config_path);
    cfg.apply_env_overrides();
    if (has_seed) cfg.set("session.seed", std::to_string(seed_override));
    triqkd::SessionConfig base = triqkd::session_config_from(cfg);
    std::uint64_t sweep_seed = cfg.get_u64("session.seed", 1);

    triqkd::SweepAxis axis = triqkd::SweepAxis::parse(axis_spec);
    auto points = triqkd::run_sweep(base, axis, trials, sweep_seed);
    std::string csv = triqkd::sweep_csv(points);
    if (out_path.empty()) {
        std::cout << csv;
    } else {
        write_file(out_path, csv);
    }
    return kExitOk;
}

int cmd_verify_css(const std::string& out_path, std::size_t max_n, const std::string& fault,
                   int jobs) {
    set_jobs(jobs);
    triqkd::CssVerifyOptions opts;
    opts.max_n = max_n;
    if (fault == "mix0_sign") {
        opts.fault = triqkd::CssFault::Mix0Sign;
    } else if (!fault.empty()) {
        std::cerr << "unknown fault injection '" << fault << "'\n";
        return kExitUsage;
    }
    auto reports = triqkd::run_css_suite(opts);
    std::string text = triqkd::format_css_report(reports);
    std::cout << text;
    if (!out_path.empty()) write_file(out_path, text);
    for (const auto& r : reports) {
        if (!r.pass) {
            std::cerr << "verification failed: " << r.name << " at " << r.failing_case << "\n";
            return kExitVerifyFail;
        }
    }
    return kExitOk;
}

int cmd_codes(const std::string& show) {
    if (!show.empty()) {
        triqkd::LinearCode code = triqkd::code_by_name(show);
        std::cout << "name " << code.name << "\n";
        std::cout << "n " << code.n << "\n";
        std::cout << "k " << code.k << "\n";
        std::cout << "generator\n" << code.generator.to_string() << "\n";
        std::cout << "parity_check\n" << code.parity_check.to_string() << "\n";
        return kExitOk;
    }
    std::printf("%-18s %5s %5s %8s\n", "name", "n", "k", "rate");
    for (const char* name : {"repetition_3_1", "repetition_5_1", "hamming_7_4",
                             "ext_hamming_8_4"}) {
        triqkd::LinearCode c = triqkd::code_by_name(name);
        std::printf("%-18s %5zu %5zu %8.4f\n", name, c.n, c.k,
                    static_cast<double>(c.k) / static_cast<double>(c.n));
    }
    std::printf("parametric forms: trivial_N, repetition_N, random_N_K_SEED,\n");
    std::printf("                  blocks:<name>*<count>[,<name>*<count>...]\n");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"three-party prepare-and-measure key agreement simulator"};
    app.require_subcommand(1);

    std::string config_path, out_path, axis_spec, fault, show_code;
    std::uint64_t seed = 0;
    std::size_t trials = 1, max_n = 3;
    int jobs = 0;

    CLI::App* run = app.add_subcommand("run", "run one protocol session");
    run->add_option("--config", config_path, "session config file")->required();
    run->add_option("--out", out_path, "write outcome record here, transcript to <out>.transcript");
    CLI::Option* run_seed = run->add_option("--seed", seed, "override session.seed");
    run->add_option("--jobs", jobs, "worker threads (default: hardware)");

    CLI::App* sweep = app.add_subcommand("sweep", "Monte-Carlo sweep over a config parameter");
    sweep->add_option("--config", config_path, "base session config file")->required();
    sweep->add_option("--axis", axis_spec, "NAME:MIN:MAX:STEPS")->required();
    sweep->add_option("--trials", trials, "sessions per axis point")->required();
    sweep->add_option("--out", out_path, "CSV output path (default stdout)");
    CLI::Option* sweep_seed = sweep->add_option("--seed", seed, "override session.seed");
    sweep->add_option("--jobs", jobs, "worker threads (default: hardware)");

    CLI::App* verify = app.add_subcommand("verify-css", "run the CSS identity suite");
    verify->add_option("--max-n", max_n, "base code-length bound (default 3)");
    verify->add_option("--out", out_path, "write the report here as well");
    verify->add_option("--jobs", jobs, "worker threads (default: hardware)");
    verify->add_option("--inject-fault", fault, "test hook: corrupt an identity (mix0_sign)")
        ->group("");  // hidden

    CLI::App* codes = app.add_subcommand("codes", "list the code registry");
    codes->add_option("--show", show_code, "print one code as generator/parity text");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(config_path, out_path, seed, !run_seed->empty(), jobs);
        if (sweep->parsed())
            return cmd_sweep(config_path, out_path, axis_spec, trials, seed,
                             !sweep_seed->empty(), jobs);
        if (verify->parsed()) return cmd_verify_css(out_path, max_n, fault, jobs);
        if (codes->parsed()) return cmd_codes(show_code);
    } catch (const triqkd::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
