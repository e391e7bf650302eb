// bmc: low-collision-set lifecycle and failure-rate experiments.
//
// Subcommands:
//   lcs-build    construct a candidate set and write it as a bmc-lcs file
//   lcs-verify   run the promising-set check on a bmc-lcs file
//   experiment   reproduce the four-scheme failure-rate comparison
//
// Exit codes: 0 success, 1 verification/decode failure, 2 usage error.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bmc/channel.hpp"
#include "bmc/codec.hpp"
#include "bmc/lcs_io.hpp"
#include "bmc/masking.hpp"
#include "bmc/parallel.hpp"
#include "bmc/rng.hpp"
#include "bmc/sim.hpp"

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

struct Options {
    std::uint32_t k = 0;
    std::vector<std::uint32_t> d;
    double delta = 0.0;
    std::uint64_t set_size = 0;
    std::uint32_t w = 0;
    std::uint64_t seed = 1;
    std::uint64_t trials = 1000;
    std::uint64_t airtime = 0;
    std::string out = "-";
    std::string format = "csv";
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    std::string profile = "small";
    bool force = false;
    bool timing = false;
    std::uint64_t verify_limit = 100000;
    std::string lcs_path;

    bool k_given = false, delta_given = false, size_given = false, airtime_given = false;
};

// Profile defaults; explicit flags win.
void apply_profile(Options& opt) {
    std::uint32_t k;
    double delta;
    std::uint64_t set_size, airtime;
    if (opt.profile == "paper") {
        k = 100;
        delta = 1e-4;
        set_size = 2000000;
        airtime = 100000;
    } else if (opt.profile == "small") {
        k = 20;
        delta = 1e-3;
        set_size = 40000;
        airtime = 40500;
    } else {
        throw CLI::ValidationError("--profile must be 'small' or 'paper'");
    }
    if (!opt.k_given) opt.k = k;
    if (!opt.delta_given) opt.delta = delta;
    if (!opt.size_given) opt.set_size = set_size;
    if (!opt.airtime_given) opt.airtime = airtime;
    if (opt.d.empty()) opt.d = {25, 50, 75, 100};
}

std::unique_ptr<std::ofstream> owned_file;
std::ostream& open_output(const std::string& path) {
    if (path == "-") return std::cout;
    owned_file = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*owned_file) throw std::runtime_error("cannot open for writing: " + path);
    return *owned_file;
}

int cmd_lcs_build(Options& opt) {
    const std::uint32_t d = opt.d.empty() ? 100 : opt.d.front();
    apply_profile(opt);
    const std::uint32_t w = opt.w != 0 ? opt.w : bmc::choose_wu(d).w;
    bmc::MaskingParams params{opt.k, w, opt.delta};
    bmc::validate(params);

    std::uint64_t size = opt.set_size != 0
                             ? opt.set_size
                             : static_cast<std::uint64_t>(std::llround(2.0 * opt.k / opt.delta));

    const bmc::CandidateSet set = bmc::construct_candidate_set(params, size, opt.seed);

    const std::uint32_t bits_per_pick =
        params.segment_bits() <= 1 ? 1
                                   : 32 - __builtin_clz(params.segment_bits() - 1);
    const std::uint64_t estimate_bytes =
        (static_cast<std::uint64_t>(w) * bits_per_pick * size + 7) / 8;
    std::fprintf(stderr,
                 "lcs-build: %llu strings (k=%u w=%u delta=%s), "
                 "footprint estimate %llu bytes (%.1f MiB at %u bits/pick), "
                 "in-memory %llu bytes\n",
                 static_cast<unsigned long long>(size), opt.k, w,
                 fmt_double(opt.delta).c_str(),
                 static_cast<unsigned long long>(estimate_bytes),
                 static_cast<double>(estimate_bytes) / (1024.0 * 1024.0), bits_per_pick,
                 static_cast<unsigned long long>(set.memory_bytes()));

    std::ostream& out = open_output(opt.out);
    bmc::write_lcs(out, set, opt.seed);
    out.flush();
    return kExitSuccess;
}

int cmd_lcs_verify(Options& opt) {
    bmc::LcsFile file = [&] {
        try {
            return bmc::read_lcs_file(opt.lcs_path);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "lcs-verify: %s\n", e.what());
            std::exit(kExitFailure);
        }
    }();
    auto& set = file.set;
    const auto& params = set.params();

    if (set.size() > opt.verify_limit && !opt.force) {
        std::fprintf(stderr,
                     "lcs-verify: refusing %zu strings: the promising-set check touches "
                     "every pair (about |S|^2*w/4k collision updates plus an |S|^2 scan) "
                     "and would be very slow at this size; rerun with --force or raise "
                     "--verify-limit\n",
                     set.size());
        return kExitUsage;
    }

    const std::uint32_t provable_w = bmc::theoretical_weight(params.max_degree, params.delta);
    if (params.weight < provable_w)
        std::fprintf(stderr,
                     "lcs-verify: note: weight w=%u is below the provable-construction "
                     "weight %u for k=%u delta=%s; a pass certifies the promising-set "
                     "inequalities at this weight only\n",
                     params.weight, provable_w, params.max_degree,
                     fmt_double(params.delta).c_str());
    if (!bmc::theoretical_weight_preconditions_hold(params.max_degree, params.delta))
        std::fprintf(stderr,
                     "lcs-verify: note: (k=%u, delta=%s) is outside the proven parameter "
                     "range (needs delta <= 0.02 and k >= 6 ln(2k/delta^2))\n",
                     params.max_degree, fmt_double(params.delta).c_str());

    const auto diag = bmc::check_promising(set, opt.threads);
    std::printf("set: k=%u w=%u delta=%s size=%zu\n", params.max_degree, params.weight,
                fmt_double(params.delta).c_str(), set.size());
    std::printf("mean target w/4k=%s slack=%s eq2 bound=%s eq3 bound=%s\n",
                fmt_double(diag.mean_target).c_str(), fmt_double(diag.eq1_slack).c_str(),
                fmt_double(diag.eq2_bound).c_str(), fmt_double(diag.eq3_bound).c_str());
    std::printf("promising set: %s\n", diag.promising ? "yes" : "no");
    std::size_t shown = 0;
    for (const auto& failure : diag.failures) {
        if (shown++ == 20) {
            std::printf("... %zu further violations\n", diag.failures.size() - 20);
            break;
        }
        std::printf("string %zu: equation %d violated\n", failure.index, failure.equation);
    }
    return diag.promising ? kExitSuccess : kExitFailure;
}

void write_rows_csv(std::ostream& out, const std::vector<bmc::ExperimentResult>& rows,
                    std::uint64_t master_seed) {
    out << "scheme,k,d,delta,set_size,t,trials,failure_rate,ci_half_width,airtime_bytes,R,"
           "seed\n";
    for (const auto& r : rows) {
        out << bmc::scheme_name(r.scheme) << ',' << r.max_degree << ',' << r.item_bytes << ','
            << fmt_double(r.delta) << ',' << r.set_size << ',' << r.airtime_budget << ','
            << r.trials << ',' << fmt_double(r.failure_rate) << ','
            << fmt_double(r.ci_half_width) << ',' << r.airtime_bytes << ','
            << fmt_double(r.utilization) << ',' << master_seed << '\n';
    }
}

void write_rows_json(std::ostream& out, const std::vector<bmc::ExperimentResult>& rows,
                     std::uint64_t master_seed) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json row;
        row["scheme"] = bmc::scheme_name(r.scheme);
        row["k"] = r.max_degree;
        row["d"] = r.item_bytes;
        row["delta"] = r.delta;
        row["set_size"] = r.set_size;
        row["t"] = r.airtime_budget;
        row["trials"] = r.trials;
        row["failure_rate"] = r.failure_rate;
        row["ci_half_width"] = r.ci_half_width;
        row["airtime_bytes"] = r.airtime_bytes;
        row["R"] = r.utilization;
        row["seed"] = master_seed;
        doc.push_back(std::move(row));
    }
    out << doc.dump(2) << '\n';
}

// Splits a trial range across worker threads; per-trial outcomes depend only
// on (seed, index), so the partition cannot change the totals.
template <typename RunRange>
bmc::TrialTally run_range(RunRange&& run, std::uint64_t begin, std::uint64_t end,
                          unsigned threads) {
    std::vector<bmc::TrialTally> parts(threads == 0 ? 1 : threads);
    bmc::parallel_blocks(end - begin, threads,
                         [&](std::size_t block, std::size_t b, std::size_t e) {
                             parts[block] = run(begin + b, begin + e);
                         });
    bmc::TrialTally total;
    for (const auto& p : parts) {
        total.trials += p.trials;
        total.items += p.items;
        total.failures += p.failures;
    }
    return total;
}

// Doubles the trial range until enough failures are seen; the growth path
// does not change results.
template <typename RunRange>
bmc::TrialTally run_until_failures(RunRange&& run, std::uint64_t base_trials,
                                   std::uint64_t min_failures, std::uint64_t cap,
                                   unsigned threads) {
    bmc::TrialTally tally = run_range(run, 0, base_trials, threads);
    while (tally.failures < min_failures && tally.trials < cap) {
        const std::uint64_t next = std::min(cap, tally.trials * 2);
        const bmc::TrialTally more = run_range(run, tally.trials, next, threads);
        tally.trials += more.trials;
        tally.items += more.items;
        tally.failures += more.failures;
    }
    return tally;
}

int cmd_experiment(Options& opt) {
    apply_profile(opt);
    const std::uint64_t master_seed = opt.seed;
    const std::uint64_t trial_cap = opt.trials * 128;

    for (std::uint32_t d : opt.d) {
        const auto airtime = bmc::bmc_airtime(opt.k, d);
        if (airtime.total_bytes > opt.airtime)
            throw CLI::ValidationError(
                "experiment: BMC needs " + std::to_string(airtime.total_bytes) +
                " bytes of airtime for d=" + std::to_string(d) + " but t=" +
                std::to_string(opt.airtime));
    }

    std::vector<bmc::ExperimentResult> bmc1_rows, bmc2_rows, ra1_rows, ra2_rows;
    for (std::uint32_t d : opt.d) {
        const bmc::WuChoice wu = bmc::choose_wu(d);
        bmc::MaskingParams params{opt.k, wu.w, opt.delta};
        const bmc::CandidateSet set =
            bmc::construct_candidate_set(params, opt.set_size, bmc::Rng::derive(master_seed, d));

        bmc::ExperimentConfig config;
        config.max_degree = opt.k;
        config.item_bytes = d;
        config.delta = opt.delta;
        config.set_size = opt.set_size;
        config.airtime_budget = opt.airtime;
        config.seed = bmc::Rng::derive(master_seed, 10000 + d);
        config.threads = opt.threads;

        const bmc::Bmc1Runner runner(config, set);
        bmc::TrialTally tally = run_until_failures(
            [&](std::uint64_t b, std::uint64_t e) { return runner.run(b, e); }, opt.trials, 20,
            trial_cap, opt.threads);
        config.trials = tally.trials;
        bmc::ExperimentResult row =
            bmc::finalize_result(bmc::Scheme::bmc1, config, tally,
                                 bmc::bmc_airtime(opt.k, d).total_bytes);
        bmc2_rows.push_back(bmc::bmc2_failure_rate(row, config));
        bmc1_rows.push_back(std::move(row));

        if (opt.timing && d == opt.d.back()) {
            std::vector<bmc::Phase1Codeword> sent;
            bmc::Rng rng(bmc::Rng::derive(master_seed, 999));
            for (std::uint32_t s = 0; s < opt.k; ++s)
                sent.push_back(set.string_at(rng.uniform_below(set.size())));
            const auto obs = bmc::superimpose_phase1(params, sent);
            const auto start = std::chrono::steady_clock::now();
            const auto decoded = bmc::decode_masking(obs, set, 1);
            const auto stop = std::chrono::steady_clock::now();
            const double ms = std::chrono::duration<double, std::milli>(stop - start).count();
            std::fprintf(stderr,
                         "timing: decode_masking over %zu strings (w=%u) took %.3f ms "
                         "single-threaded, %.6f ms per string, %zu decoded\n",
                         set.size(), wu.w, ms, ms / static_cast<double>(set.size()),
                         decoded.size());
        }
    }

    for (std::uint32_t d : opt.d) {
        bmc::ExperimentConfig config;
        config.max_degree = opt.k;
        config.item_bytes = d;
        config.delta = opt.delta;
        config.set_size = opt.set_size;
        config.airtime_budget = opt.airtime;
        config.threads = opt.threads;

        config.seed = bmc::Rng::derive(master_seed, 20000 + d);
        bmc::TrialTally t1 = run_until_failures(
            [&](std::uint64_t b, std::uint64_t e) {
                return bmc::rand_access1_trials(config, b, e);
            },
            opt.trials, 20, trial_cap, opt.threads);
        config.trials = t1.trials;
        ra1_rows.push_back(
            bmc::finalize_result(bmc::Scheme::rand_access1, config, t1, opt.airtime));

        config.seed = bmc::Rng::derive(master_seed, 30000 + d);
        bmc::TrialTally t2 = run_until_failures(
            [&](std::uint64_t b, std::uint64_t e) {
                return bmc::rand_access2_trials(config, b, e);
            },
            opt.trials, 20, trial_cap, opt.threads);
        config.trials = t2.trials;
        ra2_rows.push_back(
            bmc::finalize_result(bmc::Scheme::rand_access2, config, t2, opt.airtime));
    }

    std::vector<bmc::ExperimentResult> rows;
    rows.insert(rows.end(), bmc1_rows.begin(), bmc1_rows.end());
    rows.insert(rows.end(), bmc2_rows.begin(), bmc2_rows.end());
    rows.insert(rows.end(), ra1_rows.begin(), ra1_rows.end());
    rows.insert(rows.end(), ra2_rows.begin(), ra2_rows.end());

    std::ostream& out = open_output(opt.out);
    if (opt.format == "csv")
        write_rows_csv(out, rows, master_seed);
    else if (opt.format == "json")
        write_rows_json(out, rows, master_seed);
    else
        throw CLI::ValidationError("--format must be 'csv' or 'json'");
    out.flush();
    return kExitSuccess;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cross-sender bit-mixing coding toolkit"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--k", opt.k, "max receiver degree")->check(CLI::PositiveNumber);
        cmd->add_option("--delta", opt.delta, "failure parameter in (0,1]");
        cmd->add_option("--set-size", opt.set_size, "candidate set size (default 2k/delta)");
        cmd->add_option("--seed", opt.seed, "RNG seed");
        cmd->add_option("--threads", opt.threads, "worker thread cap");
        cmd->add_option("--profile", opt.profile, "parameter profile: small|paper");
    };

    CLI::App* build = app.add_subcommand("lcs-build", "construct and write a candidate set");
    add_common(build);
    build->add_option("--d", opt.d, "data item size driving the weight (default 100)");
    build->add_option("--w", opt.w, "string weight override");
    build->add_option("--out", opt.out, "output path, '-' for stdout");

    CLI::App* verify = app.add_subcommand("lcs-verify", "promising-set check on a file");
    add_common(verify);
    verify->add_option("file", opt.lcs_path, "bmc-lcs file")->required();
    verify->add_flag("--force", opt.force, "verify even above the size limit");
    verify->add_option("--verify-limit", opt.verify_limit,
                       "size refusal threshold (default 100000)");

    CLI::App* experiment = app.add_subcommand("experiment", "four-scheme failure rates");
    add_common(experiment);
    experiment->add_option("--d", opt.d, "data item sizes (default 25 50 75 100)");
    experiment->add_option("--trials", opt.trials, "initial trials per row (default 1000)");
    experiment->add_option("--airtime", opt.airtime, "airtime budget t in bytes");
    experiment->add_option("--out", opt.out, "output path, '-' for stdout");
    experiment->add_option("--format", opt.format, "csv|json");
    experiment->add_flag("--timing", opt.timing, "report decode timing on stderr");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitSuccess : kExitUsage;
    }

    CLI::App* cmd = app.get_subcommands().front();
    auto given = [&](const std::string& name) {
        const CLI::Option* option = cmd->get_option_no_throw(name);
        return option != nullptr && option->count() > 0;
    };
    opt.k_given = given("--k");
    opt.delta_given = given("--delta");
    opt.size_given = given("--set-size");
    opt.airtime_given = given("--airtime");

    try {
        if (cmd == build) return cmd_lcs_build(opt);
        if (cmd == verify) return cmd_lcs_verify(opt);
        return cmd_experiment(opt);
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFailure;
    }
}
