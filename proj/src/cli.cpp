#include "rpn/cli.hpp"

#include "rpn/cond.hpp"
#include "rpn/experiment.hpp"
#include "rpn/format.hpp"
#include "rpn/model.hpp"
#include "rpn/semantics.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <sstream>

namespace rpn::cli {

namespace {

SchedulerPolicy parse_policy(const std::string& text, std::uint64_t seed) {
    if (text == "random") return RandomPolicy{seed};
    if (text == "forward-first") return ForwardFirstPolicy{seed};
    if (text.rfind("fixed:", 0) == 0) {
        FixedPolicy fixed;
        std::stringstream rest(text.substr(6));
        std::string entry;
        while (std::getline(rest, entry, ',')) {
            auto colon = entry.find(':');
            std::string tid = entry.substr(0, colon);
            std::string dir = colon == std::string::npos ? "fwd" : entry.substr(colon + 1);
            if (tid.empty())
                throw Error("empty transition id in '--policy " + text + "'");
            if (dir == "fwd")
                fixed.steps.emplace_back(tid, Direction::Forward);
            else if (dir == "rev")
                fixed.steps.emplace_back(tid, Direction::Reverse);
            else
                throw Error("step direction must be 'fwd' or 'rev', got '" + dir + "'");
        }
        if (fixed.steps.empty())
            throw Error("'--policy fixed:' lists no steps");
        return fixed;
    }
    throw Error("unknown policy '" + text +
                "' (expected random, forward-first, or fixed:<id>:<fwd|rev>[,...])");
}

int run_validate(const std::string& path, std::ostream& out) {
    Net net = io::load(path);  // throws on parse/validation problems
    (void)net;
    out << "ok\n";
    return exit_ok;
}

int run_simulate(const std::string& path, const std::string& policy_text,
                 std::uint64_t seed, std::size_t max_steps, const std::string& trace_path,
                 std::ostream& out, std::ostream& err) {
    Net net = io::load(path);
    SchedulerPolicy policy = parse_policy(policy_text, seed);

    auto t0 = std::chrono::steady_clock::now();
    RunResult result = run(net, initial_state(net), policy, max_steps);
    auto t1 = std::chrono::steady_clock::now();

    out << io::format_marking(net, result.final_state.marking) << "\n";
    const char* stopped = result.stuck                      ? "stuck"
                          : result.steps.size() < max_steps ? "done"
                                                            : "limit";
    out << "# steps=" << result.steps.size() << " stopped=" << stopped << "\n";
    err << "elapsed "
        << std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count()
        << "us\n";

    if (!trace_path.empty()) {
        std::ofstream trace(trace_path, std::ios::binary);
        if (!trace) throw Error("cannot open trace file '" + trace_path + "'");
        io::write_trace_csv(trace, result.steps);
    }
    return exit_ok;
}

int run_antenna(const antenna::ExperimentConfig& cfg, const std::string& out_path,
                std::ostream& out, std::ostream& err) {
    auto t0 = std::chrono::steady_clock::now();
    antenna::ExperimentResult result = antenna::run_experiment(cfg);
    auto t1 = std::chrono::steady_clock::now();

    std::ofstream csv(out_path, std::ios::binary);
    if (!csv) throw Error("cannot open output file '" + out_path + "'");
    antenna::write_experiment_csv(csv, cfg, result);

    double best_sum = 0, greedy_sum = 0;
    int converged = 0;
    for (const auto& rec : result.records) {
        if (rec.run_index == 0) {
            best_sum += rec.best_capacity;
            greedy_sum += rec.greedy_capacity;
        }
        converged += rec.converged ? 1 : 0;
    }
    out << "realizations=" << cfg.realizations << " runs=" << cfg.runs
        << " mean_best=" << best_sum / cfg.realizations
        << " mean_greedy=" << greedy_sum / cfg.realizations
        << " converged_runs=" << converged << "/" << result.records.size() << "\n";
    err << "elapsed "
        << std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()
        << "ms\n";
    return exit_ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"execution engine for reversing nets with bonded tokens"};
    app.name("rpn");
    app.require_subcommand(1);

    auto* validate_cmd = app.add_subcommand("validate", "check a net file");
    std::string validate_path;
    validate_cmd->add_option("file", validate_path, "net file (.rpn)")->required();

    auto* sim_cmd = app.add_subcommand("simulate", "run a net under a scheduler");
    std::string sim_path, sim_policy = "random", sim_trace;
    std::uint64_t sim_seed = 0;
    std::size_t sim_max_steps = 10000;
    sim_cmd->add_option("file", sim_path, "net file (.rpn)")->required();
    sim_cmd->add_option("--policy", sim_policy,
                        "random | forward-first | fixed:<id>:<fwd|rev>[,...]");
    sim_cmd->add_option("--seed", sim_seed, "scheduler seed");
    sim_cmd->add_option("--max-steps", sim_max_steps, "step budget");
    sim_cmd->add_option("--trace", sim_trace, "write a step-trace CSV here");

    auto* ant_cmd = app.add_subcommand("antenna-experiment",
                                       "distributed antenna selection versus baselines");
    antenna::ExperimentConfig cfg;
    std::string ant_out;
    std::string ant_policy = "random";
    ant_cmd->add_option("--nt", cfg.n_t, "transmit antennas");
    ant_cmd->add_option("--nr", cfg.n_r, "receivers");
    ant_cmd->add_option("--nts", cfg.n_ts, "antennas to select (power tokens)");
    ant_cmd->add_option("--rho-db", cfg.rho_db, "signal-to-noise ratio in dB");
    ant_cmd->add_option("--realizations", cfg.realizations, "channel draws");
    ant_cmd->add_option("--runs", cfg.runs, "independent runs per realization");
    ant_cmd->add_option("--channel-seed", cfg.channel_seed, "channel RNG seed");
    ant_cmd->add_option("--sched-seed", cfg.sched_seed, "scheduler RNG seed");
    ant_cmd->add_option("--max-steps", cfg.max_steps, "step budget per run (0 = 50*nt)");
    ant_cmd->add_option("--window", cfg.window, "neighborhood window size");
    ant_cmd->add_option("--stride", cfg.stride, "neighborhood stride");
    ant_cmd->add_option("--threads", cfg.threads, "worker threads (0 = default, 1 = serial)");
    ant_cmd->add_option("--exhaustive-limit", cfg.exhaustive_limit,
                        "skip the exact optimum above this many subsets");
    ant_cmd->add_option("--policy", ant_policy, "random | forward-first");
    ant_cmd->add_option("--out", ant_out, "output CSV path")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "rpn: " << e.what() << "\n";
        return exit_runtime;
    }

    try {
        if (validate_cmd->parsed()) return run_validate(validate_path, out);
        if (sim_cmd->parsed())
            return run_simulate(sim_path, sim_policy, sim_seed, sim_max_steps, sim_trace,
                                out, err);
        if (ant_cmd->parsed()) {
            if (ant_policy == "forward-first")
                cfg.policy = antenna::ExperimentConfig::Policy::ForwardFirst;
            else if (ant_policy != "random")
                throw Error("unknown policy '" + ant_policy +
                            "' (expected random or forward-first)");
            return run_antenna(cfg, ant_out, out, err);
        }
        err << "rpn: no subcommand given\n";
        return exit_runtime;
    } catch (const io::ParseError& e) {
        err << "rpn: " << e.what() << "\n";
        return exit_parse;
    } catch (const cond::SyntaxError& e) {
        err << "rpn: " << e.what() << "\n";
        return exit_parse;
    } catch (const UnknownIdentifier& e) {
        err << "rpn: " << e.what() << "\n";
        return exit_parse;
    } catch (const ValidationFailed& e) {
        err << "rpn: " << e.what() << "\n";
        for (const Violation& v : e.violations) {
            err << "  " << to_string(v.code);
            if (!v.transition.empty()) err << " [" << v.transition << "]";
            err << ": " << v.message << "\n";
        }
        return exit_validation;
    } catch (const Error& e) {
        err << "rpn: " << e.what() << "\n";
        return exit_runtime;
    } catch (const std::exception& e) {
        err << "rpn: " << e.what() << "\n";
        return exit_runtime;
    }
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace rpn::cli
