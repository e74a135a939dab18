#include "rpn/experiment.hpp"

#include "rpn/semantics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rpn::antenna {

namespace {

std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return mix(mix(mix(seed) + a) + b);
}

std::string fmt_real(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) return "0";
    return std::string(buf, ptr);
}

void check_config(const ExperimentConfig& cfg) {
    if (cfg.n_t < 1) throw Error("antenna count must be positive");
    if (cfg.n_r < 1) throw Error("receiver count must be positive");
    if (cfg.n_ts < 1 || cfg.n_ts > cfg.n_t)
        throw Error("selected-antenna count must lie between 1 and the antenna count");
    if (cfg.realizations < 1) throw Error("need at least one channel realization");
    if (cfg.runs < 1) throw Error("need at least one run per realization");
}

}  // namespace

CaseConfig case_config(const ExperimentConfig& cfg) {
    CaseConfig c;
    c.rho = db_to_linear(cfg.rho_db);
    c.n_ts = cfg.n_ts;
    c.n_r = cfg.n_r;
    c.p_diag = cfg.p_diag;
    return c;
}

Eigen::MatrixXcd draw_channel(int n_t, int n_r, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    Eigen::MatrixXcd h(n_t, n_r);
    for (Eigen::Index i = 0; i < h.rows(); ++i)
        for (Eigen::Index j = 0; j < h.cols(); ++j) {
            double re = gauss(rng);
            double im = gauss(rng);
            h(i, j) = {re, im};
        }
    return h;
}

Eigen::MatrixXcd channel_for(const ExperimentConfig& cfg, int realization) {
    return draw_channel(cfg.n_t, cfg.n_r,
                        derive(cfg.channel_seed, static_cast<std::uint64_t>(realization), 0));
}

RunPlan plan_run(const ExperimentConfig& cfg, int realization, int run_index) {
    check_config(cfg);
    RunPlan plan;
    plan.topology = ring_topology(cfg.n_t, cfg.window, cfg.stride);

    std::mt19937_64 rng(derive(cfg.sched_seed, static_cast<std::uint64_t>(realization),
                               static_cast<std::uint64_t>(run_index)));

    // Initially-on subset: partial Fisher-Yates over all antenna indices.
    std::vector<int> pool(static_cast<std::size_t>(cfg.n_t));
    std::iota(pool.begin(), pool.end(), 0);
    for (int l = 0; l < cfg.n_ts; ++l) {
        std::uniform_int_distribution<int> d(l, cfg.n_t - 1);
        std::swap(pool[static_cast<std::size_t>(l)], pool[static_cast<std::size_t>(d(rng))]);
    }
    plan.topology.initial_on.assign(pool.begin(), pool.begin() + cfg.n_ts);

    // Every on antenna homes its token in one of its windows, chosen uniformly.
    std::vector<std::vector<int>> containing(static_cast<std::size_t>(cfg.n_t));
    for (std::size_t k = 0; k < plan.topology.neighborhoods.size(); ++k)
        for (int i : plan.topology.neighborhoods[k].second)
            containing[static_cast<std::size_t>(i)].push_back(static_cast<int>(k));
    std::vector<int> on_sorted = plan.topology.initial_on;
    std::sort(on_sorted.begin(), on_sorted.end());
    for (int i : on_sorted) {
        const auto& windows = containing[static_cast<std::size_t>(i)];
        std::uniform_int_distribution<std::size_t> d(0, windows.size() - 1);
        plan.topology.home[i] = windows[d(rng)];
    }

    plan.scheduler_seed = rng();
    return plan;
}

namespace {

RunRecord execute_run(const ExperimentConfig& cfg, const CaseConfig& cc,
                      const Eigen::MatrixXcd& h, int realization, int run_index) {
    RunPlan plan = plan_run(cfg, realization, run_index);
    Net net = build_net(plan.topology, h, cc);
    State s0 = initial_state(net);

    SchedulerPolicy policy =
        cfg.policy == ExperimentConfig::Policy::ForwardFirst
            ? SchedulerPolicy(ForwardFirstPolicy{plan.scheduler_seed})
            : SchedulerPolicy(RandomPolicy{plan.scheduler_seed});
    std::size_t max_steps = cfg.max_steps != 0
                                ? cfg.max_steps
                                : static_cast<std::size_t>(50) *
                                      static_cast<std::size_t>(cfg.n_t);
    RunResult rr = run(net, s0, policy, max_steps);

    RunRecord rec;
    rec.realization = realization;
    rec.run_index = run_index;
    rec.selected = selected_antennas(net, rr.final_state.marking);
    rec.run_capacity = selection_capacity(h, rec.selected, cc);
    rec.steps = rr.steps.size();
    rec.converged = rr.stuck;
    if (cfg.keep_traces) rec.trace = std::move(rr.steps);
    return rec;
}

ExperimentResult run_experiment_impl(const ExperimentConfig& cfg, bool parallel) {
    check_config(cfg);
    const CaseConfig cc = case_config(cfg);

    // Phase 1: per-realization channel and centralized baselines.
    std::vector<Eigen::MatrixXcd> channels(static_cast<std::size_t>(cfg.realizations));
    std::vector<double> greedy(static_cast<std::size_t>(cfg.realizations));
    std::vector<std::optional<SelectionResult>> exhaustive(
        static_cast<std::size_t>(cfg.realizations));
    for (int r = 0; r < cfg.realizations; ++r)
        channels[static_cast<std::size_t>(r)] = channel_for(cfg, r);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
    for (int r = 0; r < cfg.realizations; ++r) {
        greedy[static_cast<std::size_t>(r)] =
            greedy_baseline(channels[static_cast<std::size_t>(r)], cc).capacity;
        exhaustive[static_cast<std::size_t>(r)] = exhaustive_best(
            channels[static_cast<std::size_t>(r)], cc, cfg.exhaustive_limit);
    }

    // Phase 2: all (realization, run) simulations, independent jobs.
    const int jobs = cfg.realizations * cfg.runs;
    std::vector<RunRecord> records(static_cast<std::size_t>(jobs));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
    for (int job = 0; job < jobs; ++job) {
        int r = job / cfg.runs;
        int j = job % cfg.runs;
        records[static_cast<std::size_t>(job)] =
            execute_run(cfg, cc, channels[static_cast<std::size_t>(r)], r, j);
    }

    // Phase 3: deterministic fold, ordered by run index.
    for (int r = 0; r < cfg.realizations; ++r) {
        double best = 0.0;
        for (int j = 0; j < cfg.runs; ++j)
            best = std::max(best,
                            records[static_cast<std::size_t>(r * cfg.runs + j)].run_capacity);
        for (int j = 0; j < cfg.runs; ++j) {
            RunRecord& rec = records[static_cast<std::size_t>(r * cfg.runs + j)];
            rec.best_capacity = best;
            rec.greedy_capacity = greedy[static_cast<std::size_t>(r)];
            if (const auto& ex = exhaustive[static_cast<std::size_t>(r)])
                rec.exhaustive_capacity = ex->capacity;
        }
    }

    ExperimentResult result;
    result.records = std::move(records);
    return result;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
#ifdef _OPENMP
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
    return run_experiment_impl(cfg, cfg.threads != 1);
#else
    return run_experiment_impl(cfg, false);
#endif
}

ExperimentResult run_experiment_serial(const ExperimentConfig& cfg) {
    return run_experiment_impl(cfg, false);
}

void write_experiment_csv(std::ostream& out, const ExperimentConfig& cfg,
                          const ExperimentResult& result) {
    out << "realization,nts,run_index,run_capacity,best_capacity,greedy_capacity,"
           "exhaustive_capacity_or_blank,steps,converged\n";
    for (const RunRecord& rec : result.records) {
        out << rec.realization << "," << cfg.n_ts << "," << rec.run_index << ","
            << fmt_real(rec.run_capacity) << "," << fmt_real(rec.best_capacity) << ","
            << fmt_real(rec.greedy_capacity) << ",";
        if (rec.exhaustive_capacity) out << fmt_real(*rec.exhaustive_capacity);
        out << "," << rec.steps << "," << (rec.converged ? 1 : 0) << "\n";
    }
}

}  // namespace rpn::antenna
