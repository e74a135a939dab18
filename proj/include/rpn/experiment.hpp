#pragma once
// Monte-Carlo experiment: random channels, repeated seeded net runs per
// realization, centralized baselines, CSV reporting. Jobs are independent,
// so the driver can fan them out across threads without changing any output.

#include "rpn/antenna.hpp"
#include "rpn/semantics.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace rpn::antenna {

struct ExperimentConfig {
    int n_t = 16;
    int n_r = 4;
    int n_ts = 8;
    double rho_db = 10.0;
    int realizations = 20;
    int runs = 5;  // independent net runs per realization
    std::uint64_t channel_seed = 1;
    std::uint64_t sched_seed = 2;
    int window = 8;
    int stride = 4;
    std::size_t max_steps = 0;  // 0 means 50 * n_t
    enum class Policy { Random, ForwardFirst } policy = Policy::Random;
    int threads = 0;  // 0 = library default, 1 = serial
    std::uint64_t exhaustive_limit = 100000;
    Eigen::VectorXd p_diag;   // empty means identity
    bool keep_traces = false; // retain per-run step traces in the records
};

struct RunRecord {
    int realization = 0;
    int run_index = 0;
    double run_capacity = 0.0;
    double best_capacity = 0.0;    // max run_capacity within the realization
    double greedy_capacity = 0.0;
    std::optional<double> exhaustive_capacity;
    std::size_t steps = 0;
    bool converged = false;        // run stopped on an empty enabled set
    std::set<int> selected;
    std::vector<Step> trace;       // filled only when keep_traces
};

struct ExperimentResult {
    std::vector<RunRecord> records;  // realization-major, run_index-minor
};

// Everything needed to rebuild one run exactly: the per-run topology (initial
// set and token homes) and the scheduler seed.
struct RunPlan {
    Topology topology;
    std::uint64_t scheduler_seed = 0;
};

Eigen::MatrixXcd draw_channel(int n_t, int n_r, std::uint64_t seed);
// The channel matrix the experiment uses for one realization; together with
// plan_run this is enough to rebuild any run exactly.
Eigen::MatrixXcd channel_for(const ExperimentConfig& cfg, int realization);
RunPlan plan_run(const ExperimentConfig& cfg, int realization, int run_index);
CaseConfig case_config(const ExperimentConfig& cfg);

ExperimentResult run_experiment(const ExperimentConfig& cfg);
// Single-thread reference driver; identical output to run_experiment.
ExperimentResult run_experiment_serial(const ExperimentConfig& cfg);

// Header plus one row per record:
// realization,nts,run_index,run_capacity,best_capacity,greedy_capacity,
// exhaustive_capacity_or_blank,steps,converged
void write_experiment_csv(std::ostream& out, const ExperimentConfig& cfg,
                          const ExperimentResult& result);

}  // namespace rpn::antenna
