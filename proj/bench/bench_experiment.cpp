// Benchmark: the threaded Monte-Carlo experiment driver against the serial
// reference implementation, checking that both produce identical reports.
//
//   rpn_bench [realizations] [runs] [nt]

#include "rpn/experiment.hpp"

#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

using Clock = std::chrono::steady_clock;
namespace ant = rpn::antenna;

namespace {

std::string csv_of(const ant::ExperimentConfig& cfg, const ant::ExperimentResult& r) {
    std::ostringstream out;
    ant::write_experiment_csv(out, cfg, r);
    return out.str();
}

}  // namespace

int main(int argc, char** argv) {
    ant::ExperimentConfig cfg;
    cfg.n_t = 12;
    cfg.n_r = 3;
    cfg.n_ts = 6;
    cfg.window = 6;
    cfg.stride = 3;
    cfg.realizations = 20;
    cfg.runs = 4;
    cfg.channel_seed = 101;
    cfg.sched_seed = 202;
    if (argc > 1) cfg.realizations = std::atoi(argv[1]);
    if (argc > 2) cfg.runs = std::atoi(argv[2]);
    if (argc > 3) cfg.n_t = std::atoi(argv[3]);
    if (cfg.n_t != 12) {
        // Keep the derived quantities consistent for non-default sizes.
        cfg.n_ts = cfg.n_t / 2;
        cfg.window = cfg.n_t / 2;
        cfg.stride = cfg.window / 2 > 0 ? cfg.window / 2 : 1;
    }

    std::cout << "config: nt=" << cfg.n_t << " nr=" << cfg.n_r << " nts=" << cfg.n_ts
              << " window=" << cfg.window << " stride=" << cfg.stride
              << " realizations=" << cfg.realizations << " runs=" << cfg.runs << "\n";

    auto t0 = Clock::now();
    ant::ExperimentResult serial = ant::run_experiment_serial(cfg);
    const double serial_s = std::chrono::duration<double>(Clock::now() - t0).count();

    cfg.threads = 0;  // library default thread count
    t0 = Clock::now();
    ant::ExperimentResult parallel = ant::run_experiment(cfg);
    const double parallel_s = std::chrono::duration<double>(Clock::now() - t0).count();

    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif

    const bool identical = csv_of(cfg, serial) == csv_of(cfg, parallel);

    std::cout << std::fixed << std::setprecision(3);
    std::cout << "serial    " << serial_s << "s\n";
    std::cout << "parallel  " << parallel_s << "s (" << threads << " threads)\n";
    std::cout << "speedup   " << std::setprecision(2) << (serial_s / parallel_s) << "x\n";
    std::cout << "outputs   " << (identical ? "identical" : "DIFFERENT") << "\n";
    return identical ? 0 : 1;
}
