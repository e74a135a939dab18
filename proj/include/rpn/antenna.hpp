#pragma once
// Distributed transmit-antenna selection modelled as a reversing net: sum
// capacity numerics, net construction for neighborhood swap transitions, and
// the centralized baselines.

#include "rpn/model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace rpn::antenna {

struct DimensionMismatch : Error {
    using Error::Error;
};

struct InvalidTopology : Error {
    using Error::Error;
};

double db_to_linear(double db);

// Sum capacity log2 det(I + rho * n_r/n_ts * Hc P Hc^H) of a channel
// submatrix Hc (one row per transmit antenna, zero rows allowed, one column
// per receiver) with diagonal receiver power loading P.
double capacity(const Eigen::MatrixXcd& hc, double rho, int n_ts, int n_r,
                const Eigen::VectorXd& p_diag);

// Antenna row <-> token value: rows are carried by tokens as interleaved
// re/im pairs, dimension 2*n_r.
std::vector<double> row_to_value(const Eigen::RowVectorXcd& row);
Eigen::RowVectorXcd value_to_row(const std::vector<double>& v);

// Channel submatrix for one neighborhood place: n_t rows, row i copied from
// H when base a(i) currently sits in the place, zero otherwise.
Eigen::MatrixXcd build_hc(const Net& net, const Marking& m, const PlaceId& place,
                          const Eigen::MatrixXcd& h);

struct Topology {
    int n_t = 0;
    // Window id + member antenna indices (0-based), declaration order.
    std::vector<std::pair<std::string, std::vector<int>>> neighborhoods;
    std::set<std::pair<int, int>> links;  // unordered index pairs sharing a window
    std::vector<int> initial_on;          // exactly n_ts distinct indices
    std::map<int, int> home;              // initially-on antenna -> neighborhood position
};

// Overlapping windows on a ring: size `window`, advancing by `stride`.
Topology ring_topology(int n_t, int window, int stride);

struct CaseConfig {
    double rho = 10.0;  // linear
    int n_ts = 1;
    int n_r = 1;
    Eigen::VectorXd p_diag;  // empty means identity
};

// Net with one place per antenna and per neighborhood, one swap transition
// per ordered link per shared window, and capacity-comparison guards backed
// by registered host functions. Throws InvalidTopology / DimensionMismatch.
Net build_net(const Topology& topo, const Eigen::MatrixXcd& h, const CaseConfig& cfg);

// Capacity of the antenna set currently active in one neighborhood place of
// a net produced by build_net.
double local_capacity(const Net& net, const Marking& m, const PlaceId& place);

// Antennas whose place holds a power token (0-based indices).
std::set<int> selected_antennas(const Net& net, const Marking& m);

// Capacity of an explicit antenna subset against the full channel.
double selection_capacity(const Eigen::MatrixXcd& h, const std::set<int>& selected,
                          const CaseConfig& cfg);

struct SelectionResult {
    std::set<int> selected;
    double capacity = 0.0;
};

// Centralized greedy: grow the set one antenna at a time, always taking the
// capacity-maximizing addition, ties to the lowest index.
SelectionResult greedy_baseline(const Eigen::MatrixXcd& h, const CaseConfig& cfg);

// Exact optimum by subset enumeration; nullopt when the number of subsets
// exceeds `limit`.
std::optional<SelectionResult> exhaustive_best(const Eigen::MatrixXcd& h,
                                               const CaseConfig& cfg,
                                               std::uint64_t limit = 100000);

// Naming scheme shared by build_net and its clients.
PlaceId antenna_place(int i);
PlaceId neighborhood_place(int k);
BaseId antenna_base(int i);
BaseId neighborhood_base(int k);
BaseId power_base(int l);

}  // namespace rpn::antenna
