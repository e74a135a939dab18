#include "rpn/antenna.hpp"

#include "rpn/cond.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rpn::antenna {

PlaceId antenna_place(int i) { return "A" + std::to_string(i + 1); }
PlaceId neighborhood_place(int k) { return "M" + std::to_string(k + 1); }
BaseId antenna_base(int i) { return "a" + std::to_string(i + 1); }
BaseId neighborhood_base(int k) { return "m" + std::to_string(k + 1); }
BaseId power_base(int l) { return "p" + std::to_string(l + 1); }

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double capacity(const Eigen::MatrixXcd& hc, double rho, int n_ts, int n_r,
                const Eigen::VectorXd& p_diag) {
    if (n_ts < 1) throw DimensionMismatch("the selected-antenna count must be positive");
    if (n_r < 1) throw DimensionMismatch("the receiver count must be positive");
    if (hc.cols() != n_r)
        throw DimensionMismatch("channel submatrix has " + std::to_string(hc.cols()) +
                                " columns for " + std::to_string(n_r) + " receivers");
    if (p_diag.size() != 0 && p_diag.size() != n_r)
        throw DimensionMismatch("power loading has " + std::to_string(p_diag.size()) +
                                " entries for " + std::to_string(n_r) + " receivers");
    if (p_diag.size() != 0 && (p_diag.array() < 0.0).any())
        throw DimensionMismatch("power loading entries must be nonnegative");

    // Zero rows add an identity row/column to the Gram matrix, so dropping
    // them leaves the determinant unchanged.
    std::vector<Eigen::Index> nonzero;
    for (Eigen::Index i = 0; i < hc.rows(); ++i)
        if (hc.row(i).squaredNorm() > 0.0) nonzero.push_back(i);
    if (nonzero.empty()) return 0.0;

    Eigen::MatrixXcd b(static_cast<Eigen::Index>(nonzero.size()), hc.cols());
    for (Eigen::Index r = 0; r < b.rows(); ++r) b.row(r) = hc.row(nonzero[r]);
    if (p_diag.size() != 0)
        b = b * p_diag.cwiseSqrt().asDiagonal();  // B P B^H == (B sqrt(P))(B sqrt(P))^H

    const double scale = rho * static_cast<double>(n_r) / static_cast<double>(n_ts);
    Eigen::MatrixXcd gram =
        Eigen::MatrixXcd::Identity(b.rows(), b.rows()) + scale * (b * b.adjoint());

    Eigen::LLT<Eigen::MatrixXcd> llt(gram);
    if (llt.info() == Eigen::Success) {
        Eigen::MatrixXcd l = llt.matrixL();
        double bits = 0.0;
        for (Eigen::Index i = 0; i < l.rows(); ++i)
            bits += 2.0 * std::log2(l(i, i).real());
        return bits;
    }
    // I + positive-semidefinite is positive definite; reaching this branch
    // means severe conditioning, fall back to a pivoted determinant.
    return std::log2(std::abs(gram.partialPivLu().determinant()));
}

std::vector<double> row_to_value(const Eigen::RowVectorXcd& row) {
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(row.size()) * 2);
    for (Eigen::Index i = 0; i < row.size(); ++i) {
        v.push_back(row(i).real());
        v.push_back(row(i).imag());
    }
    return v;
}

Eigen::RowVectorXcd value_to_row(const std::vector<double>& v) {
    if (v.size() % 2 != 0)
        throw DimensionMismatch("interleaved re/im vector has odd length " +
                                std::to_string(v.size()));
    Eigen::RowVectorXcd row(static_cast<Eigen::Index>(v.size() / 2));
    for (Eigen::Index i = 0; i < row.size(); ++i)
        row(i) = std::complex<double>(v[2 * static_cast<std::size_t>(i)],
                                      v[2 * static_cast<std::size_t>(i) + 1]);
    return row;
}

Eigen::MatrixXcd build_hc(const Net& net, const Marking& m, const PlaceId& place,
                          const Eigen::MatrixXcd& h) {
    (void)net;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(h.rows(), h.cols());
    const ElementSet& content = m.at(place);
    for (Eigen::Index i = 0; i < h.rows(); ++i)
        if (content.contains(antenna_base(static_cast<int>(i)))) out.row(i) = h.row(i);
    return out;
}

Topology ring_topology(int n_t, int window, int stride) {
    if (n_t < 1) throw InvalidTopology("need at least one antenna");
    if (window < 1 || window > n_t)
        throw InvalidTopology("window size must be between 1 and the antenna count");
    if (stride < 1 || n_t % stride != 0)
        throw InvalidTopology("stride must be positive and divide the antenna count");

    Topology topo;
    topo.n_t = n_t;
    const int count = n_t / stride;
    for (int k = 0; k < count; ++k) {
        std::vector<int> members;
        members.reserve(static_cast<std::size_t>(window));
        for (int r = 0; r < window; ++r) members.push_back((k * stride + r) % n_t);
        for (std::size_t x = 0; x < members.size(); ++x)
            for (std::size_t y = x + 1; y < members.size(); ++y)
                topo.links.insert({std::min(members[x], members[y]),
                                   std::max(members[x], members[y])});
        topo.neighborhoods.emplace_back(neighborhood_place(k), std::move(members));
    }
    return topo;
}

namespace {

// Capacity of the antennas currently sitting in `place`, optionally with one
// of them swapped for another. Shared backend of the registered guard
// functions.
double place_capacity(const Marking& m, const PlaceId& place,
                      const std::map<BaseId, int>& row_of, const Eigen::MatrixXcd& h,
                      const CaseConfig& cfg, const BaseId& drop, const BaseId& add) {
    const ElementSet& content = m.at(place);
    std::set<int> rows;
    for (const auto& [base, row] : row_of)
        if (content.contains(base)) rows.insert(row);
    if (!drop.empty()) {
        auto it = row_of.find(drop);
        if (it != row_of.end()) rows.erase(it->second);
    }
    if (!add.empty()) {
        auto it = row_of.find(add);
        if (it != row_of.end()) rows.insert(it->second);
    }
    Eigen::MatrixXcd sub(static_cast<Eigen::Index>(rows.size()), h.cols());
    Eigen::Index r = 0;
    for (int i : rows) sub.row(r++) = h.row(i);
    return capacity(sub, cfg.rho, cfg.n_ts, cfg.n_r, cfg.p_diag);
}

}  // namespace

Net build_net(const Topology& topo, const Eigen::MatrixXcd& h, const CaseConfig& cfg) {
    if (topo.n_t < 1) throw InvalidTopology("need at least one antenna");
    if (topo.neighborhoods.empty()) throw InvalidTopology("need at least one neighborhood");
    if (h.rows() != topo.n_t)
        throw DimensionMismatch("channel has " + std::to_string(h.rows()) +
                                " rows for " + std::to_string(topo.n_t) + " antennas");
    if (h.cols() != cfg.n_r)
        throw DimensionMismatch("channel has " + std::to_string(h.cols()) +
                                " columns for " + std::to_string(cfg.n_r) + " receivers");
    if (static_cast<int>(topo.initial_on.size()) != cfg.n_ts)
        throw InvalidTopology("initial-on lists " + std::to_string(topo.initial_on.size()) +
                              " antennas for " + std::to_string(cfg.n_ts) + " power tokens");

    const int n_h = static_cast<int>(topo.neighborhoods.size());
    for (const auto& [id, members] : topo.neighborhoods) {
        if (members.empty()) throw InvalidTopology("neighborhood '" + id + "' is empty");
        std::set<int> distinct;
        for (int i : members) {
            if (i < 0 || i >= topo.n_t)
                throw InvalidTopology("neighborhood '" + id + "' lists antenna index " +
                                      std::to_string(i));
            if (!distinct.insert(i).second)
                throw InvalidTopology("neighborhood '" + id + "' repeats antenna index " +
                                      std::to_string(i));
        }
    }

    // Which neighborhoods contain each antenna, in declaration order.
    std::vector<std::vector<int>> containing(static_cast<std::size_t>(topo.n_t));
    for (int k = 0; k < n_h; ++k)
        for (int i : topo.neighborhoods[static_cast<std::size_t>(k)].second)
            containing[static_cast<std::size_t>(i)].push_back(k);

    std::set<int> on;
    for (int i : topo.initial_on) {
        if (i < 0 || i >= topo.n_t)
            throw InvalidTopology("initial-on lists antenna index " + std::to_string(i));
        if (!on.insert(i).second)
            throw InvalidTopology("initial-on repeats antenna index " + std::to_string(i));
        if (containing[static_cast<std::size_t>(i)].empty())
            throw InvalidTopology("antenna " + std::to_string(i) +
                                  " is initially on but belongs to no neighborhood");
    }

    auto home_of = [&](int i) {
        auto it = topo.home.find(i);
        if (it == topo.home.end()) return containing[static_cast<std::size_t>(i)].front();
        int k = it->second;
        const auto& c = containing[static_cast<std::size_t>(i)];
        if (std::find(c.begin(), c.end(), k) == c.end())
            throw InvalidTopology("home neighborhood " + std::to_string(k) +
                                  " does not contain antenna " + std::to_string(i));
        return k;
    };

    Net net;
    net.types = {{"power", cond::unit_kind()},
                 {"nbh", cond::unit_kind()},
                 {"antenna", cond::vec_kind(2 * cfg.n_r)}};
    for (int l = 0; l < cfg.n_ts; ++l) {
        net.bases.push_back({power_base(l), "power"});
        net.values[power_base(l)] = cond::Unit{};
    }
    for (int k = 0; k < n_h; ++k) {
        net.bases.push_back({neighborhood_base(k), "nbh"});
        net.values[neighborhood_base(k)] = cond::Unit{};
    }
    for (int i = 0; i < topo.n_t; ++i) {
        net.bases.push_back({antenna_base(i), "antenna"});
        net.values[antenna_base(i)] = row_to_value(h.row(i));
    }
    for (int i = 0; i < topo.n_t; ++i) net.places.push_back(antenna_place(i));
    for (int k = 0; k < n_h; ++k) net.places.push_back(neighborhood_place(k));
    for (const PlaceId& p : net.places) net.initial_marking.places.try_emplace(p);

    for (int k = 0; k < n_h; ++k)
        net.initial_marking.places[neighborhood_place(k)].bases.insert(neighborhood_base(k));

    // Power tokens land on the initially-on antennas in ascending index order.
    std::vector<int> on_sorted(on.begin(), on.end());
    for (std::size_t l = 0; l < on_sorted.size(); ++l)
        net.initial_marking.places[antenna_place(on_sorted[l])].bases.insert(
            power_base(static_cast<int>(l)));

    for (int i = 0; i < topo.n_t; ++i) {
        if (on.count(i)) {
            int k = home_of(i);
            ElementSet& target = net.initial_marking.places[neighborhood_place(k)];
            target.bases.insert(antenna_base(i));
            target.bonds.insert(Bond(antenna_base(i), neighborhood_base(k)));
        } else {
            net.initial_marking.places[antenna_place(i)].bases.insert(antenna_base(i));
        }
    }

    for (int k = 0; k < n_h; ++k)
        for (int i : topo.neighborhoods[static_cast<std::size_t>(k)].second)
            net.bonds.push_back(Bond(antenna_base(i), neighborhood_base(k)));

    // One swap transition per ordered member pair per neighborhood per power
    // token, so a swap is available no matter which token the antenna holds.
    for (int k = 0; k < n_h; ++k) {
        const auto& members = topo.neighborhoods[static_cast<std::size_t>(k)].second;
        for (int i : members) {
            for (int j : members) {
                if (i == j) continue;
                std::string guard_src = "cap_active(" + neighborhood_place(k) +
                                        ") < cap_replaced(" + neighborhood_place(k) +
                                        ", " + antenna_base(i) + ", " + antenna_base(j) +
                                        ")";
                cond::Expr guard = cond::parse(guard_src);
                for (int l = 0; l < cfg.n_ts; ++l) {
                    Transition t;
                    t.id = "t_" + std::to_string(i + 1) + "_" + std::to_string(j + 1) +
                           "_M" + std::to_string(k + 1) + "_p" + std::to_string(l + 1);
                    t.in[antenna_place(i)] = {base_elem(power_base(l))};
                    t.in[antenna_place(j)] = {base_elem(antenna_base(j))};
                    t.in[neighborhood_place(k)] = {
                        bond_elem(Bond(antenna_base(i), neighborhood_base(k)))};
                    t.out[antenna_place(i)] = {base_elem(antenna_base(i))};
                    t.out[antenna_place(j)] = {base_elem(power_base(l))};
                    t.out[neighborhood_place(k)] = {
                        bond_elem(Bond(antenna_base(j), neighborhood_base(k)))};
                    t.guard = guard;
                    net.transitions.push_back(std::move(t));
                }
            }
        }
    }

    std::map<BaseId, int> row_of;
    for (int i = 0; i < topo.n_t; ++i) row_of[antenna_base(i)] = i;

    cond::HostFunction active;
    active.name = "cap_active";
    active.params = {cond::place_param()};
    active.result = cond::real_kind();
    active.fn = [row_of, h, cfg](const cond::EvalContext& ctx,
                                 const std::vector<cond::Value>& args) -> cond::Value {
        return place_capacity(ctx.marking, std::get<std::string>(args[0]), row_of, h,
                              cfg, BaseId{}, BaseId{});
    };
    net.host_functions[active.name] = active;

    cond::HostFunction replaced;
    replaced.name = "cap_replaced";
    replaced.params = {cond::place_param(), cond::base_param(), cond::base_param()};
    replaced.result = cond::real_kind();
    replaced.fn = [row_of, h, cfg](const cond::EvalContext& ctx,
                                   const std::vector<cond::Value>& args) -> cond::Value {
        return place_capacity(ctx.marking, std::get<std::string>(args[0]), row_of, h,
                              cfg, std::get<std::string>(args[1]),
                              std::get<std::string>(args[2]));
    };
    net.host_functions[replaced.name] = replaced;

    return net;
}

double local_capacity(const Net& net, const Marking& m, const PlaceId& place) {
    auto it = net.host_functions.find("cap_active");
    if (it == net.host_functions.end())
        throw cond::MissingHostFunction("net registers no 'cap_active' function");
    cond::Value v = it->second.fn(cond::EvalContext{net, m}, {cond::Value(place)});
    return std::get<double>(v);
}

std::set<int> selected_antennas(const Net& net, const Marking& m) {
    std::set<BaseId> power;
    for (const Base& b : net.bases)
        if (b.type == "power") power.insert(b.id);
    std::set<int> out;
    for (int i = 0; net.has_place(antenna_place(i)); ++i) {
        const ElementSet& content = m.at(antenna_place(i));
        for (const BaseId& p : power)
            if (content.contains(p)) {
                out.insert(i);
                break;
            }
    }
    return out;
}

double selection_capacity(const Eigen::MatrixXcd& h, const std::set<int>& selected,
                          const CaseConfig& cfg) {
    Eigen::MatrixXcd sub(static_cast<Eigen::Index>(selected.size()), h.cols());
    Eigen::Index r = 0;
    for (int i : selected) {
        if (i < 0 || i >= h.rows())
            throw DimensionMismatch("selected antenna index " + std::to_string(i) +
                                    " outside the channel");
        sub.row(r++) = h.row(i);
    }
    return capacity(sub, cfg.rho, cfg.n_ts, cfg.n_r, cfg.p_diag);
}

SelectionResult greedy_baseline(const Eigen::MatrixXcd& h, const CaseConfig& cfg) {
    const int n_t = static_cast<int>(h.rows());
    if (cfg.n_ts > n_t)
        throw DimensionMismatch("cannot select " + std::to_string(cfg.n_ts) +
                                " antennas out of " + std::to_string(n_t));
    SelectionResult result;
    for (int round = 0; round < cfg.n_ts; ++round) {
        int best_i = -1;
        double best_c = -1.0;
        for (int i = 0; i < n_t; ++i) {
            if (result.selected.count(i)) continue;
            std::set<int> candidate = result.selected;
            candidate.insert(i);
            double c = selection_capacity(h, candidate, cfg);
            if (c > best_c) {
                best_c = c;
                best_i = i;
            }
        }
        result.selected.insert(best_i);
        result.capacity = best_c;
    }
    return result;
}

std::optional<SelectionResult> exhaustive_best(const Eigen::MatrixXcd& h,
                                               const CaseConfig& cfg,
                                               std::uint64_t limit) {
    const int n_t = static_cast<int>(h.rows());
    const int k = cfg.n_ts;
    if (k > n_t)
        throw DimensionMismatch("cannot select " + std::to_string(k) +
                                " antennas out of " + std::to_string(n_t));

    std::uint64_t subsets = 1;
    for (int i = 0; i < k; ++i) {
        subsets = subsets * static_cast<std::uint64_t>(n_t - i) /
                  static_cast<std::uint64_t>(i + 1);
        if (subsets > limit) return std::nullopt;
    }

    std::vector<int> comb(static_cast<std::size_t>(k));
    std::iota(comb.begin(), comb.end(), 0);
    SelectionResult best;
    best.capacity = -1.0;
    while (true) {
        std::set<int> sel(comb.begin(), comb.end());
        double c = selection_capacity(h, sel, cfg);
        if (c > best.capacity) {
            best.capacity = c;
            best.selected = std::move(sel);
        }
        // Next combination in lexicographic order.
        int pos = k - 1;
        while (pos >= 0 && comb[static_cast<std::size_t>(pos)] == n_t - k + pos) --pos;
        if (pos < 0) break;
        ++comb[static_cast<std::size_t>(pos)];
        for (int q = pos + 1; q < k; ++q)
            comb[static_cast<std::size_t>(q)] = comb[static_cast<std::size_t>(q - 1)] + 1;
    }
    return best;
}

}  // namespace rpn::antenna
