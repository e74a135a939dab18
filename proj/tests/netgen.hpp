#pragma once
// Seeded generator of small well-formed nets for property tests.
//
// Discipline: all bonds ever created or placed come from a fixed universe
// drawn up front. A transition moves a token set T; tokens of T that stay
// connected in the universe graph (minus the bonds the transition consumes)
// are always sent to the same out-place, so firing can never split — and
// thereby duplicate — a bonded component. Initial bonds only join co-located
// tokens, and asserted bonds that are not consumed are skipped when the pair
// is already bonded initially (that shape could never fire anyway).

#include "rpn/cond.hpp"
#include "rpn/model.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace netgen {

using namespace rpn;

struct Limits {
    int max_places = 6;
    int max_transitions = 4;
    int max_bases = 8;
};

namespace detail {

// Tiny union-find over base indices.
struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
        for (int i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
    }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    void join(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

}  // namespace detail

inline Net random_net(std::uint64_t seed, Limits lim = {}) {
    std::mt19937_64 rng(seed);
    auto pick = [&](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };
    auto chance = [&](double p) {
        return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
    };

    Net net;
    net.types = {{"tok", cond::unit_kind()}};
    const int n_places = pick(2, lim.max_places);
    const int n_bases = pick(2, lim.max_bases);
    const int n_trans = pick(1, lim.max_transitions);

    std::vector<PlaceId> places;
    for (int p = 0; p < n_places; ++p) {
        places.push_back("P" + std::to_string(p + 1));
        net.places.push_back(places.back());
        net.initial_marking.places.try_emplace(places.back());
    }
    std::vector<BaseId> bases;
    for (int b = 0; b < n_bases; ++b) {
        bases.push_back("b" + std::to_string(b + 1));
        net.bases.push_back({bases.back(), "tok"});
        net.values[bases.back()] = cond::Unit{};
    }
    auto index_of = [&](const BaseId& b) {
        return static_cast<int>(std::find(bases.begin(), bases.end(), b) - bases.begin());
    };

    // Bond universe.
    std::vector<Bond> universe;
    for (int i = 0; i < n_bases; ++i)
        for (int j = i + 1; j < n_bases; ++j)
            if (chance(0.25))
                universe.push_back(Bond(bases[static_cast<std::size_t>(i)],
                                        bases[static_cast<std::size_t>(j)]));
    net.bonds = universe;

    // Initial placement; initial bonds only between co-located tokens.
    std::map<BaseId, PlaceId> at;
    for (const BaseId& b : bases) {
        const PlaceId& p = places[static_cast<std::size_t>(pick(0, n_places - 1))];
        net.initial_marking.places[p].bases.insert(b);
        at[b] = p;
    }
    for (const Bond& bond : universe)
        if (at[bond.first] == at[bond.second] && chance(0.5))
            net.initial_marking.places[at[bond.first]].bonds.insert(bond);

    // Places where each token may plausibly show up: initially at[b], extended
    // below with the out-places of earlier transitions so later transitions
    // can chain off their effects instead of all rooting at the start.
    std::map<BaseId, std::vector<PlaceId>> seen_at;
    for (const BaseId& b : bases) seen_at[b] = {at[b]};

    for (int tn = 0; tn < n_trans; ++tn) {
        Transition t;
        t.id = "t" + std::to_string(tn + 1);

        // Token set T: a couple of seeds, grown through the universe.
        std::set<BaseId> moved;
        const int seeds = pick(1, 2);
        for (int s = 0; s < seeds; ++s)
            moved.insert(bases[static_cast<std::size_t>(pick(0, n_bases - 1))]);
        bool grown = true;
        while (grown && moved.size() < 5) {
            grown = false;
            for (const Bond& bond : universe) {
                bool f = moved.count(bond.first), s = moved.count(bond.second);
                if (f != s && moved.size() < 5 && chance(0.8)) {
                    moved.insert(bond.first);
                    moved.insert(bond.second);
                    grown = true;
                }
            }
        }

        // Consumed bonds: universe bonds inside T, sometimes.
        std::set<Bond> consumed;
        for (const Bond& bond : universe)
            if (moved.count(bond.first) && moved.count(bond.second) && chance(0.5))
                consumed.insert(bond);

        // In-places: biased to the initial location so a fair share of nets
        // can actually move at the start (the first transition always matches
        // it); tokens linked by consumed bonds must share a place so the bond
        // elements can sit there.
        const double home_bias = tn == 0 ? 1.0 : 0.85;
        detail::UnionFind in_groups(n_bases);
        for (const Bond& bond : consumed)
            in_groups.join(index_of(bond.first), index_of(bond.second));
        std::map<int, PlaceId> in_group_place;
        std::map<BaseId, PlaceId> in_place;
        for (const BaseId& b : moved) {
            int g = in_groups.find(index_of(b));
            if (!in_group_place.count(g)) {
                if (tn == 0) {
                    in_group_place[g] = at[b];
                } else if (chance(home_bias)) {
                    const auto& options = seen_at[b];
                    in_group_place[g] =
                        options[static_cast<std::size_t>(pick(0, static_cast<int>(options.size()) - 1))];
                } else {
                    in_group_place[g] = places[static_cast<std::size_t>(pick(0, n_places - 1))];
                }
            }
            in_place[b] = in_group_place[g];
        }

        for (const BaseId& b : moved)
            t.in[in_place[b]].insert(base_elem(b));
        for (const Bond& bond : consumed)
            t.in[in_place[bond.first]].insert(bond_elem(bond));

        // Out-places: tokens connected in universe-minus-consumed must share
        // a destination.
        detail::UnionFind uf(n_bases);
        for (const Bond& bond : universe)
            if (!consumed.count(bond)) uf.join(index_of(bond.first), index_of(bond.second));
        std::map<int, PlaceId> group_place;
        for (const BaseId& b : moved) {
            int g = uf.find(index_of(b));
            if (!group_place.count(g))
                group_place[g] = places[static_cast<std::size_t>(pick(0, n_places - 1))];
            t.out[group_place[g]].insert(base_elem(b));
        }

        // Re-asserted consumed bonds (when both ends land together), and
        // occasional fresh assertions of universe bonds inside one group.
        for (const Bond& bond : consumed) {
            int ga = uf.find(index_of(bond.first));
            int gb = uf.find(index_of(bond.second));
            if (group_place[ga] == group_place[gb] && chance(0.5))
                t.out[group_place[ga]].insert(bond_elem(bond));
        }
        bool bonded_initially_somewhere = false;
        for (const Bond& bond : universe) {
            if (consumed.count(bond)) continue;
            if (!moved.count(bond.first) || !moved.count(bond.second)) continue;
            bonded_initially_somewhere = false;
            for (const auto& [p, content] : net.initial_marking.places)
                if (content.contains(bond)) bonded_initially_somewhere = true;
            if (bonded_initially_somewhere) continue;  // keep the static lint happy
            int g = uf.find(index_of(bond.first));
            if (chance(0.25)) t.out[group_place[g]].insert(bond_elem(bond));
        }

        // Negative elements over tokens the transition does not move.
        const int negatives = pick(0, 2);
        for (int n = 0; n < negatives; ++n) {
            const BaseId& b = bases[static_cast<std::size_t>(pick(0, n_bases - 1))];
            if (moved.count(b)) continue;
            t.in[places[static_cast<std::size_t>(pick(0, n_places - 1))]].insert(
                base_elem(b, true));
        }
        for (const Bond& bond : universe) {
            if (moved.count(bond.first) || moved.count(bond.second)) continue;
            if (chance(0.1))
                t.in[places[static_cast<std::size_t>(pick(0, n_places - 1))]].insert(
                    bond_elem(bond, true));
        }

        // Guards that leave both directions reachable, weighted so enough
        // transitions are live at the start.
        const BaseId& gb = bases[static_cast<std::size_t>(pick(0, n_bases - 1))];
        const PlaceId& gp = places[static_cast<std::size_t>(pick(0, n_places - 1))];
        const int roll = pick(0, 19);
        if (roll < 9)
            t.guard = cond::parse("true");
        else if (roll < 12)
            t.guard = cond::parse("false");
        else if (roll < 16)
            t.guard = cond::parse("in(" + gb + ", " + gp + ")");
        else
            t.guard = cond::parse("not in(" + gb + ", " + gp + ")");

        // Remember where this transition drops each token, for chaining.
        for (const BaseId& b : moved) {
            int g = uf.find(index_of(b));
            auto& options = seen_at[b];
            const PlaceId& landed = group_place[g];
            if (std::find(options.begin(), options.end(), landed) == options.end())
                options.push_back(landed);
        }

        net.transitions.push_back(std::move(t));
    }
    return net;
}

}  // namespace netgen
