#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "test_support.hpp"
#include "uqp/atoms.hpp"

using namespace uqp;
using namespace uqp::atoms;
using test::expect_error;

namespace {

AtomGrid random_grid(std::mt19937_64& g, std::uint32_t rows, std::uint32_t cols, double fill) {
    AtomGrid grid(rows, cols);
    std::bernoulli_distribution b(fill);
    for (std::uint32_t r = 0; r < rows; ++r)
        for (std::uint32_t c = 0; c < cols; ++c) grid.set({r, c}, b(g));
    return grid;
}

// Exhaustive optimum over every way of sending distinct atoms (including
// those already in place) to the target sites: DP over subsets of atoms.
std::uint64_t brute_force_cost(const AtomGrid& grid, const TargetPattern& target) {
    auto atoms = grid.occupied_sites();
    const auto n = atoms.size();
    const auto k = target.sites.size();
    constexpr auto inf = std::numeric_limits<std::uint64_t>::max();
    std::vector<std::uint64_t> dp(std::size_t{1} << n, inf);
    dp[0] = 0;
    std::uint64_t best = inf;
    for (std::size_t mask = 0; mask < dp.size(); ++mask) {
        if (dp[mask] == inf) continue;
        const auto filled = static_cast<std::size_t>(std::popcount(mask));
        if (filled == k) {
            best = std::min(best, dp[mask]);
            continue;
        }
        for (std::size_t a = 0; a < n; ++a) {
            if (mask >> a & 1u) continue;
            auto next = mask | std::size_t{1} << a;
            dp[next] = std::min(dp[next], dp[mask] + manhattan(atoms[a], target.sites[filled]));
        }
    }
    return best;
}

std::size_t holes(const AtomGrid& grid, const TargetPattern& t) {
    return static_cast<std::size_t>(std::count_if(t.sites.begin(), t.sites.end(), [&](Site s) { return !grid.occupied(s); }));
}

}  // namespace

TEST_SUITE("atom_pipeline") {
    TEST_CASE("synthetic image geometry and closure") {
        AtomGrid grid(3, 4);
        grid.set({0, 0}, true);
        grid.set({2, 3}, true);
        auto img = synth_image(grid, 5000, 100, 1);
        CHECK(img.width == 4 * kPixelsPerCell);
        CHECK(img.height == 3 * kPixelsPerCell);
        CHECK(img.pixels.size() == 20u * 15u);
        CHECK(detect(img, 3, 4, cell_signal(5000) / 2) == grid);

        auto clean = synth_image(grid, 5000, 0, 1);
        double sum = 0;
        for (std::uint32_t y = 0; y < 5; ++y)
            for (std::uint32_t x = 0; x < 5; ++x) sum += clean.at(x, y);
        CHECK(sum == doctest::Approx(cell_signal(5000)).epsilon(0.01));
        CHECK(clean.at(2, 2) == 5000);
        CHECK(clean.at(7, 2) == 0);
    }

    TEST_CASE("closure over random grids") {
        std::mt19937_64 g(1);
        for (int i = 0; i < 100; ++i) {
            auto rows = static_cast<std::uint32_t>(1 + g() % 12);
            auto cols = static_cast<std::uint32_t>(1 + g() % 12);
            auto grid = random_grid(g, rows, cols, 0.5);
            auto img = synth_image(grid, 5000, 100, g());
            REQUIRE(detect(img, rows, cols, cell_signal(5000) / 2) == grid);
        }
    }

    TEST_CASE("per-site detection accuracy at brightness 5000, noise 100") {
        std::mt19937_64 g(2);
        std::size_t sites = 0;
        std::size_t correct = 0;
        for (int trial = 0; trial < 1000; ++trial) {
            auto grid = random_grid(g, 8, 8, 0.5);
            auto found = detect(synth_image(grid, 5000, 100, g()), 8, 8, cell_signal(5000) / 2);
            for (std::uint32_t r = 0; r < 8; ++r)
                for (std::uint32_t c = 0; c < 8; ++c) correct += found.occupied({r, c}) == grid.occupied({r, c});
            sites += 64;
        }
        CHECK(static_cast<double>(correct) / static_cast<double>(sites) >= 0.999);
    }

    TEST_CASE("a threshold above every cell reports an empty grid") {
        std::mt19937_64 g(3);
        auto grid = random_grid(g, 5, 5, 0.8);
        auto img = synth_image(grid, 5000, 100, 4);
        auto found = detect(img, 5, 5, 65535.0 * 25);
        CHECK(found.count() == 0);
    }

    TEST_CASE("invalid imaging parameters") {
        AtomGrid grid(2, 2);
        expect_error(ErrorCode::ConfigError, [&] { synth_image(grid, 300, 100, 0); });
        auto img = synth_image(grid, 5000, 100, 0);
        expect_error(ErrorCode::GeometryMismatch, [&] { detect(img, 3, 2, 1.0); });
        expect_error(ErrorCode::GeometryMismatch, [&] { detect(img, 0, 2, 1.0); });
        expect_error(ErrorCode::GeometryMismatch, [&] { detect(img, 2, 1, 1.0); });
    }

    TEST_CASE("a single hole is filled from the nearest surplus atom") {
        AtomGrid grid(2, 2);
        grid.set({0, 0}, true);
        grid.set({1, 1}, true);
        TargetPattern t{{{0, 0}, {0, 1}}};
        auto plan = plan_sort(grid, t);
        REQUIRE(plan.moves.size() == 1);
        CHECK(plan.moves[0] == MoveCommand{{1, 1}, {0, 1}});
        CHECK(plan.cost() == 1);
        apply_plan(grid, plan);
        CHECK(satisfies(grid, t));
    }

    TEST_CASE("already satisfied targets need no moves") {
        AtomGrid grid(3, 3);
        grid.set({0, 0}, true);
        grid.set({0, 1}, true);
        grid.set({2, 2}, true);
        auto plan = plan_sort(grid, TargetPattern{{{0, 0}, {0, 1}}});
        CHECK(plan.moves.empty());
        CHECK(plan.cost() == 0);
    }

    TEST_CASE("too few atoms") {
        AtomGrid grid(3, 3);
        grid.set({1, 1}, true);
        expect_error(ErrorCode::InsufficientAtoms, [&] { plan_sort(grid, TargetPattern::dense_rectangle(3, 3, 2)); });
        expect_error(ErrorCode::GeometryMismatch, [&] { plan_sort(grid, TargetPattern{{{5, 5}}}); });
    }

    TEST_CASE("plans are valid and reach the target on random 8x8 grids") {
        std::mt19937_64 g(4);
        for (int i = 0; i < 200; ++i) {
            auto grid = random_grid(g, 8, 8, 0.6);
            auto t = TargetPattern::dense_rectangle(8, 8, grid.count() / 2);
            auto plan = plan_sort(grid, t);
            CHECK(plan.moves.size() == holes(grid, t));
            auto after = grid;
            REQUIRE_NOTHROW(apply_plan(after, plan));
            CHECK(satisfies(after, t));
            CHECK(after.count() == grid.count());
        }
    }

    TEST_CASE("plan cost equals the exhaustive optimum on small grids") {
        std::mt19937_64 g(5);
        int checked = 0;
        for (int i = 0; i < 300; ++i) {
            auto rows = static_cast<std::uint32_t>(2 + g() % 3);
            auto cols = static_cast<std::uint32_t>(2 + g() % 3);
            auto grid = random_grid(g, rows, cols, 0.3 + 0.5 * static_cast<double>(g() % 100) / 100.0);
            if (grid.count() == 0) continue;
            auto count = 1 + g() % grid.count();
            TargetPattern t;
            if (g() % 2) {
                t = TargetPattern::dense_rectangle(rows, cols, count);
            } else {
                std::vector<Site> all;
                for (std::uint32_t r = 0; r < rows; ++r)
                    for (std::uint32_t c = 0; c < cols; ++c) all.push_back({r, c});
                std::shuffle(all.begin(), all.end(), g);
                all.resize(count);
                std::sort(all.begin(), all.end());
                t.sites = all;
            }
            auto plan = plan_sort(grid, t);
            REQUIRE(plan.cost() == brute_force_cost(grid, t));
            ++checked;
        }
        CHECK(checked > 250);
    }

    TEST_CASE("more free atoms never raise the plan cost") {
        std::mt19937_64 g(6);
        for (int i = 0; i < 100; ++i) {
            auto grid = random_grid(g, 6, 6, 0.5);
            auto t = TargetPattern::dense_rectangle(6, 6, std::min<std::size_t>(grid.count(), 9));
            auto before = plan_sort(grid, t).cost();
            auto denser = grid;
            denser.set({static_cast<std::uint32_t>(g() % 6), static_cast<std::uint32_t>(g() % 6)}, true);
            CHECK(plan_sort(denser, t).cost() <= before);
        }
    }

    TEST_CASE("Hungarian assignment matches exhaustive permutations") {
        std::mt19937_64 g(7);
        for (int i = 0; i < 300; ++i) {
            auto n = 1 + g() % 5;
            auto m = n + g() % 3;
            std::vector<std::vector<std::int64_t>> cost(n, std::vector<std::int64_t>(m));
            for (auto& row : cost)
                for (auto& c : row) c = static_cast<std::int64_t>(g() % 20);
            auto a = min_cost_assignment(cost);
            std::int64_t got = 0;
            for (std::size_t r = 0; r < n; ++r) got += cost[r][a[r]];
            std::vector<std::size_t> cols(m);
            std::iota(cols.begin(), cols.end(), 0);
            std::int64_t best = std::numeric_limits<std::int64_t>::max();
            do {
                std::int64_t s = 0;
                for (std::size_t r = 0; r < n; ++r) s += cost[r][cols[r]];
                best = std::min(best, s);
            } while (std::next_permutation(cols.begin(), cols.end()));
            REQUIRE(got == best);
            std::sort(a.begin(), a.end());
            CHECK(std::adjacent_find(a.begin(), a.end()) == a.end());
        }
    }

    TEST_CASE("AWG records") {
        SortPlan plan{{MoveCommand{{3, 0}, {0, 2}}}};
        auto recs = emit_moves(plan);
        REQUIRE(recs.size() == 1);
        CHECK(recs[0].pickup == Site{3, 0});
        CHECK(recs[0].drop == Site{0, 2});
        CHECK(recs[0].x.start_mhz == 75.0);
        CHECK(recs[0].x.stop_mhz == 77.0);
        CHECK(recs[0].y.start_mhz == 78.0);
        CHECK(recs[0].y.stop_mhz == 75.0);
        CHECK(recs[0].duration_us == 250.0);
        auto line = nlohmann::json::parse(to_json_lines(recs));
        CHECK(line["pickup"] == nlohmann::json::array({3, 0}));
        CHECK(line["duration_us"] == 250.0);
    }

    TEST_CASE("target patterns") {
        auto t = TargetPattern::dense_rectangle(8, 8, 10);
        REQUIRE(t.sites.size() == 10);
        CHECK(t.sites.front() == Site{0, 0});
        CHECK(t.sites[4] == Site{1, 0});
        CHECK(t.sites.back() == Site{2, 1});
        CHECK(TargetPattern::dense_rectangle(1, 8, 8).sites.back() == Site{0, 7});
        expect_error(ErrorCode::GeometryMismatch, [] { TargetPattern::dense_rectangle(2, 2, 5); });

        std::uint32_t rows = 0, cols = 0;
        auto p = TargetPattern::parse("#..\n.#.\n", rows, cols);
        CHECK(rows == 2);
        CHECK(cols == 3);
        CHECK(p.sites == std::vector<Site>{{0, 0}, {1, 1}});
        expect_error(ErrorCode::ConfigError, [&] { TargetPattern::parse("#.\n#\n", rows, cols); });
        expect_error(ErrorCode::ConfigError, [&] { TargetPattern::parse("#x\n", rows, cols); });
    }

    TEST_CASE("PGM export") {
        AtomGrid grid(1, 1);
        grid.set({0, 0}, true);
        auto img = synth_image(grid, 5000, 0, 0);
        auto pgm = to_pgm(img);
        const std::string header = "P5\n5 5\n65535\n";
        REQUIRE(pgm.size() == header.size() + 50);
        CHECK(pgm.compare(0, header.size(), header) == 0);
        auto hi = static_cast<unsigned char>(pgm[header.size() + 24]);
        auto lo = static_cast<unsigned char>(pgm[header.size() + 25]);
        CHECK((hi << 8 | lo) == img.at(2, 2));
    }
}
