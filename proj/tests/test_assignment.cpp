#include "cfmimo/assignment.hpp"
#include "cfmimo/error.hpp"
#include "cfmimo/rate_model.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace cfmimo;

namespace {

Features line(std::initializer_list<double> xs)
{
    Features f;
    for (double x : xs)
        f.push_back({x, 0.0});
    return f;
}

// Enumerates all tau_p^K pilot vectors; calls visit on each.
template <typename F>
void for_each_assignment(int K, int P, F&& visit)
{
    std::vector<int> v(static_cast<std::size_t>(K), 0);
    while (true)
    {
        visit(v);
        int i = K - 1;
        while (i >= 0 && ++v[static_cast<std::size_t>(i)] == P)
            v[static_cast<std::size_t>(i--)] = 0;
        if (i < 0)
            return;
    }
}

double brute_optimal_score(const Eigen::MatrixXd& d, int P)
{
    const int K = static_cast<int>(d.rows());
    double best = -1;
    for_each_assignment(K, P, [&](const std::vector<int>& v) {
        if (is_balanced({v, false}, P))
            best = std::max(best, partition_score(v, d));
    });
    return best;
}

Features random_points(std::mt19937_64& rng, int n)
{
    std::uniform_real_distribution<double> u(0.0, 1000.0);
    Features f;
    for (int i = 0; i < n; ++i)
        f.push_back({u(rng), u(rng)});
    return f;
}

} // namespace

TEST_CASE("Euclidean repulsion")
{
    EuclideanRepulsion f;
    const std::vector<double> a{0, 0};
    const std::vector<double> b{3, 4};
    CHECK(f(a, b) == doctest::Approx(5));
    CHECK(f(b, a) == doctest::Approx(5));
    CHECK(f(a, a) == 0);
    const std::vector<double> c{1, 2, 3};
    CHECK_THROWS_AS(f(a, c), InvalidInput);
}

TEST_CASE("ClusterMatrix enforces the assignment and balance constraints")
{
    Eigen::MatrixXi ok(4, 2);
    ok << 1, 0, 1, 0, 0, 1, 0, 1;
    CHECK_NOTHROW(ClusterMatrix{ok});

    Eigen::MatrixXi double_row = ok;
    double_row(0, 1) = 1;
    CHECK_THROWS_AS(ClusterMatrix{double_row}, InvalidInput);

    Eigen::MatrixXi unbalanced(4, 2);
    unbalanced << 1, 0, 1, 0, 1, 0, 0, 1;
    CHECK_THROWS_AS(ClusterMatrix{unbalanced}, InvalidInput);

    const auto x = ClusterMatrix::from_assignment({{1, 0, 1, 0}, false}, 2);
    CHECK(x.to_assignment().pilots == std::vector<int>{1, 0, 1, 0});
}

TEST_CASE("repulsion_score examples")
{
    const auto pts = line({0, 1, 10, 11});
    EuclideanRepulsion f;
    CHECK(repulsion_score(ClusterMatrix::from_assignment({{0, 0, 1, 1}, false}, 2), pts, f) == doctest::Approx(2));
    CHECK(repulsion_score(ClusterMatrix::from_assignment({{0, 1, 0, 1}, false}, 2), pts, f) == doctest::Approx(20));
    CHECK(repulsion_score(ClusterMatrix::from_assignment({{0, 1, 2, 3}, false}, 4), pts, f) == 0);
    CHECK_THROWS_AS(repulsion_score(ClusterMatrix::from_assignment({{0, 0, 0, 1}, false}, 2), pts, f), InvalidInput);
}

TEST_CASE("repulsion_score is invariant under cluster relabeling")
{
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 50; ++trial)
    {
        const auto pts = random_points(rng, 9);
        const auto d = repulsion_matrix(pts, EuclideanRepulsion{});
        const auto p = random_assignment(9, 3, rng());
        PilotAssignment relabeled = p;
        for (auto& c : relabeled.pilots)
            c = (c + 1) % 3;
        CHECK(repulsion_score(ClusterMatrix::from_assignment(p, 3), d) ==
              doctest::Approx(repulsion_score(ClusterMatrix::from_assignment(relabeled, 3), d)));
    }
}

TEST_CASE("random_assignment is balanced and seeded")
{
    const auto a = random_assignment(4, 2, 9);
    CHECK(pilot_loads(a, 2) == std::vector<int>{2, 2});
    CHECK(random_assignment(4, 2, 9).pilots == a.pilots);

    const auto b = random_assignment(3, 2, 1);
    auto loads = pilot_loads(b, 2);
    std::sort(loads.begin(), loads.end());
    CHECK(loads == std::vector<int>{1, 2});

    for (std::uint64_t s = 0; s < 200; ++s)
        CHECK(is_balanced(random_assignment(37, 10, s), 10));
}

TEST_CASE("repulsive local search from a fixed start")
{
    const auto d = repulsion_matrix(line({0, 1, 10, 11}), EuclideanRepulsion{});
    const auto r = repulsive_local_search(d, {{0, 0, 1, 1}, false}, 2);
    CHECK(r.score == doctest::Approx(20));
    CHECK(r.swaps == 1);
    CHECK(is_balanced(r.assignment, 2));
    CHECK(brute_optimal_score(d, 2) == doctest::Approx(20));
}

TEST_CASE("repulsive heuristic degenerate cases")
{
    SUBCASE("one UE per cluster")
    {
        const auto pts = line({0, 3, 7});
        const auto d = repulsion_matrix(pts, EuclideanRepulsion{});
        const auto r = repulsive_heuristic_detailed(d, 3, 5);
        CHECK(r.score == 0);
        CHECK(r.swaps == 0);
    }
    SUBCASE("identical points")
    {
        const auto pts = line({4, 4, 4, 4, 4, 4});
        const auto d = repulsion_matrix(pts, EuclideanRepulsion{});
        const auto r = repulsive_heuristic_detailed(d, 2, 5);
        CHECK(r.score == 0);
        CHECK(r.sweeps == 1);
        CHECK(is_balanced(r.assignment, 2));
    }
    CHECK_THROWS_AS(repulsive_heuristic(line({0, 1}), 3, EuclideanRepulsion{}, 1), InvalidInput);
}

TEST_CASE("incremental swap gains match full recomputation")
{
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 100; ++trial)
    {
        const int K = std::uniform_int_distribution<int>(4, 25)(rng);
        const int P = std::uniform_int_distribution<int>(2, std::min(K, 6))(rng);
        const auto d = repulsion_matrix(random_points(rng, K), EuclideanRepulsion{});
        const auto start = random_assignment(K, P, rng());
        double previous = partition_score(start.pilots, d);
        int events = 0;
        const auto r = repulsive_local_search(d, start, P, [&](const SwapEvent& e) {
            const double now = partition_score(e.pilots, d);
            CHECK(now - previous == doctest::Approx(e.gain).epsilon(1e-9).scale(std::max(1.0, now)));
            CHECK(e.gain > 0.0);
            previous = now;
            ++events;
        });
        CHECK(events == r.swaps);
        CHECK(r.score == doctest::Approx(previous));
        CHECK(pilot_loads(r.assignment, P) == pilot_loads(start, P));
    }
}

TEST_CASE("heuristic output is 1-swap locally optimal")
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial)
    {
        const int K = std::uniform_int_distribution<int>(2, 20)(rng);
        const int P = std::uniform_int_distribution<int>(1, K)(rng);
        const auto d = repulsion_matrix(random_points(rng, K), EuclideanRepulsion{});
        const auto r = repulsive_heuristic_detailed(d, P, rng());
        CHECK(is_balanced(r.assignment, P));
        auto v = r.assignment.pilots;
        for (int u = 0; u < K; ++u)
            for (int w = u + 1; w < K; ++w)
            {
                if (v[u] == v[w])
                    continue;
                std::swap(v[u], v[w]);
                CHECK(partition_score(v, d) <= r.score + 1e-9);
                std::swap(v[u], v[w]);
            }
    }
}

TEST_CASE("optimal_repulsive agrees with full enumeration")
{
    const auto d4 = repulsion_matrix(line({0, 1, 10, 11}), EuclideanRepulsion{});
    CHECK(partition_score(optimal_repulsive(d4, 2).pilots, d4) == doctest::Approx(20));
    CHECK(partition_score(optimal_repulsive(d4, 4).pilots, d4) == 0);

    // Six equally spaced points into three pairs: optimum pairs {0,3},{1,4},{2,5} = 9.
    const auto d6 = repulsion_matrix(line({0, 1, 2, 3, 4, 5}), EuclideanRepulsion{});
    const auto best6 = optimal_repulsive(d6, 3);
    CHECK(partition_score(best6.pilots, d6) == doctest::Approx(brute_optimal_score(d6, 3)));
    CHECK(partition_score(best6.pilots, d6) == doctest::Approx(9));

    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 40; ++trial)
    {
        const int K = std::uniform_int_distribution<int>(2, 8)(rng);
        const int P = std::uniform_int_distribution<int>(1, std::min(K, 4))(rng);
        const auto d = repulsion_matrix(random_points(rng, K), EuclideanRepulsion{});
        const auto best = optimal_repulsive(d, P);
        CHECK(is_balanced(best, P));
        CHECK(partition_score(best.pilots, d) == doctest::Approx(brute_optimal_score(d, P)).epsilon(1e-12));
    }

    CHECK_THROWS_AS(optimal_repulsive(random_points(rng, 13), 3, EuclideanRepulsion{}), BudgetExceeded);
}

TEST_CASE("heuristic is near-optimal on small 2-D instances")
{
    std::mt19937_64 rng(2024);
    int equal = 0;
    for (int trial = 0; trial < 100; ++trial)
    {
        const auto d = repulsion_matrix(random_points(rng, 8), EuclideanRepulsion{});
        const double h = repulsive_heuristic_detailed(d, 2, rng()).score;
        const double opt = partition_score(optimal_repulsive(d, 2).pilots, d);
        CHECK(h <= opt + 1e-9);
        equal += h >= opt * (1 - 1e-9) ? 1 : 0;
    }
    CHECK(equal >= 90);
}

namespace {

SimConfig small_config(int M, int K, int P, std::uint64_t seed)
{
    SimConfig cfg;
    cfg.num_aps = M;
    cfg.num_ues = K;
    cfg.num_pilots = P;
    cfg.seed = seed;
    return cfg;
}

double full_power_sum_rate(const NetworkRealization& net, const SimConfig& cfg, const PilotAssignment& p)
{
    const auto q = estimation_quality(net.beta, p, cfg.num_pilots, pilot_snr(cfg));
    return sum_rate(net.beta, q.gamma, p, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(p.size())),
                    uplink_snr(cfg));
}

} // namespace

TEST_CASE("exhaustive search matches a brute-force scan over every pilot vector")
{
    for (std::uint64_t seed = 0; seed < 25; ++seed)
    {
        const int K = 2 + static_cast<int>(seed % 5);
        const int P = 2 + static_cast<int>(seed % 2);
        const auto cfg = small_config(10, K, P, seed);
        const auto net = generate_realization(cfg, 0);

        double best = -std::numeric_limits<double>::infinity();
        std::vector<int> best_vec;
        for_each_assignment(K, P, [&](const std::vector<int>& v) {
            const double r = full_power_sum_rate(net, cfg, {v, false});
            if (r > best * (1 + 1e-12))
            {
                best = r;
                best_vec = v;
            }
        });
        const auto got = exhaustive_sum_rate(net, cfg);
        CHECK(full_power_sum_rate(net, cfg, got) == doctest::Approx(best).epsilon(1e-10));
        CHECK(got.pilots == best_vec);
    }
}

TEST_CASE("exhaustive search edge cases and guard")
{
    const auto one = small_config(5, 1, 3, 1);
    const auto net1 = generate_realization(one, 0);
    const auto p1 = exhaustive_sum_rate(net1, one);
    CHECK(full_power_sum_rate(net1, one, p1) ==
          doctest::Approx(full_power_sum_rate(net1, one, oracle_assignment(1))));

    const auto two = small_config(6, 2, 2, 4);
    CHECK(exhaustive_sum_rate(generate_realization(two, 0), two).pilots == std::vector<int>{0, 1});

    const auto big = small_config(5, 14, 3, 1); // 3^14 > 2e6
    CHECK_THROWS_AS(exhaustive_sum_rate(generate_realization(big, 0), big), BudgetExceeded);

    const auto heur = small_config(20, 8, 2, 9);
    const auto net = generate_realization(heur, 0);
    const auto rep = repulsive_heuristic(position_features(net.ue_positions), 2, EuclideanRepulsion{}, 3);
    CHECK(full_power_sum_rate(net, heur, exhaustive_sum_rate(net, heur)) >= full_power_sum_rate(net, heur, rep));
}

TEST_CASE("greedy assignment")
{
    const auto cfg = small_config(30, 12, 4, 5);
    const auto net = generate_realization(cfg, 0);
    CHECK(greedy_assignment(net, cfg, 77, 0).pilots == random_assignment(12, 4, 77).pilots);

    // Fewer UEs than pilots: the worst UE always has an empty pilot available.
    const auto sparse = small_config(20, 3, 4, 6);
    const auto snet = generate_realization(sparse, 0);
    const auto g = greedy_assignment(snet, sparse, 1, 6);
    auto sorted = g.pilots;
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
}

TEST_CASE("greedy only moves the worst UE each round")
{
    const auto cfg = small_config(40, 16, 4, 31);
    const auto net = generate_realization(cfg, 0);
    const auto start = greedy_assignment(net, cfg, 5, 0);
    const auto one = greedy_assignment(net, cfg, 5, 1);

    const auto q = estimation_quality(net.beta, start, cfg.num_pilots, pilot_snr(cfg));
    Eigen::Index worst = 0;
    uplink_sinr(net.beta, q.gamma, start, Eigen::VectorXd::Ones(16), uplink_snr(cfg)).minCoeff(&worst);
    for (int k = 0; k < 16; ++k)
        if (k != worst)
            CHECK(one.pilots[k] == start.pilots[k]);

    // The destination pilot carries the least total gain once the worst UE is removed.
    std::vector<double> load(4, 0.0);
    for (int k = 0; k < 16; ++k)
        if (k != worst)
            load[start.pilots[k]] += net.beta.col(k).sum();
    CHECK(one.pilots[worst] == std::min_element(load.begin(), load.end()) - load.begin());
}

TEST_CASE("oracle assignment and strategy registry")
{
    const auto o = oracle_assignment(5);
    CHECK(o.oracle);
    CHECK(o.size() == 5);
    for (auto s : all_strategies())
        CHECK(parse_strategy(strategy_name(s)) == s);
    CHECK(strategy_name(Strategy::OptimalRepulsive) == "optimal-repulsive");
    CHECK_FALSE(parse_strategy("tabu").has_value());
}
