#include "cfmimo/assignment.hpp"

#include "cfmimo/error.hpp"
#include "cfmimo/power_control.hpp"
#include "cfmimo/rate_model.hpp"
#include "cfmimo/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace cfmimo {

Features position_features(const std::vector<Point2>& positions)
{
    Features f;
    f.reserve(positions.size());
    for (const auto& pt : positions)
        f.push_back({pt.x, pt.y});
    return f;
}

double EuclideanRepulsion::operator()(std::span<const double> a, std::span<const double> b) const
{
    if (a.size() != b.size())
        throw InvalidInput("EuclideanRepulsion: feature vectors differ in length");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(acc);
}

Eigen::MatrixXd repulsion_matrix(const Features& features, const RepulsionFunction& f)
{
    const auto n = static_cast<Eigen::Index>(features.size());
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        for (Eigen::Index j = i + 1; j < n; ++j)
        {
            const double v = f(features[static_cast<std::size_t>(i)], features[static_cast<std::size_t>(j)]);
            if (!(v >= 0.0))
                throw InvalidInput("repulsion function returned a negative or NaN score");
            d(i, j) = v;
            d(j, i) = v;
        }
    }
    return d;
}

// ---------------------------------------------------------------------------
// Cluster matrix

ClusterMatrix::ClusterMatrix(Eigen::MatrixXi x) : x_(std::move(x))
{
    const Eigen::Index K = x_.rows();
    const Eigen::Index P = x_.cols();
    if (K < 1 || P < 1)
        throw InvalidInput("ClusterMatrix: empty matrix");
    if ((x_.array() != 0 && x_.array() != 1).any())
        throw InvalidInput("ClusterMatrix: entries must be 0 or 1");
    for (Eigen::Index k = 0; k < K; ++k)
    {
        if (x_.row(k).sum() != 1)
            throw InvalidInput("ClusterMatrix: UE " + std::to_string(k) + " is not in exactly one cluster");
    }
    const auto lo = static_cast<int>(K / P);
    for (Eigen::Index c = 0; c < P; ++c)
    {
        const int size = x_.col(c).sum();
        if (size < lo || size > lo + 1)
        {
            throw InvalidInput("ClusterMatrix: cluster " + std::to_string(c) + " has " + std::to_string(size) +
                               " members, outside [" + std::to_string(lo) + ", " + std::to_string(lo + 1) + "]");
        }
    }
}

ClusterMatrix ClusterMatrix::from_assignment(const PilotAssignment& p, int num_clusters)
{
    if (num_clusters < 1)
        throw InvalidInput("ClusterMatrix: need at least one cluster");
    pilot_loads(p, num_clusters);
    Eigen::MatrixXi x = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(p.size()), num_clusters);
    for (std::size_t k = 0; k < p.size(); ++k)
        x(static_cast<Eigen::Index>(k), p.pilots[k]) = 1;
    return ClusterMatrix(std::move(x));
}

PilotAssignment ClusterMatrix::to_assignment() const
{
    PilotAssignment p;
    p.pilots.resize(static_cast<std::size_t>(x_.rows()));
    for (Eigen::Index k = 0; k < x_.rows(); ++k)
    {
        Eigen::Index c = 0;
        x_.row(k).maxCoeff(&c);
        p.pilots[static_cast<std::size_t>(k)] = static_cast<int>(c);
    }
    return p;
}

bool is_balanced(const PilotAssignment& p, int num_pilots)
{
    if (num_pilots < 1 || p.oracle)
        return false;
    for (int pilot : p.pilots)
        if (pilot < 0 || pilot >= num_pilots)
            return false;
    const auto loads = pilot_loads(p, num_pilots);
    const int lo = static_cast<int>(p.size()) / num_pilots;
    return std::all_of(loads.begin(), loads.end(), [lo](int n) { return n == lo || n == lo + 1; });
}

double repulsion_score(const ClusterMatrix& x, const Eigen::MatrixXd& pairwise)
{
    if (pairwise.rows() != x.num_ues() || pairwise.cols() != x.num_ues())
        throw InvalidInput("repulsion_score: pairwise matrix does not match the cluster matrix");
    const auto p = x.to_assignment();
    return partition_score(p.pilots, pairwise);
}

double repulsion_score(const ClusterMatrix& x, const Features& features, const RepulsionFunction& f)
{
    return repulsion_score(x, repulsion_matrix(features, f));
}

double partition_score(std::span<const int> pilots, const Eigen::MatrixXd& pairwise)
{
    double total = 0.0;
    const std::size_t K = pilots.size();
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t j = k + 1; j < K; ++j)
            if (pilots[k] == pilots[j])
                total += pairwise(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
    return total;
}

// ---------------------------------------------------------------------------
// Random and greedy

PilotAssignment random_assignment(int num_ues, int num_pilots, std::uint64_t seed)
{
    if (num_ues < 1 || num_pilots < 1)
        throw InvalidInput("random_assignment: need K >= 1 and tau_p >= 1");
    std::vector<int> order(static_cast<std::size_t>(num_ues));
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    PilotAssignment p;
    p.pilots.resize(order.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        p.pilots[static_cast<std::size_t>(order[i])] = static_cast<int>(i % static_cast<std::size_t>(num_pilots));
    return p;
}

int default_greedy_iterations(int num_ues)
{
    return 2 * num_ues;
}

PilotAssignment greedy_assignment(const NetworkRealization& net, const SimConfig& cfg, std::uint64_t seed,
                                  int iterations)
{
    const int K = static_cast<int>(net.num_ues());
    PilotAssignment p = random_assignment(K, cfg.num_pilots, seed);
    if (iterations <= 0)
        return p;

    const double rho_p = pilot_snr(cfg);
    const double rho_u = uplink_snr(cfg);
    const Eigen::VectorXd eta = full_power(K);
    const Eigen::VectorXd gain = net.beta.colwise().sum().transpose();

    for (int it = 0; it < iterations; ++it)
    {
        const auto est = estimation_quality(net.beta, p, cfg.num_pilots, rho_p);
        const Eigen::VectorXd sinr = uplink_sinr(net.beta, est.gamma, p, eta, rho_u);
        Eigen::Index worst = 0;
        sinr.minCoeff(&worst);

        std::vector<double> load(static_cast<std::size_t>(cfg.num_pilots), 0.0);
        for (int k = 0; k < K; ++k)
            if (k != worst)
                load[static_cast<std::size_t>(p.pilots[static_cast<std::size_t>(k)])] += gain(k);
        const auto best = std::min_element(load.begin(), load.end());
        p.pilots[static_cast<std::size_t>(worst)] = static_cast<int>(best - load.begin());
    }
    return p;
}

// ---------------------------------------------------------------------------
// Repulsive clustering

LocalSearchResult repulsive_local_search(const Eigen::MatrixXd& pairwise, const PilotAssignment& initial,
                                         int num_pilots, const std::function<void(const SwapEvent&)>& on_swap)
{
    const auto K = static_cast<Eigen::Index>(initial.size());
    if (pairwise.rows() != K || pairwise.cols() != K)
        throw InvalidInput("repulsive_local_search: pairwise matrix does not match the assignment");
    pilot_loads(initial, num_pilots);

    LocalSearchResult r;
    r.assignment = initial;
    r.assignment.oracle = false;
    auto& cluster = r.assignment.pilots;

    // affinity(u, c): sum of f_r between u and the current members of c.
    Eigen::MatrixXd affinity = Eigen::MatrixXd::Zero(K, num_pilots);
    for (Eigen::Index u = 0; u < K; ++u)
        for (Eigen::Index x = 0; x < K; ++x)
            affinity(u, cluster[static_cast<std::size_t>(x)]) += pairwise(u, x);

    const auto move = [&](Eigen::Index u, int from, int to) {
        for (Eigen::Index x = 0; x < K; ++x)
        {
            affinity(x, from) -= pairwise(x, u);
            affinity(x, to) += pairwise(x, u);
        }
        cluster[static_cast<std::size_t>(u)] = to;
    };

    bool improved = true;
    while (improved)
    {
        improved = false;
        ++r.sweeps;
        for (int a = 0; a < num_pilots; ++a)
        {
            for (int b = a + 1; b < num_pilots; ++b)
            {
                for (Eigen::Index u = 0; u < K; ++u)
                {
                    for (Eigen::Index w = 0; w < K && cluster[static_cast<std::size_t>(u)] == a; ++w)
                    {
                        if (cluster[static_cast<std::size_t>(w)] != b)
                            continue;
                        const double gain = (affinity(w, a) - pairwise(w, u)) - affinity(u, a) +
                                            (affinity(u, b) - pairwise(u, w)) - affinity(w, b);
                        if (gain > kSwapTolerance)
                        {
                            move(u, a, b);
                            move(w, b, a);
                            ++r.swaps;
                            improved = true;
                            if (on_swap)
                                on_swap({static_cast<int>(u), static_cast<int>(w), gain, cluster});
                        }
                    }
                }
            }
        }
    }
    r.score = partition_score(cluster, pairwise);
    return r;
}

LocalSearchResult repulsive_heuristic_detailed(const Eigen::MatrixXd& pairwise, int num_pilots, std::uint64_t seed)
{
    const auto K = static_cast<int>(pairwise.rows());
    if (K < num_pilots)
        throw InvalidInput("repulsive_heuristic: need at least as many UEs as pilots");
    return repulsive_local_search(pairwise, random_assignment(K, num_pilots, seed), num_pilots);
}

PilotAssignment repulsive_heuristic(const Features& features, int num_pilots, const RepulsionFunction& f,
                                    std::uint64_t seed)
{
    return repulsive_heuristic_detailed(repulsion_matrix(features, f), num_pilots, seed).assignment;
}

namespace {

/// Depth-first enumeration of balanced partitions in canonical (first-use) label order.
class BalancedPartitionSearch
{
  public:
    BalancedPartitionSearch(const Eigen::MatrixXd& pairwise, int num_clusters)
        : d_(pairwise), K_(static_cast<int>(pairwise.rows())), P_(num_clusters), lo_(K_ / num_clusters),
          big_quota_(K_ - num_clusters * (K_ / num_clusters)), labels_(static_cast<std::size_t>(K_), -1),
          sizes_(static_cast<std::size_t>(num_clusters), 0)
    {
    }

    PilotAssignment run()
    {
        visit(0, 0, 0.0);
        PilotAssignment p;
        p.pilots = best_;
        return p;
    }

  private:
    void visit(int k, int used, double score)
    {
        if (k == K_)
        {
            if (used != P_ && lo_ > 0)
                return;
            if (best_.empty() || score > best_score_)
            {
                best_score_ = score;
                best_ = labels_;
            }
            return;
        }
        // Remaining UEs must fill every cluster up to lo.
        int deficit = 0;
        for (int c = 0; c < P_; ++c)
            deficit += std::max(0, lo_ - sizes_[static_cast<std::size_t>(c)]);
        if (deficit > K_ - k)
            return;

        const int limit = std::min(used + 1, P_);
        for (int c = 0; c < limit; ++c)
        {
            auto& size = sizes_[static_cast<std::size_t>(c)];
            if (size == lo_ + 1 || (size == lo_ && big_used_ == big_quota_))
                continue;
            double add = 0.0;
            for (int j = 0; j < k; ++j)
                if (labels_[static_cast<std::size_t>(j)] == c)
                    add += d_(k, j);
            const bool becomes_big = size == lo_;
            labels_[static_cast<std::size_t>(k)] = c;
            ++size;
            big_used_ += becomes_big ? 1 : 0;
            visit(k + 1, std::max(used, c + 1), score + add);
            big_used_ -= becomes_big ? 1 : 0;
            --size;
            labels_[static_cast<std::size_t>(k)] = -1;
        }
    }

    const Eigen::MatrixXd& d_;
    int K_;
    int P_;
    int lo_;
    int big_quota_;
    int big_used_ = 0;
    std::vector<int> labels_;
    std::vector<int> sizes_;
    std::vector<int> best_;
    double best_score_ = -std::numeric_limits<double>::infinity();
};

} // namespace

PilotAssignment optimal_repulsive(const Eigen::MatrixXd& pairwise, int num_pilots)
{
    const auto K = pairwise.rows();
    if (K < 1 || num_pilots < 1 || pairwise.cols() != K)
        throw InvalidInput("optimal_repulsive: need a square pairwise matrix and tau_p >= 1");
    if (K > kOptimalRepulsiveMaxUes)
    {
        throw BudgetExceeded("optimal-repulsive K <= 12", "optimal_repulsive: K = " + std::to_string(K) +
                                                              " exceeds the enumeration guard K <= 12");
    }
    return BalancedPartitionSearch(pairwise, num_pilots).run();
}

PilotAssignment optimal_repulsive(const Features& features, int num_pilots, const RepulsionFunction& f)
{
    if (static_cast<int>(features.size()) > kOptimalRepulsiveMaxUes)
    {
        throw BudgetExceeded("optimal-repulsive K <= 12", "optimal_repulsive: K = " +
                                                              std::to_string(features.size()) +
                                                              " exceeds the enumeration guard K <= 12");
    }
    return optimal_repulsive(repulsion_matrix(features, f), num_pilots);
}

// ---------------------------------------------------------------------------
// Exhaustive sum-rate search

namespace {

/**
 * At full power a UE's SINR depends only on the set of UEs sharing its
 * pilot (the leakage term uses every UE at eta = 1 regardless of pilots),
 * so the sum rate decomposes into per-group contributions that are cached
 * by bitmask.
 */
class GroupRateCache
{
  public:
    GroupRateCache(const Eigen::MatrixXd& beta, double energy, double rho_u)
        : beta_(beta), energy_(energy), rho_u_(rho_u), total_gain_(beta.rowwise().sum()),
          cache_(std::size_t{1} << beta.cols(), std::numeric_limits<double>::quiet_NaN())
    {
    }

    double operator()(std::uint32_t mask)
    {
        double& slot = cache_[mask];
        if (std::isnan(slot))
            slot = evaluate(mask);
        return slot;
    }

  private:
    double evaluate(std::uint32_t mask) const
    {
        if (mask == 0)
            return 0.0;
        const Eigen::Index M = beta_.rows();
        std::vector<Eigen::Index> members;
        Eigen::VectorXd pilot_power = Eigen::VectorXd::Zero(M);
        for (Eigen::Index k = 0; k < beta_.cols(); ++k)
        {
            if (mask & (1u << k))
            {
                members.push_back(k);
                pilot_power += beta_.col(k);
            }
        }
        const Eigen::ArrayXd denom = energy_ * pilot_power.array() + 1.0;
        double total = 0.0;
        for (Eigen::Index k : members)
        {
            const Eigen::ArrayXd ratio = energy_ * beta_.col(k).array() / denom; // gamma_mk / beta_mk
            const Eigen::ArrayXd gamma = ratio * beta_.col(k).array();
            const double s = gamma.sum();
            double copilot = 0.0;
            for (Eigen::Index j : members)
            {
                if (j == k)
                    continue;
                const double c = (ratio * beta_.col(j).array()).sum();
                copilot += c * c;
            }
            const double leakage = (gamma * total_gain_.array()).sum();
            const double sinr = rho_u_ * s * s / (rho_u_ * (copilot + leakage) + s);
            total += std::log2(1.0 + sinr);
        }
        return total;
    }

    const Eigen::MatrixXd& beta_;
    double energy_;
    double rho_u_;
    Eigen::VectorXd total_gain_;
    std::vector<double> cache_;
};

} // namespace

PilotAssignment exhaustive_sum_rate(const NetworkRealization& net, const SimConfig& cfg)
{
    const int K = static_cast<int>(net.num_ues());
    const int P = cfg.num_pilots;
    if (K < 1 || P < 1)
        throw InvalidInput("exhaustive_sum_rate: need K >= 1 and tau_p >= 1");
    const double log_count = K * std::log(static_cast<double>(P));
    if (log_count > std::log(kExhaustiveBudget) + 1e-12)
    {
        throw BudgetExceeded("exhaustive tau_p^K <= 2e6", "exhaustive_sum_rate: tau_p^K = " + std::to_string(P) +
                                                              "^" + std::to_string(K) +
                                                              " exceeds the enumeration guard 2e6");
    }

    PilotAssignment best;
    if (P == 1)
    {
        best.pilots.assign(static_cast<std::size_t>(K), 0);
        return best;
    }

    // With tau_p >= 2 the guard implies K <= 20.
    GroupRateCache rate(net.beta, P * pilot_snr(cfg), uplink_snr(cfg));
    std::vector<int> labels(static_cast<std::size_t>(K), 0);
    std::vector<std::uint32_t> masks(static_cast<std::size_t>(P), 0);
    double best_value = -std::numeric_limits<double>::infinity();

    // Restricted growth strings: label k <= 1 + max label so far.
    const auto visit = [&](auto&& self, int k, int used) -> void {
        if (k == K)
        {
            double value = 0.0;
            for (int c = 0; c < used; ++c)
                value += rate(masks[static_cast<std::size_t>(c)]);
            if (value > best_value)
            {
                best_value = value;
                best.pilots = labels;
            }
            return;
        }
        const int limit = std::min(used + 1, P);
        for (int c = 0; c < limit; ++c)
        {
            labels[static_cast<std::size_t>(k)] = c;
            masks[static_cast<std::size_t>(c)] |= 1u << k;
            self(self, k + 1, std::max(used, c + 1));
            masks[static_cast<std::size_t>(c)] &= ~(1u << k);
        }
    };
    visit(visit, 0, 0);
    return best;
}

PilotAssignment oracle_assignment(int num_ues)
{
    PilotAssignment p;
    p.pilots.resize(static_cast<std::size_t>(num_ues));
    std::iota(p.pilots.begin(), p.pilots.end(), 0);
    p.oracle = true;
    return p;
}

// ---------------------------------------------------------------------------
// Registry

namespace {

struct StrategyEntry
{
    Strategy strategy;
    std::string_view name;
};

constexpr std::array<StrategyEntry, 6> kStrategies{{
    {Strategy::Random, "random"},
    {Strategy::Greedy, "greedy"},
    {Strategy::Repulsive, "repulsive"},
    {Strategy::OptimalRepulsive, "optimal-repulsive"},
    {Strategy::Exhaustive, "exhaustive"},
    {Strategy::Oracle, "oracle"},
}};

} // namespace

std::string_view strategy_name(Strategy s)
{
    for (const auto& e : kStrategies)
        if (e.strategy == s)
            return e.name;
    return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view name)
{
    for (const auto& e : kStrategies)
        if (e.name == name)
            return e.strategy;
    return std::nullopt;
}

const std::vector<Strategy>& all_strategies()
{
    static const std::vector<Strategy> all = [] {
        std::vector<Strategy> v;
        for (const auto& e : kStrategies)
            v.push_back(e.strategy);
        return v;
    }();
    return all;
}

PilotAssignment assign_pilots(Strategy s, const NetworkRealization& net, const SimConfig& cfg, std::uint64_t seed,
                              const StrategyOptions& options)
{
    const int K = static_cast<int>(net.num_ues());
    switch (s)
    {
    case Strategy::Random:
        return random_assignment(K, cfg.num_pilots, seed);
    case Strategy::Greedy:
        return greedy_assignment(net, cfg, seed,
                                 options.greedy_iterations < 0 ? default_greedy_iterations(K)
                                                               : options.greedy_iterations);
    case Strategy::Repulsive:
        return repulsive_heuristic(position_features(net.ue_positions), cfg.num_pilots, EuclideanRepulsion{}, seed);
    case Strategy::OptimalRepulsive:
        return optimal_repulsive(position_features(net.ue_positions), cfg.num_pilots, EuclideanRepulsion{});
    case Strategy::Exhaustive:
        return exhaustive_sum_rate(net, cfg);
    case Strategy::Oracle:
        return oracle_assignment(K);
    }
    throw InvalidInput("assign_pilots: unknown strategy");
}

} // namespace cfmimo
