#pragma once

#include "cfmimo/chanest.hpp"
#include "cfmimo/config.hpp"
#include "cfmimo/topology.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cfmimo {

/// One feature vector per UE (2-D position by default).
using Features = std::vector<std::vector<double>>;

Features position_features(const std::vector<Point2>& positions);

/// Pairwise repulsion score. Implementations must be symmetric, non-negative and zero on identical inputs.
class RepulsionFunction
{
  public:
    virtual ~RepulsionFunction() = default;
    virtual double operator()(std::span<const double> a, std::span<const double> b) const = 0;
};

class EuclideanRepulsion final : public RepulsionFunction
{
  public:
    double operator()(std::span<const double> a, std::span<const double> b) const override;
};

/// K x K matrix of f_r over all UE pairs.
Eigen::MatrixXd repulsion_matrix(const Features& features, const RepulsionFunction& f);

/**
 * Binary UE-to-cluster association. Row k has a single 1 in the column of
 * UE k's cluster; column sizes lie in [floor(K/clusters), floor(K/clusters) + 1].
 */
class ClusterMatrix
{
  public:
    /// Throws InvalidInput if the rows or column sums violate the constraints.
    explicit ClusterMatrix(Eigen::MatrixXi x);

    static ClusterMatrix from_assignment(const PilotAssignment& p, int num_clusters);

    const Eigen::MatrixXi& matrix() const { return x_; }
    int num_ues() const { return static_cast<int>(x_.rows()); }
    int num_clusters() const { return static_cast<int>(x_.cols()); }
    PilotAssignment to_assignment() const;

  private:
    Eigen::MatrixXi x_;
};

/// True when every pilot is used floor(K/tau_p) or floor(K/tau_p)+1 times.
bool is_balanced(const PilotAssignment& p, int num_pilots);

/// Within-cluster sum of pairwise repulsion.
double repulsion_score(const ClusterMatrix& x, const Eigen::MatrixXd& pairwise);
double repulsion_score(const ClusterMatrix& x, const Features& features, const RepulsionFunction& f);

/// Within-cluster sum for a plain assignment vector; no balance check.
double partition_score(std::span<const int> pilots, const Eigen::MatrixXd& pairwise);

/// Shuffle the UEs and deal them round-robin into the pilots.
PilotAssignment random_assignment(int num_ues, int num_pilots, std::uint64_t seed);

/**
 * Min-rate greedy reassignment starting from random_assignment(seed).
 * Each round the UE with the lowest full-power rate moves to the pilot
 * whose current users contribute the least total large-scale gain.
 */
PilotAssignment greedy_assignment(const NetworkRealization& net, const SimConfig& cfg, std::uint64_t seed,
                                  int iterations);

/// Default greedy round count (2 K).
int default_greedy_iterations(int num_ues);

struct LocalSearchResult
{
    PilotAssignment assignment;
    double score = 0.0;
    int sweeps = 0;
    int swaps = 0;
};

/// Reported after every accepted exchange; `pilots` is the state after the swap.
struct SwapEvent
{
    int u = 0;
    int w = 0;
    double gain = 0.0;
    std::span<const int> pilots;
};

/// Accepted swaps must improve the objective by more than this.
inline constexpr double kSwapTolerance = 1e-12;

/**
 * Pairwise-exchange local search from `initial`. Sweeps cluster pairs in
 * lexicographic order and UE pairs in index order, swapping whenever the
 * within-cluster score strictly increases; stops after a sweep with no
 * swap. Gains are evaluated incrementally.
 */
LocalSearchResult repulsive_local_search(const Eigen::MatrixXd& pairwise, const PilotAssignment& initial,
                                         int num_pilots, const std::function<void(const SwapEvent&)>& on_swap = {});

/// Local search from a seeded random balanced partition. Requires K >= tau_p.
PilotAssignment repulsive_heuristic(const Features& features, int num_pilots, const RepulsionFunction& f,
                                    std::uint64_t seed);
LocalSearchResult repulsive_heuristic_detailed(const Eigen::MatrixXd& pairwise, int num_pilots, std::uint64_t seed);

inline constexpr int kOptimalRepulsiveMaxUes = 12;

/// Exact maximizer over all balanced partitions; throws BudgetExceeded for K > 12.
PilotAssignment optimal_repulsive(const Features& features, int num_pilots, const RepulsionFunction& f);
PilotAssignment optimal_repulsive(const Eigen::MatrixXd& pairwise, int num_pilots);

inline constexpr double kExhaustiveBudget = 2e6;

/**
 * Sum-rate maximizing pilot vector at full power over all tau_p^K
 * assignments (balance not required). Pilot relabelings have equal sum
 * rate, so only canonical labelings are evaluated; the returned vector is
 * the lexicographically smallest maximizer. Throws BudgetExceeded when
 * tau_p^K > 2e6.
 */
PilotAssignment exhaustive_sum_rate(const NetworkRealization& net, const SimConfig& cfg);

/// Contamination-free reference: oracle flag set, pilots 0..K-1.
PilotAssignment oracle_assignment(int num_ues);

enum class Strategy
{
    Random,
    Greedy,
    Repulsive,
    OptimalRepulsive,
    Exhaustive,
    Oracle,
};

std::string_view strategy_name(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view name);
const std::vector<Strategy>& all_strategies();

struct StrategyOptions
{
    int greedy_iterations = -1; ///< negative: default_greedy_iterations(K)
};

/// Dispatches one strategy on one realization.
PilotAssignment assign_pilots(Strategy s, const NetworkRealization& net, const SimConfig& cfg, std::uint64_t seed,
                              const StrategyOptions& options = {});

} // namespace cfmimo
