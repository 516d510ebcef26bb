#pragma once

#include "cfmimo/config.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace cfmimo {

struct Point2
{
    double x = 0.0;
    double y = 0.0;
};

/// AP-UE vertical offset (AP at 10 m, UE at 1.5 m).
inline constexpr double kHeightDifference = 8.5;

/**
 * One Monte Carlo drop: AP and UE positions on the wrapped square and
 * the M x K large-scale fading matrix (row = AP, column = UE).
 */
struct NetworkRealization
{
    std::vector<Point2> ap_positions;
    std::vector<Point2> ue_positions;
    Eigen::MatrixXd beta;

    std::size_t num_aps() const { return ap_positions.size(); }
    std::size_t num_ues() const { return ue_positions.size(); }
};

/// Toroidal distance: minimum over the 3x3 grid of translated copies of b.
double wrap_distance(const Point2& a, const Point2& b, double side);

/**
 * UMi NLOS pathloss at 2 GHz plus shadowing, as a linear power gain:
 * 10^((-30.5 - 36.7 log10(d) + shadow_db) / 10).
 *
 * Throws InvalidInput when d is not strictly positive and finite.
 */
double large_scale_coefficient(double distance, double shadow_db);

/// 3-D link distance from a wrapped 2-D distance.
double link_distance(double distance_2d);

/// Deterministic in (cfg.seed, realization_index); cfg must be valid.
NetworkRealization generate_realization(const SimConfig& cfg, std::size_t realization_index);

} // namespace cfmimo
