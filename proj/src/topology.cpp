#include "cfmimo/topology.hpp"

#include "cfmimo/error.hpp"
#include "cfmimo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace cfmimo {

double wrap_distance(const Point2& a, const Point2& b, double side)
{
    // Nearest of the 3x3 shifted copies, per axis; |a - b| keeps the result exactly symmetric.
    const auto axis = [side](double u, double v) {
        const double d = std::abs(u - v);
        return std::min({d, std::abs(d - side), d + side});
    };
    return std::hypot(axis(a.x, b.x), axis(a.y, b.y));
}

double large_scale_coefficient(double distance, double shadow_db)
{
    if (!(distance > 0.0) || !std::isfinite(distance))
    {
        throw InvalidInput("large_scale_coefficient: distance must be strictly positive");
    }
    const double gain_db = -30.5 - 36.7 * std::log10(distance) + shadow_db;
    return std::pow(10.0, gain_db / 10.0);
}

double link_distance(double distance_2d)
{
    return std::hypot(distance_2d, kHeightDifference);
}

NetworkRealization generate_realization(const SimConfig& cfg, std::size_t realization_index)
{
    Rng rng(substream_seed(cfg.seed, realization_index));
    std::uniform_real_distribution<double> coord(0.0, cfg.area_side);
    std::normal_distribution<double> shadow(0.0, cfg.shadowing_sigma);

    const auto draw_points = [&](int n) {
        std::vector<Point2> pts(static_cast<std::size_t>(n));
        for (auto& pt : pts)
        {
            pt.x = coord(rng);
            pt.y = coord(rng);
        }
        return pts;
    };

    NetworkRealization net;
    net.ap_positions = draw_points(cfg.num_aps);
    net.ue_positions = draw_points(cfg.num_ues);
    net.beta.resize(cfg.num_aps, cfg.num_ues);
    for (int m = 0; m < cfg.num_aps; ++m)
    {
        for (int k = 0; k < cfg.num_ues; ++k)
        {
            const double d2 = wrap_distance(net.ap_positions[m], net.ue_positions[k], cfg.area_side);
            const double s = cfg.shadowing_sigma > 0.0 ? shadow(rng) : 0.0;
            net.beta(m, k) = large_scale_coefficient(link_distance(d2), s);
        }
    }
    return net;
}

} // namespace cfmimo
