#include "cfmimo/chanest.hpp"

#include "cfmimo/error.hpp"

#include <cmath>
#include <string>

namespace cfmimo {

int pilot_correlation(const PilotAssignment& p, std::size_t k, std::size_t k2)
{
    if (k >= p.size() || k2 >= p.size())
    {
        throw InvalidInput("pilot_correlation: UE index out of range");
    }
    if (k == k2)
        return 1;
    if (p.oracle)
        return 0;
    return p.pilots[k] == p.pilots[k2] ? 1 : 0;
}

std::vector<int> pilot_loads(const PilotAssignment& p, int num_pilots)
{
    std::vector<int> loads(static_cast<std::size_t>(num_pilots), 0);
    for (int pilot : p.pilots)
    {
        if (pilot < 0 || pilot >= num_pilots)
        {
            throw InvalidInput("pilot index " + std::to_string(pilot) + " outside [0, " +
                               std::to_string(num_pilots) + ")");
        }
        ++loads[static_cast<std::size_t>(pilot)];
    }
    return loads;
}

EstimationQuality estimation_quality(const Eigen::MatrixXd& beta, const PilotAssignment& p, int num_pilots,
                                     double pilot_snr)
{
    const auto num_ues = static_cast<std::size_t>(beta.cols());
    if (p.size() != num_ues)
    {
        throw InvalidInput("estimation_quality: assignment has " + std::to_string(p.size()) + " UEs, beta has " +
                           std::to_string(num_ues));
    }
    if (num_pilots < 1 || !(pilot_snr > 0.0))
    {
        throw InvalidInput("estimation_quality: need num_pilots >= 1 and pilot_snr > 0");
    }
    if (!p.oracle)
        pilot_loads(p, num_pilots);

    const double energy = num_pilots * pilot_snr;
    const double amplitude = std::sqrt(energy);
    const Eigen::Index num_aps = beta.rows();
    const auto K = static_cast<Eigen::Index>(num_ues);

    // Received pilot power per (AP, pilot); oracle mode has one pilot per UE.
    Eigen::MatrixXd pilot_power;
    if (p.oracle)
    {
        pilot_power = beta;
    }
    else
    {
        pilot_power = Eigen::MatrixXd::Zero(num_aps, num_pilots);
        for (Eigen::Index k = 0; k < K; ++k)
            pilot_power.col(p.pilots[static_cast<std::size_t>(k)]) += beta.col(k);
    }

    EstimationQuality q;
    q.c.resize(num_aps, K);
    q.gamma.resize(num_aps, K);
    for (Eigen::Index k = 0; k < K; ++k)
    {
        const Eigen::Index col = p.oracle ? k : p.pilots[static_cast<std::size_t>(k)];
        for (Eigen::Index m = 0; m < num_aps; ++m)
        {
            const double c = amplitude * beta(m, k) / (energy * pilot_power(m, col) + 1.0);
            q.c(m, k) = c;
            q.gamma(m, k) = amplitude * beta(m, k) * c;
        }
    }
    return q;
}

} // namespace cfmimo
