#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace cfmimo {

/**
 * Pilot index per UE. With `oracle` set, every pair of distinct UEs is
 * treated as orthogonal regardless of `pilots`.
 */
struct PilotAssignment
{
    std::vector<int> pilots;
    bool oracle = false;

    std::size_t size() const { return pilots.size(); }
};

/// 1 iff the two UEs' pilots coincide (always 1 for k == k2), 0 otherwise.
int pilot_correlation(const PilotAssignment& p, std::size_t k, std::size_t k2);

/// Number of UEs using each pilot; throws InvalidInput for out-of-range entries.
std::vector<int> pilot_loads(const PilotAssignment& p, int num_pilots);

struct EstimationQuality
{
    Eigen::MatrixXd gamma; ///< mean-square of the MMSE estimate, M x K
    Eigen::MatrixXd c;     ///< MMSE scaling coefficient, M x K
};

/**
 * MMSE estimation statistics for one pilot assignment.
 *
 * c_mk = sqrt(tau_p rho_p) beta_mk / (tau_p rho_p sum_{k'} beta_mk' corr(k,k') + 1)
 * gamma_mk = sqrt(tau_p rho_p) beta_mk c_mk
 */
EstimationQuality estimation_quality(const Eigen::MatrixXd& beta, const PilotAssignment& p, int num_pilots,
                                     double pilot_snr);

} // namespace cfmimo
