#include "cfmimo/power_control.hpp"

#include "cfmimo/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cfmimo {

PowerCoefficients full_power(int num_ues)
{
    if (num_ues < 1)
        throw InvalidInput("full_power: need K >= 1");
    return PowerCoefficients::Ones(num_ues);
}

std::optional<PowerCoefficients> sinr_target_power(const SinrTerms& terms, double uplink_snr, double target)
{
    const Eigen::Index K = terms.signal.size();

    // SINR_k >= t  <=>  eta_k rho (signal_k - t leakage_kk) >= t (rho sum_{j!=k} eta_j coupling_kj + noise_k).
    // Keeping the self term on the left gives the same fixed points with much faster convergence
    // when a UE is limited by its own beamforming uncertainty.
    Eigen::MatrixXd coupling = terms.copilot + terms.leakage;
    coupling.diagonal().setZero();
    Eigen::ArrayXd scale(K);
    for (Eigen::Index k = 0; k < K; ++k)
    {
        const double margin = terms.signal(k) - target * terms.leakage(k, k);
        if (!(margin > 0.0))
            return std::nullopt;
        scale(k) = target / (uplink_snr * margin);
    }

    // The map eta <- A eta + b is affine with A >= 0 and b > 0, so its minimal fixed point solves
    // (I - A) eta = b directly. A positive solution exists iff the spectral radius of A is below 1;
    // the iteration from zero converges at that rate, which tends to 1 at the max-min optimum.
    const Eigen::MatrixXd a = (uplink_snr * scale).matrix().asDiagonal() * coupling;
    const Eigen::VectorXd b = (scale * terms.noise.array()).matrix();
    const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(K, K) - a;
    const PowerCoefficients eta = system.partialPivLu().solve(b);
    if (!eta.allFinite() || !(eta.array() > 0.0).all() || eta.maxCoeff() > 1.0 + 1e-9)
        return std::nullopt;
    if ((system * eta - b).lpNorm<Eigen::Infinity>() > 1e-9 * b.lpNorm<Eigen::Infinity>())
        return std::nullopt;
    return eta.cwiseMin(1.0);
}

MaxMinResult max_min_power_detailed(const SinrTerms& terms, double uplink_snr, const MaxMinOptions& options)
{
    const Eigen::Index K = terms.signal.size();
    if (K < 1)
        throw InvalidInput("max_min_power: no UEs");
    if (!(options.target_tol > 0.0))
        throw InvalidInput("max_min_power: tolerance must be positive");

    const PowerCoefficients ones = full_power(static_cast<int>(K));
    const Eigen::VectorXd full_sinr = uplink_sinr(terms, ones, uplink_snr);
    const double full_min = full_sinr.minCoeff();

    // Interference-free single-user SINR bounds every user's achievable target.
    double hi = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < K; ++k)
    {
        const double alone = uplink_snr * terms.signal(k) /
                             (uplink_snr * terms.leakage(k, k) + terms.noise(k));
        hi = std::min(hi, alone);
    }

    MaxMinResult result;
    result.eta = ones;
    result.target = full_min;
    if (!(full_min > 0.0))
        return result;

    double lo = full_min;
    std::optional<PowerCoefficients> best;
    int steps = 0;
    // Full power certifies full_min; only rounding can make the check reject it.
    if (!(best = sinr_target_power(terms, uplink_snr, lo)))
        return result;

    while (hi / lo > 1.0 + options.target_tol)
    {
        if (++steps > options.bisection_budget)
        {
            std::ostringstream msg;
            msg << "max_min_power: bisection budget of " << options.bisection_budget
                << " steps exhausted; best feasible target " << lo;
            throw BudgetExceeded("max-min bisection steps", msg.str());
        }
        const double mid = std::sqrt(lo * hi);
        if (auto eta = sinr_target_power(terms, uplink_snr, mid))
        {
            lo = mid;
            best = std::move(eta);
        }
        else
        {
            hi = mid;
        }
    }
    result.bisection_steps = steps;

    // Keep full power if rounding left the solution below it.
    const double achieved = uplink_sinr(terms, *best, uplink_snr).minCoeff();
    if (achieved >= full_min)
    {
        result.eta = std::move(*best);
        result.target = lo;
    }
    return result;
}

PowerCoefficients max_min_power(const Eigen::MatrixXd& beta, const Eigen::MatrixXd& gamma, const PilotAssignment& p,
                                double uplink_snr, double tol)
{
    MaxMinOptions options;
    options.target_tol = tol;
    return max_min_power_detailed(sinr_terms(beta, gamma, p), uplink_snr, options).eta;
}

std::string_view policy_name(PowerPolicy p)
{
    return p == PowerPolicy::Full ? "full" : "maxmin";
}

std::optional<PowerPolicy> parse_policy(std::string_view name)
{
    if (name == "full")
        return PowerPolicy::Full;
    if (name == "maxmin")
        return PowerPolicy::MaxMin;
    return std::nullopt;
}

} // namespace cfmimo
