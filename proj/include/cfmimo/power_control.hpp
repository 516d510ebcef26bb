#pragma once

#include "cfmimo/chanest.hpp"
#include "cfmimo/rate_model.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string_view>

namespace cfmimo {

/// Uplink power-control coefficients, each in [0, 1].
using PowerCoefficients = Eigen::VectorXd;

PowerCoefficients full_power(int num_ues);

struct MaxMinOptions
{
    double target_tol = 1e-3;     ///< relative bisection tolerance on the SINR target
    int bisection_budget = 60;
};

struct MaxMinResult
{
    PowerCoefficients eta;
    double target = 0.0; ///< certified common SINR target
    int bisection_steps = 0;
};

/**
 * Max-min fair power control. Bisects geometrically on the common SINR
 * target t. For a given t the least powers meeting SINR_k >= t for all k
 * are the minimal fixed point of eta <- t I(eta) / (rho signal), an affine
 * map solved as a linear system; t is feasible iff that solution is
 * positive and at most 1. The returned eta equalizes every SINR at the
 * largest certified target.
 *
 * Throws BudgetExceeded if the bisection budget runs out before the
 * bracket closes; the error message carries the best feasible target.
 */
MaxMinResult max_min_power_detailed(const SinrTerms& terms, double uplink_snr, const MaxMinOptions& options = {});

PowerCoefficients max_min_power(const Eigen::MatrixXd& beta, const Eigen::MatrixXd& gamma, const PilotAssignment& p,
                                double uplink_snr, double tol = 1e-3);

/// Outcome of one feasibility check. `eta` is set only when t is feasible.
std::optional<PowerCoefficients> sinr_target_power(const SinrTerms& terms, double uplink_snr, double target);

enum class PowerPolicy
{
    Full,
    MaxMin,
};

std::string_view policy_name(PowerPolicy p);
std::optional<PowerPolicy> parse_policy(std::string_view name);

} // namespace cfmimo
