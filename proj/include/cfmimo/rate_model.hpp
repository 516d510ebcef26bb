#pragma once

#include "cfmimo/chanest.hpp"
#include "cfmimo/config.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace cfmimo {

/**
 * Coefficients of the closed-form MR uplink SINR, independent of the power
 * coefficients. For power vector eta and normalized SNR rho:
 *
 *   SINR_k = rho eta_k signal_k /
 *            (rho sum_{k' != k} eta_k' copilot(k,k') + rho sum_k' eta_k' leakage(k,k') + noise_k)
 */
struct SinrTerms
{
    Eigen::VectorXd signal;  ///< (sum_m gamma_mk)^2
    Eigen::MatrixXd copilot; ///< corr(k,k') (sum_m gamma_mk beta_mk'/beta_mk)^2, zero diagonal
    Eigen::MatrixXd leakage; ///< sum_m gamma_mk beta_mk' (beamforming uncertainty + inter-user)
    Eigen::VectorXd noise;   ///< sum_m gamma_mk
};

SinrTerms sinr_terms(const Eigen::MatrixXd& beta, const Eigen::MatrixXd& gamma, const PilotAssignment& p);

/// Per-UE SINR from precomputed terms.
Eigen::VectorXd uplink_sinr(const SinrTerms& terms, const Eigen::VectorXd& eta, double uplink_snr);

/// Per-UE linear SINR of MR combining with MMSE estimates.
Eigen::VectorXd uplink_sinr(const Eigen::MatrixXd& beta, const Eigen::MatrixXd& gamma, const PilotAssignment& p,
                            const Eigen::VectorXd& eta, double uplink_snr);

/// Spectral efficiency log2(1 + sinr) in bits/s/Hz.
double spectral_efficiency(double sinr);

/// Per-user throughput B (1 - tau_p/tau_c)/2 log2(1 + sinr) in bits/s.
double throughput(double sinr, const SimConfig& cfg);

/// sum_k log2(1 + SINR_k) in bits/s/Hz.
double sum_rate(const Eigen::MatrixXd& beta, const Eigen::MatrixXd& gamma, const PilotAssignment& p,
                const Eigen::VectorXd& eta, double uplink_snr);

struct RateReport
{
    Eigen::VectorXd sinr;
    Eigen::VectorXd rate;       ///< bits/s/Hz
    Eigen::VectorXd throughput; ///< bits/s
};

RateReport rate_report(const Eigen::VectorXd& sinr, const SimConfig& cfg);

/// Per-UE output of the symbol-level validator. Powers are per data symbol.
struct EmpiricalSinr
{
    Eigen::VectorXd sinr;
    Eigen::VectorXd desired;         ///< rho eta_k |E{sum_m g_mk conj(ghat_mk)}|^2
    Eigen::VectorXd beamforming;     ///< rho eta_k Var{sum_m g_mk conj(ghat_mk)}
    Eigen::VectorXd interference;    ///< rho sum_{k'!=k} eta_k' E|sum_m g_mk' conj(ghat_mk)|^2
    Eigen::VectorXd copilot_coherent; ///< rho sum_{k'!=k} eta_k' |E{sum_m g_mk' conj(ghat_mk)}|^2
    Eigen::VectorXd noise;           ///< E{sum_m |ghat_mk|^2}
    bool low_sample_warning = false; ///< fewer than 1000 samples
};

/**
 * Draws num_samples i.i.d. Rayleigh small-scale fading and noise
 * realizations, forms the received pilots and MMSE estimates explicitly,
 * and measures the MR-combined uplink signal decomposition term by term.
 * Cost is O(num_samples M K^2); intended for small instances.
 */
EmpiricalSinr validate_sinr_empirically(const Eigen::MatrixXd& beta, const PilotAssignment& p, const SimConfig& cfg,
                                        const Eigen::VectorXd& eta, std::size_t num_samples, std::uint64_t seed);

/// Full-power overload.
EmpiricalSinr validate_sinr_empirically(const Eigen::MatrixXd& beta, const PilotAssignment& p, const SimConfig& cfg,
                                        std::size_t num_samples, std::uint64_t seed);

} // namespace cfmimo
