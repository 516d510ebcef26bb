#pragma once

#include <cstdint>

namespace cfmimo {

/**
 * Physical and Monte Carlo parameters of one simulated deployment.
 *
 * Powers are in Watts, distances in meters. `noise_figure` is a linear
 * multiplier on the thermal noise (9 ~= 9.54 dB).
 */
struct SimConfig
{
    double area_side = 1000.0;
    int num_aps = 100;
    int num_ues = 40;
    int num_pilots = 10;
    int coherence_len = 200;
    double bandwidth = 20e6;
    double pilot_tx_power = 0.1;
    double uplink_tx_power = 0.1;
    double noise_figure = 9.0;
    double noise_temp = 290.0;
    double boltzmann = 1.381e-23;
    double shadowing_sigma = 4.0;
    int realizations = 200;
    std::uint64_t seed = 1;

    /// Throws ConfigError on the first violated invariant.
    void validate() const;
};

/// Thermal noise power B * k_B * T_0 * W in Watts.
double noise_power(const SimConfig& cfg);

/// Pilot SNR normalized by the noise power.
double pilot_snr(const SimConfig& cfg);

/// Uplink data SNR normalized by the noise power.
double uplink_snr(const SimConfig& cfg);

} // namespace cfmimo
