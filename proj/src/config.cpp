#include "cfmimo/config.hpp"

#include "cfmimo/error.hpp"

#include <cmath>
#include <string>

namespace cfmimo {

namespace {

void require_positive(double v, const char* name)
{
    if (!(v > 0.0) || !std::isfinite(v))
    {
        throw ConfigError(std::string(name) + " must be strictly positive and finite");
    }
}

} // namespace

void SimConfig::validate() const
{
    if (num_aps < 1)
        throw ConfigError("num_aps must be >= 1");
    if (num_ues < 1)
        throw ConfigError("num_ues must be >= 1");
    if (coherence_len < 1)
        throw ConfigError("coherence_len must be >= 1");
    if (num_pilots < 1 || num_pilots > coherence_len)
        throw ConfigError("num_pilots must lie in [1, coherence_len]");
    if (realizations < 0)
        throw ConfigError("realizations must be non-negative");
    require_positive(area_side, "area_side");
    require_positive(bandwidth, "bandwidth");
    require_positive(pilot_tx_power, "pilot_tx_power");
    require_positive(uplink_tx_power, "uplink_tx_power");
    require_positive(noise_figure, "noise_figure");
    require_positive(noise_temp, "noise_temp");
    require_positive(boltzmann, "boltzmann");
    if (!(shadowing_sigma >= 0.0) || !std::isfinite(shadowing_sigma))
        throw ConfigError("shadowing_sigma must be non-negative");
}

double noise_power(const SimConfig& cfg)
{
    return cfg.bandwidth * cfg.boltzmann * cfg.noise_temp * cfg.noise_figure;
}

double pilot_snr(const SimConfig& cfg)
{
    return cfg.pilot_tx_power / noise_power(cfg);
}

double uplink_snr(const SimConfig& cfg)
{
    return cfg.uplink_tx_power / noise_power(cfg);
}

} // namespace cfmimo
