#pragma once

#include <cmath>

namespace tinfv {

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

/// Power spectral density in dBm/Hz integrated over `bandwidth_hz`, in watts.
inline double noise_power_watts(double psd_dbm_per_hz, double bandwidth_hz)
{
  return dbm_to_watts(psd_dbm_per_hz) * bandwidth_hz;
}

inline constexpr double seconds_to_ms(double s) { return s * 1e3; }
inline constexpr double ms_to_seconds(double ms) { return ms * 1e-3; }

}  // namespace tinfv
