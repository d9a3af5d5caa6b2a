#pragma once

// Hand-built scenarios for unit tests.

#include <cstddef>
#include <cstdint>

#include "tinfv/scenario.hpp"

namespace fx {

/// Config with `cells` BSs, `per_bs` users per BS and the given subcarrier counts.
inline tinfv::ScenarioConfig config(std::size_t cells, std::size_t per_bs, std::size_t K, std::size_t L)
{
  auto c = tinfv::default_config();
  c.num_sbs = cells - 1;
  c.users_per_bs_per_service = per_bs;
  c.num_ul_subcarriers = K;
  c.num_dl_subcarriers = L;
  return c;
}

/// Generated scenario with every gain set to `g` and every teleoperator moved
/// to the BS of its user.
inline tinfv::Scenario flat(std::size_t cells, std::size_t per_bs, std::size_t K, std::size_t L, double g = 1.0,
                            std::uint64_t seed = 1)
{
  auto s = tinfv::generate(config(cells, per_bs, K, L), seed);
  for (auto& x : s.gain_ul.data) x = g;
  for (auto& x : s.gain_dl.data) x = g;
  for (auto& t : s.teleoperators) t.bs = s.users[t.user].bs;
  return s;
}

}  // namespace fx
