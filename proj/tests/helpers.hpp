#pragma once

#include "apalloc/model.hpp"

#include <vector>

namespace apalloc::test {

/// APs on a line at the given x positions, one coverage radius each, no
/// shadowing and mu_z = 1 so estimated and true gains agree.
inline Networkd line_network(const std::vector<double>& xs, const std::vector<double>& radii, int channels,
                             double beta = 2) {
  std::vector<AccessPointd> aps(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    aps[i].id = static_cast<ApId>(i);
    aps[i].position = {xs[i], 0.0};
    aps[i].coverage_radius = radii[i];
    aps[i].coordination_radius = 2 * radii[i];
    aps[i].sinr_target = beta;
    for (int k = 0; k < channels; ++k) aps[i].channels.push_back(k);
  }
  PropagationModeld model;
  model.shadow_std_db = 0;
  model.mean_linear_gain = 1;
  return Networkd(std::move(aps), std::move(model), channels);
}

}  // namespace apalloc::test
