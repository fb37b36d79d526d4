#pragma once

#include "sypi/scm_sim.hpp"

#include <string>

namespace sypi {

inline constexpr int kSpecFormatVersion = 1;

/// Spec file schema (JSON):
///   format        "sypi-spec"
///   version       1
///   n_obs, n_hidden, target (index), multi_lag_mode, weight_scale, stabilized
///   series        [{index, name, hidden, memoryless, self_weight, noise_std}]
///   edges         [{source, dest, lag, weight}]
/// Doubles are written with round-trip precision.
std::string spec_to_json(const FullTimeGraphSpec& spec);
FullTimeGraphSpec spec_from_json(const std::string& text);

void save_spec(const FullTimeGraphSpec& spec, const std::string& path);
FullTimeGraphSpec load_spec(const std::string& path);

}  // namespace sypi
