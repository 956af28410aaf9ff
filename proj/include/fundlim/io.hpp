#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "fundlim/bounds.hpp"
#include "fundlim/disturbance.hpp"
#include "fundlim/plant_analysis.hpp"
#include "fundlim/simulation.hpp"

namespace fundlim::io {

using nlohmann::json;

// All parsers throw InputError with a message naming the offending field.

/// { "A": [[...], ...], "B": [...], "C": [...] }
StateSpaceModel plant_from_json(const json& j);
/// { "type": "iid_gaussian", "sigma": s } | { "type": "iid_uniform", "a": a }
/// | { "type": "iid_gengauss", "p": p, "mu": mu }
/// | { "type": "gauss_ar", "coeffs": [...], "sigma_w": s }
DisturbanceModel disturbance_from_json(const json& j);
/// Keys: horizon, trajectories, burn_in, tail_window, seed, p, divergence_threshold,
/// initial_state_std, threads. All optional.
SimulationConfig config_from_json(const json& j);
/// Number or the string "inf".
NormOrder norm_order_from_json(const json& j);

json to_json(const DisturbanceModel& model);
json to_json(const SimulationConfig& cfg);
json to_json(const PlantCharacteristics& chars);
json to_json(const BoundReport& report);
json to_json(NormOrder p);
json to_json(const Certification& cert);

/// Parses a file as JSON; InputError on I/O or syntax failure.
json read_json_file(const std::filesystem::path& path);

/// CSV rows "omega,S" on the uniform periodic grid (a header row is allowed).
SpectralDensity spectrum_from_csv(const std::string& text);
std::string spectrum_to_csv(const SpectralDensity& spectrum);

/// Columns k, then e_p<order> for every order, then y_p<order>.
std::string simulation_to_csv(const SimulationResult& result);

}  // namespace fundlim::io
