#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

#include "srl/meanfield.hpp"
#include "srl/spectrum.hpp"

namespace srl::io {

using json = nlohmann::json;

std::string sha256_hex(std::string_view data);

/// Canonical shortest round-trip double formatting shared by all writers.
std::string format_double(double v);

void write_text(const std::filesystem::path& path, const std::string& content);

/// Parameters rendered in the paper-facing convention (ordinary Hz) plus the
/// unit note; embedded into every artifact.
json params_to_json(const PhysicalParams& p);

// CSV artifacts carry "# config: <compact json>" and "# sha256: <hex>" header
// lines; the hash covers everything after the hash line.
std::string finalize_csv(const json& config, const std::string& body);

// JSON artifacts embed the config and a hash of the canonical "data" dump.
std::string finalize_json(const json& config, const json& data);

std::string trajectory_csv(const Trajectory& traj, const json& config);
json trajectory_json_data(const Trajectory& traj);

std::string spectrum_csv(const Spectrum& spec, const json& config);
json linewidth_json_data(const LinewidthResult& res, bool include_spectrum);

/// Minimal line plot of a spectrum with the fitted curve overlaid.
std::string spectrum_svg(const Spectrum& spec, const LorentzianFit& fit);

}  // namespace srl::io
