#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "nwl/evolution.hpp"
#include "nwl/model.hpp"
#include "nwl/stability.hpp"
#include "nwl/symbol.hpp"
#include "nwl/waves.hpp"

namespace nwl {

inline constexpr const char* kVersionString = "nwl 0.1.0";

nlohmann::json symbol_to_json(const SymbolSpec& s);
SymbolSpec symbol_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const PDEModel& m);
PDEModel model_from_json(const nlohmann::json& j);

// FNV-1a over the canonical model JSON; stable across runs and builds.
std::string model_hash(const PDEModel& m);

// Fixed-point-free decimal formatting: '.' separator, 17 significant digits.
std::string format_double(double v);

// One column per entry; all columns must share a length.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<const std::vector<double>*>& columns);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

void write_wave_outputs(const std::filesystem::path& dir, const TravelingWave& wave,
                        const PDEModel& model);
void write_trajectory_outputs(const std::filesystem::path& dir, const Trajectory& traj,
                              bool write_snapshots);
nlohmann::json trajectory_manifest(const Trajectory& traj, const PDEModel& model);

void write_dc_curve(const std::filesystem::path& path, const DcCurve& curve);
nlohmann::json stability_report_json(const StabilityReport& report, const PDEModel& model);
nlohmann::json blowup_report_json(const BlowupReport& report, const PDEModel& model);
void write_levine_csv(const std::filesystem::path& path, const LevineSeries& series);

} // namespace nwl
