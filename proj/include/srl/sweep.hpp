#pragma once

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "srl/model.hpp"
#include "srl/spectrum.hpp"

namespace srl::sweep {

struct AxisSpec {
    std::size_t count = 0;
    double min_value = 0.0;
    double max_value = 0.0;
    bool log_spaced = true;

    std::vector<double> values() const;
    void validate(const char* name) const;
};

struct GridSpec {
    AxisSpec n_axis;    // atom counts
    AxisSpec eta_axis;  // pump rates, ordinary Hz
};

enum class CellStatus { ok, no_convergence, fit_failed, fit_skipped };

const char* to_string(CellStatus s);

struct Cell {
    double n_photon = std::numeric_limits<double>::quiet_NaN();
    double fwhm_hz = std::numeric_limits<double>::quiet_NaN();
    CellStatus status = CellStatus::ok;
    std::string message;
};

enum class SweepQuantity { photon, linewidth };

struct SweepGrid {
    GridSpec spec;
    std::vector<double> n_values, eta_values_hz;
    PhysicalParams base;
    SweepQuantity quantity = SweepQuantity::photon;
    std::vector<Cell> cells;  // row-major: [i_n * eta_count + j_eta]

    const Cell& at(std::size_t i_n, std::size_t j_eta) const {
        return cells[i_n * eta_values_hz.size() + j_eta];
    }
    struct StatusCounts {
        std::size_t ok = 0, no_convergence = 0, fit_failed = 0, fit_skipped = 0;
    };
    StatusCounts count_statuses() const;
};

/// Pump threshold and critical atom number curves drawn over the maps.
struct OverlayCurves {
    std::vector<std::pair<double, double>> max_pump_line;  // (N, eta_hz = N C1 gamma)
    std::optional<double> n_crit;                          // absent when chi = 0
};

struct SweepOptions {
    unsigned workers = 0;            // 0: hardware concurrency
    double cell_timeout_s = 30.0;    // last-resort wall guard per cell
    std::size_t max_cells = 100'000;
    std::size_t linewidth_samples = 1 << 14;
    double skip_photon_threshold = 1e-6;  // below: linewidth cells are fit-skipped
    std::optional<std::filesystem::path> checkpoint;  // JSONL scratch, append-safe
};

SweepGrid sweep_photon(const GridSpec& spec, const PhysicalParams& base,
                       const SweepOptions& opt = {});
SweepGrid sweep_linewidth(const GridSpec& spec, const PhysicalParams& base,
                          const SweepOptions& opt = {});

OverlayCurves overlays(const PhysicalParams& base, const AxisSpec& n_axis);

/// Canonical artifacts: value matrix CSV, status CSV, JSON manifest with axes,
/// parameters, status accounting, overlays and per-file hashes.
std::string matrix_csv(const SweepGrid& grid, const nlohmann::json& config);
std::string status_csv(const SweepGrid& grid, const nlohmann::json& config);
nlohmann::json manifest_data(const SweepGrid& grid, const OverlayCurves& over);

/// Log-scale heatmap with the overlay curves drawn on top.
std::string heatmap_svg(const SweepGrid& grid, const OverlayCurves& over);

}  // namespace srl::sweep
