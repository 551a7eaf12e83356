#include "srl/sweep.hpp"


#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "detail/pool.hpp"
#include "srl/io.hpp"

namespace srl::sweep {

using json = nlohmann::json;

std::vector<double> AxisSpec::values() const {
    std::vector<double> v(count);
    if (count == 1) {
        v[0] = min_value;
        return v;
    }
    for (std::size_t k = 0; k < count; ++k) {
        const double f = static_cast<double>(k) / static_cast<double>(count - 1);
        v[k] = log_spaced
                   ? std::exp(std::log(min_value) + f * (std::log(max_value) - std::log(min_value)))
                   : min_value + f * (max_value - min_value);
    }
    return v;
}

void AxisSpec::validate(const char* name) const {
    if (count == 0) throw ConfigError(std::string(name) + ": axis count must be positive");
    if (!(min_value > 0.0) && log_spaced) {
        throw ConfigError(std::string(name) + ": log axis needs a positive minimum");
    }
    if (count > 1 && !(max_value > min_value)) {
        throw ConfigError(std::string(name) + ": need max > min");
    }
}

const char* to_string(CellStatus s) {
    switch (s) {
        case CellStatus::ok: return "ok";
        case CellStatus::no_convergence: return "no-convergence";
        case CellStatus::fit_failed: return "fit-failed";
        case CellStatus::fit_skipped: return "fit-skipped";
    }
    return "?";
}

SweepGrid::StatusCounts SweepGrid::count_statuses() const {
    StatusCounts c;
    for (const auto& cell : cells) {
        switch (cell.status) {
            case CellStatus::ok: ++c.ok; break;
            case CellStatus::no_convergence: ++c.no_convergence; break;
            case CellStatus::fit_failed: ++c.fit_failed; break;
            case CellStatus::fit_skipped: ++c.fit_skipped; break;
        }
    }
    return c;
}

namespace {

struct Checkpoint {
    std::mutex mutex;
    std::ofstream out;
    std::map<std::size_t, Cell> done;

    void load(const std::filesystem::path& path) {
        std::ifstream in(path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            try {
                const json j = json::parse(line);
                Cell cell;
                cell.n_photon = j.value("n_photon", std::numeric_limits<double>::quiet_NaN());
                cell.fwhm_hz = j.value("fwhm_hz", std::numeric_limits<double>::quiet_NaN());
                cell.message = j.value("message", "");
                const std::string st = j.value("status", "ok");
                if (st == "ok") cell.status = CellStatus::ok;
                else if (st == "no-convergence") cell.status = CellStatus::no_convergence;
                else if (st == "fit-failed") cell.status = CellStatus::fit_failed;
                else cell.status = CellStatus::fit_skipped;
                done[j.at("cell").get<std::size_t>()] = cell;
            } catch (const json::exception&) {
                // partial trailing line from an interrupted run; ignore
            }
        }
    }

    void append(std::size_t idx, const Cell& cell) {
        std::lock_guard<std::mutex> lock(mutex);
        if (!out.is_open()) return;
        json j{{"cell", idx}, {"status", to_string(cell.status)}};
        if (std::isfinite(cell.n_photon)) j["n_photon"] = cell.n_photon;
        if (std::isfinite(cell.fwhm_hz)) j["fwhm_hz"] = cell.fwhm_hz;
        if (!cell.message.empty()) j["message"] = cell.message;
        out << j.dump() << "\n";
        out.flush();
    }
};

SweepGrid run_sweep(const GridSpec& spec, const PhysicalParams& base, SweepQuantity what,
                    const SweepOptions& opt) {
    spec.n_axis.validate("n_axis");
    spec.eta_axis.validate("eta_axis");
    base.validate();
    const std::size_t total = spec.n_axis.count * spec.eta_axis.count;
    if (total > opt.max_cells) {
        std::ostringstream os;
        os << "sweep: " << total << " cells exceed the configured budget of " << opt.max_cells;
        throw BudgetError(os.str());
    }

    SweepGrid grid;
    grid.spec = spec;
    grid.base = base;
    grid.quantity = what;
    grid.n_values = spec.n_axis.values();
    grid.eta_values_hz = spec.eta_axis.values();
    grid.cells.resize(total);

    Checkpoint ckpt;
    if (opt.checkpoint) {
        if (std::filesystem::exists(*opt.checkpoint)) ckpt.load(*opt.checkpoint);
        ckpt.out.open(*opt.checkpoint, std::ios::app);
    }

    detail::parallel_for_index(total, opt.workers, [&](std::size_t idx) {
        if (auto it = ckpt.done.find(idx); it != ckpt.done.end()) {
            grid.cells[idx] = it->second;
            return;
        }
        const std::size_t i = idx / grid.eta_values_hz.size();
        const std::size_t j = idx % grid.eta_values_hz.size();
        PhysicalParams p = base;
        p.n_atoms = grid.n_values[i];
        p.eta = hz_to_angular(grid.eta_values_hz[j]);

        Cell cell;
        const auto t0 = std::chrono::steady_clock::now();
        auto timed_out = [&] {
            return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                       .count() > opt.cell_timeout_s;
        };
        try {
            MeanFieldState ss = steady_state(p);
            cell.n_photon = ss.n_photon;
            if (what == SweepQuantity::linewidth) {
                if (timed_out()) throw BudgetError("cell timeout after steady state");
                if (ss.n_photon < opt.skip_photon_threshold) {
                    cell.status = CellStatus::fit_skipped;
                    cell.message = "steady photon number below threshold";
                } else {
                    LinewidthOptions lw;
                    lw.max_samples = opt.linewidth_samples;
                    lw.steady_override = ss;  // reuse the converged root
                    try {
                        cell.fwhm_hz = linewidth(p, lw).fwhm_hz;
                    } catch (const std::exception& e) {
                        cell.status = CellStatus::fit_failed;
                        cell.message = e.what();
                    }
                }
            }
        } catch (const std::exception& e) {
            cell.status = CellStatus::no_convergence;
            cell.message = e.what();
        }
        grid.cells[idx] = cell;
        ckpt.append(idx, cell);
    });
    return grid;
}

}  // namespace

SweepGrid sweep_photon(const GridSpec& spec, const PhysicalParams& base,
                       const SweepOptions& opt) {
    return run_sweep(spec, base, SweepQuantity::photon, opt);
}

SweepGrid sweep_linewidth(const GridSpec& spec, const PhysicalParams& base,
                          const SweepOptions& opt) {
    return run_sweep(spec, base, SweepQuantity::linewidth, opt);
}

OverlayCurves overlays(const PhysicalParams& base, const AxisSpec& n_axis) {
    OverlayCurves out;
    PhysicalParams p = base;
    p.n_atoms = std::max(1.0, p.n_atoms);
    const auto d = derive(p);
    for (double n : n_axis.values()) {
        out.max_pump_line.push_back({n, n * d.c1 * angular_to_hz(base.gamma)});
    }
    if (base.chi > 0.0 && std::isfinite(d.n_crit)) {
        out.n_crit = d.n_crit;
    }
    return out;
}

std::string matrix_csv(const SweepGrid& grid, const json& config) {
    std::ostringstream body;
    body << "# rows: n_atoms, columns: eta_hz; value: "
         << (grid.quantity == SweepQuantity::photon ? "steady n_photon" : "fwhm_hz") << "\n";
    body << "n_atoms\\eta_hz";
    for (double eta : grid.eta_values_hz) body << ',' << io::format_double(eta);
    body << "\n";
    for (std::size_t i = 0; i < grid.n_values.size(); ++i) {
        body << io::format_double(grid.n_values[i]);
        for (std::size_t j = 0; j < grid.eta_values_hz.size(); ++j) {
            const auto& cell = grid.at(i, j);
            const double v =
                grid.quantity == SweepQuantity::photon ? cell.n_photon : cell.fwhm_hz;
            body << ',' << (std::isfinite(v) ? io::format_double(v) : "nan");
        }
        body << "\n";
    }
    return io::finalize_csv(config, body.str());
}

std::string status_csv(const SweepGrid& grid, const json& config) {
    std::ostringstream body;
    body << "n_atoms\\eta_hz";
    for (double eta : grid.eta_values_hz) body << ',' << io::format_double(eta);
    body << "\n";
    for (std::size_t i = 0; i < grid.n_values.size(); ++i) {
        body << io::format_double(grid.n_values[i]);
        for (std::size_t j = 0; j < grid.eta_values_hz.size(); ++j) {
            body << ',' << to_string(grid.at(i, j).status);
        }
        body << "\n";
    }
    return io::finalize_csv(config, body.str());
}

json manifest_data(const SweepGrid& grid, const OverlayCurves& over) {
    json data;
    data["params"] = io::params_to_json(grid.base);
    data["quantity"] = grid.quantity == SweepQuantity::photon ? "n_photon" : "fwhm_hz";
    data["n_axis"] = grid.n_values;
    data["eta_axis_hz"] = grid.eta_values_hz;
    const auto counts = grid.count_statuses();
    data["statuses"] = {{"ok", counts.ok},
                        {"no_convergence", counts.no_convergence},
                        {"fit_failed", counts.fit_failed},
                        {"fit_skipped", counts.fit_skipped}};
    auto& line = data["overlays"]["max_pump_line"] = json::array();
    for (const auto& [n, eta] : over.max_pump_line) {
        line.push_back({{"n_atoms", n}, {"eta_hz", eta}});
    }
    if (over.n_crit) {
        data["overlays"]["n_crit"] = *over.n_crit;
    }
    json cells = json::array();
    for (std::size_t i = 0; i < grid.n_values.size(); ++i) {
        for (std::size_t j = 0; j < grid.eta_values_hz.size(); ++j) {
            const auto& cell = grid.at(i, j);
            json c{{"i", i}, {"j", j}, {"status", to_string(cell.status)}};
            if (std::isfinite(cell.n_photon)) c["n_photon"] = cell.n_photon;
            if (std::isfinite(cell.fwhm_hz)) c["fwhm_hz"] = cell.fwhm_hz;
            if (!cell.message.empty()) c["message"] = cell.message;
            cells.push_back(std::move(c));
        }
    }
    data["cells"] = std::move(cells);
    return data;
}

namespace {

// five-stop ramp, dark blue to yellow
std::string ramp_color(double f) {
    static const double stops[5][3] = {{68, 1, 84},
                                       {59, 82, 139},
                                       {33, 145, 140},
                                       {94, 201, 98},
                                       {253, 231, 37}};
    f = std::clamp(f, 0.0, 1.0) * 4.0;
    const int k = std::min(3, static_cast<int>(f));
    const double w = f - k;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                  static_cast<int>(stops[k][0] * (1 - w) + stops[k + 1][0] * w),
                  static_cast<int>(stops[k][1] * (1 - w) + stops[k + 1][1] * w),
                  static_cast<int>(stops[k][2] * (1 - w) + stops[k + 1][2] * w));
    return buf;
}

}  // namespace

std::string heatmap_svg(const SweepGrid& grid, const OverlayCurves& over) {
    const int W = 900, H = 640, ml = 90, mr = 30, mt = 30, mb = 70;
    const int pw = W - ml - mr, ph = H - mt - mb;
    const std::size_t ni = grid.n_values.size(), nj = grid.eta_values_hz.size();

    double vmin = std::numeric_limits<double>::infinity(), vmax = 0.0;
    auto value_of = [&](const Cell& c) {
        return grid.quantity == SweepQuantity::photon ? c.n_photon : c.fwhm_hz;
    };
    for (const auto& c : grid.cells) {
        const double v = value_of(c);
        if (std::isfinite(v) && v > 0.0) {
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
    }
    if (!(vmax > 0.0)) {
        vmin = 1e-3;
        vmax = 1.0;
    }
    vmin = std::max(vmin, vmax * 1e-12);

    const double lxmin = std::log10(grid.n_values.front());
    const double lxmax = std::log10(grid.n_values.back());
    const double lymin = std::log10(grid.eta_values_hz.front());
    const double lymax = std::log10(grid.eta_values_hz.back());
    auto xm = [&](double n) {
        return ml + pw * (std::log10(n) - lxmin) / std::max(lxmax - lxmin, 1e-12);
    };
    auto ym = [&](double eta) {
        return mt + ph * (1.0 - (std::log10(eta) - lymin) / std::max(lymax - lymin, 1e-12));
    };

    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
        << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
    const double cw = static_cast<double>(pw) / static_cast<double>(ni);
    const double chh = static_cast<double>(ph) / static_cast<double>(nj);
    for (std::size_t i = 0; i < ni; ++i) {
        for (std::size_t j = 0; j < nj; ++j) {
            const auto& cell = grid.at(i, j);
            const double v = value_of(cell);
            std::string color = "#cccccc";  // flagged / empty cells
            if (std::isfinite(v) && v > 0.0) {
                color = ramp_color((std::log10(v) - std::log10(vmin)) /
                                   std::max(std::log10(vmax) - std::log10(vmin), 1e-12));
            }
            svg << "<rect x='" << io::format_double(ml + cw * i) << "' y='"
                << io::format_double(mt + ph - chh * (j + 1)) << "' width='"
                << io::format_double(cw + 0.5) << "' height='" << io::format_double(chh + 0.5)
                << "' fill='" << color << "'/>\n";
        }
    }
    // overlays: pump threshold dashed white, critical atom number solid red
    svg << "<polyline fill='none' stroke='white' stroke-width='2' stroke-dasharray='8,5' "
           "points='";
    for (const auto& [n, eta] : over.max_pump_line) {
        if (eta < grid.eta_values_hz.front() || eta > grid.eta_values_hz.back()) continue;
        svg << io::format_double(xm(n)) << ',' << io::format_double(ym(eta)) << ' ';
    }
    svg << "'/>\n";
    if (over.n_crit && *over.n_crit >= grid.n_values.front() &&
        *over.n_crit <= grid.n_values.back()) {
        svg << "<line x1='" << io::format_double(xm(*over.n_crit)) << "' y1='" << mt
            << "' x2='" << io::format_double(xm(*over.n_crit)) << "' y2='" << mt + ph
            << "' stroke='red' stroke-width='2'/>\n";
    }
    svg << "<rect x='" << ml << "' y='" << mt << "' width='" << pw << "' height='" << ph
        << "' fill='none' stroke='black'/>\n";
    svg << "<text x='" << ml + pw / 2 << "' y='" << H - 20
        << "' text-anchor='middle' font-size='15'>atom number N (log)</text>\n";
    svg << "<text x='24' y='" << mt + ph / 2
        << "' text-anchor='middle' font-size='15' transform='rotate(-90 24 " << mt + ph / 2
        << ")'>pump rate (Hz, log)</text>\n";
    svg << "<text x='" << ml << "' y='" << mt - 8 << "' font-size='13'>"
        << (grid.quantity == SweepQuantity::photon ? "steady photon number"
                                                   : "linewidth FWHM (Hz)")
        << ", log color scale " << io::format_double(vmin) << " .. "
        << io::format_double(vmax) << "</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace srl::sweep
