#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "srl/io.hpp"
#include "srl/sweep.hpp"

using namespace srl;
using namespace srl::sweep;

namespace {

PhysicalParams fig2_base() {
    return PhysicalParams::from_ordinary_hz(1e5, 1e8, 1.4e3, 1e7, 1e6, 0.0, 1e10);
}

}  // namespace

TEST_CASE("axis construction") {
    SUBCASE("log spacing") {
        AxisSpec ax{5, 1e2, 1e6, true};
        const auto v = ax.values();
        CHECK(v.size() == 5);
        CHECK(v.front() == doctest::Approx(1e2));
        CHECK(v.back() == doctest::Approx(1e6));
        CHECK(v[1] / v[0] == doctest::Approx(10.0));
        for (std::size_t k = 1; k < v.size(); ++k) CHECK(v[k] > v[k - 1]);
    }
    SUBCASE("linear spacing admits zero") {
        AxisSpec ax{3, 0.0, 4.0, false};
        const auto v = ax.values();
        CHECK(v[0] == 0.0);
        CHECK(v[1] == doctest::Approx(2.0));
        CHECK(v[2] == doctest::Approx(4.0));
    }
    SUBCASE("validation") {
        CHECK_THROWS_AS((AxisSpec{0, 1.0, 2.0, true}.validate("x")), ConfigError);
        CHECK_THROWS_AS((AxisSpec{4, 0.0, 2.0, true}.validate("x")), ConfigError);
        CHECK_THROWS_AS((AxisSpec{4, 5.0, 2.0, true}.validate("x")), ConfigError);
    }
}

TEST_CASE("cell budget enforced before starting") {
    GridSpec spec;
    spec.n_axis = {100, 1e6, 1e12, true};
    spec.eta_axis = {100, 1e3, 1e9, true};
    SweepOptions opt;
    opt.max_cells = 50;
    CHECK_THROWS_AS(sweep_photon(spec, fig2_base(), opt), BudgetError);
}

TEST_CASE("1x1 grid equals a direct steady-state call bit-for-bit") {
    GridSpec spec;
    spec.n_axis = {1, 2e9, 2e9, true};
    spec.eta_axis = {1, 1e6, 1e6, true};
    const auto base = fig2_base();
    const auto grid = sweep_photon(spec, base, {});
    REQUIRE(grid.cells.size() == 1);
    PhysicalParams p = base;
    p.n_atoms = 2e9;
    p.eta = hz_to_angular(1e6);
    const auto direct = steady_state(p);
    CHECK(grid.cells[0].n_photon == direct.n_photon);
    CHECK(grid.cells[0].status == CellStatus::ok);
}

TEST_CASE("eta = 0 row gives dark cells") {
    GridSpec spec;
    spec.n_axis = {2, 1e9, 1e10, true};
    spec.eta_axis = {3, 0.0, 2e6, false};  // linear axis reaching down to zero
    const auto grid = sweep_photon(spec, fig2_base(), {});
    for (std::size_t i = 0; i < 2; ++i) {
        const auto& cell = grid.at(i, 0);
        CHECK(cell.status == CellStatus::ok);
        CHECK(std::abs(cell.n_photon) < 1e-8);
    }
}

TEST_CASE("status accounting and g = 0 linewidth column") {
    // with g = 0 nothing lases: every linewidth cell is fit-skipped, photons 0
    auto base = PhysicalParams::from_ordinary_hz(1e5, 1e8, 0.0, 1e7, 1e6, 0.0, 1e10);
    GridSpec spec;
    spec.n_axis = {3, 1e8, 1e10, true};
    spec.eta_axis = {3, 1e5, 1e7, true};
    const auto grid = sweep_linewidth(spec, base, {});
    const auto counts = grid.count_statuses();
    CHECK(counts.ok + counts.no_convergence + counts.fit_failed + counts.fit_skipped ==
          grid.cells.size());
    CHECK(counts.fit_skipped == grid.cells.size());
    for (const auto& cell : grid.cells) CHECK(std::abs(cell.n_photon) < 1e-8);
}

TEST_CASE("linewidth sweep around the narrow region") {
    GridSpec spec;
    spec.n_axis = {3, 2e9, 2e10, true};
    spec.eta_axis = {3, 3e5, 3e6, true};
    SweepOptions opt;
    opt.linewidth_samples = 1 << 13;
    const auto grid = sweep_linewidth(spec, fig2_base(), opt);
    std::size_t narrow = 0;
    for (const auto& cell : grid.cells) {
        if (cell.status == CellStatus::ok) {
            CHECK(cell.fwhm_hz > 0.0);
            narrow += (cell.fwhm_hz < 1e5);
        }
    }
    CHECK(narrow > 0);  // the sub-gamma region shows up already on a coarse grid
}

TEST_CASE("determinism across worker counts and cell independence") {
    GridSpec spec;
    spec.n_axis = {4, 1e9, 1e11, true};
    spec.eta_axis = {3, 1e5, 1e7, true};
    const auto base = fig2_base();
    SweepOptions w1;
    w1.workers = 1;
    SweepOptions w4;
    w4.workers = 4;
    const auto g1 = sweep_photon(spec, base, w1);
    const auto g4 = sweep_photon(spec, base, w4);
    const nlohmann::json cfg{{"test", "determinism"}};
    CHECK(matrix_csv(g1, cfg) == matrix_csv(g4, cfg));
    CHECK(status_csv(g1, cfg) == status_csv(g4, cfg));
    CHECK(manifest_data(g1, overlays(base, spec.n_axis)) ==
          manifest_data(g4, overlays(base, spec.n_axis)));

    // any single cell recomputed in isolation matches its in-sweep value
    GridSpec one;
    one.n_axis = {1, g1.n_values[2], g1.n_values[2], true};
    one.eta_axis = {1, g1.eta_values_hz[1], g1.eta_values_hz[1], true};
    const auto cell = sweep_photon(one, base, {}).cells[0];
    const auto& in_sweep = g1.at(2, 1);
    CHECK(cell.status == in_sweep.status);
    if (std::isfinite(in_sweep.n_photon)) {
        CHECK(cell.n_photon == in_sweep.n_photon);
    } else {
        CHECK(!std::isfinite(cell.n_photon));
    }
    // and an unconditionally convergent cell for the bit-exact comparison
    GridSpec two;
    two.n_axis = {1, g1.n_values[0], g1.n_values[0], true};
    two.eta_axis = {1, g1.eta_values_hz[0], g1.eta_values_hz[0], true};
    const auto cell2 = sweep_photon(two, base, {}).cells[0];
    CHECK(g1.at(0, 0).status == CellStatus::ok);
    CHECK(cell2.n_photon == g1.at(0, 0).n_photon);
}

TEST_CASE("overlay curves") {
    const auto base = fig2_base();
    AxisSpec ax{4, 1e8, 1e11, true};
    const auto over = overlays(base, ax);
    REQUIRE(over.max_pump_line.size() == 4);
    for (const auto& [n, eta_hz] : over.max_pump_line) {
        CHECK(eta_hz == doctest::Approx(1.96e-2 * n).epsilon(1e-9));
    }
    REQUIRE(over.n_crit.has_value());
    CHECK(*over.n_crit == doctest::Approx(1.0204081632653061e9).epsilon(1e-9));

    auto no_chi = base;
    no_chi.chi = 0.0;
    CHECK(!overlays(no_chi, ax).n_crit.has_value());
}

TEST_CASE("checkpoint resume skips completed cells") {
    namespace fs = std::filesystem;
    const fs::path ckpt = fs::temp_directory_path() / "srl_test_sweep_ckpt.jsonl";
    fs::remove(ckpt);
    // pre-seed cell 0 with a sentinel value; the sweep must keep it
    {
        std::ofstream out(ckpt);
        out << R"({"cell":0,"status":"ok","n_photon":12345.0})" << "\n";
    }
    GridSpec spec;
    spec.n_axis = {2, 1e9, 1e10, true};
    spec.eta_axis = {2, 1e5, 1e6, true};
    SweepOptions opt;
    opt.checkpoint = ckpt;
    const auto grid = sweep_photon(spec, fig2_base(), opt);
    CHECK(grid.cells[0].n_photon == 12345.0);
    CHECK(grid.cells[1].status == CellStatus::ok);
    // a full rerun now reads every cell from the checkpoint
    const auto again = sweep_photon(spec, fig2_base(), opt);
    for (std::size_t k = 0; k < grid.cells.size(); ++k) {
        CHECK(again.cells[k].n_photon == grid.cells[k].n_photon);
    }
    fs::remove(ckpt);
}

TEST_CASE("artifact writers") {
    SUBCASE("sha256 known vector") {
        CHECK(io::sha256_hex("abc") ==
              "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
    SUBCASE("csv embeds config and content hash") {
        const nlohmann::json cfg{{"a", 1}};
        const auto csv = io::finalize_csv(cfg, "x,y\n1,2\n");
        CHECK(csv.find("# config: {\"a\":1}") == 0);
        CHECK(csv.find("# sha256: " + io::sha256_hex("x,y\n1,2\n")) != std::string::npos);
    }
    SUBCASE("heatmap svg renders with overlays") {
        GridSpec spec;
        spec.n_axis = {2, 1e9, 1e10, true};
        spec.eta_axis = {2, 1e5, 1e6, true};
        const auto base = fig2_base();
        const auto grid = sweep_photon(spec, base, {});
        const auto svg = heatmap_svg(grid, overlays(base, spec.n_axis));
        CHECK(svg.find("<svg") == 0);
        CHECK(svg.find("polyline") != std::string::npos);
    }
}
