#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "backflow/csv_io.hpp"
#include "backflow/report.hpp"
#include "backflow/scenario.hpp"
#include "backflow/svg_plot.hpp"
#include "backflow/text_format.hpp"
#include "backflow/validate.hpp"

using namespace backflow;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("config parsing") {
    SUBCASE("comments, blank lines, whitespace") {
        const Config cfg = Config::from_string(
            "# comment\n"
            "  species = 7Li   # trailing comment\n"
            "\n"
            "omega_x=6.283185307179586\n"
            "shift_d = 80e-6\n"
            "expansion_time_t = 1.0\n"
            "alpha = 3\n");
        const Scenario s = Scenario::from_config(cfg);
        CHECK(s.params.atom_mass == doctest::Approx(7.0 * constants::atomic_mass_unit));
        CHECK(s.alpha == 3.0);
        CHECK(s.a2_from_alpha);  // no bragg_a2 given -> optimal
        CHECK(s.bragg_a2 == doctest::Approx(0.492699).epsilon(1e-5));
    }
    SUBCASE("unknown key is rejected with the key list") {
        Config cfg;
        CHECK_THROWS_WITH_AS(cfg.set("not_a_key", "1"), doctest::Contains("unknown key"),
                             std::invalid_argument);
    }
    SUBCASE("non-numeric value is rejected") {
        Config cfg;
        cfg.set("species", "7Li");
        cfg.set("omega_x", "fast");
        cfg.set("shift_d", "80e-6");
        cfg.set("expansion_time_t", "1");
        cfg.set("alpha", "3");
        CHECK_THROWS_WITH_AS(Scenario::from_config(cfg), doctest::Contains("omega_x"),
                             std::invalid_argument);
    }
    SUBCASE("missing required keys") {
        Config cfg;
        cfg.set("species", "7Li");
        CHECK_THROWS_WITH_AS(Scenario::from_config(cfg), doctest::Contains("required"),
                             std::invalid_argument);
    }
    SUBCASE("alpha and bragg_q are mutually exclusive") {
        Config cfg = Config::from_string(
            "species = 7Li\nomega_x = 6.283\nshift_d = 80e-6\nexpansion_time_t = 1\n"
            "alpha = 3\nbragg_q = 1e5\n");
        CHECK_THROWS_WITH_AS(Scenario::from_config(cfg), doctest::Contains("not both"),
                             std::invalid_argument);
    }
    SUBCASE("bragg_q resolves to alpha = q/k1") {
        Config cfg = Config::from_string(
            "species = 7Li\nomega_x = 6.283185307179586\nshift_d = 80e-6\n"
            "expansion_time_t = 1\nbragg_q = 166211.8899\n");
        const Scenario s = Scenario::from_config(cfg);
        CHECK(s.alpha == doctest::Approx(3.0).epsilon(1e-6));
    }
    SUBCASE("override wins over the file value") {
        Config cfg = Config::from_string(
            "species = 7Li\nomega_x = 6.283\nshift_d = 80e-6\nexpansion_time_t = 1\n"
            "alpha = 3\n");
        cfg.set("alpha=4.5");
        CHECK(Scenario::from_config(cfg).alpha == 4.5);
    }
    SUBCASE("malformed line is an error") {
        CHECK_THROWS_WITH_AS(Config::from_string("species 7Li\n"),
                             doctest::Contains("key = value"), std::invalid_argument);
    }
}

TEST_CASE("bundled li7.cfg matches the built-in example scenario") {
    const fs::path cfg_path = fs::path(BACKFLOW_DATA_DIR) / "li7.cfg";
    REQUIRE(fs::exists(cfg_path));
    const Scenario from_file = Scenario::from_config(Config::load(cfg_path));
    const Scenario builtin = Scenario::li7_example();
    CHECK(from_file.params.atom_mass == builtin.params.atom_mass);
    CHECK(from_file.params.omega_x == builtin.params.omega_x);
    CHECK(from_file.params.shift_d == builtin.params.shift_d);
    CHECK(from_file.params.expansion_time_t == builtin.params.expansion_time_t);
    CHECK(from_file.params.sigma_r == builtin.params.sigma_r);
    CHECK(from_file.alpha == builtin.alpha);
    CHECK(from_file.bragg_a2 == builtin.bragg_a2);
    CHECK(from_file.bragg_phase == builtin.bragg_phase);
}

TEST_CASE("number formatting is 17 significant digits, scientific") {
    CHECK(format_g17(1.0) == "1.0000000000000000e+00");
    CHECK(format_g17(-0.5) == "-5.0000000000000000e-01");
    CHECK(format_g17(37.802261e-6) == "3.7802261000000002e-05");  // exact f64 value
    CHECK(format_g17(0.125) == "1.2500000000000000e-01");
}

TEST_CASE("profile CSV: schema, determinism, empty undefined threshold") {
    FieldProfile p;
    p.x = {0.0, 1.0};
    p.rho = {0.5, 0.25};
    p.current = {0.1, -0.2};
    p.rho_crit = {0.3, std::numeric_limits<double>::quiet_NaN()};
    p.eta = {0.5, -0.5};
    p.regime = {RegimeTag::QuantumWindow, RegimeTag::ClassicalRegion};

    ExperimentParams params;
    params.atom_mass = 7.0 * constants::atomic_mass_unit;
    params.omega_x = 2.0 * constants::pi;
    params.omega_perp = 200.0 * constants::pi;
    params.shift_d = 80e-6;
    params.expansion_time_t = 1.0;
    const DerivedScales scales = derive_scales(params);

    const fs::path a = fs::temp_directory_path() / "backflow_profile_a.csv";
    const fs::path b = fs::temp_directory_path() / "backflow_profile_b.csv";
    write_profile_csv(a, p, scales);
    write_profile_csv(b, p, scales);
    const std::string text = slurp(a);
    CHECK(text == slurp(b));  // byte identical
    CHECK(text.find("x_m,rho_per_m,J_per_s,rho_crit_per_m,eta,regime\n") == 0);
    CHECK(text.find(",,") != std::string::npos);  // empty rho_crit field
    CHECK(text.find("ClassicalRegion") != std::string::npos);
    CHECK(text.find("\r") == std::string::npos);
    fs::remove(a);
    fs::remove(b);
}

TEST_CASE("design and detectability CSV schemas") {
    const fs::path d = fs::temp_directory_path() / "backflow_design.csv";
    write_design_sweep_csv(d, {{3.0, 0.4927, -0.415, 0.2428, 1.2, 2.1, 1.05, 6.3}});
    const std::string dt = slurp(d);
    CHECK(dt.find("alpha,a2_opt,f_min,population_transfer") == 0);
    fs::remove(d);

    const fs::path i = fs::temp_directory_path() / "backflow_detect.csv";
    write_detectability_csv(i, {{3e-6, 0.83, 0.17, 0.168, false}});
    const std::string it = slurp(i);
    CHECK(it.find("sigma_r_m,zeta,observed_min_norm,critical_norm,detectable") == 0);
    CHECK(it.find(",0\n") != std::string::npos);
    fs::remove(i);
}

TEST_CASE("svg plot writes a well-formed self-contained file") {
    SvgPlot plot;
    plot.title = "test";
    plot.x_label = "x";
    plot.y_label = "y";
    plot.show_zero_line = true;
    SvgSeries s;
    for (int i = 0; i <= 100; ++i) {
        s.x.push_back(0.1 * i);
        s.y.push_back(std::sin(0.5 * i));
    }
    s.label = "sin";
    plot.series.push_back(s);
    plot.bands.push_back({2.0, 3.0, "#d62728", 0.2});
    plot.markers.push_back({5.0, 0.0, "#2ca02c", 3.0});

    const fs::path p = fs::temp_directory_path() / "backflow_plot.svg";
    plot.write(p);
    const std::string text = slurp(p);
    CHECK(text.rfind("<svg", 0) == 0);
    CHECK(text.find("<polyline") != std::string::npos);
    CHECK(text.find("</svg>") != std::string::npos);
    CHECK(text.find("href") == std::string::npos);  // self-contained
    fs::remove(p);
}

TEST_CASE("identical scenario files yield byte-identical profile CSV") {
    const fs::path cfg_path = fs::path(BACKFLOW_DATA_DIR) / "li7.cfg";
    auto render = [&](const fs::path& out) {
        const Scenario s = Scenario::from_config(Config::load(cfg_path));
        const FieldProfile fp = profile(s.packet(), s.bragg(),
                                        ProfileGrid{s.grid.n_points, s.grid.half_widths,
                                                    s.grid.auto_refine, std::nullopt,
                                                    std::nullopt});
        write_profile_csv(out, fp, s.scales);
    };
    const fs::path a = fs::temp_directory_path() / "backflow_det_a.csv";
    const fs::path b = fs::temp_directory_path() / "backflow_det_b.csv";
    render(a);
    render(b);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a).size() > 100000);  // full-resolution profile, not a stub
    fs::remove(a);
    fs::remove(b);
}

TEST_CASE("A2 = 0 report states there are no backflow windows") {
    Config cfg = Config::from_string(
        "species = 7Li\nomega_x = 6.283185307179586\nshift_d = 80e-6\n"
        "expansion_time_t = 1.0\nsigma_r = 3e-6\nalpha = 3.0\nbragg_a2 = 0\n");
    const Scenario s = Scenario::from_config(cfg);
    const FieldProfile fp = profile(s.packet(), s.bragg());
    const ProfileSummary summary = summarize_profile(s, fp);
    const std::string text = render_simulate_report(
        s, summary,
        design_report(s.design_input(), s.expansion_natural(), s.sigma_r_natural()),
        assess_detectability(s.bragg(), s.alpha, s.sigma_r_natural()), std::nullopt);
    CHECK(text.find("no backflow windows") != std::string::npos);
}

TEST_CASE("spectral derivative of a lattice sinusoid") {
    const int n = 256;
    const double length = 20.0;
    const double k = 2.0 * constants::pi / length * 9.0;
    std::vector<double> f(n);
    for (int i = 0; i < n; ++i) f[i] = std::sin(k * (length * i / n));
    const auto df = spectral_derivative(f, length);
    for (int i = 0; i < n; ++i) {
        CHECK(df[i] == doctest::Approx(k * std::cos(k * (length * i / n))).epsilon(1e-10));
    }
}

TEST_CASE("snapshot CSV has the documented schema") {
    oracle::GridSpec grid{256, -8.0, 8.0};
    std::vector<std::complex<double>> psi(256);
    const auto x = grid.coordinates();
    for (int i = 0; i < 256; ++i) {
        psi[i] = std::exp(-0.5 * x[i] * x[i]);
    }
    oracle::Simulation sim(grid, std::move(psi), 0.0);

    ExperimentParams params;
    params.atom_mass = 7.0 * constants::atomic_mass_unit;
    params.omega_x = 2.0 * constants::pi;
    params.omega_perp = 200.0 * constants::pi;
    params.shift_d = 80e-6;
    params.expansion_time_t = 1.0;

    const fs::path p = fs::temp_directory_path() / "backflow_snapshot.csv";
    write_snapshot_csv(p, sim, derive_scales(params));
    const std::string text = slurp(p);
    CHECK(text.find("x_m,re_psi,im_psi,rho_per_m,J_per_s\n") == 0);
    fs::remove(p);
}
