// Command-line front end: parameter scans with dip fitting, offline re-fits
// of saved scans, and the dispersion feasibility report.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "homsim/homsim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> mode;
    bool allow_long_scan = false;
};

homsim::ExperimentConfig resolve_config(const CommonOptions& opt) {
    homsim::ExperimentConfig cfg;
    if (!opt.config_path.empty())
        cfg = homsim::load_config_file(opt.config_path);
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.mode) cfg.mode = homsim::run_mode_from_string(*opt.mode);
    if (opt.allow_long_scan) cfg.allow_long_scan = true;
    cfg.validate();
    return cfg;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw homsim::config_error("cannot open output file '" + path + "'");
    out << text;
    if (!out)
        throw homsim::config_error("failed writing output file '" + path + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw homsim::config_error("cannot open file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void print_analysis(const homsim::ScanAnalysis& a) {
    const homsim::DipParams& p = a.fit.params;
    std::printf("fit: converged=%s iterations=%d residual_norm=%.6g\n",
                a.fit.converged ? "yes" : "no", a.fit.iterations,
                a.fit.residual_norm);
    std::printf(
        "  baseline = %.6g counts, depth = %.6g counts, center = %.6g mm, "
        "width(e^-1) = %.6g mm\n",
        p.baseline, p.depth, p.center * 1e3, p.width * 1e3);
    std::printf("  fitted dip FWHM = %.6g mm", a.fitted_fwhm_m * 1e3);
    if (a.predicted_fwhm_m > 0.0)
        std::printf(", predicted FWHM = %.6g mm", a.predicted_fwhm_m * 1e3);
    std::printf("\n");
    if (a.visibility_valid) {
        std::printf(
            "  raw visibility = %.4f, net visibility = %.4f "
            "(accidental level %.6g counts)\n",
            a.raw_visibility, a.net_visibility, a.accidental_level);
    } else {
        std::printf("  visibility: n/a (degenerate fit or accidental level)\n");
    }
}

int cmd_scan(const CommonOptions& opt, const std::string& out_path) {
    const homsim::ExperimentConfig cfg = resolve_config(opt);
    const homsim::ScanResult res = homsim::run_scan(cfg);
    write_file(out_path, res.csv_text);
    std::printf("scan: mode=%s seed=%llu points=%d span=+-%.6g mm -> %s\n",
                homsim::to_string(cfg.mode),
                static_cast<unsigned long long>(cfg.seed), cfg.points,
                cfg.scan_halfspan_mm, out_path.c_str());
    print_analysis(res.analysis);
    return res.analysis.fit.converged ? kExitOk : kExitNumerical;
}

int cmd_fit(const std::string& csv_path, const CommonOptions& opt) {
    const homsim::ScanCsv csv = homsim::parse_scan_csv(read_file(csv_path));
    std::optional<homsim::ExperimentConfig> cfg;
    if (!opt.config_path.empty())
        cfg = homsim::load_config_file(opt.config_path);
    else
        cfg = homsim::config_from_echo(csv);
    const homsim::ScanAnalysis a = homsim::analyze_scan_rows(csv.rows, cfg);
    std::printf("fit of %s (%zu points)\n", csv_path.c_str(), csv.rows.size());
    print_analysis(a);
    return a.fit.converged ? kExitOk : kExitNumerical;
}

int cmd_dispersion(const CommonOptions& opt, const std::string& out_path) {
    const homsim::ExperimentConfig cfg = resolve_config(opt);
    const homsim::DispersionReport rep = homsim::build_dispersion_report(cfg);

    std::printf("dispersion analysis\n");
    std::printf("  spectral sigma = %.6g rad/s, coherence time = %.6g ps, "
                "tolerance = %.6g ps\n",
                rep.sigma_omega_rad_s, rep.coherence_time_s * 1e12,
                rep.tolerance_s * 1e12);
    std::printf("  %-12s %-22s %-22s\n", "detuning/sigma",
                "dtau anticorrelated (ps)", "dtau independent (ps)");
    for (const homsim::DispersionBandRow& row : rep.band)
        std::printf("  %-12.2f %-22.6g %-22.6g\n", row.detuning_sigma,
                    row.dtau_anticorrelated_s * 1e12,
                    row.dtau_independent_s * 1e12);
    std::printf("  cancellation (anticorrelated pairs): %s\n",
                rep.cancelled_anticorrelated ? "yes" : "no");
    std::printf("  cancellation (independent photons):  %s\n",
                rep.cancelled_independent ? "yes" : "no");
    std::printf("  pulse broadening: arm A %.6g ps, arm B %.6g ps\n",
                rep.broadening_a_s * 1e12, rep.broadening_b_s * 1e12);
    if (std::isfinite(rep.max_link_km))
        std::printf("  max link length: %.6g km\n", rep.max_link_km);
    else
        std::printf("  max link length: unbounded\n");
    std::printf("  thermal drift: arm A %.6g mm/K, arm B %.6g mm/K\n",
                rep.thermal_drift_a_m_per_K * 1e3,
                rep.thermal_drift_b_m_per_K * 1e3);
    std::printf("  fringe-resolving stability: arm A %.6g K, arm B %.6g K\n",
                rep.fringe_stability_a_K, rep.fringe_stability_b_K);

    if (!out_path.empty()) {
        std::string text = "detuning_sigma,dtau_anticorrelated_ps,dtau_independent_ps\n";
        for (const homsim::DispersionBandRow& row : rep.band) {
            text += homsim::format_sig9(row.detuning_sigma) + "," +
                    homsim::format_sig9(row.dtau_anticorrelated_s * 1e12) + "," +
                    homsim::format_sig9(row.dtau_independent_s * 1e12) + "\n";
        }
        write_file(out_path, text);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-photon interference simulator for a long fiber "
                 "Mach-Zehnder interferometer"};
    app.require_subcommand(1);

    CommonOptions scan_opt;
    std::string scan_out = "scan.csv";
    CLI::App* scan = app.add_subcommand(
        "scan", "Simulate a delay scan, write CSV, fit the dip");
    scan->add_option("--config", scan_opt.config_path, "Config file path");
    scan->add_option("--seed", scan_opt.seed, "Random seed (overrides config)");
    scan->add_option("--out", scan_out, "Output CSV path");
    scan->add_option("--mode", scan_opt.mode,
                     "Run mode: envelope|fringes|theory");
    scan->add_flag("--allow-long-scan", scan_opt.allow_long_scan,
                   "Permit scans beyond the 11 mm delay-line range");

    std::string fit_csv;
    CommonOptions fit_opt;
    CLI::App* fit = app.add_subcommand("fit", "Re-fit a saved scan CSV");
    fit->add_option("csv", fit_csv, "Scan CSV file")->required();
    fit->add_option("--config", fit_opt.config_path,
                    "Config file (defaults to the CSV's embedded echo)");

    CommonOptions disp_opt;
    std::string disp_out;
    CLI::App* disp = app.add_subcommand(
        "dispersion", "Delay-difference, cancellation and stability report");
    disp->add_option("--config", disp_opt.config_path, "Config file path");
    disp->add_option("--out", disp_out, "Optional CSV path for the band table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (scan->parsed()) return cmd_scan(scan_opt, scan_out);
        if (fit->parsed()) return cmd_fit(fit_csv, fit_opt);
        if (disp->parsed()) return cmd_dispersion(disp_opt, disp_out);
    } catch (const homsim::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const homsim::csv_error& e) {
        std::cerr << "csv error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const homsim::invalid_parameter& e) {
        std::cerr << "invalid parameter: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}
