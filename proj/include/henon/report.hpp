#pragma once

#include "henon/morse.hpp"
#include "henon/radial_ode.hpp"
#include "henon/spectral.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace henon::report {

using Json = nlohmann::ordered_json;

struct SpectralSettings {
    int grid = 4096;
    std::optional<double> x_max;
    double x_max_cap = 60.0;
    double decay_target = 30.0;
    double margin = 1e-6;
    double tol = 1e-3;
    double node_tol = 1e-8;
    double standard_grading = 2.0;

    bool operator==(const SpectralSettings&) const = default;
};

struct SweepSettings {
    std::string axis = "p";
    double from = 2.0;
    double to = 4.9;
    int steps = 8;

    bool operator==(const SweepSettings&) const = default;
};

struct OracleSettings {
    int n = 4000;
    double tol = 1e-4;

    bool operator==(const OracleSettings&) const = default;
};

/// Everything a run needs. Precedence: built-in defaults, then the JSON file,
/// then command-line flags.
struct RunConfig {
    int N = 3;
    double alpha = 0.0;
    double p = 3.0;
    int m = 2;
    int k = 4;
    int profile_points = 2048;
    SpectralSettings spectral;
    /// Replace the linearized potential by a = 0.
    bool zero_potential = false;
    bool eigenfunctions = false;
    bool use_cache = true;
    std::string symmetry = "trivial";
    std::string out = "out";
    int workers = 4;
    SweepSettings sweep;
    OracleSettings oracle;

    bool operator==(const RunConfig&) const = default;
};

Json to_json(const RunConfig& cfg);
/// Rejects unknown keys and wrong types with ConfigError naming the field.
RunConfig config_from_json(const Json& j);
RunConfig load_config(const std::filesystem::path& path);
/// Domain checks; throws ConfigError naming the offending field.
void validate(const RunConfig& cfg);

/// JSON text with every double at 17 significant digits; NaN and inf become null.
std::string dump(const Json& j, int indent = 2);
/// %.17g, or "nan"/"inf" spelled out for CSV.
std::string format_double(double x);

std::uint64_t fnv1a(const std::string& text);
std::string hex64(std::uint64_t v);

/// Part of the configuration the spectrum stage depends on, and its hash.
Json spectrum_stage_json(const RunConfig& cfg);
std::string spectrum_cache_key(const RunConfig& cfg);

spectral::SpectralConfig spectral_config(const RunConfig& cfg);

struct SpectrumBundle {
    spectral::Spectrum singular;
    spectral::Spectrum standard;
    bool from_cache = false;
};

/// Emden-variable power profile with unit coupling; its potential p|v|^{p-1}
/// equals c f'(v) for the profile with coupling c.
radial::RadialProfile emden_profile(const RunConfig& cfg);
spectral::WeightedSLProblem linearized_problem(const RunConfig& cfg, const radial::RadialProfile& emden,
                                               spectral::Kind kind);

/// Singular and standard spectra, read from or written to out/cache when
/// cfg.use_cache is set and no eigenfunctions are requested.
SpectrumBundle compute_spectra(const RunConfig& cfg);

Json spectrum_json(const spectral::Spectrum& s, const dimension::DimensionMap& map);
spectral::Spectrum spectrum_from_json(const Json& j);

Json morse_json(const morse::MorseReport& rep);
std::string morse_csv(const morse::MorseReport& rep);

/// Morse report with degeneracy scan, bounds and prediction filled in.
morse::MorseReport full_morse_report(const RunConfig& cfg, const SpectrumBundle& spectra);

struct SweepRow {
    double param = 0.0;
    std::vector<double> nu;
    long long total = 0;
    long long bound_general = 0;
    long long bound_f3 = 0;
    int radial_morse = 0;
    double M = 0.0;
    std::string status = "ok";
};

std::vector<double> sweep_points(const SweepSettings& s);
/// One row per point in input order, computed by up to cfg.workers threads.
std::vector<SweepRow> run_sweep(const RunConfig& cfg);
std::string sweep_csv(const std::vector<SweepRow>& rows, int k);

struct OracleRow {
    int index = 0;
    double liouville = 0.0;
    double oracle = 0.0;
    double rel_diff = 0.0;
    double error_bars = 0.0;
    bool mismatch = false;
    /// The Liouville fine/coarse disagreement exceeds spectral.tol.
    bool grid_check_failed = false;
};

struct OracleComparison {
    std::vector<OracleRow> rows;
    int liouville_count = 0;
    int oracle_count = 0;
    double epsilon_cut = 0.0;
    bool mismatch = false;
};

/// Liouville solve against the dense r-grid solve. A row mismatches only when
/// the relative difference exceeds tol and the absolute one exceeds three
/// times the combined error bars.
OracleComparison compare_with_oracle(const RunConfig& cfg);

int cmd_solve(const RunConfig& cfg);
int cmd_spectrum(const RunConfig& cfg);
int cmd_morse(const RunConfig& cfg);
int cmd_sweep(const RunConfig& cfg);
int cmd_oracle(const RunConfig& cfg);

} // namespace henon::report
