#include "henon/report.hpp"

#include "henon/error.hpp"
#include "henon/henon_map.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

namespace henon::report {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ------------------------------------------------------------ config parsing

class Reader {
public:
    Reader(const Json& obj, std::string prefix) : obj_(obj), prefix_(std::move(prefix))
    {
        if (!obj_.is_object()) throw ConfigError("config: '" + where() + "' must be an object");
    }

    void done() const
    {
        for (auto it = obj_.begin(); it != obj_.end(); ++it)
            if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end())
                throw ConfigError("config: unknown field '" + name(it.key()) + "'");
    }

    void number(const char* key, double& out)
    {
        if (const Json* v = find(key)) {
            if (!v->is_number()) throw ConfigError("config: field '" + name(key) + "' must be a number");
            out = v->get<double>();
        }
    }

    void optional_number(const char* key, std::optional<double>& out)
    {
        if (const Json* v = find(key)) {
            if (v->is_null()) {
                out.reset();
                return;
            }
            if (!v->is_number())
                throw ConfigError("config: field '" + name(key) + "' must be a number or null");
            out = v->get<double>();
        }
    }

    void integer(const char* key, int& out)
    {
        if (const Json* v = find(key)) {
            if (!v->is_number_integer())
                throw ConfigError("config: field '" + name(key) + "' must be an integer");
            const auto x = v->get<long long>();
            if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
                throw ConfigError("config: field '" + name(key) + "' is out of range");
            out = static_cast<int>(x);
        }
    }

    void boolean(const char* key, bool& out)
    {
        if (const Json* v = find(key)) {
            if (!v->is_boolean()) throw ConfigError("config: field '" + name(key) + "' must be true or false");
            out = v->get<bool>();
        }
    }

    void string(const char* key, std::string& out)
    {
        if (const Json* v = find(key)) {
            if (!v->is_string()) throw ConfigError("config: field '" + name(key) + "' must be a string");
            out = v->get<std::string>();
        }
    }

    const Json* find(const char* key)
    {
        seen_.emplace_back(key);
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    std::string name(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

private:
    std::string where() const { return prefix_.empty() ? "<root>" : prefix_; }

    const Json& obj_;
    std::string prefix_;
    std::vector<std::string> seen_;
};

void check(bool ok, const std::string& field, const std::string& what)
{
    if (!ok) throw ConfigError("config: field '" + field + "' " + what);
}

// ------------------------------------------------------------ JSON output

void write_json(std::ostream& os, const Json& j, int indent, int depth)
{
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(indent * depth), ' ');
    const char* nl = indent > 0 ? "\n" : "";
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            os << "{}";
            return;
        }
        os << '{' << nl;
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) os << ',' << nl;
            first = false;
            os << pad << Json(it.key()).dump() << (indent > 0 ? ": " : ":");
            write_json(os, it.value(), indent, depth + 1);
        }
        os << nl << close << '}';
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            os << "[]";
            return;
        }
        // numbers stay on one line
        const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
        os << '[' << (flat ? "" : nl);
        bool first = true;
        for (const auto& e : j) {
            if (!first) os << (flat ? ", " : std::string(",") + nl);
            first = false;
            if (!flat) os << pad;
            write_json(os, e, indent, depth + 1);
        }
        os << (flat ? "" : nl) << (flat ? "" : close) << ']';
        return;
    }
    case Json::value_t::number_float: {
        const double x = j.get<double>();
        if (!std::isfinite(x)) {
            os << "null";
            return;
        }
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        std::string s(buf);
        // keep it a float on re-read
        if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
        os << s;
        return;
    }
    default:
        os << j.dump();
    }
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path.string());
    f << text;
    if (!f) throw Error("write failed for " + path.string());
}

std::string read_text(const fs::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot read " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

double num(const Json& j)
{
    return j.is_null() ? kNaN : j.get<double>();
}

Json map_json(const dimension::DimensionMap& map)
{
    return Json{{"N", map.N}, {"alpha", map.alpha}, {"M", map.M}, {"c", map.c}, {"exponent", map.exponent}};
}

Json vec_json(const std::vector<double>& v)
{
    Json a = Json::array();
    for (double x : v) a.push_back(x);
    return a;
}

void write_curve(const fs::path& path, const char* header, const std::vector<double>& x,
                 const std::vector<double>& y, const std::vector<double>* dy = nullptr)
{
    std::string out = std::string(header) + "\n";
    for (std::size_t i = 0; i < x.size(); ++i) {
        out += format_double(x[i]) + "," + format_double(y[i]);
        if (dy) out += "," + format_double((*dy)[i]);
        out += "\n";
    }
    write_text(path, out);
}

fs::path prepare_out(const RunConfig& cfg)
{
    fs::path out(cfg.out);
    fs::create_directories(out);
    return out;
}

int negative_count(const spectral::Spectrum& s, double zero_tol = 1e-7)
{
    int n = 0;
    for (const auto& p : s.pairs)
        if (p.value < -zero_tol) ++n;
    return n;
}

} // namespace

// ---------------------------------------------------------------- config

Json to_json(const RunConfig& c)
{
    Json j;
    j["N"] = c.N;
    j["alpha"] = c.alpha;
    j["p"] = c.p;
    j["m"] = c.m;
    j["k"] = c.k;
    j["profile_points"] = c.profile_points;
    j["spectral"] = Json{{"grid", c.spectral.grid},
                         {"x_max", c.spectral.x_max ? Json(*c.spectral.x_max) : Json(nullptr)},
                         {"x_max_cap", c.spectral.x_max_cap},
                         {"decay_target", c.spectral.decay_target},
                         {"margin", c.spectral.margin},
                         {"tol", c.spectral.tol},
                         {"node_tol", c.spectral.node_tol},
                         {"standard_grading", c.spectral.standard_grading}};
    j["zero_potential"] = c.zero_potential;
    j["eigenfunctions"] = c.eigenfunctions;
    j["use_cache"] = c.use_cache;
    j["symmetry"] = c.symmetry;
    j["out"] = c.out;
    j["workers"] = c.workers;
    j["sweep"] = Json{{"axis", c.sweep.axis}, {"from", c.sweep.from}, {"to", c.sweep.to}, {"steps", c.sweep.steps}};
    j["oracle"] = Json{{"n", c.oracle.n}, {"tol", c.oracle.tol}};
    return j;
}

RunConfig config_from_json(const Json& j)
{
    RunConfig c;
    Reader r(j, "");
    r.integer("N", c.N);
    r.number("alpha", c.alpha);
    r.number("p", c.p);
    r.integer("m", c.m);
    r.integer("k", c.k);
    r.integer("profile_points", c.profile_points);
    if (const Json* s = r.find("spectral")) {
        Reader rs(*s, "spectral");
        rs.integer("grid", c.spectral.grid);
        rs.optional_number("x_max", c.spectral.x_max);
        rs.number("x_max_cap", c.spectral.x_max_cap);
        rs.number("decay_target", c.spectral.decay_target);
        rs.number("margin", c.spectral.margin);
        rs.number("tol", c.spectral.tol);
        rs.number("node_tol", c.spectral.node_tol);
        rs.number("standard_grading", c.spectral.standard_grading);
        rs.done();
    }
    r.boolean("zero_potential", c.zero_potential);
    r.boolean("eigenfunctions", c.eigenfunctions);
    r.boolean("use_cache", c.use_cache);
    r.string("symmetry", c.symmetry);
    r.string("out", c.out);
    r.integer("workers", c.workers);
    if (const Json* s = r.find("sweep")) {
        Reader rs(*s, "sweep");
        rs.string("axis", c.sweep.axis);
        rs.number("from", c.sweep.from);
        rs.number("to", c.sweep.to);
        rs.integer("steps", c.sweep.steps);
        rs.done();
    }
    if (const Json* s = r.find("oracle")) {
        Reader rs(*s, "oracle");
        rs.integer("n", c.oracle.n);
        rs.number("tol", c.oracle.tol);
        rs.done();
    }
    r.done();
    return c;
}

RunConfig load_config(const fs::path& path)
{
    const std::string text = read_text(path);
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError("config: " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

void validate(const RunConfig& c)
{
    check(c.N >= 2, "N", "must be >= 2");
    check(std::isfinite(c.alpha) && c.alpha >= 0.0, "alpha", "must be finite and >= 0");
    check(std::isfinite(c.p) && c.p > 1.0, "p", "must be finite and > 1");
    check(c.m >= 1, "m", "must be >= 1");
    check(c.k >= 1 && c.k <= 256, "k", "must lie in [1, 256]");
    check(c.profile_points >= 16, "profile_points", "must be >= 16");
    check(c.spectral.grid >= 16 && c.spectral.grid % 2 == 0 && c.spectral.grid <= (1 << 22), "spectral.grid",
          "must be even and in [16, 4194304]");
    if (c.spectral.x_max)
        check(std::isfinite(*c.spectral.x_max) && *c.spectral.x_max > 0.0, "spectral.x_max", "must be > 0");
    check(c.spectral.x_max_cap > 0.0, "spectral.x_max_cap", "must be > 0");
    check(c.spectral.decay_target > 0.0, "spectral.decay_target", "must be > 0");
    check(c.spectral.margin > 0.0, "spectral.margin", "must be > 0");
    check(c.spectral.tol > 0.0, "spectral.tol", "must be > 0");
    check(c.spectral.node_tol >= 0.0, "spectral.node_tol", "must be >= 0");
    check(c.spectral.standard_grading >= 1.0, "spectral.standard_grading", "must be >= 1");
    check(!c.out.empty(), "out", "must not be empty");
    check(c.workers >= 1 && c.workers <= 256, "workers", "must lie in [1, 256]");
    check(c.sweep.axis == "p" || c.sweep.axis == "alpha", "sweep.axis", "must be \"p\" or \"alpha\"");
    check(c.sweep.steps >= 0, "sweep.steps", "must be >= 0");
    check(std::isfinite(c.sweep.from) && std::isfinite(c.sweep.to), "sweep.from", "and sweep.to must be finite");
    check(c.oracle.n >= 16 && c.oracle.n % 2 == 0, "oracle.n", "must be even and >= 16");
    check(c.oracle.n <= 4000, "oracle.n", "exceeds the dense-solve guard of 4000");
    check(c.oracle.tol > 0.0, "oracle.tol", "must be > 0");
    try {
        morse::SymmetryMultiplicity::from_label(c.symmetry, c.N, 1);
    } catch (const PreconditionError& e) {
        throw ConfigError(std::string("config: field 'symmetry': ") + e.what());
    }
}

// ---------------------------------------------------------------- output helpers

std::string dump(const Json& j, int indent)
{
    std::ostringstream os;
    write_json(os, j, indent, 0);
    os << '\n';
    return os.str();
}

std::string format_double(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::uint64_t fnv1a(const std::string& text)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

Json spectrum_stage_json(const RunConfig& c)
{
    Json j = to_json(c);
    Json stage;
    for (const char* key : {"N", "alpha", "p", "m", "k", "profile_points", "spectral", "zero_potential"})
        stage[key] = j[key];
    return stage;
}

std::string spectrum_cache_key(const RunConfig& cfg)
{
    return hex64(fnv1a(dump(spectrum_stage_json(cfg), 0)));
}

spectral::SpectralConfig spectral_config(const RunConfig& c)
{
    spectral::SpectralConfig s;
    s.grid = c.spectral.grid;
    s.x_max = c.spectral.x_max;
    s.x_max_cap = c.spectral.x_max_cap;
    s.decay_target = c.spectral.decay_target;
    s.margin = c.spectral.margin;
    s.tol = c.spectral.tol;
    s.node_tol = c.spectral.node_tol;
    s.standard_grading = c.spectral.standard_grading;
    return s;
}

// ---------------------------------------------------------------- spectra

radial::RadialProfile emden_profile(const RunConfig& cfg)
{
    const auto map = dimension::generalized_dimension(cfg.N, cfg.alpha);
    radial::ProfileOptions opts;
    opts.grid_points = cfg.profile_points;
    return radial::solve_nodal_power(map.M, cfg.p, cfg.m, opts);
}

spectral::WeightedSLProblem linearized_problem(const RunConfig& cfg, const radial::RadialProfile& emden,
                                               spectral::Kind kind)
{
    const auto map = dimension::generalized_dimension(cfg.N, cfg.alpha);
    spectral::WeightedSLProblem prob;
    prob.M = map.M;
    prob.kind = kind;
    prob.a = cfg.zero_potential ? spectral::Potential::zero() : spectral::linearized_potential(emden);
    return prob;
}

Json spectrum_json(const spectral::Spectrum& s, const dimension::DimensionMap& map)
{
    Json j;
    j["kind"] = s.kind == spectral::Kind::Singular ? "singular" : "standard";
    j["M"] = s.M;
    j["threshold"] = s.threshold;
    j["x_max"] = s.x_max;
    j["grid"] = s.grid;
    j["exhausted_below"] = s.exhausted_below;
    j["near_threshold"] = s.near_threshold;
    j["potential_extent"] = s.potential_extent;
    j["negative_count"] = negative_count(s);
    Json pairs = Json::array();
    for (std::size_t i = 0; i < s.pairs.size(); ++i) {
        const auto& p = s.pairs[i];
        Json e;
        e["index"] = i + 1;
        e["value"] = p.value;
        e["error_bar"] = p.error_bar;
        e["grid_value"] = p.grid_value;
        e["interior_nodes"] = p.interior_nodes;
        e["boundary_slope"] = p.boundary_slope;
        if (s.kind == spectral::Kind::Singular) {
            e["decay_exponent"] = p.decay_exponent;
            e["theta_analytic"] = p.theta_analytic;
            e["Lambda_hat"] = p.value < s.threshold ? dimension::eigenvalue_pullback(p.value, map) : kNaN;
        }
        pairs.push_back(std::move(e));
    }
    j["pairs"] = std::move(pairs);
    Json w = Json::array();
    for (const auto& s2 : s.warnings) w.push_back(s2);
    j["warnings"] = std::move(w);
    return j;
}

spectral::Spectrum spectrum_from_json(const Json& j)
{
    spectral::Spectrum s;
    s.kind = j.at("kind") == "singular" ? spectral::Kind::Singular : spectral::Kind::Standard;
    s.M = num(j.at("M"));
    s.threshold = j.at("threshold").is_null() ? std::numeric_limits<double>::infinity() : num(j.at("threshold"));
    s.x_max = num(j.at("x_max"));
    s.grid = j.at("grid").get<int>();
    s.exhausted_below = j.at("exhausted_below").is_null() ? std::numeric_limits<double>::infinity()
                                                          : num(j.at("exhausted_below"));
    s.near_threshold = j.at("near_threshold").get<bool>();
    s.potential_extent = num(j.at("potential_extent"));
    for (const auto& e : j.at("pairs")) {
        spectral::EigenPair p;
        p.value = num(e.at("value"));
        p.error_bar = num(e.at("error_bar"));
        p.grid_value = num(e.at("grid_value"));
        p.interior_nodes = e.at("interior_nodes").get<int>();
        p.boundary_slope = num(e.at("boundary_slope"));
        if (s.kind == spectral::Kind::Singular) {
            p.decay_exponent = num(e.at("decay_exponent"));
            p.theta_analytic = num(e.at("theta_analytic"));
        }
        s.pairs.push_back(std::move(p));
    }
    for (const auto& w : j.at("warnings")) s.warnings.push_back(w.get<std::string>());
    return s;
}

SpectrumBundle compute_spectra(const RunConfig& cfg)
{
    const auto map = dimension::generalized_dimension(cfg.N, cfg.alpha);
    const Json stage = spectrum_stage_json(cfg);
    const fs::path cache_file = fs::path(cfg.out) / "cache" / ("spectrum-" + spectrum_cache_key(cfg) + ".json");

    if (cfg.use_cache && !cfg.eigenfunctions && fs::exists(cache_file)) {
        try {
            const Json j = Json::parse(read_text(cache_file));
            // a hash collision must not hand back someone else's spectrum
            if (dump(j.at("stage"), 0) == dump(stage, 0)) {
                SpectrumBundle b;
                b.singular = spectrum_from_json(j.at("singular"));
                b.standard = spectrum_from_json(j.at("standard"));
                b.from_cache = true;
                return b;
            }
        } catch (const std::exception& e) {
            std::cerr << "warning: ignoring unreadable cache file " << cache_file << ": " << e.what() << '\n';
        }
    }

    radial::RadialProfile emden;
    if (!cfg.zero_potential) emden = emden_profile(cfg);
    auto scfg = spectral_config(cfg);
    scfg.eigenfunctions = true;

    SpectrumBundle b;
    b.singular = spectral::solve_singular_spectrum(linearized_problem(cfg, emden, spectral::Kind::Singular), cfg.k, scfg);
    b.standard = spectral::solve_standard_spectrum(linearized_problem(cfg, emden, spectral::Kind::Standard), cfg.k, scfg);

    if (cfg.use_cache) {
        fs::create_directories(cache_file.parent_path());
        Json j;
        j["stage"] = stage;
        j["singular"] = spectrum_json(b.singular, map);
        j["standard"] = spectrum_json(b.standard, map);
        // write then rename so parallel sweeps never see half a file
        const auto tid = std::hash<std::thread::id>{}(std::this_thread::get_id());
        const fs::path tmp = cache_file.string() + ".tmp" + hex64(tid);
        write_text(tmp, dump(j));
        fs::rename(tmp, cache_file);
    }
    return b;
}

// ---------------------------------------------------------------- morse

morse::MorseReport full_morse_report(const RunConfig& cfg, const SpectrumBundle& spectra)
{
    const auto map = dimension::generalized_dimension(cfg.N, cfg.alpha);
    morse::MorseReport rep = morse::morse_index(spectra.singular, map);
    rep.degeneracy = morse::degeneracy_scan(spectra.singular, spectra.standard, map);
    // |u|^{p-1} u satisfies the third-derivative hypothesis of the sharper bound
    rep.bounds = morse::lower_bound(cfg.N, cfg.alpha, cfg.m, true);
    if (cfg.N >= 3 || cfg.m == 2) {
        try {
            const auto pred = morse::asymptotic_prediction(cfg.N, cfg.alpha, cfg.m);
            rep.prediction = pred.value;
            if (pred.near_even)
                rep.warnings.emplace_back("alpha is within 1e-6 of an even integer; prediction branch is fragile");
        } catch (const PreconditionError& e) {
            rep.warnings.emplace_back(std::string("no prediction: ") + e.what());
        }
    }
    if (rep.degeneracy.radially_degenerate)
        rep.warnings.emplace_back("radially degenerate: eigenvalue " +
                                  std::to_string(rep.degeneracy.offending_index) + " is numerically zero");
    for (const auto& h : rep.degeneracy.nonradial_hits)
        rep.warnings.emplace_back("eigenvalue " + std::to_string(h.k) + " sits on the degeneracy level of j = " +
                                  std::to_string(h.j) + " (residual " + format_double(h.residual) + ")");
    return rep;
}

Json morse_json(const morse::MorseReport& rep)
{
    Json j;
    j["map"] = map_json(rep.map);
    j["radial_morse"] = rep.radial_morse;
    j["total"] = rep.total;
    j["integer_J_collision"] = rep.integer_J_collision;
    Json per = Json::array();
    for (std::size_t i = 0; i < rep.per_eigenvalue.size(); ++i) {
        const auto& c = rep.per_eigenvalue[i];
        Json e;
        e["i"] = i + 1;
        e["nu_hat"] = c.nu_hat;
        e["Lambda_hat_rad"] = c.Lambda_hat_rad;
        e["J"] = c.J;
        e["contributing_j"] = c.contributing_j;
        e["contribution"] = c.contribution;
        e["integer_J"] = c.integer_J;
        per.push_back(std::move(e));
    }
    j["per_eigenvalue"] = std::move(per);

    Json deg;
    deg["radially_degenerate"] = rep.degeneracy.radially_degenerate;
    deg["offending_index"] = rep.degeneracy.offending_index;
    Json hits = Json::array();
    for (const auto& h : rep.degeneracy.nonradial_hits)
        hits.push_back(Json{{"k", h.k}, {"j", h.j}, {"residual", h.residual}});
    deg["nonradial_hits"] = std::move(hits);
    deg["tolerance"] = rep.degeneracy.tolerance;
    deg["zero_tolerance"] = rep.degeneracy.zero_tolerance;
    deg["notes"] = rep.degeneracy.notes;
    j["degeneracy"] = std::move(deg);

    j["bounds"] = Json{{"general", rep.bounds.general},
                       {"with_f3", rep.bounds.with_f3 ? Json(*rep.bounds.with_f3) : Json(nullptr)}};
    j["prediction"] = rep.prediction ? Json(*rep.prediction) : Json(nullptr);
    j["warnings"] = rep.warnings;
    return j;
}

std::string morse_csv(const morse::MorseReport& rep)
{
    std::string out = "i,nu_hat,Lambda_hat,J,contribution\n";
    for (std::size_t i = 0; i < rep.per_eigenvalue.size(); ++i) {
        const auto& c = rep.per_eigenvalue[i];
        out += std::to_string(i + 1) + "," + format_double(c.nu_hat) + "," + format_double(c.Lambda_hat_rad) + "," +
               format_double(c.J) + "," + std::to_string(c.contribution) + "\n";
    }
    return out;
}

// ---------------------------------------------------------------- sweep

std::vector<double> sweep_points(const SweepSettings& s)
{
    std::vector<double> pts;
    if (s.steps <= 0) return pts;
    if (s.steps == 1) return {s.from};
    for (int i = 0; i < s.steps; ++i)
        pts.push_back(i == s.steps - 1 ? s.to : s.from + (s.to - s.from) * i / (s.steps - 1));
    return pts;
}

std::vector<SweepRow> run_sweep(const RunConfig& cfg)
{
    const std::vector<double> pts = sweep_points(cfg.sweep);
    std::vector<SweepRow> rows(pts.size());
    std::vector<std::string> errors(pts.size());
    if (cfg.use_cache && !pts.empty()) fs::create_directories(fs::path(cfg.out) / "cache");
    std::atomic<std::size_t> next{0};

    auto work = [&] {
        for (std::size_t i = next++; i < pts.size(); i = next++) {
            RunConfig c = cfg;
            c.eigenfunctions = false;
            (cfg.sweep.axis == "p" ? c.p : c.alpha) = pts[i];
            SweepRow& row = rows[i];
            row.param = pts[i];
            row.nu.assign(static_cast<std::size_t>(cfg.k), kNaN);
            row.M = kNaN;
            try {
                validate(c);
                row.M = dimension::generalized_dimension(c.N, c.alpha).M;
                const SpectrumBundle b = compute_spectra(c);
                const auto rep = full_morse_report(c, b);
                for (std::size_t q = 0; q < b.singular.pairs.size() && q < row.nu.size(); ++q)
                    row.nu[q] = b.singular.pairs[q].value;
                row.total = rep.total;
                row.radial_morse = rep.radial_morse;
                row.bound_general = rep.bounds.general;
                row.bound_f3 = rep.bounds.with_f3.value_or(0);
            } catch (const SolverError& e) {
                row.status = "solver_error";
                errors[i] = e.what();
            } catch (const Error& e) {
                row.status = "precondition";
                errors[i] = e.what();
            }
        }
    };
    const int n_workers = std::max(1, std::min<int>(cfg.workers, static_cast<int>(pts.size())));
    std::vector<std::thread> pool;
    for (int w = 1; w < n_workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    for (std::size_t i = 0; i < pts.size(); ++i)
        if (!errors[i].empty()) std::cerr << "sweep point " << format_double(pts[i]) << ": " << errors[i] << '\n';
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, int k)
{
    std::string out = "param,M";
    for (int q = 1; q <= k; ++q) out += ",nu_" + std::to_string(q);
    out += ",radial_morse,total,bound_general,bound_f3,status\n";
    for (const auto& r : rows) {
        out += format_double(r.param) + "," + format_double(r.M);
        for (double v : r.nu) out += "," + format_double(v);
        out += "," + std::to_string(r.radial_morse) + "," + std::to_string(r.total) + "," +
               std::to_string(r.bound_general) + "," + std::to_string(r.bound_f3) + "," + r.status + "\n";
    }
    return out;
}

// ---------------------------------------------------------------- oracle

OracleComparison compare_with_oracle(const RunConfig& cfg)
{
    radial::RadialProfile emden;
    if (!cfg.zero_potential) emden = emden_profile(cfg);
    const auto prob = linearized_problem(cfg, emden, spectral::Kind::Singular);
    auto scfg = spectral_config(cfg);
    scfg.eigenfunctions = false;
    // a coarse grid should show up as a large difference, not abort the comparison
    scfg.tol = std::numeric_limits<double>::infinity();
    const auto sing = spectral::solve_singular_spectrum(prob, cfg.k, scfg);

    OracleComparison cmp;
    cmp.epsilon_cut = std::exp(-sing.x_max);
    spectral::OracleOptions oo;
    oo.max_pairs = cfg.k;
    oo.margin = cfg.spectral.margin;
    const auto orc = spectral::dense_oracle_spectrum(prob, cfg.oracle.n, cmp.epsilon_cut, oo);

    cmp.liouville_count = static_cast<int>(sing.pairs.size());
    cmp.oracle_count = static_cast<int>(orc.pairs.size());
    const std::size_t n = std::min(sing.pairs.size(), orc.pairs.size());
    for (std::size_t i = 0; i < n; ++i) {
        OracleRow r;
        r.index = static_cast<int>(i) + 1;
        r.liouville = sing.pairs[i].value;
        r.oracle = orc.pairs[i].value;
        const double diff = std::abs(r.liouville - r.oracle);
        r.rel_diff = diff / std::max(std::abs(r.oracle), std::numeric_limits<double>::min());
        r.error_bars = sing.pairs[i].error_bar + orc.pairs[i].error_bar;
        r.mismatch = r.rel_diff > cfg.oracle.tol && diff > 3.0 * r.error_bars;
        r.grid_check_failed = 3.0 * sing.pairs[i].error_bar > cfg.spectral.tol * std::max(1.0, std::abs(r.liouville));
        cmp.mismatch = cmp.mismatch || r.mismatch;
        cmp.rows.push_back(r);
    }
    return cmp;
}

// ---------------------------------------------------------------- commands

int cmd_solve(const RunConfig& cfg)
{
    validate(cfg);
    const fs::path out = prepare_out(cfg);
    const auto map = dimension::generalized_dimension(cfg.N, cfg.alpha);
    radial::ProfileOptions opts;
    opts.grid_points = cfg.profile_points;
    const auto phys = radial::henon_profile(cfg.N, cfg.alpha, cfg.p, cfg.m, opts);
    const auto emden = radial::solve_nodal_power(map.M, cfg.p, cfg.m, opts);

    // the Emden-variable solution of the problem with coupling c is k v_1, k = c^{-1/(p-1)}
    const double k = std::pow(map.c, -1.0 / (cfg.p - 1.0));
    std::vector<double> v(emden.values), dv(emden.derivative);
    for (double& x : v) x *= k;
    for (double& x : dv) x *= k;
    write_curve(out / "profile.csv", "t,v,v_prime", emden.grid, v, &dv);
    write_curve(out / "profile_physical.csv", "r,u,u_prime", phys.grid, phys.values, &phys.derivative);

    const auto q = radial::validate_profile(phys);
    const auto z = radial::auxiliary_z(emden);
    Json j;
    j["config"] = to_json(cfg);
    j["map"] = map_json(map);
    j["critical_exponent"] = radial::critical_exponent(map.M);
    j["supercritical"] = phys.supercritical;
    j["zeros"] = vec_json(phys.zeros);
    j["zeros_t"] = vec_json(emden.zeros);
    j["critical_points"] = vec_json(phys.critical_points);
    j["extremal_values"] = vec_json(phys.extremal_values);
    j["u0"] = phys.values.front();
    j["emden_v0"] = v.front();
    j["z_zero_count"] = z.zero_count;
    j["residual"] = radial::profile_residual(phys, 4096);
    j["qualitative"] = Json{{"passed", q.passed()},
                            {"zero_count_ok", q.zero_count_ok},
                            {"sign_alternation_ok", q.sign_alternation_ok},
                            {"critical_points_ok", q.critical_points_ok},
                            {"extremal_chain_ok", q.extremal_chain_ok},
                            {"origin_slope", q.origin_slope},
                            {"warnings", q.warnings}};
    write_text(out / "profile.json", dump(j));
    std::cout << "profile: " << phys.zeros.size() << " zeros, u(0) = " << format_double(phys.values.front())
              << ", files in " << out.string() << '\n';
    return 0;
}

int cmd_spectrum(const RunConfig& cfg)
{
    validate(cfg);
    const fs::path out = prepare_out(cfg);
    const auto map = dimension::generalized_dimension(cfg.N, cfg.alpha);
    const SpectrumBundle b = compute_spectra(cfg);

    Json j;
    j["stage"] = spectrum_stage_json(cfg);
    j["map"] = map_json(map);
    j["zero_potential"] = cfg.zero_potential;
    j["singular"] = spectrum_json(b.singular, map);
    j["standard"] = spectrum_json(b.standard, map);
    write_text(out / "spectrum.json", dump(j));

    if (cfg.eigenfunctions) {
        for (std::size_t i = 0; i < b.singular.pairs.size(); ++i)
            write_curve(out / ("eigen_singular_" + std::to_string(i + 1) + ".csv"), "r,psi",
                        b.singular.pairs[i].r, b.singular.pairs[i].psi);
        for (std::size_t i = 0; i < b.standard.pairs.size(); ++i)
            write_curve(out / ("eigen_standard_" + std::to_string(i + 1) + ".csv"), "r,psi",
                        b.standard.pairs[i].r, b.standard.pairs[i].psi);
    }
    std::cout << "singular: " << b.singular.pairs.size() << " eigenvalues below threshold, "
              << negative_count(b.singular) << " negative; standard: " << negative_count(b.standard)
              << " negative" << (b.from_cache ? " (cached)" : "") << '\n';
    return 0;
}

int cmd_morse(const RunConfig& cfg)
{
    validate(cfg);
    const fs::path out = prepare_out(cfg);
    const SpectrumBundle b = compute_spectra(cfg);
    const auto rep = full_morse_report(cfg, b);
    const auto sym = morse::SymmetryMultiplicity::from_label(
        cfg.symmetry, cfg.N, morse::table_extent(b.singular, rep.map));

    Json j = morse_json(rep);
    j["symmetry"] = Json{{"label", sym.label}, {"total", morse::symmetric_morse_index(rep, sym)}};
    write_text(out / "morse.json", dump(j));
    write_text(out / "morse.csv", morse_csv(rep));
    std::cout << "Morse index " << rep.total << " (radial " << rep.radial_morse << "), bound "
              << rep.bounds.with_f3.value_or(rep.bounds.general) << '\n';
    for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
    return 0;
}

int cmd_sweep(const RunConfig& cfg)
{
    validate(cfg);
    const fs::path out = prepare_out(cfg);
    const auto rows = run_sweep(cfg);
    write_text(out / "sweep.csv", sweep_csv(rows, cfg.k));

    // trend of nu_m against -(M-1); recorded, not judged
    Json trend = nullptr;
    const std::size_t im = static_cast<std::size_t>(cfg.m - 1);
    const SweepRow* first = nullptr;
    const SweepRow* last = nullptr;
    for (const auto& r : rows) {
        if (r.status != "ok" || im >= r.nu.size() || !std::isfinite(r.nu[im])) continue;
        if (!first) first = &r;
        last = &r;
    }
    if (first && last && first != last) {
        const double g0 = std::abs(first->nu[im] + first->M - 1.0);
        const double g1 = std::abs(last->nu[im] + last->M - 1.0);
        trend = Json{{"first_param", first->param}, {"first_gap", g0}, {"last_param", last->param},
                     {"last_gap", g1}, {"closer_at_end", g1 < g0}};
    }
    Json j;
    j["axis"] = cfg.sweep.axis;
    j["points"] = rows.size();
    j["nu_m_gap_to_minus_M_minus_1"] = trend;
    write_text(out / "sweep.json", dump(j));
    std::cout << "sweep: " << rows.size() << " rows written to " << (out / "sweep.csv").string() << '\n';
    return 0;
}

int cmd_oracle(const RunConfig& cfg)
{
    validate(cfg);
    const fs::path out = prepare_out(cfg);
    const auto cmp = compare_with_oracle(cfg);
    Json rows = Json::array();
    double worst = 0.0;
    for (const auto& r : cmp.rows) {
        rows.push_back(Json{{"index", r.index}, {"liouville", r.liouville}, {"oracle", r.oracle},
                            {"rel_diff", r.rel_diff}, {"error_bars", r.error_bars}, {"mismatch", r.mismatch},
                            {"grid_check_failed", r.grid_check_failed}});
        worst = std::max(worst, r.rel_diff);
    }
    Json j;
    j["stage"] = spectrum_stage_json(cfg);
    j["oracle_n"] = cfg.oracle.n;
    j["tol"] = cfg.oracle.tol;
    j["epsilon_cut"] = cmp.epsilon_cut;
    j["liouville_count"] = cmp.liouville_count;
    j["oracle_count"] = cmp.oracle_count;
    j["max_rel_diff"] = worst;
    j["rows"] = std::move(rows);
    j["mismatch"] = cmp.mismatch;
    write_text(out / "oracle.json", dump(j));
    std::cout << "oracle: " << cmp.rows.size() << " eigenvalues compared, max relative difference "
              << format_double(worst) << '\n';
    if (cmp.liouville_count != cmp.oracle_count)
        std::cerr << "warning: counts below threshold differ (" << cmp.liouville_count << " vs "
                  << cmp.oracle_count << ")\n";
    return cmp.mismatch ? 4 : 0;
}

} // namespace henon::report
