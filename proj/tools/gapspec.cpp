#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gapspec/errors.hpp"
#include "gapspec/serialize.hpp"
#include "gapspec/version.hpp"

using namespace gapspec;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string command;
    std::string geometry = "sphere";
    std::string k = "1";
    std::string lambda;
    std::string theta;
    std::string family = "half_line";
    std::string output;
    std::string format = "json";
    int jobs = 0;
    bool no_timestamp = false;
    double rtol = 1e-11;
    double atol = 1e-13;
    double R_factor = 1.0;
    // renorm
    double mu2 = 0.25;
    double rho_max = 0;
    // hm
    double r_max = 10;
    int r_steps = 101;
    // evolve
    std::string mode = "linear";
    std::string initial = "bump";
    double R = 40;
    int points = 4096;
    double t_end = 80;
    double periods = 0;
    double r_probe = 5;
    double dt = 0;
    double center = 5, width = 1, amplitude = 1;
};

double parse_number(const std::string& s) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError("not a number: '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, sep);) out.push_back(item);
    return out;
}

// value | min:max:steps | a,b,c
std::vector<double> parse_grid(const std::string& spec, const std::string& what) {
    if (spec.empty()) throw ConfigError("--" + what + " is required");
    if (spec.find(':') != std::string::npos) {
        auto parts = split(spec, ':');
        if (parts.size() != 3) throw ConfigError("--" + what + " grid must be min:max:steps");
        double lo = parse_number(parts[0]), hi = parse_number(parts[1]);
        double steps = parse_number(parts[2]);
        if (!(lo < hi)) throw ConfigError("--" + what + " grid requires min < max");
        if (!(steps >= 2) || steps != std::floor(steps)) {
            throw ConfigError("--" + what + " grid requires an integer steps >= 2");
        }
        int n = int(steps);
        std::vector<double> out(n);
        for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
        out.back() = hi;
        return out;
    }
    std::vector<double> out;
    for (const auto& p : split(spec, ',')) out.push_back(parse_number(p));
    if (out.empty()) throw ConfigError("--" + what + " is empty");
    return out;
}

double parse_single(const std::string& spec, const std::string& what) {
    auto v = parse_grid(spec, what);
    if (v.size() != 1) throw ConfigError("--" + what + " takes a single value for this command");
    return v.front();
}

int parse_k(const RunConfig& c, bool allow_inf) {
    if (c.k == "inf") {
        if (!allow_inf) throw ConfigError("--k inf is only valid for largek");
        return k_infinity;
    }
    double v = parse_number(c.k);
    if (v != std::floor(v) || v < 1) throw ConfigError("--k must be a positive integer");
    return int(v);
}

GeometryKind parse_kind(const RunConfig& c) {
    if (c.geometry == "sphere") return GeometryKind::Sphere;
    if (c.geometry == "ym") return GeometryKind::YangMills;
    throw ConfigError("--geometry must be sphere or ym");
}

GeometrySpec make_geo(const RunConfig& c, double lambda) {
    return parse_kind(c) == GeometryKind::Sphere ? GeometrySpec::sphere(parse_k(c, false), lambda)
                                                 : GeometrySpec::yang_mills(lambda);
}

// lambda values from --lambda, or from --theta through lambda = Theta^{1/k}
std::vector<double> lambdas_of(const RunConfig& c) {
    if (!c.lambda.empty() && !c.theta.empty()) {
        throw ConfigError("--lambda and --theta are mutually exclusive");
    }
    if (!c.theta.empty()) {
        int k = parse_kind(c) == GeometryKind::Sphere ? parse_k(c, false) : 2;
        std::vector<double> out;
        for (double t : parse_grid(c.theta, "theta")) {
            if (!(t >= 0)) throw ConfigError("--theta values must be >= 0");
            out.push_back(std::pow(t, 1.0 / k));
        }
        return out;
    }
    auto out = parse_grid(c.lambda, "lambda");
    for (double l : out) {
        if (!(l >= 0)) throw ConfigError("--lambda values must be >= 0");
    }
    return out;
}

SpectralOptions spectral_options(const RunConfig& c) {
    if (!(c.rtol > 0) || !(c.atol > 0) || !(c.R_factor >= 1)) {
        throw ConfigError("tolerances must be positive and --R-factor >= 1");
    }
    SpectralOptions o;
    o.rtol = c.rtol;
    o.atol = c.atol;
    o.R_factor = c.R_factor;
    return o;
}

json config_json(const RunConfig& c) {
    return json{{"command", c.command},   {"geometry", c.geometry}, {"k", c.k},
                {"lambda", c.lambda},     {"theta", c.theta},       {"family", c.family},
                {"format", c.format},     {"rtol", c.rtol},         {"atol", c.atol},
                {"R_factor", c.R_factor}, {"mu2", c.mu2},           {"rho_max", c.rho_max},
                {"r_max", c.r_max},       {"r_steps", c.r_steps},   {"mode", c.mode},
                {"initial", c.initial},   {"R", c.R},               {"points", c.points},
                {"t_end", c.t_end},       {"periods", c.periods},   {"r_probe", c.r_probe},
                {"dt", c.dt},             {"center", c.center},     {"width", c.width},
                {"amplitude", c.amplitude}};
}

std::string timestamp() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string num(double v) {
    if (std::isnan(v)) return "";
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

// RFC 4180 field
std::string field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

std::string render_csv(const RunConfig& c, const Table& t, const json& summary) {
    std::ostringstream os;
    os << "# gapspec " << version << "\n";
    os << "# config: " << config_json(c).dump() << "\n";
    if (!summary.is_null()) os << "# summary: " << summary.dump() << "\n";
    if (!c.no_timestamp) os << "# timestamp: " << timestamp() << "\n";
    auto line = [&](const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << field(cells[i]);
        os << "\r\n";
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
    return os.str();
}

std::string render_json(const RunConfig& c, const json& result) {
    json doc{{"tool", "gapspec"}, {"version", version}, {"config", config_json(c)}, {"result", result}};
    if (!c.no_timestamp) doc["timestamp"] = timestamp();
    return doc.dump(2) + "\n";
}

struct Artifact {
    json result;
    Table table;
    json summary;
};

Artifact run_hm(const RunConfig& c) {
    Artifact a;
    a.result = json::array();
    a.table.header = {"lambda", "endpoint", "energy_closed_form", "energy_quadrature", "gradient",
                      "potential"};
    if (!(c.r_max > 0) || c.r_steps < 2) throw ConfigError("--r-max > 0 and --r-steps >= 2 required");
    for (double l : lambdas_of(c)) {
        GeometrySpec geo = make_geo(c, l);
        EnergyBreakdown e = energy_quadrature(geo);
        std::vector<double> r(c.r_steps), Q(c.r_steps);
        for (int i = 0; i < c.r_steps; ++i) {
            r[i] = c.r_max * i / (c.r_steps - 1);
            Q[i] = eval_Q(geo, r[i]);
        }
        a.result.push_back({{"geometry", geo},
                            {"endpoint", endpoint(geo)},
                            {"energy_closed_form", energy_closed_form(geo)},
                            {"energy_quadrature", e},
                            {"profile", {{"r", r}, {"Q", Q}}}});
        a.table.rows.push_back({num(l), num(endpoint(geo)), num(energy_closed_form(geo)),
                                num(e.total), num(e.gradient), num(e.potential)});
    }
    return a;
}

OperatorSpec make_operator(const RunConfig& c, double lambda) {
    GeometrySpec geo = make_geo(c, lambda);
    if (c.family == "half_line") return OperatorSpec::half_line(geo);
    if (c.family == "rescaled") {
        if (!(lambda > 0)) throw ConfigError("the rescaled family requires lambda > 0");
        return OperatorSpec::rescaled(geo);
    }
    throw ConfigError("--family must be half_line or rescaled");
}

void spectral_rows(Table& t, const std::string& key, double value, const SpectralReport& r) {
    auto base = [&] {
        return std::vector<std::string>{num(value), num(r.resonance_a), num(r.resonance_b),
                                        r.negative_scan_clear ? "true" : "false",
                                        r.embedded_scan_clear ? "true" : "false",
                                        std::to_string(r.eigenvalues.size())};
    };
    if (t.header.empty()) {
        t.header = {key, "resonance_a", "resonance_b", "negative_scan_clear", "embedded_scan_clear",
                    "n_eigenvalues", "mu2", "wronskian_residual", "R_used"};
    }
    if (r.eigenvalues.empty()) {
        auto row = base();
        row.insert(row.end(), {"", "", ""});
        t.rows.push_back(row);
    }
    for (const auto& ev : r.eigenvalues) {
        auto row = base();
        row.insert(row.end(), {num(ev.mu2), num(ev.wronskian_residual), num(ev.R_used)});
        t.rows.push_back(row);
    }
}

Artifact run_spectrum(const RunConfig& c) {
    Artifact a;
    double l = lambdas_of(c).size() == 1 ? lambdas_of(c).front()
                                         : throw ConfigError("spectrum takes a single lambda");
    SpectralReport r = find_gap_eigenvalues(make_operator(c, l), spectral_options(c));
    a.result = r;
    spectral_rows(a.table, "lambda", l, r);
    return a;
}

Artifact run_sweep(const RunConfig& c) {
    Artifact a;
    auto ls = lambdas_of(c);
    if (ls.size() < 2) throw ConfigError("sweep needs a grid (min:max:steps) or a list");
    SweepReport r = sweep_lambda(parse_kind(c), parse_kind(c) == GeometryKind::Sphere ? parse_k(c, false) : 2,
                                 ls, c.jobs, spectral_options(c));
    a.result = r;
    a.table.header = {"lambda", "resonance_b", "gap_eigenvalue"};
    for (const auto& p : r.indicator) {
        a.table.rows.push_back({num(p.lambda), num(p.resonance_b),
                                p.gap_eigenvalue ? num(*p.gap_eigenvalue) : ""});
    }
    a.summary = {{"lambda_sup_bracket", r.lambda_sup_bracket},
                 {"Lambda_inf_bracket", r.Lambda_inf_bracket}};
    return a;
}

Artifact run_migrate(const RunConfig& c) {
    Artifact a;
    auto ls = lambdas_of(c);
    MigrationCurve m = migration_curve(parse_kind(c),
                                       parse_kind(c) == GeometryKind::Sphere ? parse_k(c, false) : 2,
                                       ls, c.jobs, spectral_options(c));
    a.result = m;
    a.table.header = {"lambda", "mu2", "wronskian_residual", "R_used"};
    for (const auto& p : m.points) {
        a.table.rows.push_back({num(p.lambda), num(p.mu2), num(p.wronskian_residual), num(p.R_used)});
    }
    a.summary = {{"strictly_decreasing", m.strictly_decreasing}, {"doubling_ratios", m.doubling_ratios}};
    return a;
}

Artifact run_largek(const RunConfig& c) {
    Artifact a;
    if (!c.lambda.empty()) throw ConfigError("largek is parameterized by --theta");
    int k = parse_k(c, true);
    a.result = json::array();
    std::vector<double> thetas = parse_grid(c.theta, "theta");
    std::vector<SpectralReport> reps(thetas.size());
    SpectralOptions o = spectral_options(c);
    for (double t : thetas) {
        if (!(t > 0)) throw ConfigError("--theta values must be > 0");
    }
    parallel_for(thetas.size(), c.jobs, [&](size_t i) { reps[i] = largek_gap_scan(k, thetas[i], o); });
    for (size_t i = 0; i < thetas.size(); ++i) {
        a.result.push_back({{"theta", thetas[i]}, {"report", reps[i]}});
        spectral_rows(a.table, "theta", thetas[i], reps[i]);
    }
    return a;
}

Artifact run_renorm(const RunConfig& c) {
    Artifact a;
    double l = parse_single(c.lambda, "lambda");
    if (parse_kind(c) != GeometryKind::Sphere) throw ConfigError("renorm supports the sphere geometry");
    GeometrySpec geo = make_geo(c, l);
    double rho_max = c.rho_max > 0 ? c.rho_max : 1.25 * l;
    RenormalizedSolution sol = renormalized_f(geo, c.mu2, rho_max);
    RenormalizationClaims claims = check_renormalization_claims(geo, sol);
    a.result = {{"solution", sol}, {"claims", claims}};
    a.table.header = {"rho", "f", "f_prime", "zeta", "f_shooting"};
    for (size_t i = 0; i < sol.grid.size(); ++i) {
        a.table.rows.push_back({num(sol.grid[i]), num(sol.f[i]), num(sol.f_prime[i]),
                                num(sol.zeta[i]), num(sol.f_shooting[i])});
    }
    a.summary = {{"claims", claims}, {"max_discrepancy", sol.max_discrepancy}};
    return a;
}

Artifact run_evolve(const RunConfig& c) {
    Artifact a;
    GeometrySpec geo = make_geo(c, parse_single(c.lambda, "lambda"));
    WaveMode mode;
    if (c.mode == "linear") {
        mode = WaveMode::Linear;
    } else if (c.mode == "nonlinear") {
        mode = WaveMode::Nonlinear;
    } else {
        throw ConfigError("--mode must be linear or nonlinear");
    }
    InitialData init;
    std::optional<double> mu2;
    if (c.initial == "eigenmode") {
        SpectralReport r = find_gap_eigenvalues(OperatorSpec::half_line(geo), spectral_options(c));
        if (r.eigenvalues.empty()) throw NoEigenmode("no gap eigenvalue for this geometry");
        mu2 = r.eigenvalues.front().mu2;
        init = GapEigenmode{};
    } else if (c.initial == "bump") {
        init = GaussianBump{c.center, c.width, c.amplitude};
    } else {
        throw ConfigError("--initial must be eigenmode or bump");
    }
    if (c.points < 512 || !(c.R >= 40)) throw ConfigError("--points >= 512 and --R >= 40 required");
    WaveState s = init_state(geo, mode, c.R, c.points, init);
    EvolutionOptions o;
    o.dt = c.dt;
    o.r_probe = c.r_probe;
    o.t_end = c.t_end;
    if (c.periods > 0) {
        if (!mu2) throw ConfigError("--periods needs --initial eigenmode");
        o.t_end = c.periods * 2 * M_PI / std::sqrt(*mu2);
    }
    EvolutionResult res = evolve(std::move(s), o);
    a.result = res;
    a.result["mu2"] = mu2;
    a.table.header = {"t", "probe_value"};
    for (size_t i = 0; i < res.probe.times.size(); ++i) {
        a.table.rows.push_back({num(res.probe.times[i]), num(res.probe.values[i])});
    }
    a.summary = {{"dominant_frequency", res.probe.dominant_frequency},
                 {"decay_ratio", res.probe.decay_ratio},
                 {"energy_drift", res.energy_drift},
                 {"mu2", mu2}};
    return a;
}

void add_common(CLI::App* sub, RunConfig& c) {
    sub->add_option("--geometry", c.geometry, "sphere or ym")->capture_default_str();
    sub->add_option("--k", c.k, "equivariance class (largek: integer or inf)")->capture_default_str();
    sub->add_option("--lambda", c.lambda, "value, min:max:steps, or a,b,c");
    sub->add_option("--theta", c.theta, "value, min:max:steps, or a,b,c");
    sub->add_option("--output,-o", c.output, "output path (default stdout)");
    sub->add_option("--format", c.format, "csv or json")->capture_default_str();
    sub->add_option("--jobs", c.jobs, "worker threads (0: all cores; env GAPSPEC_JOBS)");
    sub->add_flag("--no-timestamp", c.no_timestamp, "omit the timestamp field");
    sub->add_option("--rtol", c.rtol)->capture_default_str();
    sub->add_option("--atol", c.atol)->capture_default_str();
    sub->add_option("--R-factor", c.R_factor, "scale the truncation radius")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig c;
    if (const char* env = std::getenv("GAPSPEC_JOBS")) {
        try {
            c.jobs = int(parse_number(env));
        } catch (const ConfigError&) {
            std::cerr << "error: GAPSPEC_JOBS is not a number\n";
            return 2;
        }
    }
    CLI::App app{"Spectral gap and wave dynamics for equivariant harmonic maps on the hyperbolic plane"};
    app.set_version_flag("--version", version);
    app.require_subcommand(1);

    auto* hm = app.add_subcommand("hm", "harmonic map profile and energy table");
    auto* spectrum = app.add_subcommand("spectrum", "gap eigenvalues, threshold fit and scans");
    auto* sweep = app.add_subcommand("sweep", "lambda sweep with threshold brackets");
    auto* migrate = app.add_subcommand("migrate", "gap eigenvalue against lambda");
    auto* largek = app.add_subcommand("largek", "large-k operator family in Theta");
    auto* renorm = app.add_subcommand("renorm", "renormalized solution f(rho) and its checks");
    auto* evolve_cmd = app.add_subcommand("evolve", "time evolution with a probe");
    for (auto* sub : {hm, spectrum, sweep, migrate, largek, renorm, evolve_cmd}) add_common(sub, c);

    hm->add_option("--r-max", c.r_max)->capture_default_str();
    hm->add_option("--r-steps", c.r_steps)->capture_default_str();
    spectrum->add_option("--family", c.family, "half_line or rescaled")->capture_default_str();
    renorm->add_option("--mu2", c.mu2, "physical spectral parameter")->capture_default_str();
    renorm->add_option("--rho-max", c.rho_max, "default 1.25 lambda");
    evolve_cmd->add_option("--mode", c.mode, "linear or nonlinear")->capture_default_str();
    evolve_cmd->add_option("--initial", c.initial, "eigenmode or bump")->capture_default_str();
    evolve_cmd->add_option("--R", c.R)->capture_default_str();
    evolve_cmd->add_option("--points", c.points)->capture_default_str();
    evolve_cmd->add_option("--t-end", c.t_end)->capture_default_str();
    evolve_cmd->add_option("--periods", c.periods, "run length in eigenmode periods");
    evolve_cmd->add_option("--r-probe", c.r_probe)->capture_default_str();
    evolve_cmd->add_option("--dt", c.dt, "time step (default half the stable step)");
    evolve_cmd->add_option("--center", c.center)->capture_default_str();
    evolve_cmd->add_option("--width", c.width)->capture_default_str();
    evolve_cmd->add_option("--amplitude", c.amplitude)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    c.command = app.get_subcommands().front()->get_name();

    try {
        if (c.format != "csv" && c.format != "json") throw ConfigError("--format must be csv or json");
        if (c.jobs < 0) throw ConfigError("--jobs must be >= 0");
        Artifact a;
        if (c.command == "hm") a = run_hm(c);
        if (c.command == "spectrum") a = run_spectrum(c);
        if (c.command == "sweep") a = run_sweep(c);
        if (c.command == "migrate") a = run_migrate(c);
        if (c.command == "largek") a = run_largek(c);
        if (c.command == "renorm") a = run_renorm(c);
        if (c.command == "evolve") a = run_evolve(c);
        std::string text = c.format == "csv" ? render_csv(c, a.table, a.summary) : render_json(c, a.result);
        if (c.output.empty() || c.output == "-") {
            std::cout << text;
        } else {
            std::ofstream out(c.output, std::ios::binary);
            if (!out) throw ConfigError("cannot open " + c.output);
            out << text;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
