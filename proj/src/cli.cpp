#include "psep/cli.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "psep/boundary.hpp"
#include "psep/errors.hpp"
#include "psep/hardy.hpp"
#include "psep/simulate.hpp"
#include "psep/stats.hpp"

namespace psep {

const char* const kDistGrammar =
    "Distribution spec grammar:\n"
    "  \"uniform:a,b\"          uniform on (a,b)\n"
    "  \"biuniform:a,b,c,d\"    uniform on (a,b) U (c,d)\n"
    "  \"twopoint:x1,w1,x2\"    mass w1 at x1, 1-w1 at x2\n"
    "  \"truncexp:rate,lo,hi\"  Exp(rate) truncated to (lo,hi)\n"
    "  \"cdf:path\"             tabulated cdf file, lines \"x F\"\n";

namespace {

namespace fs = std::filesystem;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::optional<double> to_double(const std::string& s) {
    double v = 0.0;
    const char* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc() || ptr != end) return std::nullopt;
    return v;
}

std::optional<std::uint64_t> to_unsigned(const std::string& s) {
    std::uint64_t v = 0;
    const char* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc() || ptr != end) return std::nullopt;
    return v;
}

double number_setting(const std::string& key, const std::string& value) {
    const auto v = to_double(value);
    if (!v || !std::isfinite(*v)) throw ConfigError("setting '" + key + "': '" + value + "' is not a finite number");
    return *v;
}

std::uint64_t count_setting(const std::string& key, const std::string& value) {
    const auto v = to_unsigned(value);
    if (!v) throw ConfigError("setting '" + key + "': '" + value + "' is not a nonnegative integer");
    return *v;
}

bool bool_setting(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw ConfigError("setting '" + key + "': '" + value + "' is not a boolean");
}

// Mesh of the measure, its step quantile, and the zero-mean version fed to the maps.
struct Discretization {
    std::size_t n;
    QuantileStep qs;
    QuantileStep centred;
    DiscreteMeasure centred_measure;
};

Discretization discretize_n(const Measure& m, std::size_t n) {
    const DiscreteMeasure d = discretize(m, adapted_mesh(m, n));
    auto [dc, shift] = recenter(d);
    (void)shift;
    return {n, quantile_step(d), quantile_step(dc), dc};
}

void require_zero_mean(const Measure& m, const RunConfig& cfg) {
    if (!cfg.recenter && std::abs(m.mean()) > 1e-8) {
        throw ConfigError("the conformal map needs a zero-mean target; drop --no-recenter or centre the law");
    }
}

fs::path output_dir(const RunConfig& cfg) {
    const fs::path dir(cfg.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw std::runtime_error("cannot create output directory '" + cfg.out + "'");
    return dir;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
    f << std::setprecision(17);
    return f;
}

void close_output(std::ofstream& f, const fs::path& path) {
    f.close();
    if (!f) throw std::runtime_error("error writing '" + path.string() + "'");
}

void write_json(const fs::path& path, const nlohmann::json& j) {
    auto f = open_output(path);
    f << j.dump(2) << '\n';
    close_output(f, path);
}

nlohmann::json config_json(const RunConfig& cfg, const Measure& m, double shift) {
    nlohmann::json j;
    j["dist"] = cfg.dist.empty() ? "cdf:" + cfg.cdf_file : cfg.dist;
    j["measure"] = m.describe();
    j["recenter"] = cfg.recenter;
    j["shift"] = shift;
    j["n"] = cfg.ns;
    j["p"] = cfg.p;
    return j;
}

std::size_t truncation_for(const RunConfig& cfg, std::size_t n) {
    return cfg.K > 0 ? cfg.K : default_truncation(n);
}

HardyConfig hardy_config(double p) {
    HardyConfig h;
    h.p = p;
    h.method = p == 2.0 ? HardyMethod::SeriesParseval : HardyMethod::BoundaryTrace;
    return h;
}

} // namespace

Measure parse_dist_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw ParseError("distribution spec needs 'family:parameters'", spec.size());
    const std::string fam = spec.substr(0, colon);
    const std::size_t body = colon + 1;

    if (fam == "cdf") {
        if (body >= spec.size()) throw ParseError("cdf spec needs a file path", body);
        return read_tabulated_cdf_file(spec.substr(body));
    }

    std::size_t arity = 0;
    if (fam == "uniform") {
        arity = 2;
    } else if (fam == "biuniform" || fam == "truncexp" || fam == "twopoint") {
        arity = fam == "biuniform" ? 4 : 3;
    } else {
        throw ParseError("unknown distribution family '" + fam + "'", 0);
    }

    std::vector<double> args;
    std::size_t pos = body;
    for (;;) {
        const auto comma = spec.find(',', pos);
        const std::size_t end = comma == std::string::npos ? spec.size() : comma;
        const std::string raw = spec.substr(pos, end - pos);
        const std::string tok = trim(raw);
        const std::size_t lead = raw.find_first_not_of(" \t");
        const auto v = to_double(tok);
        if (!v) throw ParseError("expected a number", pos + (lead == std::string::npos ? 0 : lead));
        if (args.size() == arity) throw ParseError(fam + " takes " + std::to_string(arity) + " parameters", pos);
        if (!std::isfinite(*v)) throw ConfigError("distribution parameters must be finite (bounded support)");
        args.push_back(*v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (args.size() != arity) {
        throw ParseError(fam + " takes " + std::to_string(arity) + " parameters", spec.size());
    }

    if (fam == "uniform") return Measure::uniform(args[0], args[1]);
    if (fam == "biuniform") return Measure::biuniform(args[0], args[1], args[2], args[3]);
    if (fam == "twopoint") return Measure::two_point(args[0], args[1], args[2]);
    return Measure::truncated_exponential(args[0], args[1], args[2]);
}

void RunConfig::validate() const {
    if (dist.empty() && cdf_file.empty()) throw ConfigError("no distribution given (--dist or --cdf-file)");
    if (!dist.empty() && !cdf_file.empty()) throw ConfigError("--dist and --cdf-file are mutually exclusive");
    if (ns.empty()) throw ConfigError("the n list is empty");
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (ns[i] == 0) throw ConfigError("mesh sizes must be positive");
        if (i > 0 && ns[i] <= ns[i - 1]) throw ConfigError("mesh sizes must be strictly increasing");
    }
    if (!(p >= 1.0)) throw ConfigError("p must be at least 1");
    if (grid < 64) throw ConfigError("grid must be at least 64");
    if (samples == 0) throw ConfigError("samples must be positive");
    if (!(dt > 0.0 && dt <= 1e-3)) throw ConfigError("dt must lie in (0, 1e-3]");
    if (out.empty()) throw ConfigError("output directory is empty");
}

Settings parse_config_text(std::istream& in) {
    Settings out;
    std::string line;
    std::size_t offset = 0;
    while (std::getline(in, line)) {
        const std::size_t start = offset;
        offset += line.size() + 1;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("config line needs key=value", start);
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ParseError("config line has an empty key", start);
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

Settings read_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config_text(f);
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "dist") {
        cfg.dist = value;
        cfg.cdf_file.clear();
    } else if (key == "cdf-file") {
        cfg.cdf_file = value;
        cfg.dist.clear();
    } else if (key == "n") {
        cfg.ns.clear();
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) cfg.ns.push_back(count_setting(key, trim(item)));
    } else if (key == "p") {
        cfg.p = number_setting(key, value);
    } else if (key == "K") {
        cfg.K = count_setting(key, value);
    } else if (key == "grid") {
        cfg.grid = count_setting(key, value);
    } else if (key == "samples") {
        cfg.samples = count_setting(key, value);
    } else if (key == "paths") {
        cfg.paths = count_setting(key, value);
    } else if (key == "dt") {
        cfg.dt = number_setting(key, value);
    } else if (key == "seed") {
        cfg.seed = count_setting(key, value);
    } else if (key == "no-recenter") {
        cfg.recenter = !bool_setting(key, value);
    } else if (key == "out") {
        cfg.out = value;
    } else if (key == "svg") {
        cfg.svg = bool_setting(key, value);
    } else if (key == "dump-samples") {
        cfg.dump_samples = bool_setting(key, value);
    } else {
        throw ConfigError("unknown setting '" + key + "'");
    }
}

RunConfig build_config(const Settings& file, const Settings& flags) {
    if (flags.count("dist") && flags.count("cdf-file")) {
        throw ConfigError("--dist and --cdf-file are mutually exclusive");
    }
    RunConfig cfg;
    for (const auto& [k, v] : file) apply_setting(cfg, k, v);
    for (const auto& [k, v] : flags) apply_setting(cfg, k, v);
    cfg.validate();
    return cfg;
}

Measure resolve_measure(const RunConfig& cfg, double& shift) {
    const Measure m = cfg.dist.empty() ? read_tabulated_cdf_file(cfg.cdf_file) : parse_dist_spec(cfg.dist);
    shift = 0.0;
    if (!cfg.recenter) return m;
    auto [centred, c] = recenter(m);
    shift = c;
    return centred;
}

void run_boundary(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    double shift = 0.0;
    const Measure m = resolve_measure(cfg, shift);
    const fs::path dir = output_dir(cfg);
    for (std::size_t n : cfg.ns) {
        const QuantileStep qs = quantile_step(discretize(m, adapted_mesh(m, n)));
        const BoundaryCurve curve = boundary_curve(qs, cfg.grid);
        const fs::path csv = dir / ("boundary_n" + std::to_string(n) + ".csv");
        auto f = open_output(csv);
        write_curve_csv(curve, f);
        close_output(f, csv);
        if (cfg.svg) {
            const fs::path svg = dir / ("boundary_n" + std::to_string(n) + ".svg");
            auto g = open_output(svg);
            g << curve_svg(curve);
            close_output(g, svg);
        }
        log << "wrote " << csv.string() << '\n';
    }
    nlohmann::json meta = config_json(cfg, m, shift);
    meta["grid"] = cfg.grid;
    write_json(dir / "boundary.json", meta);
    log << "shift " << std::setprecision(17) << shift << '\n';
}

void run_converge(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    if (cfg.ns.size() < 2) throw ConfigError("converge needs at least two mesh sizes");
    double shift = 0.0;
    const Measure m = resolve_measure(cfg, shift);
    require_zero_mean(m, cfg);
    const fs::path dir = output_dir(cfg);
    const double width = m.support_hi() - m.support_lo();

    std::vector<Discretization> discs;
    for (std::size_t n : cfg.ns) discs.push_back(discretize_n(m, n));
    const Discretization& ref = discs.back();
    const PowerSeriesMap G_ref = fourier_coeffs_step(ref.centred, truncation_for(cfg, ref.n));
    const HardyConfig hcfg = hardy_config(cfg.p);

    const fs::path csv = dir / "converge.csv";
    auto f = open_output(csv);
    f << "n,lp_dist,bound,hardy_series,hardy_trace\n";
    std::vector<double> xs_all, lp_all, xs_fit, hs_fit, ht_fit;
    for (const auto& d : discs) {
        const PowerSeriesMap G = fourier_coeffs_step(d.centred, truncation_for(cfg, d.n));
        const double lp = lp_quantile_distance(m, d.qs, cfg.p);
        const double bound = width / static_cast<double>(d.n);
        const double hs = hardy_distance(G, G_ref, hcfg);
        const double ht = trace_hardy_distance(d.centred, ref.centred, cfg.p);
        f << d.n << ',' << lp << ',' << bound << ',' << hs << ',' << ht << '\n';

        const fs::path series = dir / ("series_n" + std::to_string(d.n) + ".csv");
        auto s = open_output(series);
        write_series_csv(G, s);
        close_output(s, series);

        xs_all.push_back(static_cast<double>(d.n));
        lp_all.push_back(lp);
        if (d.n != ref.n) {
            xs_fit.push_back(static_cast<double>(d.n));
            hs_fit.push_back(hs);
            ht_fit.push_back(ht);
        }
    }
    close_output(f, csv);

    nlohmann::json summary = config_json(cfg, m, shift);
    summary["reference_n"] = ref.n;
    summary["slope_lp_dist"] = loglog_slope(xs_all, lp_all);
    if (xs_fit.size() >= 2) {
        summary["slope_hardy_series"] = loglog_slope(xs_fit, hs_fit);
        summary["slope_hardy_trace"] = loglog_slope(xs_fit, ht_fit);
    }
    write_json(dir / "converge.json", summary);
    log << "wrote " << csv.string() << '\n';
}

void run_simulate(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    double shift = 0.0;
    const Measure m = resolve_measure(cfg, shift);
    require_zero_mean(m, cfg);
    const fs::path dir = output_dir(cfg);

    std::vector<Discretization> discs;
    for (std::size_t n : cfg.ns) discs.push_back(discretize_n(m, n));

    SimulationReport report;
    report.seed = cfg.seed;
    report.samples = cfg.samples;
    report.paths = cfg.ns.size() > 1 ? cfg.paths : 0;
    report.dt = cfg.dt;
    const nlohmann::json cj = config_json(cfg, m, shift);
    for (auto it = cj.begin(); it != cj.end(); ++it) report.config[it.key()] = it.value();

    for (const auto& d : discs) {
        const std::string tag = "n=" + std::to_string(d.n);
        const auto z = sample_exit_points(d.centred, cfg.samples, cfg.seed);
        std::vector<double> re(z.size());
        std::vector<double> sq(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) {
            re[i] = z[i].real();
            sq[i] = std::norm(z[i]);
        }
        const DiscreteMeasure& dm = d.centred_measure;
        report.ks[tag] = ks_statistic(re, [&dm](double x) { return dm.cdf(x); });
        double second = 0.0;
        for (std::size_t k = 0; k < dm.size(); ++k) second += dm.weights()[k] * dm.supports()[k] * dm.supports()[k];
        report.estimates[tag + "/moment2"] = mean_estimate(sq);
        report.estimates[tag + "/norm2"] = {2.0 * second, 0.0};
        if (cfg.dump_samples) {
            const fs::path path = dir / ("exit_samples_n" + std::to_string(d.n) + ".csv");
            auto f = open_output(path);
            for (double x : re) f << x << '\n';
            close_output(f, path);
        }
    }

    if (discs.size() > 1) {
        const Discretization& ref = discs.back();
        std::vector<StepMap> maps;
        for (const auto& d : discs) maps.emplace_back(d.centred);
        std::vector<CoupledMap> cands;
        for (std::size_t i = 0; i + 1 < discs.size(); ++i) {
            const StepMap* sm = &maps[i];
            cands.push_back({discs[i].centred, [sm](cplx z) { return sm->deriv(z); }});
        }
        const StepMap* rm = &maps.back();
        const CoupledMap reference{ref.centred, [rm](cplx z) { return rm->deriv(z); }};
        GapConfig g;
        g.p = cfg.p;
        g.samples = cfg.samples;
        g.paths = cfg.paths;
        g.dt = cfg.dt;
        g.seed = cfg.seed;
        const auto gaps = coupled_gap_sweep(cands, reference, g);
        for (std::size_t i = 0; i < gaps.size(); ++i) {
            const std::string tag = "n=" + std::to_string(discs[i].n);
            report.estimates[tag + "/C1"] = gaps[i].c1;
            report.estimates[tag + "/C2"] = gaps[i].c2;
            report.estimates[tag + "/hardy_trace_p"] = {
                std::pow(trace_hardy_distance(discs[i].centred, ref.centred, cfg.p), cfg.p), 0.0};
        }
        report.config["reference_n"] = ref.n;
    }

    write_json(dir / "simulate_report.json", report.to_json());
    log << "wrote " << (dir / "simulate_report.json").string() << '\n';
}

int run_command(const std::string& command, const RunConfig& cfg, std::ostream& log, std::ostream& err) {
    try {
        if (command == "boundary") {
            run_boundary(cfg, log);
        } else if (command == "converge") {
            run_converge(cfg, log);
        } else if (command == "simulate") {
            run_simulate(cfg, log);
        } else {
            throw ConfigError("unknown command '" + command + "'");
        }
        return 0;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }
}

} // namespace psep
