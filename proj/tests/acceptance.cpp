// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "psep/boundary.hpp"
#include "psep/cli.hpp"
#include "psep/hardy.hpp"
#include "psep/measures.hpp"
#include "psep/simulate.hpp"
#include "psep/stats.hpp"

using namespace psep;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool ok;
    std::string detail;
};

int failures = 0;
std::uint64_t seed_offset = 0;
std::vector<int> selected;

void run(int id, const char* name, double limit_seconds, const std::function<Outcome()>& body) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), id) == selected.end()) return;
    const auto start = std::chrono::steady_clock::now();
    Outcome out{false, ""};
    try {
        out = body();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool ok = out.ok && secs < limit_seconds;
    if (!ok) ++failures;
    std::printf("%s %2d %-28s %s [%.2fs, limit %.0fs]\n", ok ? "PASS" : "FAIL", id, name, out.detail.c_str(), secs,
                limit_seconds);
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

// The CLI pipeline: adapted mesh, right-endpoint masses, then a zero-mean step quantile for the maps.
QuantileStep centred_step(const Measure& m, std::size_t n) {
    return quantile_step(recenter(discretize(m, adapted_mesh(m, n))).first);
}

DiscreteMeasure centred_discrete(const Measure& m, std::size_t n) {
    return recenter(discretize(m, adapted_mesh(m, n))).first;
}

std::vector<Measure> builtin_measures() {
    return {parse_dist_spec("uniform:-1,1"), parse_dist_spec("uniform:0,1"), parse_dist_spec("biuniform:-2,-1,1,2"),
            parse_dist_spec("twopoint:-1,0.5,1"), parse_dist_spec("twopoint:-0.5,0.3,2"),
            parse_dist_spec("truncexp:1,0,3"), Measure::tabulated({0.0, 1.0, 2.0}, {0.25, 0.5, 1.0})};
}

Outcome sharpness() {
    const auto u = Measure::uniform(0.0, 1.0);
    double worst = 0.0;
    for (double p : {1.0, 2.0, 4.0}) {
        for (std::size_t n : {10u, 100u}) {
            const auto qs = quantile_step(discretize(u, uniform_mesh(0.0, 1.0, n)));
            const double expected = 1.0 / (std::pow(1.0 + p, 1.0 / p) * static_cast<double>(n));
            worst = std::max(worst, std::abs(lp_quantile_distance(u, qs, p) - expected));
        }
    }
    return {worst < 1e-10, fmt("max |err| = %.3e", worst)};
}

Outcome rate_bound() {
    double worst = -1e300;
    for (const auto& m : builtin_measures()) {
        const double width = m.support_hi() - m.support_lo();
        for (std::size_t n : {5u, 20u, 100u, 200u}) {
            for (const Mesh& mesh : {uniform_mesh(m.support_lo(), m.support_hi(), n), adapted_mesh(m, n)}) {
                const auto qs = quantile_step(discretize(m, mesh));
                for (double p : {1.0, 2.0, 4.0}) {
                    worst = std::max(worst, lp_quantile_distance(m, qs, p) - width / static_cast<double>(n));
                }
            }
        }
    }
    return {worst <= 1e-12, fmt("max (dist - (b-a)/n) = %.3e", worst)};
}

Outcome hilbert_vs_pv() {
    std::mt19937_64 gen(2024);
    std::uniform_int_distribution<int> cells(1, 20);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto qs = oracle::random_step(gen, static_cast<std::size_t>(cells(gen)), false);
        PvQuadratureConfig cfg;
        cfg.breakpoints = jump_angles(qs);
        const auto f = [&qs](double t) { return phi_eval(qs, t); };
        for (int i = 0; i < 20; ++i) {
            double theta = 0.0;
            bool clear = false;
            while (!clear) {
                theta = angle(gen);
                clear = std::all_of(cfg.breakpoints.begin(), cfg.breakpoints.end(),
                                    [theta](double j) { return std::abs(theta - j) > 1e-3; });
            }
            worst = std::max(worst, std::abs(hilbert_phi_step(qs, theta) - hilbert_pv_quadrature(f, theta, cfg)));
        }
    }
    return {worst < 1e-5, fmt("max |closed - PV| = %.3e over 2000 points", worst)};
}

Outcome strip() {
    double shift = 0.0;
    RunConfig cfg;
    cfg.dist = "biuniform:-2,-1,1,2";
    const Measure m = resolve_measure(cfg, shift);
    double min_abs = 1e300;
    for (std::size_t n : {5u, 20u, 100u, 200u}) {
        const auto curve = boundary_curve(quantile_step(discretize(m, adapted_mesh(m, n))), cfg.grid);
        for (const auto& s : curve.samples) min_abs = std::min(min_abs, std::abs(s.x));
    }
    return {min_abs >= 1.0 - 1e-9, fmt("min |x| = %.17g", min_abs)};
}

Outcome exit_law() {
    double worst = 0.0;
    const std::vector<std::pair<const char*, std::vector<std::size_t>>> cases{
        {"twopoint:-1,0.5,1", {1, 5, 20}}, {"biuniform:-2,-1,1,2", {5, 20, 100, 200}}};
    for (const auto& [spec, ns] : cases) {
        const Measure m = recenter(parse_dist_spec(spec)).first;
        for (std::size_t n : ns) {
            const DiscreteMeasure dm = centred_discrete(m, n);
            const auto z = sample_exit_points(quantile_step(dm), 100000, 17 + n);
            std::vector<double> re;
            for (cplx w : z) re.push_back(w.real());
            worst = std::max(worst, ks_statistic(re, [&dm](double x) { return dm.cdf(x); }));
        }
    }
    return {worst < 0.008, fmt("max KS = %.4f at N = 1e5", worst)};
}

Outcome moment_identity() {
    std::string detail;
    bool ok = true;
    for (const char* spec : {"twopoint:-1,0.5,1", "biuniform:-2,-1,1,2"}) {
        const QuantileStep qs = centred_step(recenter(parse_dist_spec(spec)).first, 20);
        const auto G = fourier_coeffs_step(qs, 1 << 16);
        double norm2 = 0.0;
        for (double a : G.coeffs()) norm2 += a * a;
        const auto z = sample_exit_points(qs, 100000, 5);
        std::vector<double> sq;
        for (cplx w : z) sq.push_back(std::norm(w));
        const auto e = mean_estimate(sq);
        const double zscore = std::abs(e.value - norm2) / e.std_error;
        ok = ok && zscore < 3.0;
        detail += fmt("%.4f vs %.4f (%.2f SE); ", e.value, norm2, zscore);
    }
    return {ok, detail};
}

Outcome euler_oracle() {
    double worst = 0.0;
    for (const auto& [spec, n] : {std::pair{"twopoint:-1,0.5,1", std::size_t{1}}, {"biuniform:-2,-1,1,2", 5}}) {
        const DiscreteMeasure dm = centred_discrete(recenter(parse_dist_spec(spec)).first, n);
        const auto curve = boundary_curve(quantile_step(dm), 8192);
        EulerConfig cfg;
        cfg.dt = 1e-4;
        cfg.samples = 10000;
        cfg.seed = 99;
        const auto z = euler_exit_oracle(curve, cfg);
        std::vector<double> re;
        for (cplx w : z) re.push_back(w.real());
        worst = std::max(worst, ks_statistic(re, [&dm](double x) { return dm.cdf(x); }));
    }
    return {worst < 0.05, fmt("max KS = %.4f at dt = 1e-4, N = 1e4", worst)};
}

Outcome stability() {
    const Measure m = recenter(Measure::uniform(0.0, 1.0)).first;
    const std::vector<std::size_t> ns{16, 32, 64, 128, 256};
    const std::size_t ref_n = 2048;
    const QuantileStep ref = centred_step(m, ref_n);
    const auto G_ref = fourier_coeffs_step(ref, default_truncation(ref_n));

    std::vector<QuantileStep> steps;
    std::vector<double> xs, hd;
    for (std::size_t n : ns) {
        steps.push_back(centred_step(m, n));
        xs.push_back(static_cast<double>(n));
        hd.push_back(hardy_distance(fourier_coeffs_step(steps.back(), default_truncation(n)), G_ref, HardyConfig{}));
    }
    const double slope = loglog_slope(xs, hd);

    std::vector<StepMap> maps;
    for (const auto& s : steps) maps.emplace_back(s);
    const StepMap ref_map(ref);
    std::vector<CoupledMap> cands;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const StepMap* sm = &maps[i];
        cands.push_back({steps[i], [sm](cplx z) { return sm->deriv(z); }});
    }
    const CoupledMap reference{ref, [&ref_map](cplx z) { return ref_map.deriv(z); }};
    GapConfig g;
    g.p = 2.0;
    g.samples = 100000;
    g.paths = 2000;
    g.dt = 1e-3;
    g.seed = 7 + seed_offset;
    const auto gaps = coupled_gap_sweep(cands, reference, g);

    double worst_c1 = 0.0;
    double worst_c2 = -1e300;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const double exact = std::pow(trace_hardy_distance(steps[i], ref, 2.0), 2.0);
        worst_c1 = std::max(worst_c1, std::abs(gaps[i].c1.value - exact) / gaps[i].c1.std_error);
        if (i > 0) {
            const double se = std::hypot(gaps[i].c2.std_error, gaps[i - 1].c2.std_error);
            worst_c2 = std::max(worst_c2, (gaps[i].c2.value - gaps[i - 1].c2.value) / se);
        }
    }
    const bool ok = slope >= -1.25 && slope <= -0.75 && worst_c1 < 3.0 && worst_c2 < 2.0;
    return {ok, fmt("slope = %.4f; max C1 z = %.2f; max C2 rise = %.2f SE", slope, worst_c1, worst_c2)};
}

Outcome mobius() {
    HardyConfig cfg;
    cfg.p = 1.0;
    cfg.method = HardyMethod::BoundaryTrace;
    cfg.nodes = 1 << 16;
    std::vector<double> norms;
    for (double n : {1.0, 5.0, 25.0, 125.0}) {
        const double c = (2 * n + 1) / (n + 1);
        const double r = n / (n + 1);
        std::vector<double> a(400);
        for (std::size_t k = 0; k < a.size(); ++k) a[k] = c * std::pow(r, static_cast<double>(k));
        norms.push_back(hardy_norm(PowerSeriesMap(a), cfg));
    }
    bool ok = true;
    for (std::size_t i = 1; i < norms.size(); ++i) ok = ok && norms[i] > norms[i - 1];
    return {ok, fmt("H1 norms %.4f < %.4f < %.4f", norms[0], norms[1], norms[2]) + fmt(" < %.4f", norms[3])};
}

Outcome sandwich() {
    std::mt19937_64 gen(77);
    std::uniform_int_distribution<int> cells(1, 30);
    constexpr double kQuadTol = 1e-6;
    double worst_trace = -1e300;
    double worst_mc = -1e300;
    for (int trial = 0; trial < 40; ++trial) {
        const auto a = oracle::random_step(gen, static_cast<std::size_t>(cells(gen)), true);
        const auto b = oracle::random_step(gen, static_cast<std::size_t>(cells(gen)), true);
        const double p = 1.0 + 0.5 * (trial % 5);
        const double lhs = lp_quantile_distance(a, b, p);
        const double scale = std::max(1.0, lhs);
        worst_trace = std::max(worst_trace, (lhs - trace_hardy_distance(a, b, p)) / (3.0 * kQuadTol * scale));

        const StepMap ma(a);
        const StepMap mb(b);
        const CoupledMap ca{a, [&ma](cplx z) { return ma.deriv(z); }};
        const CoupledMap cb{b, [&mb](cplx z) { return mb.deriv(z); }};
        GapConfig g;
        g.p = p;
        g.samples = 20000;
        g.paths = 0;
        g.seed = 100 + static_cast<std::uint64_t>(trial);
        const auto gap = coupled_gap_sweep(std::span(&ca, 1), cb, g).front().c1;
        worst_mc = std::max(worst_mc, (std::pow(lhs, p) - gap.value) / (3.0 * gap.std_error));
    }
    return {worst_trace <= 1.0 && worst_mc <= 1.0,
            fmt("max excess over trace route = %.3f tol; over MC = %.3f tol", worst_trace, worst_mc)};
}

} // namespace

// Optional arguments: criterion numbers to run; "--seed-offset k" perturbs the Monte Carlo seed of criterion 8.
int main(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--seed-offset" && i + 1 < argc) {
            seed_offset = std::stoull(argv[++i]);
        } else {
            selected.push_back(std::stoi(arg));
        }
    }
    run(1, "sharpness", 1, sharpness);
    run(2, "rate bound", 5, rate_bound);
    run(3, "hilbert vs PV oracle", 60, hilbert_vs_pv);
    run(4, "biuniform strip", 5, strip);
    run(5, "exit law KS", 10, exit_law);
    run(6, "moment identity", 10, moment_identity);
    run(7, "euler oracle", 600, euler_oracle);
    run(8, "stability decay", 300, stability);
    run(9, "mobius divergence", 30, mobius);
    run(10, "wasserstein sandwich", 60, sandwich);
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
