#include "psep/simulate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "psep/errors.hpp"
#include "psep/rng.hpp"

namespace psep {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kResampleClearance = 1e-12;
constexpr std::uint64_t kPathStreamOffset = std::uint64_t{1} << 32;

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

bool near_any_jump(const StepMap& ref, std::span<const StepMap> others, double theta) {
    if (ref.near_jump(theta, kResampleClearance)) return true;
    return std::any_of(others.begin(), others.end(),
                       [theta](const StepMap& m) { return m.near_jump(theta, kResampleClearance); });
}

// Closed polygon with a uniform-grid edge index for segment crossing queries.
class Polygon {
public:
    Polygon(const BoundaryCurve& curve, double step_scale) {
        if (curve.samples.size() < 3) throw GeometryError("polygon: need at least three vertices");
        for (const auto& s : curve.samples) {
            if (!std::isfinite(s.x) || !std::isfinite(s.y)) throw GeometryError("polygon: vertices must be finite");
            vertices_.emplace_back(s.x, s.y);
        }
        xmin_ = ymin_ = std::numeric_limits<double>::infinity();
        double xmax = -xmin_;
        double ymax = -ymin_;
        for (cplx v : vertices_) {
            xmin_ = std::min(xmin_, v.real());
            ymin_ = std::min(ymin_, v.imag());
            xmax = std::max(xmax, v.real());
            ymax = std::max(ymax, v.imag());
        }
        const double diag = std::hypot(xmax - xmin_, ymax - ymin_);
        cell_ = std::max(step_scale, diag / 2048.0);
        nx_ = static_cast<std::size_t>((xmax - xmin_) / cell_) + 1;
        ny_ = static_cast<std::size_t>((ymax - ymin_) / cell_) + 1;
        buckets_.resize(nx_ * ny_);
        for (std::size_t e = 0; e < vertices_.size(); ++e) {
            const cplx a = vertices_[e];
            const cplx b = vertices_[(e + 1) % vertices_.size()];
            for_cells(a, b, [&](std::size_t idx) { buckets_[idx].push_back(static_cast<std::uint32_t>(e)); });
        }
    }

    // First crossing of segment p -> q with an edge, as a point on that edge.
    std::optional<cplx> first_crossing(cplx p, cplx q) const {
        const cplx r = q - p;
        double best_t = std::numeric_limits<double>::infinity();
        std::optional<cplx> hit;
        for_cells(p, q, [&](std::size_t idx) {
            for (std::uint32_t e : buckets_[idx]) {
                const cplx a = vertices_[e];
                const cplx edge = vertices_[(e + 1) % vertices_.size()] - a;
                const double denom = cross(r, edge);
                if (denom == 0.0) continue;
                const double t = cross(a - p, edge) / denom;
                const double s = cross(a - p, r) / denom;
                if (t >= 0.0 && t <= 1.0 && s >= 0.0 && s <= 1.0 && t < best_t) {
                    best_t = t;
                    hit = a + s * edge;
                }
            }
        });
        return hit;
    }

    bool contains(cplx z) const {
        bool inside = false;
        const std::size_t n = vertices_.size();
        for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
            const cplx a = vertices_[i];
            const cplx b = vertices_[j];
            if ((a.imag() > z.imag()) != (b.imag() > z.imag())) {
                const double x = a.real() + (z.imag() - a.imag()) * (b.real() - a.real()) / (b.imag() - a.imag());
                if (z.real() < x) inside = !inside;
            }
        }
        return inside;
    }

private:
    template <class F>
    void for_cells(cplx a, cplx b, F&& f) const {
        const auto clampi = [](double v, std::size_t hi) {
            if (v < 0.0) return std::size_t{0};
            const auto i = static_cast<std::size_t>(v);
            return std::min(i, hi - 1);
        };
        const std::size_t i0 = clampi((std::min(a.real(), b.real()) - xmin_) / cell_, nx_);
        const std::size_t i1 = clampi((std::max(a.real(), b.real()) - xmin_) / cell_, nx_);
        const std::size_t j0 = clampi((std::min(a.imag(), b.imag()) - ymin_) / cell_, ny_);
        const std::size_t j1 = clampi((std::max(a.imag(), b.imag()) - ymin_) / cell_, ny_);
        for (std::size_t j = j0; j <= j1; ++j) {
            for (std::size_t i = i0; i <= i1; ++i) f(j * nx_ + i);
        }
    }

    std::vector<cplx> vertices_;
    double xmin_ = 0.0;
    double ymin_ = 0.0;
    double cell_ = 1.0;
    std::size_t nx_ = 1;
    std::size_t ny_ = 1;
    std::vector<std::vector<std::uint32_t>> buckets_;
};

} // namespace

std::vector<cplx> sample_exit_points(const QuantileStep& qs, std::size_t N, std::uint64_t seed) {
    if (N < 1) throw ConfigError("sample exit points: need N >= 1");
    const StepMap map(qs);
    std::vector<cplx> out(N);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < N; ++i) {
        Philox4x32 rng(seed, i);
        double theta = 0.0;
        do {
            theta = kPi * (2.0 * rng.uniform() - 1.0);
        } while (map.near_jump(theta, kResampleClearance));
        out[i] = map.trace(theta);
    }
    return out;
}

DiscPath simulate_disc_path(double dt, std::uint64_t seed, std::uint64_t stream, std::uint64_t max_steps) {
    if (!(dt > 0.0 && dt <= 1e-3)) throw ConfigError("disc path: need 0 < dt <= 1e-3");
    Philox4x32 rng(seed, stream);
    const double sd = std::sqrt(dt);
    DiscPath path;
    path.dt = dt;
    path.positions.reserve(static_cast<std::size_t>(1.0 / dt));
    cplx z = 0.0;
    path.positions.push_back(z);
    for (;;) {
        const auto [gx, gy] = rng.normal_pair();
        const cplx next = z + sd * cplx(gx, gy);
        const double r = std::abs(next);
        if (r >= 1.0) {
            path.exit_point = next / r;
            return path;
        }
        if (path.positions.size() >= max_steps) throw RunawayError("disc path: step budget exceeded");
        path.positions.push_back(next);
        z = next;
    }
}

double time_change(const DiscPath& path, const MapDerivative& deriv) {
    double acc = 0.0;
    for (cplx z : path.positions) acc += std::norm(deriv(z));
    return acc * path.dt;
}

double time_change(const DiscPath& path, const PowerSeriesMap& G) {
    return time_change(path, [&G](cplx z) { return G.deriv(z); });
}

nlohmann::json SimulationReport::to_json(bool include_timing) const {
    nlohmann::json j;
    j["seed"] = seed;
    j["samples"] = samples;
    j["paths"] = paths;
    j["dt"] = dt;
    j["config"] = nlohmann::json::object();
    for (const auto& [k, v] : config) j["config"][k] = v;
    j["estimates"] = nlohmann::json::object();
    for (const auto& [k, e] : estimates) j["estimates"][k] = {{"value", e.value}, {"std_error", e.std_error}};
    j["ks"] = nlohmann::json::object();
    for (const auto& [k, v] : ks) j["ks"][k] = v;
    if (include_timing) j["wall_seconds"] = wall_seconds;
    return j;
}

std::vector<GapEstimate> coupled_gap_sweep(std::span<const CoupledMap> candidates, const CoupledMap& reference,
                                           const GapConfig& cfg) {
    if (!(cfg.p >= 1.0)) throw DomainError("coupled gap: need p >= 1");
    if (std::abs(reference.qs.mean()) > 1e-8) throw DomainError("coupled gap: reference must have zero mean");
    for (const auto& c : candidates) {
        if (std::abs(c.qs.mean()) > 1e-8) throw DomainError("coupled gap: candidates must have zero mean");
    }
    const std::size_t m = candidates.size();
    const StepMap ref_map(reference.qs);
    std::vector<StepMap> maps;
    for (const auto& c : candidates) maps.emplace_back(c.qs);

    std::vector<std::vector<double>> c1(m, std::vector<double>(cfg.samples));
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < cfg.samples; ++i) {
        Philox4x32 rng(cfg.seed, i);
        double theta = 0.0;
        do {
            theta = kPi * (2.0 * rng.uniform() - 1.0);
        } while (near_any_jump(ref_map, maps, theta));
        const cplx z_ref = ref_map.trace(theta);
        for (std::size_t c = 0; c < m; ++c) c1[c][i] = std::pow(std::abs(maps[c].trace(theta) - z_ref), cfg.p);
    }

    std::vector<std::vector<double>> c2(m, std::vector<double>(cfg.paths));
#pragma omp parallel for schedule(dynamic)
    for (std::size_t j = 0; j < cfg.paths; ++j) {
        const DiscPath path = simulate_disc_path(cfg.dt, cfg.seed, kPathStreamOffset + j, cfg.max_steps);
        const double tau_ref = time_change(path, reference.deriv);
        for (std::size_t c = 0; c < m; ++c) {
            c2[c][j] = std::pow(std::abs(time_change(path, candidates[c].deriv) - tau_ref), 0.5 * cfg.p);
        }
    }

    std::vector<GapEstimate> out;
    for (std::size_t c = 0; c < m; ++c) out.push_back({mean_estimate(c1[c]), mean_estimate(c2[c])});
    return out;
}

std::tuple<Estimate, Estimate, SimulationReport> coupled_gap_estimate(const QuantileStep& qs_n,
                                                                      const QuantileStep& qs_ref,
                                                                      const PowerSeriesMap& G_n,
                                                                      const PowerSeriesMap& G_ref,
                                                                      const GapConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    const CoupledMap cand{qs_n, [&G_n](cplx z) { return G_n.deriv(z); }};
    const CoupledMap ref{qs_ref, [&G_ref](cplx z) { return G_ref.deriv(z); }};
    const auto gaps = coupled_gap_sweep(std::span(&cand, 1), ref, cfg);

    SimulationReport report;
    report.seed = cfg.seed;
    report.samples = cfg.samples;
    report.paths = cfg.paths;
    report.dt = cfg.dt;
    report.config["p"] = cfg.p;
    report.config["K_n"] = G_n.truncation();
    report.config["K_ref"] = G_ref.truncation();
    report.estimates["C1"] = gaps[0].c1;
    report.estimates["C2"] = gaps[0].c2;
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {gaps[0].c1, gaps[0].c2, report};
}

bool polygon_contains(const BoundaryCurve& curve, cplx z) { return Polygon(curve, 1.0).contains(z); }

std::vector<cplx> euler_exit_oracle(const BoundaryCurve& curve, const EulerConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw ConfigError("euler oracle: need dt > 0");
    if (cfg.samples < 1) throw ConfigError("euler oracle: need at least one sample");
    const double sd = std::sqrt(cfg.dt);
    const Polygon poly(curve, 4.0 * sd);
    if (!poly.contains(0.0)) throw GeometryError("euler oracle: origin lies outside the polygon");

    std::vector<cplx> out(cfg.samples);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < cfg.samples; ++i) {
        Philox4x32 rng(cfg.seed, i);
        cplx z = 0.0;
        for (std::uint64_t step = 0;; ++step) {
            if (step >= cfg.max_steps) throw RunawayError("euler oracle: step budget exceeded");
            const auto [gx, gy] = rng.normal_pair();
            const cplx next = z + sd * cplx(gx, gy);
            if (const auto hit = poly.first_crossing(z, next)) {
                out[i] = *hit;
                break;
            }
            z = next;
        }
    }
    return out;
}

double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw ConfigError("ks statistic: need at least one sample");
    std::vector<double> xs(samples.begin(), samples.end());
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < xs.size()) {
        std::size_t j = i;
        while (j < xs.size() && xs[j] == xs[i]) ++j;
        const double v = xs[i];
        const double emp_left = static_cast<double>(i) / n;
        const double emp = static_cast<double>(j) / n;
        const double f = cdf(v);
        const double f_left = cdf(std::nextafter(v, -std::numeric_limits<double>::infinity()));
        d = std::max({d, std::abs(emp - f), std::abs(emp_left - f_left)});
        i = j;
    }
    return d;
}

} // namespace psep
