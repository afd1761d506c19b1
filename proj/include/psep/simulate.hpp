#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "psep/boundary.hpp"
#include "psep/hardy.hpp"
#include "psep/measures.hpp"
#include "psep/stats.hpp"

#include <json.hpp>

namespace psep {

inline constexpr std::uint64_t kDefaultStepBudget = 100'000'000;

/// Planar Brownian path from 0 killed on the unit circle.
struct DiscPath {
    double dt = 0.0;
    std::vector<cplx> positions; // interior positions B_0 = 0, ..., B_{m-1}
    cplx exit_point;             // first outside point projected radially onto |z| = 1

    std::size_t steps() const { return positions.size(); }
    double exit_time() const { return dt * static_cast<double>(positions.size()); }
};

/// Exact draws of the exit position from the mu_n-domain: theta uniform on (-pi, pi),
/// Z = G*_n(e^{i theta}). Draw i uses Philox stream i.
std::vector<cplx> sample_exit_points(const QuantileStep& qs, std::size_t N, std::uint64_t seed);

/// Gaussian increments of variance dt per coordinate until |B| >= 1 (0 < dt <= 1e-3).
DiscPath simulate_disc_path(double dt, std::uint64_t seed, std::uint64_t stream = 0,
                            std::uint64_t max_steps = kDefaultStepBudget);

using MapDerivative = std::function<cplx(cplx)>;

/// Left-point Riemann sum of |G'(B_{t_i})|^2 dt over the interior positions.
double time_change(const DiscPath& path, const MapDerivative& deriv);
double time_change(const DiscPath& path, const PowerSeriesMap& G);

struct SimulationReport {
    std::uint64_t seed = 0;
    std::size_t samples = 0;
    std::size_t paths = 0;
    double dt = 0.0;
    std::map<std::string, Estimate> estimates;
    std::map<std::string, double> ks;
    std::map<std::string, nlohmann::json> config;
    double wall_seconds = 0.0;

    /// Wall-clock time is omitted unless requested.
    nlohmann::json to_json(bool include_timing = false) const;
};

struct GapConfig {
    double p = 2.0;
    std::size_t samples = 10000; // common exit angles for C1
    std::size_t paths = 1000;    // shared disc paths for C2
    double dt = 1e-4;
    std::uint64_t seed = 1;
    std::uint64_t max_steps = kDefaultStepBudget;
};

/// A candidate domain: its step quantile (exact boundary trace) and the derivative used
/// for the time change.
struct CoupledMap {
    QuantileStep qs;
    MapDerivative deriv;
};

struct GapEstimate {
    Estimate c1; // E|Z^n - Z|^p over common exit angles
    Estimate c2; // E|tau_n - tau|^{p/2} over shared disc paths
};

/// C1/C2 gaps of several candidates against one reference, all driven by the same angles and
/// the same disc paths (canonical coupling). Stream layout: angle i uses stream i, path j uses
/// stream 2^32 + j.
std::vector<GapEstimate> coupled_gap_sweep(std::span<const CoupledMap> candidates, const CoupledMap& reference,
                                           const GapConfig& cfg);

std::tuple<Estimate, Estimate, SimulationReport> coupled_gap_estimate(const QuantileStep& qs_n,
                                                                      const QuantileStep& qs_ref,
                                                                      const PowerSeriesMap& G_n,
                                                                      const PowerSeriesMap& G_ref,
                                                                      const GapConfig& cfg);

struct EulerConfig {
    double dt = 1e-4;
    std::size_t samples = 10000;
    std::uint64_t seed = 1;
    std::uint64_t max_steps = kDefaultStepBudget;
};

/// Exit points of Euler-stepped Brownian paths from 0 in the closed polygon through the curve
/// samples. A step exits at its first crossing with a polygon edge.
std::vector<cplx> euler_exit_oracle(const BoundaryCurve& curve, const EulerConfig& cfg);

/// Even-odd test.
bool polygon_contains(const BoundaryCurve& curve, cplx z);

/// Atom-aware Kolmogorov-Smirnov distance between the empirical law of samples and cdf.
/// Left limits are taken as cdf(nextafter(x, -inf)).
double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);

} // namespace psep
