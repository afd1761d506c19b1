#include "psep/hardy.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "psep/boundary.hpp"
#include "psep/errors.hpp"
#include "quadrature.hpp"

namespace psep {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTraceClearance = 1e-12;
constexpr double kAngleMerge = 1e-12;

struct Jump {
    double angle;
    double size;
};

std::vector<Jump> jumps_of(const QuantileStep& qs, double sign) {
    std::vector<Jump> out;
    for (std::size_t k = 0; k + 1 < qs.size(); ++k) {
        const double d = qs.values()[k + 1] - qs.values()[k];
        if (d != 0.0) out.push_back({kPi * qs.cut_levels()[k], sign * d});
    }
    return out;
}

// Sorts, merges angles closer than kAngleMerge and drops cancelled jumps.
std::vector<Jump> normalize(std::vector<Jump> jumps) {
    std::sort(jumps.begin(), jumps.end(), [](const Jump& a, const Jump& b) { return a.angle < b.angle; });
    std::vector<Jump> out;
    for (const Jump& j : jumps) {
        if (!out.empty() && j.angle - out.back().angle < kAngleMerge) {
            out.back().size += j.size;
        } else {
            out.push_back(j);
        }
    }
    std::erase_if(out, [](const Jump& j) { return std::abs(j.size) < 1e-15 || j.angle <= 0.0 || j.angle >= kPi; });
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// PowerSeriesMap

PowerSeriesMap::PowerSeriesMap(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw ConfigError("power series: need at least one coefficient");
    for (double a : coeffs_) {
        if (!std::isfinite(a)) throw ConfigError("power series: coefficients must be finite");
    }
}

cplx PowerSeriesMap::eval(cplx z) const {
    cplx acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
    return acc * z;
}

cplx PowerSeriesMap::deriv(cplx z) const {
    cplx acc = 0.0;
    for (std::size_t k = coeffs_.size(); k >= 1; --k) acc = acc * z + static_cast<double>(k) * coeffs_[k - 1];
    return acc;
}

PowerSeriesMap PowerSeriesMap::operator-(const PowerSeriesMap& other) const {
    std::vector<double> d(std::max(coeffs_.size(), other.coeffs_.size()), 0.0);
    for (std::size_t k = 1; k <= d.size(); ++k) d[k - 1] = coeff(k) - other.coeff(k);
    return PowerSeriesMap(std::move(d));
}

PowerSeriesMap PowerSeriesMap::scaled(double s) const {
    std::vector<double> c = coeffs_;
    for (double& a : c) a *= s;
    return PowerSeriesMap(std::move(c));
}

PowerSeriesMap fourier_coeffs_step(const QuantileStep& qs, std::size_t K) {
    if (K < 1) throw ConfigError("fourier coefficients: need K >= 1");
    if (std::abs(qs.mean()) > 1e-8) {
        throw DomainError("fourier coefficients: quantile must have zero mean (recenter first)");
    }
    // Summation by parts turns the cell sum into -(2/(k pi)) sum_j Delta_j sin(k theta_j).
    std::vector<double> sums(K, 0.0);
    constexpr std::size_t kResync = 128;
    for (const Jump& j : normalize(jumps_of(qs, 1.0))) {
        const cplx step = std::polar(1.0, j.angle);
        cplx rot = step;
        for (std::size_t k = 1; k <= K; ++k) {
            if (k % kResync == 0) rot = std::polar(1.0, static_cast<double>(k) * j.angle);
            sums[k - 1] += j.size * rot.imag();
            rot *= step;
        }
    }
    for (std::size_t k = 1; k <= K; ++k) sums[k - 1] *= -2.0 / (static_cast<double>(k) * kPi);
    return PowerSeriesMap(std::move(sums));
}

// ---------------------------------------------------------------------------
// Hardy norms

void HardyConfig::validate() const {
    if (!(p >= 1.0) || !std::isfinite(p)) throw ConfigError("hardy config: need finite p >= 1");
    if (method == HardyMethod::SeriesParseval && p != 2.0) {
        throw ConfigError("hardy config: the Parseval method requires p = 2");
    }
    if (nodes < 256) throw ConfigError("hardy config: need at least 256 quadrature nodes");
    if (method == HardyMethod::RadialSup) {
        if (radii.empty()) throw ConfigError("hardy config: radius ladder is empty");
        for (double r : radii) {
            if (!(r > 0.0 && r <= 1.0)) throw ConfigError("hardy config: radii must lie in (0, 1]");
        }
    }
}

namespace {

double circle_mean_power(const PowerSeriesMap& G, double r, double p, std::size_t nodes) {
    const double h = 2.0 * kPi / static_cast<double>(nodes);
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes; ++i) {
        const double theta = -kPi + (static_cast<double>(i) + 0.5) * h;
        acc += std::pow(std::abs(G.eval(std::polar(r, theta))), p);
    }
    return acc / static_cast<double>(nodes);
}

} // namespace

double hardy_norm(const PowerSeriesMap& G, const HardyConfig& cfg) {
    cfg.validate();
    switch (cfg.method) {
    case HardyMethod::SeriesParseval: {
        double acc = 0.0;
        for (double a : G.coeffs()) acc += a * a;
        return std::sqrt(acc);
    }
    case HardyMethod::BoundaryTrace:
        return std::pow(circle_mean_power(G, 1.0, cfg.p, cfg.nodes), 1.0 / cfg.p);
    case HardyMethod::RadialSup: {
        double best = 0.0;
        for (double r : cfg.radii) best = std::max(best, circle_mean_power(G, r, cfg.p, cfg.nodes));
        return std::pow(best, 1.0 / cfg.p);
    }
    }
    return 0.0;
}

double hardy_distance(const PowerSeriesMap& G1, const PowerSeriesMap& G2, const HardyConfig& cfg) {
    return hardy_norm(G1 - G2, cfg);
}

// ---------------------------------------------------------------------------
// StepMap

StepMap::StepMap(const QuantileStep& qs) : base_(qs.values().front()), mean_(qs.mean()) {
    for (const Jump& j : normalize(jumps_of(qs, 1.0))) {
        angles_.push_back(j.angle);
        sizes_.push_back(j.size);
    }
    precompute();
}

void StepMap::precompute() {
    sin_half_.clear();
    cos_half_.clear();
    two_cos_.clear();
    deriv_coeff_.clear();
    for (std::size_t j = 0; j < angles_.size(); ++j) {
        sin_half_.push_back(std::sin(0.5 * angles_[j]));
        cos_half_.push_back(std::cos(0.5 * angles_[j]));
        two_cos_.push_back(2.0 * std::cos(angles_[j]));
        deriv_coeff_.push_back(-2.0 / kPi * sizes_[j] * std::sin(angles_[j]));
    }
}

bool StepMap::near_jump(double theta, double clearance) const {
    const double t = std::abs(theta);
    const auto it = std::lower_bound(angles_.begin(), angles_.end(), t);
    if (it != angles_.end() && *it - t < clearance) return true;
    if (it != angles_.begin() && t - *(it - 1) < clearance) return true;
    return false;
}

double StepMap::phi(double theta) const {
    const double t = std::abs(theta);
    double v = base_;
    for (std::size_t j = 0; j < angles_.size() && angles_[j] < t; ++j) v += sizes_[j];
    return v;
}

double StepMap::conjugate(double theta) const {
    if (near_jump(theta, kTraceClearance)) throw SingularityError("trace: theta too close to a jump angle");
    const double s = std::sin(0.5 * theta);
    const double c = std::cos(0.5 * theta);
    double acc = 0.0;
    for (std::size_t j = 0; j < angles_.size(); ++j) {
        double minus = s * cos_half_[j] - c * sin_half_[j];
        const double plus = s * cos_half_[j] + c * sin_half_[j];
        if (std::abs(theta - angles_[j]) < 1e-4) minus = std::sin(0.5 * (theta - angles_[j]));
        acc += sizes_[j] * std::log(std::abs(minus / plus));
    }
    return acc / kPi;
}

cplx StepMap::trace(double theta) const { return {phi(theta), conjugate(theta)}; }

cplx StepMap::eval(cplx z) const {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < angles_.size(); ++j) {
        const cplx e = std::polar(1.0, angles_[j]);
        acc += sizes_[j] * (std::log(1.0 - z * std::conj(e)) - std::log(1.0 - z * e));
    }
    return mean_ + cplx(0.0, 1.0 / kPi) * acc;
}

cplx StepMap::deriv(cplx z) const {
    const cplx w = 1.0 + z * z;
    cplx acc = 0.0;
    for (std::size_t j = 0; j < angles_.size(); ++j) {
        const cplx d = w - two_cos_[j] * z;
        acc += deriv_coeff_[j] * std::conj(d) / std::norm(d);
    }
    return acc;
}

cplx boundary_trace(const QuantileStep& qs, double theta) {
    return {phi_eval(qs, theta), hilbert_phi_step(qs, theta)};
}

double trace_hardy_distance(const QuantileStep& q1, const QuantileStep& q2, double p, int nodes_per_cell) {
    if (!(p >= 1.0)) throw DomainError("trace hardy distance: need p >= 1");
    if (nodes_per_cell < 4) throw ConfigError("trace hardy distance: need at least 4 nodes per cell");

    auto jumps = jumps_of(q1, 1.0);
    const auto j2 = jumps_of(q2, -1.0);
    jumps.insert(jumps.end(), j2.begin(), j2.end());

    StepMap diff;
    diff.base_ = q1.values().front() - q2.values().front();
    diff.mean_ = q1.mean() - q2.mean();
    for (const Jump& j : normalize(std::move(jumps))) {
        diff.angles_.push_back(j.angle);
        diff.sizes_.push_back(j.size);
    }
    diff.precompute();

    std::vector<double> edges{0.0};
    edges.insert(edges.end(), diff.angles_.begin(), diff.angles_.end());
    edges.push_back(kPi);

    const detail::GaussLegendre rule(nodes_per_cell);
    double acc = 0.0;
    double level = diff.base_;
    for (std::size_t i = 1; i < edges.size(); ++i) {
        const double lo = edges[i - 1];
        const double hi = edges[i];
        if (i >= 2) level += diff.sizes_[i - 2];
        const double phi = level;
        acc += rule.integrate_endpoint_graded(
            [&](double t) { return std::pow(std::abs(cplx(phi, diff.conjugate(t))), p); }, lo, hi);
    }
    // |G*(e^{-i theta})| = |G*(e^{i theta})|, so the half circle suffices.
    return std::pow(acc / kPi, 1.0 / p);
}

double trace_hardy_norm(const QuantileStep& qs, double p, int nodes_per_cell) {
    return trace_hardy_distance(qs, QuantileStep({1.0}, {0.0}), p, nodes_per_cell);
}

// ---------------------------------------------------------------------------
// Series I/O

void write_series_csv(const PowerSeriesMap& G, std::ostream& out) {
    out << "k,a_k\n" << std::setprecision(17);
    for (std::size_t k = 1; k <= G.truncation(); ++k) out << k << ',' << G.coeff(k) << '\n';
}

PowerSeriesMap read_series_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("k,a_k", 0) != 0) throw ConfigError("series csv: missing 'k,a_k' header");
    std::vector<double> coeffs;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        std::size_t k = 0;
        double a = 0.0;
        if (!(row >> k >> a) || k != coeffs.size() + 1) {
            throw ConfigError("series csv: rows must be k = 1, 2, ... in order");
        }
        coeffs.push_back(a);
    }
    return PowerSeriesMap(std::move(coeffs));
}

} // namespace psep
