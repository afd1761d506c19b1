#include "psep/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "psep/errors.hpp"

namespace psep {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kIndicatorClearance = 1e-12;

double wrap_angle(double x) { return x - 2.0 * kPi * std::floor((x + kPi) / (2.0 * kPi)); }

struct Cell {
    double lo;
    double hi;
    double value;
};

// Cells (theta_{k-1}, theta_k] on (0, pi) with consecutive equal values merged.
std::vector<Cell> angle_cells(const QuantileStep& qs) {
    std::vector<Cell> cells;
    double prev = 0.0;
    for (std::size_t k = 0; k < qs.size(); ++k) {
        const double hi = (k + 1 == qs.size()) ? kPi : kPi * qs.cut_levels()[k];
        if (hi > prev) {
            if (!cells.empty() && cells.back().value == qs.values()[k]) {
                cells.back().hi = hi;
            } else {
                cells.push_back({prev, hi, qs.values()[k]});
            }
            prev = hi;
        }
    }
    return cells;
}

double log_abs_sin_half(double x) { return std::log(std::abs(std::sin(0.5 * x))); }

// Value at 0 of the quadratic through (x_i, y_i).
double extrapolate_to_zero(const std::array<double, 3>& x, const std::array<double, 3>& y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        double w = 1.0;
        for (std::size_t j = 0; j < 3; ++j) {
            if (j != i) w *= (0.0 - x[j]) / (x[i] - x[j]);
        }
        acc += w * y[i];
    }
    return acc;
}

} // namespace

double phi_eval(const QuantileStep& qs, double theta) {
    if (!(std::abs(theta) < kPi)) throw DomainError("phi: theta must lie in (-pi, pi)");
    return qs(std::abs(theta) / kPi);
}

double hilbert_indicator(double alpha, double beta, double theta) {
    if (!(alpha >= 0.0 && alpha < beta && beta <= kPi)) {
        throw DomainError("hilbert indicator: need 0 <= alpha < beta <= pi");
    }
    double acc = 0.0;
    for (double s : {alpha, beta}) {
        if (s <= 0.0 || s >= kPi) continue;
        if (std::abs(theta - s) < kIndicatorClearance || std::abs(theta + s) < kIndicatorClearance) {
            throw SingularityError("hilbert indicator: theta at a singular angle");
        }
    }
    // Factors with alpha = 0 or beta = pi have modulus one.
    if (alpha > 0.0) acc += log_abs_sin_half(theta - alpha) - log_abs_sin_half(theta + alpha);
    if (beta < kPi) acc += log_abs_sin_half(theta + beta) - log_abs_sin_half(theta - beta);
    return acc / kPi;
}

std::vector<double> jump_angles(const QuantileStep& qs) {
    const auto cells = angle_cells(qs);
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < cells.size(); ++i) out.push_back(cells[i].hi);
    std::vector<double> all;
    all.reserve(2 * out.size());
    for (auto it = out.rbegin(); it != out.rend(); ++it) all.push_back(-*it);
    all.insert(all.end(), out.begin(), out.end());
    return all;
}

double hilbert_phi_step(const QuantileStep& qs, double theta) {
    const auto cells = angle_cells(qs);
    for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
        if (std::abs(std::abs(theta) - cells[i].hi) < kJumpClearance) {
            throw SingularityError("hilbert transform: theta too close to a jump angle");
        }
    }
    double acc = 0.0;
    for (const Cell& c : cells) acc += c.value * hilbert_indicator(c.lo, c.hi, theta);
    return acc;
}

double hilbert_pv_quadrature(const std::function<double(double)>& f, double theta, const PvQuadratureConfig& cfg) {
    if (cfg.nodes < 16) throw ConfigError("pv quadrature: need at least 16 nodes");
    for (double eta : cfg.etas) {
        if (!(eta > 0.0 && eta < kPi)) throw ConfigError("pv quadrature: cutoffs must lie in (0, pi)");
    }

    std::vector<double> cuts;
    for (double d : cfg.breakpoints) cuts.push_back(std::abs(wrap_angle(theta - d)));

    const auto g = [&](double t) {
        return (f(wrap_angle(theta - t)) - f(wrap_angle(theta + t))) / std::tan(0.5 * t);
    };

    std::array<double, 3> values{};
    for (std::size_t e = 0; e < 3; ++e) {
        const double eta = cfg.etas[e];
        std::vector<double> edges{eta, kPi};
        for (double c : cuts) {
            if (c > eta && c < kPi) edges.push_back(c);
        }
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

        const double total = std::log(kPi / eta);
        double integral = 0.0;
        for (std::size_t i = 1; i < edges.size(); ++i) {
            const double a = std::log(edges[i - 1]);
            const double b = std::log(edges[i]);
            const int m = std::max(16, static_cast<int>(std::ceil(cfg.nodes * (b - a) / total)));
            const double h = (b - a) / m;
            double panel = 0.0;
            for (int j = 0; j < m; ++j) {
                const double t = std::exp(a + (j + 0.5) * h);
                panel += g(t) * t;
            }
            integral += panel * h;
        }
        values[e] = integral / (2.0 * kPi);
    }
    return extrapolate_to_zero(cfg.etas, values);
}

AngleGrid AngleGrid::avoiding(const QuantileStep& qs, std::size_t grid_size) {
    if (grid_size < 2) throw ConfigError("angle grid: need at least two angles");
    const auto jumps = psep::jump_angles(qs);
    std::vector<double> positive_jumps;
    for (double j : jumps) {
        if (j > 0.0) positive_jumps.push_back(j);
    }
    const auto clear = [&](double t) {
        const auto it = std::lower_bound(positive_jumps.begin(), positive_jumps.end(), t);
        if (it != positive_jumps.end() && *it - t < kJumpClearance) return false;
        if (it != positive_jumps.begin() && t - *(it - 1) < kJumpClearance) return false;
        return true;
    };

    const double h = 2.0 * kPi / static_cast<double>(grid_size);
    const bool odd = grid_size % 2 == 1;
    std::vector<double> half;
    for (std::size_t i = 0; i < grid_size / 2; ++i) {
        double t = odd ? h * static_cast<double>(i + 1) : h * (static_cast<double>(i) + 0.5);
        if (!clear(t)) {
            if (clear(t + 0.25 * h)) {
                t += 0.25 * h;
            } else if (clear(t - 0.25 * h)) {
                t -= 0.25 * h;
            } else {
                throw ConfigError("angle grid: cannot clear jump angles; increase grid size");
            }
        }
        half.push_back(t);
    }

    std::vector<double> angles;
    angles.reserve(grid_size);
    for (auto it = half.rbegin(); it != half.rend(); ++it) angles.push_back(-*it);
    if (odd) angles.push_back(0.0);
    angles.insert(angles.end(), half.begin(), half.end());
    return AngleGrid(std::move(angles), jumps);
}

BoundaryCurve boundary_curve(const QuantileStep& qs, std::size_t grid_size) {
    if (grid_size < 64) throw ConfigError("boundary curve: grid size must be at least 64");
    const AngleGrid grid = AngleGrid::avoiding(qs, grid_size);
    const auto& angles = grid.angles();
    const std::size_t n = angles.size();

    BoundaryCurve curve;
    curve.samples.resize(n);
    // Evaluate on theta >= 0 and mirror: x is even, y is odd.
    const std::size_t first_nonneg = n / 2;
#pragma omp parallel for schedule(static)
    for (std::size_t i = first_nonneg; i < n; ++i) {
        const double t = angles[i];
        const double x = phi_eval(qs, t);
        const double y = (t == 0.0) ? 0.0 : hilbert_phi_step(qs, t);
        curve.samples[i] = {t, x, y};
        if (t != 0.0) curve.samples[n - 1 - i] = {-t, x, -y};
    }
    return curve;
}

void write_curve_csv(const BoundaryCurve& curve, std::ostream& out) {
    out << "theta,x,y\n" << std::setprecision(17);
    for (const auto& s : curve.samples) out << s.theta << ',' << s.x << ',' << s.y << '\n';
}

BoundaryCurve read_curve_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("theta,x,y", 0) != 0) {
        throw ConfigError("curve csv: missing 'theta,x,y' header");
    }
    BoundaryCurve curve;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        BoundarySample s{};
        if (!(row >> s.theta >> s.x >> s.y)) {
            throw ConfigError("curve csv: malformed line " + std::to_string(lineno));
        }
        curve.samples.push_back(s);
    }
    return curve;
}

std::string curve_svg(const BoundaryCurve& curve) {
    double xmin = std::numeric_limits<double>::infinity();
    double xmax = -xmin;
    double ymin = xmin;
    double ymax = -xmin;
    for (const auto& s : curve.samples) {
        xmin = std::min(xmin, s.x);
        xmax = std::max(xmax, s.x);
        ymin = std::min(ymin, -s.y);
        ymax = std::max(ymax, -s.y);
    }
    const double pad = 0.05 * std::max({xmax - xmin, ymax - ymin, 1e-9});
    std::ostringstream os;
    os << std::setprecision(10);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << xmin - pad << ' ' << ymin - pad << ' '
       << (xmax - xmin) + 2 * pad << ' ' << (ymax - ymin) + 2 * pad << "\">\n";
    os << "<path fill=\"none\" stroke=\"black\" stroke-width=\"" << pad / 10 << "\" d=\"";
    bool first = true;
    for (const auto& s : curve.samples) {
        os << (first ? "M" : " L") << s.x << ',' << -s.y;
        first = false;
    }
    os << " Z\"/>\n</svg>\n";
    return os.str();
}

} // namespace psep
