#include "psep/measures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>

#include "psep/errors.hpp"
#include "quadrature.hpp"

namespace psep {

namespace {

constexpr double kTol = 1e-12;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

bool finite_all(std::initializer_list<double> xs) {
    return std::all_of(xs.begin(), xs.end(), [](double v) { return std::isfinite(v); });
}

// Integral of |g|^p over an interval of length width where g is affine from g0 to g1.
double affine_abs_power_integral(double g0, double g1, double width, double p) {
    if (width <= 0.0) return 0.0;
    const double scale = std::max(std::abs(g0), std::abs(g1));
    if (scale == 0.0) return 0.0;
    if (std::abs(g1 - g0) <= 1e-6 * scale) {
        // Nearly constant: Simpson is exact to O(((g1-g0)/g)^4).
        const double gm = 0.5 * (g0 + g1);
        return width * (std::pow(std::abs(g0), p) + 4.0 * std::pow(std::abs(gm), p) + std::pow(std::abs(g1), p)) / 6.0;
    }
    const double slope = (g1 - g0) / width;
    const double a0 = std::pow(std::abs(g0), p + 1.0);
    const double a1 = std::pow(std::abs(g1), p + 1.0);
    if ((g0 < 0.0 && g1 > 0.0) || (g0 > 0.0 && g1 < 0.0)) {
        return (a0 + a1) / ((p + 1.0) * std::abs(slope));
    }
    return std::abs(a1 - a0) / ((p + 1.0) * std::abs(slope));
}

std::vector<double> merged_levels(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out;
    out.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// Measure

Measure Measure::uniform(double lo, double hi) {
    require(finite_all({lo, hi}), "uniform: bounds must be finite");
    require(lo < hi, "uniform: need lo < hi");
    return Measure(family::Uniform{lo, hi});
}

Measure Measure::biuniform(double a, double b, double c, double d) {
    require(finite_all({a, b, c, d}), "biuniform: bounds must be finite");
    require(a < b && b <= c && c < d, "biuniform: need a < b <= c < d");
    return Measure(family::BiUniform{a, b, c, d});
}

Measure Measure::two_point(double x1, double w1, double x2) {
    require(finite_all({x1, w1, x2}), "twopoint: parameters must be finite");
    require(x1 < x2, "twopoint: need x1 < x2");
    require(w1 > 0.0 && w1 < 1.0, "twopoint: need 0 < w1 < 1");
    return Measure(family::TwoPoint{x1, w1, x2});
}

Measure Measure::truncated_exponential(double rate, double lo, double hi) {
    require(finite_all({rate, lo, hi}), "truncexp: parameters must be finite");
    require(rate > 0.0, "truncexp: need rate > 0");
    require(lo < hi, "truncexp: need lo < hi");
    return Measure(family::TruncExp{rate, lo, hi});
}

Measure Measure::discrete(std::vector<double> points, std::vector<double> masses) {
    require(!points.empty() && points.size() == masses.size(), "discrete: need matching nonempty points/masses");
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        require(std::isfinite(points[i]), "discrete: points must be finite");
        require(masses[i] > 0.0 && masses[i] <= 1.0, "discrete: masses must lie in (0, 1]");
        if (i > 0) require(points[i - 1] < points[i], "discrete: points must be strictly increasing");
        total += masses[i];
    }
    require(std::abs(total - 1.0) <= kTol, "discrete: masses must sum to 1");
    return Measure(family::Discrete{std::move(points), std::move(masses)});
}

Measure Measure::tabulated(std::vector<double> x, std::vector<double> F) {
    require(x.size() >= 2 && x.size() == F.size(), "tabulated cdf: need at least two (x, F) rows");
    for (std::size_t i = 0; i < x.size(); ++i) {
        require(std::isfinite(x[i]) && std::isfinite(F[i]), "tabulated cdf: values must be finite");
        require(F[i] >= -kTol && F[i] <= 1.0 + kTol, "tabulated cdf: F must lie in [0, 1]");
        F[i] = std::clamp(F[i], 0.0, 1.0);
        if (i > 0) {
            require(x[i - 1] < x[i], "tabulated cdf: x must be strictly increasing");
            require(F[i] >= F[i - 1] - kTol, "tabulated cdf: F must be nondecreasing");
            F[i] = std::max(F[i], F[i - 1]);
        }
    }
    require(std::abs(F.back() - 1.0) <= kTol, "tabulated cdf: last F must equal 1");
    F.back() = 1.0;
    return Measure(family::Tabulated{std::move(x), std::move(F)});
}

double Measure::cdf(double x) const {
    const double y = x - shift_;
    return std::visit(
        overloaded{
            [y](const family::Uniform& f) { return std::clamp((y - f.lo) / (f.hi - f.lo), 0.0, 1.0); },
            [y](const family::BiUniform& f) {
                const double w = (f.b - f.a) / ((f.b - f.a) + (f.d - f.c));
                if (y <= f.a) return 0.0;
                if (y < f.b) return w * (y - f.a) / (f.b - f.a);
                if (y <= f.c) return w;
                if (y < f.d) return w + (1.0 - w) * (y - f.c) / (f.d - f.c);
                return 1.0;
            },
            [y](const family::TwoPoint& f) { return y < f.x1 ? 0.0 : (y < f.x2 ? f.w1 : 1.0); },
            [y](const family::TruncExp& f) {
                if (y <= f.lo) return 0.0;
                if (y >= f.hi) return 1.0;
                return std::expm1(-f.rate * (y - f.lo)) / std::expm1(-f.rate * (f.hi - f.lo));
            },
            [y](const family::Discrete& f) {
                const auto end = std::upper_bound(f.points.begin(), f.points.end(), y);
                const auto k = static_cast<std::size_t>(end - f.points.begin());
                if (k == f.points.size()) return 1.0;
                return std::accumulate(f.masses.begin(), f.masses.begin() + static_cast<long>(k), 0.0);
            },
            [y](const family::Tabulated& f) {
                if (y < f.x.front()) return 0.0;
                if (y >= f.x.back()) return 1.0;
                const auto it = std::upper_bound(f.x.begin(), f.x.end(), y);
                const auto i = static_cast<std::size_t>(it - f.x.begin());
                const double t = (y - f.x[i - 1]) / (f.x[i] - f.x[i - 1]);
                return f.F[i - 1] + t * (f.F[i] - f.F[i - 1]);
            },
        },
        kind_);
}

double Measure::cdf_left(double x) const {
    double left = cdf(x);
    for (const Atom& a : atoms()) {
        if (a.location == x) left -= a.mass;
    }
    return std::max(left, 0.0);
}

double Measure::quantile(double u) const {
    if (!(u > 0.0 && u <= 1.0)) throw DomainError("quantile: u must lie in (0, 1]");
    const double q = std::visit(
        overloaded{
            [u](const family::Uniform& f) { return u == 1.0 ? f.hi : f.lo + u * (f.hi - f.lo); },
            [u](const family::BiUniform& f) {
                const double w = (f.b - f.a) / ((f.b - f.a) + (f.d - f.c));
                if (u <= w) return f.a + (u / w) * (f.b - f.a);
                if (u == 1.0) return f.d;
                return f.c + ((u - w) / (1.0 - w)) * (f.d - f.c);
            },
            [u](const family::TwoPoint& f) { return u <= f.w1 ? f.x1 : f.x2; },
            [u](const family::TruncExp& f) {
                if (u == 1.0) return f.hi;
                const double z = -std::expm1(-f.rate * (f.hi - f.lo));
                return std::min(f.hi, f.lo - std::log1p(-u * z) / f.rate);
            },
            [u](const family::Discrete& f) {
                double cum = 0.0;
                for (std::size_t k = 0; k + 1 < f.points.size(); ++k) {
                    cum += f.masses[k];
                    if (cum >= u) return f.points[k];
                }
                return f.points.back();
            },
            [u](const family::Tabulated& f) {
                if (u <= f.F.front()) return f.x.front();
                const auto it = std::lower_bound(f.F.begin() + 1, f.F.end(), u);
                const auto i = static_cast<std::size_t>(it - f.F.begin());
                if (i >= f.F.size()) return f.x.back();
                const double t = (u - f.F[i - 1]) / (f.F[i] - f.F[i - 1]);
                return f.x[i - 1] + t * (f.x[i] - f.x[i - 1]);
            },
        },
        kind_);
    return q + shift_;
}

double Measure::support_lo() const {
    return shift_ + std::visit(overloaded{
                                   [](const family::Uniform& f) { return f.lo; },
                                   [](const family::BiUniform& f) { return f.a; },
                                   [](const family::TwoPoint& f) { return f.x1; },
                                   [](const family::TruncExp& f) { return f.lo; },
                                   [](const family::Discrete& f) { return f.points.front(); },
                                   [](const family::Tabulated& f) { return f.x.front(); },
                               },
                               kind_);
}

double Measure::support_hi() const {
    return shift_ + std::visit(overloaded{
                                   [](const family::Uniform& f) { return f.hi; },
                                   [](const family::BiUniform& f) { return f.d; },
                                   [](const family::TwoPoint& f) { return f.x2; },
                                   [](const family::TruncExp& f) { return f.hi; },
                                   [](const family::Discrete& f) { return f.points.back(); },
                                   [](const family::Tabulated& f) { return f.x.back(); },
                               },
                               kind_);
}

double Measure::mean() const {
    const double base = std::visit(
        overloaded{
            [](const family::Uniform& f) { return 0.5 * (f.lo + f.hi); },
            [](const family::BiUniform& f) {
                const double l1 = f.b - f.a;
                const double l2 = f.d - f.c;
                return (l1 * 0.5 * (f.a + f.b) + l2 * 0.5 * (f.c + f.d)) / (l1 + l2);
            },
            [](const family::TwoPoint& f) { return f.w1 * f.x1 + (1.0 - f.w1) * f.x2; },
            [](const family::TruncExp& f) {
                const double len = f.hi - f.lo;
                const double z = -std::expm1(-f.rate * len);
                return f.lo + 1.0 / f.rate - len * std::exp(-f.rate * len) / z;
            },
            [](const family::Discrete& f) {
                return std::inner_product(f.points.begin(), f.points.end(), f.masses.begin(), 0.0);
            },
            [](const family::Tabulated& f) {
                double m = f.x.front() * f.F.front();
                for (std::size_t i = 1; i < f.x.size(); ++i) {
                    m += 0.5 * (f.x[i - 1] + f.x[i]) * (f.F[i] - f.F[i - 1]);
                }
                return m;
            },
        },
        kind_);
    return base + shift_;
}

std::vector<Atom> Measure::atoms() const {
    std::vector<Atom> out = std::visit(
        overloaded{
            [](const family::Uniform&) { return std::vector<Atom>{}; },
            [](const family::BiUniform&) { return std::vector<Atom>{}; },
            [](const family::TwoPoint& f) { return std::vector<Atom>{{f.x1, f.w1}, {f.x2, 1.0 - f.w1}}; },
            [](const family::TruncExp&) { return std::vector<Atom>{}; },
            [](const family::Discrete& f) {
                std::vector<Atom> v;
                for (std::size_t i = 0; i < f.points.size(); ++i) v.push_back({f.points[i], f.masses[i]});
                return v;
            },
            [](const family::Tabulated& f) {
                return f.F.front() > 0.0 ? std::vector<Atom>{{f.x.front(), f.F.front()}} : std::vector<Atom>{};
            },
        },
        kind_);
    for (Atom& a : out) a.location += shift_;
    return out;
}

std::vector<std::pair<double, double>> Measure::support_components() const {
    using Intervals = std::vector<std::pair<double, double>>;
    Intervals out = std::visit(overloaded{
                                   [](const family::Uniform& f) { return Intervals{{f.lo, f.hi}}; },
                                   [](const family::BiUniform& f) {
                                       if (f.b == f.c) return Intervals{{f.a, f.d}};
                                       return Intervals{{f.a, f.b}, {f.c, f.d}};
                                   },
                                   [](const family::TwoPoint&) { return Intervals{}; },
                                   [](const family::TruncExp& f) { return Intervals{{f.lo, f.hi}}; },
                                   [](const family::Discrete&) { return Intervals{}; },
                                   [](const family::Tabulated& f) {
                                       Intervals v;
                                       for (std::size_t i = 1; i < f.x.size(); ++i) {
                                           if (f.F[i] <= f.F[i - 1]) continue;
                                           if (!v.empty() && v.back().second == f.x[i - 1]) {
                                               v.back().second = f.x[i];
                                           } else {
                                               v.emplace_back(f.x[i - 1], f.x[i]);
                                           }
                                       }
                                       return v;
                                   },
                               },
                               kind_);
    for (auto& [lo, hi] : out) {
        lo += shift_;
        hi += shift_;
    }
    return out;
}

std::optional<std::vector<QuantilePiece>> Measure::quantile_pieces() const {
    using Pieces = std::optional<std::vector<QuantilePiece>>;
    Pieces out = std::visit(
        overloaded{
            [](const family::Uniform& f) -> Pieces { return std::vector<QuantilePiece>{{0.0, 1.0, f.lo, f.hi}}; },
            [](const family::BiUniform& f) -> Pieces {
                const double w = (f.b - f.a) / ((f.b - f.a) + (f.d - f.c));
                return std::vector<QuantilePiece>{{0.0, w, f.a, f.b}, {w, 1.0, f.c, f.d}};
            },
            [](const family::TwoPoint& f) -> Pieces {
                return std::vector<QuantilePiece>{{0.0, f.w1, f.x1, f.x1}, {f.w1, 1.0, f.x2, f.x2}};
            },
            [](const family::TruncExp&) -> Pieces { return std::nullopt; },
            [](const family::Discrete& f) -> Pieces {
                std::vector<QuantilePiece> v;
                double cum = 0.0;
                for (std::size_t i = 0; i < f.points.size(); ++i) {
                    const double next = (i + 1 == f.points.size()) ? 1.0 : cum + f.masses[i];
                    v.push_back({cum, next, f.points[i], f.points[i]});
                    cum = next;
                }
                return v;
            },
            [](const family::Tabulated& f) -> Pieces {
                std::vector<QuantilePiece> v;
                if (f.F.front() > 0.0) v.push_back({0.0, f.F.front(), f.x.front(), f.x.front()});
                for (std::size_t i = 1; i < f.x.size(); ++i) {
                    if (f.F[i] > f.F[i - 1]) v.push_back({f.F[i - 1], f.F[i], f.x[i - 1], f.x[i]});
                }
                return v;
            },
        },
        kind_);
    if (out) {
        for (QuantilePiece& piece : *out) {
            piece.x0 += shift_;
            piece.x1 += shift_;
        }
    }
    return out;
}

Measure Measure::shifted(double c) const { return Measure(kind_, shift_ + c); }

std::string Measure::describe() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(overloaded{
                   [&](const family::Uniform& f) { os << "uniform:" << f.lo << ',' << f.hi; },
                   [&](const family::BiUniform& f) { os << "biuniform:" << f.a << ',' << f.b << ',' << f.c << ',' << f.d; },
                   [&](const family::TwoPoint& f) { os << "twopoint:" << f.x1 << ',' << f.w1 << ',' << f.x2; },
                   [&](const family::TruncExp& f) { os << "truncexp:" << f.rate << ',' << f.lo << ',' << f.hi; },
                   [&](const family::Discrete& f) { os << "discrete[" << f.points.size() << " atoms]"; },
                   [&](const family::Tabulated& f) { os << "tabulated[" << f.x.size() << " rows]"; },
               },
               kind_);
    if (shift_ != 0.0) os << " shifted by " << shift_;
    return os.str();
}

std::pair<Measure, double> recenter(const Measure& m) {
    const double mu = m.mean();
    return {m.shifted(-mu), mu};
}

Measure read_tabulated_cdf(std::istream& in) {
    std::vector<double> xs;
    std::vector<double> Fs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream row(line);
        double x = 0.0;
        double F = 0.0;
        std::string extra;
        if (!(row >> x >> F) || (row >> extra)) {
            throw ConfigError("tabulated cdf: line " + std::to_string(lineno) + " must hold exactly two numbers");
        }
        xs.push_back(x);
        Fs.push_back(F);
    }
    return Measure::tabulated(std::move(xs), std::move(Fs));
}

Measure read_tabulated_cdf_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open cdf file '" + path + "'");
    return read_tabulated_cdf(in);
}

// ---------------------------------------------------------------------------
// Meshes

Mesh::Mesh(std::vector<double> points) : points_(std::move(points)) {
    require(points_.size() >= 2, "mesh: need at least two points");
    for (std::size_t i = 1; i < points_.size(); ++i) {
        require(points_[i - 1] < points_[i], "mesh: points must be strictly increasing");
    }
}

double Mesh::max_width() const {
    double w = 0.0;
    for (std::size_t i = 1; i < points_.size(); ++i) w = std::max(w, points_[i] - points_[i - 1]);
    return w;
}

Mesh uniform_mesh(double a, double b, std::size_t n) {
    require(n >= 1, "uniform mesh: need n >= 1");
    require(a < b, "uniform mesh: need a < b");
    std::vector<double> pts(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        pts[k] = a + ((b - a) * static_cast<double>(k)) / static_cast<double>(n);
    }
    pts.back() = b;
    return Mesh(std::move(pts));
}

Mesh adapted_mesh(const Measure& m, std::size_t n) {
    const auto comps = m.support_components();
    const double lo = m.support_lo();
    const double hi = m.support_hi();
    if (comps.size() <= 1) return uniform_mesh(lo, hi, n);
    require(n >= 1, "adapted mesh: need n >= 1");

    // Each component gets at least ceil(n L_i / (b - a)) cells; leftovers go to the widest cells.
    const double width = hi - lo;
    std::vector<std::size_t> cells;
    std::size_t used = 0;
    for (const auto& [a, b] : comps) {
        const auto c = static_cast<std::size_t>(std::ceil((b - a) * static_cast<double>(n) / width - 1e-12));
        cells.push_back(std::max<std::size_t>(1, c));
        used += cells.back();
    }
    for (; used < n; ++used) {
        std::size_t widest = 0;
        for (std::size_t i = 1; i < comps.size(); ++i) {
            const double wi = (comps[i].second - comps[i].first) / static_cast<double>(cells[i]);
            const double ww = (comps[widest].second - comps[widest].first) / static_cast<double>(cells[widest]);
            if (wi > ww) widest = i;
        }
        ++cells[widest];
    }

    std::vector<double> pts;
    if (comps.front().first > lo) pts.push_back(lo);
    for (std::size_t i = 0; i < comps.size(); ++i) {
        const auto piece = uniform_mesh(comps[i].first, comps[i].second, cells[i]).points();
        for (double x : piece) {
            if (pts.empty() || x > pts.back()) pts.push_back(x);
        }
    }
    if (pts.back() < hi) pts.push_back(hi);
    return Mesh(std::move(pts));
}

// ---------------------------------------------------------------------------
// Discrete measures and step quantiles

DiscreteMeasure::DiscreteMeasure(std::vector<double> supports, std::vector<double> weights)
    : supports_(std::move(supports)), weights_(std::move(weights)) {
    require(!supports_.empty() && supports_.size() == weights_.size(), "discrete measure: need matching nonempty data");
    double total = 0.0;
    for (std::size_t i = 0; i < supports_.size(); ++i) {
        require(std::isfinite(supports_[i]), "discrete measure: supports must be finite");
        require(weights_[i] > 0.0, "discrete measure: weights must be positive");
        if (i > 0) require(supports_[i - 1] < supports_[i], "discrete measure: supports must be strictly increasing");
        total += weights_[i];
    }
    require(std::abs(total - 1.0) <= kTol, "discrete measure: weights must sum to 1");
}

double DiscreteMeasure::cdf(double x) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < supports_.size() && supports_[i] <= x; ++i) acc += weights_[i];
    return supports_.back() <= x ? 1.0 : acc;
}

double DiscreteMeasure::mean() const {
    return std::inner_product(supports_.begin(), supports_.end(), weights_.begin(), 0.0);
}

DiscreteMeasure DiscreteMeasure::shifted(double c) const {
    std::vector<double> s = supports_;
    for (double& v : s) v += c;
    return DiscreteMeasure(std::move(s), weights_);
}

DiscreteMeasure discretize(const Measure& m, const Mesh& mesh) {
    const double a = m.support_lo();
    const double b = m.support_hi();
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    require(std::abs(mesh.front() - a) <= kTol * scale && std::abs(mesh.back() - b) <= kTol * scale,
            "discretize: mesh endpoints must match the support");

    std::vector<double> supports;
    std::vector<double> weights;
    double level = m.cdf(a);
    if (level > kZeroMass) {
        supports.push_back(a);
        weights.push_back(level);
    }
    const auto& pts = mesh.points();
    for (std::size_t k = 1; k < pts.size(); ++k) {
        const double next = (k + 1 == pts.size()) ? 1.0 : m.cdf(pts[k]);
        if (next - level > kZeroMass) {
            supports.push_back(pts[k]);
            weights.push_back(next - level);
            level = next;
        }
    }
    // Residual below the drop threshold goes to the last atom so the total stays exact.
    weights.back() += 1.0 - level;
    return DiscreteMeasure(std::move(supports), std::move(weights));
}

std::pair<DiscreteMeasure, double> recenter(const DiscreteMeasure& d) {
    const double mu = d.mean();
    return {d.shifted(-mu), mu};
}

QuantileStep::QuantileStep(std::vector<double> cut_levels, std::vector<double> values)
    : cut_levels_(std::move(cut_levels)), values_(std::move(values)) {
    require(!values_.empty() && values_.size() == cut_levels_.size(), "quantile step: need matching nonempty data");
    for (std::size_t k = 0; k < values_.size(); ++k) {
        require(std::isfinite(values_[k]), "quantile step: values must be finite");
        require(cut_levels_[k] > 0.0 && cut_levels_[k] <= 1.0 + kTol, "quantile step: cut levels must lie in (0, 1]");
        if (k > 0) {
            require(cut_levels_[k - 1] <= cut_levels_[k], "quantile step: cut levels must be nondecreasing");
            require(values_[k - 1] <= values_[k], "quantile step: values must be nondecreasing");
        }
    }
    require(std::abs(cut_levels_.back() - 1.0) <= kTol, "quantile step: last cut level must be 1");
    cut_levels_.back() = 1.0;
}

double QuantileStep::operator()(double u) const {
    if (!(u >= 0.0 && u <= 1.0)) throw DomainError("quantile step: u must lie in [0, 1]");
    const auto it = std::lower_bound(cut_levels_.begin(), cut_levels_.end(), u);
    const auto k = static_cast<std::size_t>(it - cut_levels_.begin());
    return values_[std::min(k, values_.size() - 1)];
}

double QuantileStep::mean() const {
    double acc = 0.0;
    double prev = 0.0;
    for (std::size_t k = 0; k < values_.size(); ++k) {
        acc += (cut_levels_[k] - prev) * values_[k];
        prev = cut_levels_[k];
    }
    return acc;
}

QuantileStep QuantileStep::shifted(double c) const {
    std::vector<double> v = values_;
    for (double& x : v) x += c;
    return QuantileStep(cut_levels_, std::move(v));
}

QuantileStep QuantileStep::scaled(double s) const {
    require(s >= 0.0, "quantile step: scale must be nonnegative");
    std::vector<double> v = values_;
    for (double& x : v) x *= s;
    return QuantileStep(cut_levels_, std::move(v));
}

QuantileStep quantile_step(const DiscreteMeasure& d) {
    std::vector<double> levels(d.size());
    std::partial_sum(d.weights().begin(), d.weights().end(), levels.begin());
    levels.back() = 1.0;
    for (double& u : levels) u = std::min(u, 1.0);
    return QuantileStep(std::move(levels), d.supports());
}

QuantileStep operator+(const QuantileStep& a, const QuantileStep& b) {
    auto levels = merged_levels(a.cut_levels(), b.cut_levels());
    std::vector<double> values;
    values.reserve(levels.size());
    for (double u : levels) values.push_back(a(u) + b(u));
    return QuantileStep(std::move(levels), std::move(values));
}

// ---------------------------------------------------------------------------
// L^p distances

double lp_quantile_distance(const QuantileStep& q1, const QuantileStep& q2, double p) {
    if (!(p >= 1.0)) throw DomainError("lp distance: need p >= 1");
    const auto levels = merged_levels(q1.cut_levels(), q2.cut_levels());
    double acc = 0.0;
    double prev = 0.0;
    for (double u : levels) {
        acc += std::pow(std::abs(q1(u) - q2(u)), p) * (u - prev);
        prev = u;
    }
    return std::pow(acc, 1.0 / p);
}

double lp_quantile_distance(const Measure& m, const QuantileStep& qs, double p, const QuadratureConfig& quad) {
    if (!(p >= 1.0)) throw DomainError("lp distance: need p >= 1");
    const auto pieces = m.quantile_pieces();
    if (!pieces) {
        return lp_quantile_distance([&m](double u) { return m.quantile(u); }, [&qs](double u) { return qs(u); }, p,
                                    qs.cut_levels(), quad);
    }

    double acc = 0.0;
    std::size_t k = 0;
    for (const QuantilePiece& piece : *pieces) {
        if (piece.u1 <= piece.u0) continue;
        const double slope = (piece.x1 - piece.x0) / (piece.u1 - piece.u0);
        const auto q = [&](double u) { return piece.x0 + slope * (u - piece.u0); };
        double lo = piece.u0;
        while (lo < piece.u1) {
            while (k + 1 < qs.size() && qs.cut_levels()[k] <= lo) ++k;
            const double hi = std::min(piece.u1, qs.cut_levels()[k]);
            const double c = qs.values()[k];
            acc += affine_abs_power_integral(q(lo) - c, (hi == piece.u1 ? piece.x1 : q(hi)) - c, hi - lo, p);
            if (hi <= lo) break;
            lo = hi;
        }
    }
    return std::pow(acc, 1.0 / p);
}

double lp_quantile_distance(const std::function<double(double)>& q1, const std::function<double(double)>& q2,
                            double p, std::vector<double> breaks, const QuadratureConfig& quad) {
    if (!(p >= 1.0)) throw DomainError("lp distance: need p >= 1");
    require(quad.nodes >= 2, "quadrature: need at least two nodes");
    breaks.push_back(0.0);
    breaks.push_back(1.0);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    const detail::GaussLegendre rule(quad.nodes);
    double acc = 0.0;
    for (std::size_t i = 1; i < breaks.size(); ++i) {
        const double lo = std::max(breaks[i - 1], 0.0);
        const double hi = std::min(breaks[i], 1.0);
        if (hi <= lo) continue;
        acc += rule.integrate([&](double u) { return std::pow(std::abs(q1(u) - q2(u)), p); }, lo, hi);
    }
    return std::pow(acc, 1.0 / p);
}

} // namespace psep
