#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace psep {

struct Atom {
    double location;
    double mass;
};

// Piece of a quantile function that is affine on (u0, u1]: q(u0+) = x0, q(u1) = x1.
struct QuantilePiece {
    double u0;
    double u1;
    double x0;
    double x1;
};

namespace family {

struct Uniform {
    double lo;
    double hi;
};

// Uniform on (a, b) U (c, d), with b <= c.
struct BiUniform {
    double a;
    double b;
    double c;
    double d;
};

// Mass w1 at x1, 1 - w1 at x2.
struct TwoPoint {
    double x1;
    double w1;
    double x2;
};

// Exp(rate) conditioned on (lo, hi).
struct TruncExp {
    double rate;
    double lo;
    double hi;
};

// Finitely many atoms; a single atom gives a degenerate support a == b.
struct Discrete {
    std::vector<double> points;
    std::vector<double> masses;
};

// Piecewise-linear cdf through (x_i, F_i); F_0 > 0 is an atom at x_0.
struct Tabulated {
    std::vector<double> x;
    std::vector<double> F;
};

} // namespace family

using MeasureKind = std::variant<family::Uniform, family::BiUniform, family::TwoPoint, family::TruncExp,
                                 family::Discrete, family::Tabulated>;

/// A probability law on a bounded interval [a, b].
///
/// Immutable after construction. Every family is validated by its factory; the
/// optional translation (see recenter) is applied on top of the family.
class Measure {
public:
    static Measure uniform(double lo, double hi);
    static Measure biuniform(double a, double b, double c, double d);
    static Measure two_point(double x1, double w1, double x2);
    static Measure truncated_exponential(double rate, double lo, double hi);
    static Measure discrete(std::vector<double> points, std::vector<double> masses);
    static Measure dirac(double c) { return discrete({c}, {1.0}); }
    /// Tabulated cdf with linear interpolation. Monotonicity violations above 1e-12 and a
    /// final value off 1 by more than 1e-12 are rejected.
    static Measure tabulated(std::vector<double> x, std::vector<double> F);

    /// F(x) = mu((-inf, x]).
    double cdf(double x) const;
    /// F(x-) = mu((-inf, x)).
    double cdf_left(double x) const;
    /// q(u) = inf{x : F(x) >= u}, u in (0, 1].
    double quantile(double u) const;

    double support_lo() const;
    double support_hi() const;
    double mean() const;
    std::vector<Atom> atoms() const;

    /// Maximal intervals of positive length carrying the absolutely continuous part.
    /// Empty for purely atomic measures.
    std::vector<std::pair<double, double>> support_components() const;

    /// Exact affine decomposition of the quantile, or nullopt when q is not piecewise affine.
    std::optional<std::vector<QuantilePiece>> quantile_pieces() const;

    Measure shifted(double c) const;
    double shift() const { return shift_; }
    const MeasureKind& kind() const { return kind_; }
    std::string describe() const;

private:
    explicit Measure(MeasureKind kind, double shift = 0.0) : kind_(std::move(kind)), shift_(shift) {}

    MeasureKind kind_;
    double shift_ = 0.0;
};

/// Translate to zero mean. Returns the centred measure and the applied shift c,
/// so that the original is recovered as result.shifted(c).
std::pair<Measure, double> recenter(const Measure& m);

/// Tabulated cdf file: two whitespace-separated columns "x F" per line.
Measure read_tabulated_cdf(std::istream& in);
Measure read_tabulated_cdf_file(const std::string& path);

class Mesh {
public:
    explicit Mesh(std::vector<double> points);

    const std::vector<double>& points() const { return points_; }
    std::size_t n() const { return points_.size() - 1; }
    double front() const { return points_.front(); }
    double back() const { return points_.back(); }
    double max_width() const;

private:
    std::vector<double> points_;
};

/// x_k = a + (b - a) k / n.
Mesh uniform_mesh(double a, double b, std::size_t n);

/// Uniform mesh on each support component, with component endpoints as mesh points. Each
/// component gets at least ceil(n L_i / (b - a)) cells, so every positive-mass cell has width
/// at most (b - a) / n; gaps become single zero-mass cells. The cell count is n whenever these
/// minimums fit, and exceeds n otherwise. Coincides with uniform_mesh on connected supports.
Mesh adapted_mesh(const Measure& m, std::size_t n);

class DiscreteMeasure {
public:
    DiscreteMeasure(std::vector<double> supports, std::vector<double> weights);

    const std::vector<double>& supports() const { return supports_; }
    const std::vector<double>& weights() const { return weights_; }
    std::size_t size() const { return supports_.size(); }

    double cdf(double x) const;
    double mean() const;
    DiscreteMeasure shifted(double c) const;

private:
    std::vector<double> supports_;
    std::vector<double> weights_;
};

/// Right-endpoint allocation: F(a) at a, F(x_k) - F(x_{k-1}) at x_k. Cells whose mass is
/// below kZeroMass are dropped.
DiscreteMeasure discretize(const Measure& m, const Mesh& mesh);

inline constexpr double kZeroMass = 1e-14;

/// DiscreteMeasure translated to zero mean, plus the applied shift.
std::pair<DiscreteMeasure, double> recenter(const DiscreteMeasure& d);

/// Step quantile q_n(u) = x_k for u in (u_{k-1}, u_k], u_{-1} = 0, u_n = 1.
class QuantileStep {
public:
    QuantileStep(std::vector<double> cut_levels, std::vector<double> values);

    double operator()(double u) const;

    /// u_0, ..., u_n (the implicit u_{-1} = 0 is not stored).
    const std::vector<double>& cut_levels() const { return cut_levels_; }
    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }

    double mean() const;
    QuantileStep shifted(double c) const;
    QuantileStep scaled(double s) const;

private:
    std::vector<double> cut_levels_;
    std::vector<double> values_;
};

QuantileStep quantile_step(const DiscreteMeasure& d);

/// Sum of two step quantiles on the merged partition.
QuantileStep operator+(const QuantileStep& a, const QuantileStep& b);

struct QuadratureConfig {
    // Gauss-Legendre nodes per cell when no closed form applies.
    int nodes = 32;
};

/// ||q1 - q2||_{L^p(0,1)}. Exact on the merged cut partition.
double lp_quantile_distance(const QuantileStep& q1, const QuantileStep& q2, double p);

/// ||q - q_n||_{L^p(0,1)}. Exact per cell when q is piecewise affine, otherwise
/// Gauss-Legendre on each cell of the merged partition.
double lp_quantile_distance(const Measure& m, const QuantileStep& qs, double p, const QuadratureConfig& quad = {});

/// Generic route for arbitrary quantile evaluators; breaks lists known discontinuities in (0,1).
double lp_quantile_distance(const std::function<double(double)>& q1, const std::function<double(double)>& q2,
                            double p, std::vector<double> breaks, const QuadratureConfig& quad = {});

} // namespace psep
