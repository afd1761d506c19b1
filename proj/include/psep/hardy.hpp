#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "psep/measures.hpp"

namespace psep {

using cplx = std::complex<double>;

/// G(z) = sum_{k=1}^K a_k z^k with real coefficients and no constant term.
class PowerSeriesMap {
public:
    explicit PowerSeriesMap(std::vector<double> coeffs);

    cplx eval(cplx z) const;
    cplx deriv(cplx z) const;

    /// a_k for k >= 1; zero beyond the truncation.
    double coeff(std::size_t k) const { return (k >= 1 && k <= coeffs_.size()) ? coeffs_[k - 1] : 0.0; }
    const std::vector<double>& coeffs() const { return coeffs_; }
    std::size_t truncation() const { return coeffs_.size(); }

    PowerSeriesMap operator-(const PowerSeriesMap& other) const;
    PowerSeriesMap scaled(double s) const;

private:
    std::vector<double> coeffs_;
};

/// Default truncation for an n-point discretization.
inline std::size_t default_truncation(std::size_t n) { return std::max<std::size_t>(256, 8 * n); }

/// Exact cosine coefficients of the even step extension phi_n:
///   a_k = (2 / (k pi)) sum_j x_j (sin(k theta_j) - sin(k theta_{j-1})).
/// The quantile must have zero mean (|mean| <= 1e-8), otherwise DomainError.
PowerSeriesMap fourier_coeffs_step(const QuantileStep& qs, std::size_t K);

enum class HardyMethod { SeriesParseval, BoundaryTrace, RadialSup };

struct HardyConfig {
    double p = 2.0;
    HardyMethod method = HardyMethod::SeriesParseval;
    std::size_t nodes = 8192;
    std::vector<double> radii{0.9, 0.99, 0.999, 1.0};

    void validate() const;
};

double hardy_norm(const PowerSeriesMap& G, const HardyConfig& cfg);
double hardy_distance(const PowerSeriesMap& G1, const PowerSeriesMap& G2, const HardyConfig& cfg);

/// The untruncated conformal map generated by a step quantile, in closed form.
///
/// With jumps Delta_j of phi_n at theta_j in (0, pi) and m the mean of q_n,
///   G(z)  = m + (i/pi) sum_j Delta_j [log(1 - z e^{-i theta_j}) - log(1 - z e^{i theta_j})],
///   G'(z) = -(2/pi) sum_j Delta_j sin(theta_j) / (1 - 2 z cos(theta_j) + z^2),
/// and the radial limit on the circle is phi_n(theta) + i H{phi_n}(theta).
class StepMap {
public:
    explicit StepMap(const QuantileStep& qs);

    /// |z| < 1.
    cplx eval(cplx z) const;
    cplx deriv(cplx z) const;
    /// phi_n(theta) + i H{phi_n}(theta). Throws SingularityError within 1e-12 of a jump angle.
    cplx trace(double theta) const;
    double phi(double theta) const;
    double conjugate(double theta) const;

    bool near_jump(double theta, double clearance) const;
    const std::vector<double>& jump_angles() const { return angles_; }
    const std::vector<double>& jump_sizes() const { return sizes_; }
    double base_value() const { return base_; }
    double mean() const { return mean_; }

private:
    StepMap() = default;
    friend double trace_hardy_distance(const QuantileStep&, const QuantileStep&, double, int);

    double base_ = 0.0;
    double mean_ = 0.0;
    std::vector<double> angles_;
    std::vector<double> sizes_;
    std::vector<double> sin_half_;
    std::vector<double> cos_half_;
    std::vector<double> two_cos_;
    std::vector<double> deriv_coeff_;

    void precompute();
};

/// G*_n(e^{i theta}) = phi_n(theta) + i H{phi_n}(theta), via hilbert_phi_step.
cplx boundary_trace(const QuantileStep& qs, double theta);

/// ||G*_1 - G*_2||_{L^p(S^1)} for the untruncated maps of two step quantiles, integrating the
/// closed-form traces cell by cell between jump angles (endpoint-graded Gauss-Legendre).
double trace_hardy_distance(const QuantileStep& q1, const QuantileStep& q2, double p, int nodes_per_cell = 32);
double trace_hardy_norm(const QuantileStep& qs, double p, int nodes_per_cell = 32);

/// Series export "k,a_k".
void write_series_csv(const PowerSeriesMap& G, std::ostream& out);
PowerSeriesMap read_series_csv(std::istream& in);

} // namespace psep
