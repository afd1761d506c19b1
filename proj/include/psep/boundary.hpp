#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "psep/measures.hpp"

namespace psep {

/// phi_n(theta) = q_n(|theta| / pi); even in theta. |theta| >= pi is a domain error.
double phi_eval(const QuantileStep& qs, double theta);

/// Conjugate function of the indicator of {|t| in (alpha, beta)}, 0 <= alpha < beta <= pi:
///   (1/pi) ln | sin((theta-alpha)/2) sin((theta+beta)/2) / (sin((theta-beta)/2) sin((theta+alpha)/2)) |.
/// Throws SingularityError within 1e-12 of +-alpha or +-beta (endpoints 0 and pi are removable).
double hilbert_indicator(double alpha, double beta, double theta);

/// H{phi_n}(theta) as the sum over cells (theta_{k-1}, theta_k] of x_k times the indicator
/// transform, theta_k = pi u_k and theta_{-1} = 0. Throws SingularityError within 1e-9 of a
/// jump angle.
double hilbert_phi_step(const QuantileStep& qs, double theta);

inline constexpr double kJumpClearance = 1e-9;

/// Angles +-pi u_k at which phi_n jumps (sorted, in (-pi, pi)).
std::vector<double> jump_angles(const QuantileStep& qs);

struct PvQuadratureConfig {
    int nodes = 8192;                            // midpoint nodes per side
    std::array<double, 3> etas{1e-3, 1e-4, 1e-5}; // cutoffs extrapolated to 0
    std::vector<double> breakpoints;             // discontinuities of f in (-pi, pi]
};

/// Principal-value Hilbert transform (1/2pi) PV int f(theta - t) cot(t/2) dt by composite
/// midpoint quadrature. Both sides are folded into one integral over [eta, pi], split at
/// the images of the breakpoints and sampled uniformly in log t; the three cutoffs are
/// extrapolated to eta = 0. f is called with arguments wrapped into [-pi, pi).
double hilbert_pv_quadrature(const std::function<double(double)>& f, double theta, const PvQuadratureConfig& cfg = {});

class AngleGrid {
public:
    /// grid_size symmetric angles in (-pi, pi), cell midpoints of a uniform partition, each
    /// nudged by a quarter cell if it falls within kJumpClearance of a jump angle.
    static AngleGrid avoiding(const QuantileStep& qs, std::size_t grid_size);

    const std::vector<double>& angles() const { return angles_; }
    const std::vector<double>& jump_angles() const { return jumps_; }

private:
    AngleGrid(std::vector<double> angles, std::vector<double> jumps)
        : angles_(std::move(angles)), jumps_(std::move(jumps)) {}

    std::vector<double> angles_;
    std::vector<double> jumps_;
};

struct BoundarySample {
    double theta;
    double x;
    double y;
};

struct BoundaryCurve {
    std::vector<BoundarySample> samples;
};

/// Samples theta -> (phi_n(theta), H{phi_n}(theta)) on an AngleGrid (grid_size >= 64).
BoundaryCurve boundary_curve(const QuantileStep& qs, std::size_t grid_size);

/// "theta,x,y" header, one sample per line, 17 significant digits.
void write_curve_csv(const BoundaryCurve& curve, std::ostream& out);
BoundaryCurve read_curve_csv(std::istream& in);

/// Self-contained SVG with a single closed polyline path.
std::string curve_svg(const BoundaryCurve& curve);

} // namespace psep
