#pragma once

// Internal quadrature helpers shared by the library sources.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/legendre.hpp>

namespace psep::detail {

/// Gauss-Legendre rule on [-1, 1] with a runtime node count.
class GaussLegendre {
public:
    explicit GaussLegendre(int n) {
        const auto zeros = boost::math::legendre_p_zeros<double>(n);
        for (double z : zeros) {
            const double dp = boost::math::legendre_p_prime(n, z);
            const double w = 2.0 / ((1.0 - z * z) * dp * dp);
            if (z == 0.0) {
                nodes_.push_back(0.0);
                weights_.push_back(w);
            } else {
                nodes_.push_back(-z);
                weights_.push_back(w);
                nodes_.push_back(z);
                weights_.push_back(w);
            }
        }
    }

    template <class F>
    double integrate(F&& f, double a, double b) const {
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            acc += weights_[i] * f(mid + half * nodes_[i]);
        }
        return acc * half;
    }

    /// Integral over [a, b] after the substitution x = a + (b - a) w(s) with
    /// w(s) = s - sin(2 pi s) / (2 pi); w' vanishes to second order at both ends, which
    /// tames integrable logarithmic endpoint singularities. Nodes never touch a or b.
    template <class F>
    double integrate_endpoint_graded(F&& f, double a, double b) const {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        const double len = b - a;
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            const double s = 0.5 * (nodes_[i] + 1.0);
            const double w = s - std::sin(two_pi * s) / two_pi;
            const double dw = 1.0 - std::cos(two_pi * s);
            acc += weights_[i] * f(a + len * w) * dw;
        }
        return 0.5 * acc * len;
    }

    std::size_t size() const { return nodes_.size(); }

private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

} // namespace psep::detail
