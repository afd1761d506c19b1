#pragma once

// Reference computations that share no code with the library's closed forms.

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "psep/measures.hpp"

namespace oracle {

inline double bisect_quantile(const psep::Measure& m, double u) {
    double lo = m.support_lo() - 1.0;
    double hi = m.support_hi();
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (m.cdf(mid) >= u) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

inline double riemann_mean(const std::function<double(double)>& q, int n) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += q((i + 0.5) / n);
    return acc / n;
}

inline double riemann_lp(const std::function<double(double)>& q1, const std::function<double(double)>& q2, double p,
                         int n) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = (i + 0.5) / n;
        acc += std::pow(std::abs(q1(u) - q2(u)), p);
    }
    return std::pow(acc / n, 1.0 / p);
}

// (2/pi) int_0^pi q(theta/pi) cos(k theta) d theta by composite Simpson on each cell of constancy.
inline std::vector<double> cosine_coeffs(const psep::QuantileStep& qs, std::size_t K, int panels = 4096) {
    constexpr double pi = std::numbers::pi;
    std::vector<double> out(K, 0.0);
    double prev = 0.0;
    for (std::size_t c = 0; c < qs.size(); ++c) {
        const double lo = pi * prev;
        const double hi = pi * qs.cut_levels()[c];
        prev = qs.cut_levels()[c];
        if (hi <= lo) continue;
        const double h = (hi - lo) / (2 * panels);
        for (std::size_t k = 1; k <= K; ++k) {
            double s = std::cos(k * lo) + std::cos(k * hi);
            for (int i = 1; i < 2 * panels; ++i) s += (i % 2 ? 4.0 : 2.0) * std::cos(k * (lo + i * h));
            out[k - 1] += qs.values()[c] * s * h / 3.0 * 2.0 / pi;
        }
    }
    return out;
}

// Random step quantile with n cells; recentred to zero mean when requested.
inline psep::QuantileStep random_step(std::mt19937_64& gen, std::size_t n, bool zero_mean) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<double> w(n), x(n);
    double total = 0.0;
    for (auto& v : w) total += (v = 0.05 + U(gen));
    double level = 0.0, pos = -1.0;
    std::vector<double> cuts(n);
    for (std::size_t i = 0; i < n; ++i) {
        level += w[i] / total;
        cuts[i] = i + 1 == n ? 1.0 : level;
        pos += 0.05 + U(gen);
        x[i] = pos;
    }
    psep::QuantileStep qs(cuts, x);
    return zero_mean ? qs.shifted(-qs.mean()) : qs;
}

} // namespace oracle
