#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "mhfem/assembly.hpp"
#include "mhfem/mesh.hpp"
#include "mhfem/quadrature.hpp"
#include "mhfem/sparse.hpp"

namespace mhfem {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Nodal coefficient vectors of one Fourier mode: cosine and sine parts.
struct CoefficientPair {
    Vector c;
    Vector s;
};

/// Quarter-period phase shift on a mode pair: (c, s) -> (-s, c).
inline CoefficientPair perp(const CoefficientPair& p) { return {-p.s, p.c}; }

/// Real Fourier coefficients of a T-periodic time factor:
/// a0 = (1/T) int g, ac[k] = (2/T) int g cos(k w t), as[k] = (2/T) int g sin(k w t).
struct TimeCoefficients {
    double a0 = 0.0;
    std::vector<double> ac;  // k = 1..K_max at index k-1
    std::vector<double> as;

    double cos_part(int k) const { return k == 0 ? a0 : ac[k - 1]; }
    double sin_part(int k) const { return k == 0 ? 0.0 : as[k - 1]; }
    int max_mode() const { return static_cast<int>(ac.size()); }
};

/// Composite-Simpson extraction of the first K_max harmonics. `samples` must
/// be even and at least 4*K_max (Nyquist-safe floor).
inline TimeCoefficients time_fourier_coefficients(const std::function<double(double)>& g,
                                                  double omega, int k_max, int samples = 1 << 14) {
    if (omega <= 0.0) throw std::invalid_argument("time_fourier_coefficients: omega must be positive");
    if (samples % 2 != 0 || samples < 4 * k_max || samples < 4) {
        throw std::invalid_argument("time_fourier_coefficients: samples must be even and >= 4*K_max");
    }
    const double period = kTwoPi / omega;
    const double dt = period / samples;
    std::vector<double> gv(samples + 1);
    for (int i = 0; i <= samples; ++i) gv[i] = g(i * dt);

    const auto simpson = [&](const std::function<double(int)>& weight) {
        double sum = weight(0) * gv[0] + weight(samples) * gv[samples];
        for (int i = 1; i < samples; ++i) {
            sum += (i % 2 == 1 ? 4.0 : 2.0) * weight(i) * gv[i];
        }
        return sum * dt / 3.0;
    };

    TimeCoefficients out;
    out.a0 = simpson([](int) { return 1.0; }) / period;
    out.ac.resize(k_max);
    out.as.resize(k_max);
    for (int k = 1; k <= k_max; ++k) {
        out.ac[k - 1] = simpson([&](int i) { return std::cos(k * omega * i * dt); }) * 2.0 / period;
        out.as[k - 1] = simpson([&](int i) { return std::sin(k * omega * i * dt); }) * 2.0 / period;
    }
    return out;
}

/// L2(0,T) inner product of two time factors by composite Simpson.
inline double time_l2_product(const std::function<double(double)>& f,
                              const std::function<double(double)>& g, double omega,
                              int samples = 1 << 14) {
    if (samples % 2 != 0) throw std::invalid_argument("time_l2_product: samples must be even");
    const double period = kTwoPi / omega;
    const double dt = period / samples;
    double sum = f(0.0) * g(0.0) + f(period) * g(period);
    for (int i = 1; i < samples; ++i) {
        const double t = i * dt;
        sum += (i % 2 == 1 ? 4.0 : 2.0) * f(t) * g(t);
    }
    return sum * dt / 3.0;
}

/// One separable term s_j(x) g_j(t). The spatial gradient is optional and
/// only needed when the term describes an exact solution.
struct SeparableTerm {
    std::function<double(Vec2)> spatial;
    std::function<double(double)> time;
    std::function<Vec2(Vec2)> spatial_gradient;  // may be empty
};

/// f(x,t) = sum_j s_j(x) g_j(t), each g_j T-periodic in value.
struct SeparableSource {
    std::vector<SeparableTerm> terms;

    bool empty() const { return terms.empty(); }

    /// Pointwise spatial coefficient of mode k: cos part if `cosine`, else sin part.
    /// `coeffs[j]` are the precomputed time coefficients of term j.
    double mode_value(Vec2 x, int k, bool cosine, const std::vector<TimeCoefficients>& coeffs) const {
        double v = 0.0;
        for (std::size_t j = 0; j < terms.size(); ++j) {
            const double tc = cosine ? coeffs[j].cos_part(k) : coeffs[j].sin_part(k);
            if (tc != 0.0) v += tc * terms[j].spatial(x);
        }
        return v;
    }

    Vec2 mode_gradient(Vec2 x, int k, bool cosine, const std::vector<TimeCoefficients>& coeffs) const {
        Vec2 v{0.0, 0.0};
        for (std::size_t j = 0; j < terms.size(); ++j) {
            const double tc = cosine ? coeffs[j].cos_part(k) : coeffs[j].sin_part(k);
            if (tc != 0.0) v = v + tc * terms[j].spatial_gradient(x);
        }
        return v;
    }
};

/// Gram matrix of the spatial factors in L2(Omega), by mesh quadrature.
inline std::vector<std::vector<double>> spatial_gram(const SeparableSource& src, const Mesh& mesh,
                                                     const QuadratureRule& rule) {
    const std::size_t m = src.terms.size();
    std::vector<std::vector<double>> gram(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
            gram[i][j] = gram[j][i] =
                integrate(mesh, rule, [&](int, Vec2 x, const std::array<double, 3>&) {
                    return src.terms[i].spatial(x) * src.terms[j].spatial(x);
                });
        }
    }
    return gram;
}

/// Truncation remainder E_N = (T/2) sum_{k>N} ||f_k||^2, evaluated as
/// ||f - f_N||^2 over the space-time cylinder: the time tails come from the
/// Parseval difference of the factors, so the k > K_max content is included.
inline double remainder_EN(const SeparableSource& source, int truncation, double omega, int samples,
                           const Mesh& mesh, const QuadratureRule& rule) {
    if (source.empty()) return 0.0;
    const std::size_t m = source.terms.size();
    const auto gram = spatial_gram(source, mesh, rule);
    const double period = kTwoPi / omega;

    std::vector<TimeCoefficients> coeffs;
    coeffs.reserve(m);
    for (const auto& term : source.terms) {
        coeffs.push_back(time_fourier_coefficients(term.time, omega, truncation, samples));
    }

    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            // (g_i - g_{i,N}, g_j - g_{j,N})_{L2(0,T)} via Parseval
            double tail = time_l2_product(source.terms[i].time, source.terms[j].time, omega, samples);
            tail -= period * coeffs[i].a0 * coeffs[j].a0;
            for (int k = 1; k <= truncation; ++k) {
                tail -= 0.5 * period *
                        (coeffs[i].cos_part(k) * coeffs[j].cos_part(k) +
                         coeffs[i].sin_part(k) * coeffs[j].sin_part(k));
            }
            total += gram[i][j] * tail;
        }
    }
    // quadrature round-off can leave a tiny negative remainder for band-limited data
    return total > 0.0 ? total : 0.0;
}

}  // namespace mhfem
