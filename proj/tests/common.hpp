#pragma once

#include "dnfkpp/critical.hpp"
#include "dnfkpp/dispersion.hpp"

#include <random>

namespace testing {

// Reference values from an independent 30-digit mpmath solve of the tangency
// system (closed-form transforms, no shared code with the library).
inline constexpr double gauss_h_c = 4.2821956170510633;
inline constexpr double gauss_k_c = 0.55247663159424039;
inline constexpr double gauss_omega = 0.61050299296500714;
inline constexpr double gauss_d2 = -8.044457081166229;
inline constexpr double unif_h_c = 1.8028057863270425;
inline constexpr double unif_k_c = 1.2914589517023085;
inline constexpr double unif_omega = 0.6606128173100629;
inline constexpr double unif_d2 = -1.5513838478738707;

inline const dnfkpp::ModelParams& example_params() {
    static const dnfkpp::ModelParams p(1.0, 1.0, 0.5);
    return p;
}

inline const dnfkpp::CriticalPoint& gaussian_critical() {
    static const dnfkpp::CriticalPoint cp =
        dnfkpp::find_tangency(example_params(), dnfkpp::gaussian_example_family(2.0, 2.0), 0.1, 20.0);
    return cp;
}

inline const dnfkpp::CriticalPoint& uniform_critical() {
    static const dnfkpp::CriticalPoint cp =
        dnfkpp::find_tangency(example_params(), dnfkpp::uniform_example_family(1.0, 2.0), 1.0, 10.0);
    return cp;
}

inline std::mt19937_64 rng(std::uint64_t seed = 20240611) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

/// Admissible (κ⁺, κ⁻, m): κ⁺ > m > 0, κ⁻ > 0.
inline dnfkpp::ModelParams random_params(std::mt19937_64& g) {
    const double kp = uniform(g, 0.2, 5.0);
    const double m = uniform(g, 0.05, 0.95) * kp;
    return dnfkpp::ModelParams(kp, uniform(g, 0.1, 5.0), m);
}

inline std::vector<dnfkpp::Kernel> builtin_kernels() {
    using dnfkpp::Kernel;
    return {Kernel::gaussian(2.0), Kernel::gaussian(0.3), Kernel::gaussian_pair(2.0, 4.0),
            Kernel::gaussian_pair(0.5, 1.5), Kernel::uniform(1.0), Kernel::uniform(2.5),
            Kernel::uniform_pair(2.0, 0.8), Kernel::uniform_pair(0.5, 3.0)};
}

} // namespace testing
