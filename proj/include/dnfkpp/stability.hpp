#pragma once

#include "dnfkpp/dispersion.hpp"
#include "dnfkpp/fields.hpp"

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <utility>
#include <vector>

namespace dnfkpp {

enum class Space { Full, Y };

/// Linearization L h = A h − κ⁻_ε h (a⁻_k ∗ v) − κ⁻_ε v (a⁻_k ∗ h) on the basis
/// {1, cos 1..N, sin 1..N} (in that order). Space::Y drops the sin(x) vector.
Eigen::MatrixXd assemble_L(const FourierField& field, const EpsParams& params, const KernelPair& k, Space space);

struct SpectrumReport {
    /// Full-space eigenvalues, sorted by real part, descending.
    std::vector<std::complex<double>> eigenvalues;
    /// Largest real part over the phase-fixed space Y.
    double leading_in_Y = 0.0;
    /// Odd-block eigenvalue nearest 0, with the cosine similarity between its
    /// eigenvector and v′.
    std::complex<double> translation_eigenvalue;
    double translation_similarity = 0.0;
    std::pair<double, double> essential_interval;
    std::vector<std::string> warnings;
};

SpectrumReport spectrum(const FourierField& field, const EpsParams& params, const KernelPair& k);

/// [min, max] of −κ⁺_ε − κ⁻_ε (a⁻_k ∗ v)(x) on a uniform period grid.
std::pair<double, double> essential_range(const FourierField& field, const EpsParams& params, const KernelPair& k,
                                          int grid_size = 512);

} // namespace dnfkpp
