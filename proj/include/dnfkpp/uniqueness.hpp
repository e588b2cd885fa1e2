#pragma once

#include "dnfkpp/dispersion.hpp"
#include "dnfkpp/kernels.hpp"

#include <string>

namespace dnfkpp {

enum class DominanceStatus { Pass, Fail, Indeterminate };
std::string to_string(DominanceStatus s);

struct DominanceReport {
    DominanceStatus status = DominanceStatus::Indeterminate;
    /// min over the grid of κ⁺a⁺(x) − (κ⁺−m)a⁻(x), and where it occurs.
    double min_margin = 0.0;
    double argmin = 0.0;
    /// κ⁺a⁺(0) − (κ⁺−m)a⁻(0).
    double margin_at_zero = 0.0;
    double grid_extent = 0.0;
    std::string conclusion;
};

/// Checks κ⁺a⁺ ≥ (κ⁺−m)a⁻ pointwise on a dense grid (including one-sided
/// values at discontinuities), out to where both densities vanish in double
/// precision, with strict inequality at 0 and a⁻(0) > 0.
DominanceReport check_dominance(const ModelParams& params, const KernelPair& k, int grid_points = 20001);

struct CertifiedValue {
    double value = 0.0;       // certified upper bound
    double tail_bound = 0.0;  // part of `value` contributed by the tail estimate
};

/// I_p(a) = √p · sup_x Σ_j ‖a(x − ·)‖_{L²[jp,(j+1)p)}, upper-bound semantics.
CertifiedValue i_p_bound(const Kernel& a, double p, int x_grid = 512);

/// γ_p = −sup_{j∈ℤ} α(0, 2πj/p); never throws.
double gamma_p(const ModelParams& params, const KernelPair& k, double p);

/// γ_p / (2κ⁻ I_p(a⁻)). NotApplicable when γ_p ≤ tol_sep.
double l2_uniqueness_radius(const ModelParams& params, const KernelPair& k, double p);

/// ‖J_θ‖₁ with J_θ = κ⁺a⁺ − θκ⁻a⁻, upper-bound semantics.
CertifiedValue j_theta_l1(const ModelParams& params, const KernelPair& k);

/// (κ⁺ − ‖J_θ‖₁)/(2κ⁻). NotApplicable if ‖J_θ‖₁ ≥ κ⁺.
double linf_uniqueness_radius(const ModelParams& params, const KernelPair& k);

} // namespace dnfkpp
