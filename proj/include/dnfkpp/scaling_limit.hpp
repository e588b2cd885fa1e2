#pragma once

#include "dnfkpp/critical.hpp"
#include "dnfkpp/dispersion.hpp"

#include <vector>

namespace dnfkpp {

/// Rescaled rates: a⁺ is replaced by a⁺_σ(x) = a⁺(x/σ)/σ and the rates are
///   κ̃⁺_ε = (1+ε)(κ⁺+ϰ)/σ²,  κ̃⁻_ε = (1 + ε(κ⁺+ϰ)/(σ²(κ⁺−m)))κ⁻,
///   m̃ = m + (κ⁺+ϰ)/σ² − κ⁺.
struct ScaledParams {
    ModelParams base;
    double sigma = 1.0;
    double kappa_extra = 0.0;
    double eps = 0.0;

    double kappa_plus_eps() const;
    double kappa_minus_eps() const;
    double m_tilde() const;
    Rates rates() const { return Rates{kappa_plus_eps(), kappa_minus_eps(), m_tilde()}; }
};

/// γ = ½∫y²a⁺(y)dy.
double gamma_second_moment(const Kernel& a_plus);

/// α̃(ε, p, σ, ϰ). For σ ≤ 0 only ε = 0 is defined, as the continuous
/// extension −γ(κ⁺+ϰ)p² − (κ⁺−m)â⁻(p); other ε throw UnsupportedExtension.
double tilde_alpha(double eps, double p, double sigma, double kappa_extra, const ModelParams& base,
                   const KernelPair& k);
double tilde_alpha_dk(double p, double sigma, double kappa_extra, const ModelParams& base, const KernelPair& k);
double tilde_alpha_dk2(double p, double sigma, double kappa_extra, const ModelParams& base, const KernelPair& k);
/// ∂ϰα̃ and ∂ϰ∂kα̃ at ε = 0.
double tilde_alpha_dkappa(double p, double sigma, const KernelPair& k);
double tilde_alpha_dkappa_dk(double p, double sigma, const KernelPair& k);
/// ∂εα̃(0, p, σ, ϰ); diverges like 1/σ² as σ → 0 under this parametrization.
double tilde_alpha_deps(double p, double sigma, double kappa_extra, const ModelParams& base, const KernelPair& k);

/// d(μ, k) = −k² − μ â⁻(k) and its k-derivatives.
double local_d(double mu, double k, const Kernel& a_minus);
double local_d_dk(double mu, double k, const Kernel& a_minus);
double local_d_dk2(double mu, double k, const Kernel& a_minus);

struct LocalLimitData {
    double mu_c = 0.0;
    double h_c = 0.0;
    double k_c = 0.0;
    double d = 0.0;
    double d_k = 0.0;
    double d_kk = 0.0;
    double omega_1 = 0.0;
    /// Ω₀(ε, δ) = omega0_eps·ε + omega0_delta·δ², with omega0_delta the direct
    /// σ → 0 limit −κ⁺(1 + (μ_c/2)∂²kâ⁻(k_c)).
    double omega0_eps = 0.0;
    double omega0_delta = 0.0;
    /// The alternative printed form −κ⁺(1 + μ_c/2)∂²kâ⁻(k_c), reported alongside.
    double omega0_delta_printed = 0.0;
    /// ω₀ = κ⁺ω₁/θ², the σ → 0 limit of ω(σ).
    double omega_0 = 0.0;
    KernelPair kernels;
};

/// Tangency of d(μ_c, ·) over the minus-kernel parameter of `family`
/// (μ_c = (κ⁺−m)/κ⁺), followed by ω₁ and the Ω₀ coefficients.
LocalLimitData local_quantities(const ModelParams& base, const KernelFamily& family, double h_lo, double h_hi);

struct KappaSolution {
    double k = 0.0;
    double kappa = 0.0;
    double residual_value = 0.0;
    double residual_slope = 0.0;
    int iters = 0;
};

/// Newton on (α̃, ∂kα̃)(k, ϰ) = 0 at fixed σ, continued from σ = 0 in
/// `substeps` stages. Throws NewtonDiverged when continuation fails.
KappaSolution solve_k_and_kappa(double sigma, const ModelParams& base, const KernelPair& k,
                                const LocalLimitData& local, int substeps = 8);

struct ConvergenceRow {
    double sigma = 0.0;
    double k_c = 0.0;
    double kappa = 0.0;
    double d_eps = 0.0;         // ∂εα̃ as parametrized
    double d_eps_reduced = 0.0; // α̃ − m â⁻(k_c(σ))
    double d_kk = 0.0;
    double omega = 0.0;
    double omega_discrepancy = 0.0; // ω(σ)θ² − κ⁺ω₁
};

struct ConvergenceStudy {
    std::vector<ConvergenceRow> rows;
    /// Least-squares log-log slope of |ϰ(σ)| against σ over rows with σ > 0.
    double kappa_rate = 0.0;
    double k_rate = 0.0;
};

ConvergenceStudy convergence_study(const ModelParams& base, const KernelPair& k, const LocalLimitData& local,
                                   const std::vector<double>& sigma_list);

} // namespace dnfkpp
