#pragma once

#include "dnfkpp/kernels.hpp"

#include <string>
#include <vector>

namespace dnfkpp {

/// Raw rate triple. Unvalidated so that time integration can also run
/// outside the bifurcation regime (e.g. κ⁺ < m).
struct Rates {
    double kappa_plus = 1.0;
    double kappa_minus = 1.0;
    double m = 0.5;

    /// (κ⁺ − m)/κ⁻; negative when κ⁺ < m.
    double theta() const { return (kappa_plus - m) / kappa_minus; }
};

/// Validated model rates: κ⁺ > m > 0 and κ⁻ > 0.
class ModelParams {
public:
    ModelParams(double kappa_plus, double kappa_minus, double m);

    double kappa_plus() const { return r_.kappa_plus; }
    double kappa_minus() const { return r_.kappa_minus; }
    double m() const { return r_.m; }
    double theta() const { return r_.theta(); }
    /// κ⁺ − m
    double gamma_lin() const { return r_.kappa_plus - r_.m; }
    const Rates& rates() const { return r_; }

private:
    Rates r_;
};

/// ε-deformed rates. κ⁺ and κ⁻ move together so that θ stays fixed.
struct EpsParams {
    ModelParams base;
    double eps = 0.0;

    double kappa_plus_eps() const { return (1.0 + eps) * base.kappa_plus(); }
    double kappa_minus_eps() const {
        return (1.0 + eps * base.kappa_plus() / base.gamma_lin()) * base.kappa_minus();
    }
    double m() const { return base.m(); }
    Rates rates() const { return Rates{kappa_plus_eps(), kappa_minus_eps(), base.m()}; }
};

// Dispersion relation α(p) = κ⁺â⁺(p) − (κ⁺ − m)â⁻(p) − κ⁺ for arbitrary rates.
double alpha(const Rates& r, const KernelPair& k, double p);
double alpha_dk(const Rates& r, const KernelPair& k, double p);
double alpha_dk2(const Rates& r, const KernelPair& k, double p);

inline double alpha(const EpsParams& e, const KernelPair& k, double p) { return alpha(e.rates(), k, p); }
inline double alpha_dk(const EpsParams& e, const KernelPair& k, double p) { return alpha_dk(e.rates(), k, p); }
inline double alpha_dk2(const EpsParams& e, const KernelPair& k, double p) { return alpha_dk2(e.rates(), k, p); }

/// ∂εα(ε, p) = κ⁺(â⁺(p) − â⁻(p) − 1); α is affine in ε, so this holds for every ε.
double alpha_deps(const ModelParams& params, const KernelPair& k, double p);

/// Cubic coefficient from its ingredients:
/// (κ⁻)² â⁻(k) [ (â⁻(k) + â⁻(2k))/α(2k) + (2 + 2â⁻(k))/α(0) ].
/// Throws DegenerateDenominator if |α(2k)| or |α(0)| < 1e-12.
double omega_from_values(double kappa_minus, double am_k, double am_2k, double alpha_2k, double alpha_0);

/// ω at ε = 0 and wave number k_c.
double omega_coefficient(const ModelParams& params, const KernelPair& k, double k_c);

/// Ω(ε, δ) = ∂εα(0,k_c)·ε + ½∂²kα(0,k_c)·δ².
double capital_omega(const ModelParams& params, const KernelPair& k, double k_c, double eps, double delta);

/// Largest |δ| with Ω(ε, δ) ≥ 0; zero for ε ≤ 0.
double delta_bound(const ModelParams& params, const KernelPair& k, double k_c, double eps);

/// Smallest P ≥ 0 with κ⁺·env⁺(P) + |κ⁺ − m|·env⁻(P) ≤ tol, where env± are the
/// kernels' decay envelopes. Beyond P, |α(p) + κ⁺| ≤ tol.
double kernel_decay_horizon(const Rates& r, const KernelPair& k, double tol);

struct AssumptionEntry {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double tolerance = 0.0;
};

struct AssumptionReport {
    std::vector<AssumptionEntry> entries; // A1 .. A8
    double k_c = 0.0;
    /// 2∂εα(0,k_c)/(−∂²kα(0,k_c)); the wedge is δ² < bound·ε.
    double wedge_bound = 0.0;
    int j_max = 0;
    double p_max = 0.0;
    /// â⁻(k_c) < 0, implied by the assumptions.
    bool minus_ft_negative = false;
    /// a⁻(0) > 0, reported on its own.
    bool minus_positive_at_zero = false;

    bool pass() const;
    const AssumptionEntry* find(const std::string& name) const;
};

/// Evaluates every assumption at (ε = 0, k_c). Never throws on a failing check.
AssumptionReport check_assumptions(const ModelParams& params, const KernelPair& k, double k_c);

} // namespace dnfkpp
