#pragma once

#include "dnfkpp/dispersion.hpp"
#include "dnfkpp/kernels.hpp"

#include <functional>
#include <string>
#include <vector>

namespace dnfkpp {

/// One-parameter family of kernel pairs. The parameter moves the minus kernel
/// only; `analytic_dh` says its p- and h-derivatives are available in closed
/// form via fourier_dshift(_dp).
struct KernelFamily {
    std::string name;
    std::function<KernelPair(double h)> at;
    bool analytic_dh = false;
};

/// Gaussian plus kernel (variance l), gaussian_pair minus kernel (variance q)
/// with h the pair's shift.
KernelFamily gaussian_example_family(double l, double q);

/// Uniform plus kernel (half width l), uniform_pair minus kernel (width q)
/// with h the centre of each bump: h_inner = h − q/2.
KernelFamily uniform_example_family(double l, double q);

/// Keeps `plus` and sweeps the shift of a pair-type `minus` template: h for
/// gaussian_pair, bump centre for uniform_pair.
KernelFamily shift_family(const Kernel& plus, const Kernel& minus_template);

/// Scalar function f(h, p) whose zero-tangency in p is sought, plus the grid
/// policy used by scans. Optional derivatives fall back to central
/// differences with step 1e-6.
struct TangencyProblem {
    std::function<double(double h, double p)> f;
    std::function<double(double h, double p)> f_p;
    std::function<double(double h, double p)> f_pp;
    std::function<double(double h, double p)> f_h;  // optional
    std::function<double(double h, double p)> f_hp; // optional
    std::function<double(double h)> p_max;
    std::function<double(double h)> p_step;
};

struct ScanResult {
    double sup = 0.0;
    double argmax = 0.0;
};

/// Maximum of f over a uniform grid on (0, p_max] with golden-section polish of
/// the best cell.
ScanResult scan_sup(const std::function<double(double)>& f, double p_max, double p_step);

/// Local maxima of f on the grid, each polished.
std::vector<ScanResult> scan_local_maxima(const std::function<double(double)>& f, double p_max, double p_step);

struct TangencyOptions {
    int h_samples = 200;
    int max_iter = 50;
    double oracle_agreement = 1e-6;
};

struct TangencyResult {
    double h = 0.0;
    double k = 0.0;
    double residual_value = 0.0;
    double residual_slope = 0.0;
    double oracle_h = 0.0;
    double oracle_k = 0.0;
    int newton_iters = 0;
    double grid_sup = 0.0;
    double second_derivative = 0.0;
};

/// Brackets the first sign change of sup_p f(h, ·) on h_range by scanning,
/// bisects it (the oracle), polishes with 2D Newton on (f, f_p) and certifies
/// that no other local maximum in p comes within tol_sep of zero.
/// Throws NoTangency, NonUnique or NewtonDiverged.
TangencyResult solve_tangency(const TangencyProblem& problem, double h_lo, double h_hi,
                              const TangencyOptions& opt = {});

/// 2D Newton on (f, f_p) from (h0, k0).
TangencyResult polish_tangency(const TangencyProblem& problem, double h0, double k0, int max_iter = 50);

struct CriticalPoint {
    double h_c = 0.0;
    double k_c = 0.0;
    double residual_alpha = 0.0;
    double residual_dk = 0.0;
    double oracle_h = 0.0;
    double oracle_k = 0.0;
    int newton_iters = 0;
    double grid_sup = 0.0;
    KernelPair kernels;
    AssumptionReport assumptions;
};

/// Tangency problem for α(0, p; h) over a kernel family.
TangencyProblem dispersion_tangency_problem(const ModelParams& params, const KernelFamily& family);

/// sup over a grid of α(0, p) for fixed kernels, p ∈ (0, P] with P the
/// kernel-decay horizon at κ⁺/2 and spacing min(0.01, 1/(100·L)).
ScanResult scan_sup_alpha(const ModelParams& params, const KernelPair& k);

/// Grid policy shared by scans: spacing and horizon for a kernel pair.
double scan_step(const KernelPair& k);
double scan_horizon(const Rates& r, const KernelPair& k);

CriticalPoint find_tangency(const ModelParams& params, const KernelFamily& family, double h_lo, double h_hi,
                            const TangencyOptions& opt = {});

} // namespace dnfkpp
