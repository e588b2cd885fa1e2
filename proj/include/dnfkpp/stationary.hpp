#pragma once

#include "dnfkpp/critical.hpp"
#include "dnfkpp/dispersion.hpp"
#include "dnfkpp/fields.hpp"

#include <Eigen/Dense>

#include <vector>

namespace dnfkpp {

struct BranchPoint {
    double eps = 0.0;
    double delta = 0.0;
    FourierField field;
    double amplitude_measured = 0.0;
    double amplitude_predicted = 0.0;
    double residual_norm = 0.0;
    int newton_iters = 0;
};

struct SolveOptions {
    double tol = 1e-12;
    int max_iter = 60;
    /// Reject convergence to v = 0 or v = −θ with CollapsedToConstant.
    bool require_pattern = true;
    /// Double the order until |c_N| <= 1e-10·max|c_j|, up to this order.
    int max_order = 256;
};

/// Multipliers α(ε, jk) and â⁻(jk) for j = 0..N.
struct ModeTables {
    std::vector<double> alpha;
    std::vector<double> minus;
};
ModeTables mode_tables(const Rates& r, const KernelPair& k, double wave, int order);

/// Coefficients of F(v) = A v − κ⁻_ε v (a⁻_k ∗ v) on the cosine basis.
FourierField residual(const FourierField& field, const EpsParams& params, const KernelPair& k);
FourierField residual(const FourierField& field, const Rates& r, const KernelPair& k);

/// DF(v) on the cosine basis, (N+1)×(N+1).
Eigen::MatrixXd jacobian(const FourierField& field, const EpsParams& params, const KernelPair& k);

/// 2√(Ω/ω) at (ε, δ).
double predicted_amplitude(const ModelParams& params, const KernelPair& k, const CriticalPoint& crit, double eps,
                           double delta);

/// Leading-order pattern at wave number k_c + δ, with the second harmonic and
/// mean correction when `second_order` is set. Throws OutsideWedge if Ω < 0.
FourierField asymptotic_seed(const ModelParams& params, const KernelPair& k, const CriticalPoint& crit, double eps,
                             double delta, int order = 16, bool second_order = true);

/// Damped Newton from `seed`; enforces c_1 ≥ 0 by the half-period shift.
BranchPoint solve_branch_point(const FourierField& seed, const EpsParams& params, const KernelPair& k,
                               const SolveOptions& opt = {});

/// Seed at (ε, δ), solve, and fill in the predicted amplitude.
BranchPoint solve_at(const ModelParams& params, const KernelPair& k, const CriticalPoint& crit, double eps,
                     double delta, int order = 16, const SolveOptions& opt = {});

/// Natural-parameter continuation over an increasing ε grid at fixed δ.
std::vector<BranchPoint> continue_branch(const ModelParams& params, const KernelPair& k, const CriticalPoint& crit,
                                         const std::vector<double>& eps_grid, double delta, int order = 16,
                                         const SolveOptions& opt = {});

} // namespace dnfkpp
