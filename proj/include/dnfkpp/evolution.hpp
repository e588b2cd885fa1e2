#pragma once

#include "dnfkpp/dispersion.hpp"
#include "dnfkpp/fields.hpp"

#include <string>
#include <utility>
#include <vector>

namespace dnfkpp {

enum class EvolutionStatus { Converged, Growing, Timeout };
std::string to_string(EvolutionStatus s);

struct EvolutionOptions {
    double tol_dyn = 1e-9;
    /// Stop as growing once ‖v‖ exceeds this factor times max(‖v₀‖, ‖target‖).
    double growth_factor = 1e3;
    /// Distance to the target is measured modulo translation.
    bool modulo_shift = true;
    /// Record (t, distance) every this many steps.
    int sample_every = 100;
    /// Check u = θ + v for undershoot every this many steps.
    int negativity_every = 100;
};

struct EvolutionOutcome {
    EvolutionStatus status = EvolutionStatus::Timeout;
    TrigField final_field;
    std::vector<std::pair<double, double>> distance_history;
    double t_final = 0.0;
    double final_distance = 0.0;
    std::vector<std::string> warnings;
};

/// Exponential Euler for ∂t v = A v − κ⁻ v (a⁻_k ∗ v), the deviation form of
/// ∂t u = κ⁺ a⁺∗u − m u − κ⁻ u (a⁻∗u) with u = θ + v. The linear part is
/// integrated exactly per mode; the quadratic term is explicit.
/// `rates` may violate κ⁺ > m (then θ < 0 and the target u ≡ 0 is v ≡ −θ).
EvolutionOutcome integrate(const TrigField& initial, const Rates& rates, const KernelPair& k, double t_max, double dt,
                           const TrigField& target, const EvolutionOptions& opt = {});
EvolutionOutcome integrate(const TrigField& initial, const EpsParams& params, const KernelPair& k, double t_max,
                           double dt, const TrigField& target, const EvolutionOptions& opt = {});

/// dt = 0.01 / max_j |α(jk)|.
double default_dt(const Rates& rates, const KernelPair& k, double wave, int order);

} // namespace dnfkpp
