#include "dnfkpp/evolution.hpp"

#include "dnfkpp/errors.hpp"
#include "dnfkpp/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace dnfkpp {

std::string to_string(EvolutionStatus s) {
    switch (s) {
    case EvolutionStatus::Converged: return "converged";
    case EvolutionStatus::Growing: return "growing";
    case EvolutionStatus::Timeout: return "timeout";
    }
    return "unknown";
}

namespace {

double phi1(double z) {
    if (std::abs(z) < 1e-5) return 1.0 + z / 2.0 + z * z / 6.0;
    return std::expm1(z) / z;
}

bool finite(const TrigField& f) {
    for (std::size_t j = 0; j < f.a.size(); ++j) {
        if (!std::isfinite(f.a[j]) || !std::isfinite(f.b[j])) return false;
    }
    return true;
}

} // namespace

double default_dt(const Rates& rates, const KernelPair& k, double wave, int order) {
    double mx = 0.0;
    for (int j = 0; j <= order; ++j) mx = std::max(mx, std::abs(alpha(rates, k, j * wave)));
    return 0.01 / mx;
}

EvolutionOutcome integrate(const TrigField& initial, const Rates& rates, const KernelPair& k, double t_max, double dt,
                           const TrigField& target, const EvolutionOptions& opt) {
    if (!(dt > 0.0) || !(t_max >= 0.0)) throw Error(ErrorKind::InvalidArgument, "need dt > 0 and t_max >= 0");
    if (target.order() != initial.order()) throw Error(ErrorKind::InvalidArgument, "target order differs from initial");
    const int n = initial.order();
    const ModeTables t = mode_tables(rates, k, initial.k, n);
    std::vector<double> E(n + 1), P(n + 1);
    for (int j = 0; j <= n; ++j) {
        E[j] = std::exp(t.alpha[j] * dt);
        P[j] = dt * phi1(t.alpha[j] * dt);
    }
    const double theta = rates.theta();
    auto dist = [&](const TrigField& v) {
        return opt.modulo_shift ? distance_mod_shift(v, target) : distance(v, target);
    };
    const double scale = std::max({initial.norm(), target.norm(), 1e-300});

    EvolutionOutcome out;
    TrigField v = initial;
    double time = 0.0;
    double d = dist(v);
    out.distance_history.push_back({0.0, d});
    bool warned = false;
    const long steps = static_cast<long>(std::ceil(t_max / dt - 1e-12));
    long step = 0;
    out.status = EvolutionStatus::Timeout;
    if (d < opt.tol_dyn) out.status = EvolutionStatus::Converged;
    while (out.status == EvolutionStatus::Timeout && step < steps) {
        const TrigField w = apply_multiplier(v, t.minus);
        const TrigField nl = product(v, w);
        for (int j = 0; j <= n; ++j) {
            v.a[j] = E[j] * v.a[j] - rates.kappa_minus * P[j] * nl.a[j];
            if (j > 0) v.b[j] = E[j] * v.b[j] - rates.kappa_minus * P[j] * nl.b[j];
        }
        ++step;
        time = step * dt;
        if (!finite(v)) {
            std::ostringstream msg;
            msg << "state became non-finite at t = " << time;
            throw Error(ErrorKind::NonFiniteState, msg.str());
        }
        if (!warned && opt.negativity_every > 0 && step % opt.negativity_every == 0) {
            const int grid = 4 * n + 4;
            for (int i = 0; i < grid; ++i) {
                const double u = theta + v(2.0 * std::numbers::pi * i / grid);
                if (u < -1e-8) {
                    std::ostringstream msg;
                    msg << "negativity: u = " << u << " at t = " << time;
                    out.warnings.push_back(msg.str());
                    warned = true;
                    break;
                }
            }
        }
        d = dist(v);
        if (d < opt.tol_dyn) {
            out.status = EvolutionStatus::Converged;
        } else if (v.norm() > opt.growth_factor * scale) {
            out.status = EvolutionStatus::Growing;
        }
        if (step % std::max(1, opt.sample_every) == 0 || out.status != EvolutionStatus::Timeout || step == steps) {
            out.distance_history.push_back({time, d});
        }
    }
    out.final_field = v;
    out.t_final = time;
    out.final_distance = d;
    return out;
}

EvolutionOutcome integrate(const TrigField& initial, const EpsParams& params, const KernelPair& k, double t_max,
                           double dt, const TrigField& target, const EvolutionOptions& opt) {
    return integrate(initial, params.rates(), k, t_max, dt, target, opt);
}

} // namespace dnfkpp
