#include "dnfkpp/dispersion.hpp"

#include "dnfkpp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dnfkpp {

ModelParams::ModelParams(double kappa_plus, double kappa_minus, double m) : r_{kappa_plus, kappa_minus, m} {
    if (!std::isfinite(kappa_plus) || !std::isfinite(kappa_minus) || !std::isfinite(m)) {
        throw Error(ErrorKind::InvalidArgument, "model rates must be finite");
    }
    if (!(m > 0.0)) throw Error(ErrorKind::InvalidArgument, "m must be positive");
    if (!(kappa_minus > 0.0)) throw Error(ErrorKind::InvalidArgument, "kappa_minus must be positive");
    if (!(kappa_plus > m)) {
        std::ostringstream msg;
        msg << "kappa_plus (" << kappa_plus << ") must exceed m (" << m << ")";
        throw Error(ErrorKind::InvalidArgument, msg.str());
    }
}

double alpha(const Rates& r, const KernelPair& k, double p) {
    return r.kappa_plus * fourier_minus_one(k.plus, p) - (r.kappa_plus - r.m) * fourier(k.minus, p);
}

double alpha_dk(const Rates& r, const KernelPair& k, double p) {
    return r.kappa_plus * fourier_d1(k.plus, p) - (r.kappa_plus - r.m) * fourier_d1(k.minus, p);
}

double alpha_dk2(const Rates& r, const KernelPair& k, double p) {
    return r.kappa_plus * fourier_d2(k.plus, p) - (r.kappa_plus - r.m) * fourier_d2(k.minus, p);
}

double alpha_deps(const ModelParams& params, const KernelPair& k, double p) {
    return params.kappa_plus() * (fourier_minus_one(k.plus, p) - fourier(k.minus, p));
}

double omega_from_values(double kappa_minus, double am_k, double am_2k, double alpha_2k, double alpha_0) {
    constexpr double guard = 1e-12;
    if (std::abs(alpha_2k) < guard || std::abs(alpha_0) < guard) {
        std::ostringstream msg;
        msg << "omega denominator vanishes: alpha(2k) = " << alpha_2k << ", alpha(0) = " << alpha_0;
        throw Error(ErrorKind::DegenerateDenominator, msg.str());
    }
    return kappa_minus * kappa_minus * am_k * ((am_k + am_2k) / alpha_2k + (2.0 + 2.0 * am_k) / alpha_0);
}

double omega_coefficient(const ModelParams& params, const KernelPair& k, double k_c) {
    const Rates& r = params.rates();
    return omega_from_values(r.kappa_minus, fourier(k.minus, k_c), fourier(k.minus, 2.0 * k_c),
                             alpha(r, k, 2.0 * k_c), alpha(r, k, 0.0));
}

double capital_omega(const ModelParams& params, const KernelPair& k, double k_c, double eps, double delta) {
    return alpha_deps(params, k, k_c) * eps + 0.5 * alpha_dk2(params.rates(), k, k_c) * delta * delta;
}

double delta_bound(const ModelParams& params, const KernelPair& k, double k_c, double eps) {
    if (eps <= 0.0) return 0.0;
    const double d2 = alpha_dk2(params.rates(), k, k_c);
    if (!(d2 < 0.0)) return std::numeric_limits<double>::infinity();
    return std::sqrt(eps * 2.0 * alpha_deps(params, k, k_c) / (-d2));
}

double kernel_decay_horizon(const Rates& r, const KernelPair& k, double tol) {
    const double gp = std::abs(r.kappa_plus);
    const double gm = std::abs(r.kappa_plus - r.m);
    auto bound = [&](double p) { return gp * decay_envelope(k.plus, p) + gm * decay_envelope(k.minus, p); };
    if (bound(0.0) <= tol) return 0.0;
    double hi = 1.0;
    while (bound(hi) > tol) {
        hi *= 2.0;
        if (hi > 1e300) throw Error(ErrorKind::InvalidArgument, "kernel envelopes do not decay");
    }
    double lo = 0.5 * hi;
    if (bound(lo) <= tol) lo = 0.0;
    for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (bound(mid) > tol) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return hi;
}

bool AssumptionReport::pass() const {
    return !entries.empty() &&
           std::all_of(entries.begin(), entries.end(), [](const AssumptionEntry& e) { return e.pass; });
}

const AssumptionEntry* AssumptionReport::find(const std::string& name) const {
    for (const auto& e : entries) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

AssumptionReport check_assumptions(const ModelParams& params, const KernelPair& k, double k_c) {
    AssumptionReport rep;
    rep.k_c = k_c;
    const Rates& r = params.rates();

    const KernelCheck cp = check_kernel(k.plus);
    const KernelCheck cm = check_kernel(k.minus);
    const bool a1 = cp.ok() && cm.ok() && r.kappa_plus > r.m && r.m > 0.0 && r.kappa_minus > 0.0;
    rep.entries.push_back({"A1", a1, params.gamma_lin(), 0.0});

    const double a_kc = alpha(r, k, k_c);
    rep.entries.push_back({"A2", k_c > 0.0 && std::abs(a_kc) < tol_root, a_kc, tol_root});

    // Non-resonance: beyond p_max every mode satisfies α ≤ −κ⁺/2.
    rep.p_max = kernel_decay_horizon(r, k, 0.5 * r.kappa_plus);
    rep.j_max = k_c > 0.0 ? static_cast<int>(std::ceil(rep.p_max / k_c)) + 1 : 0;
    double min_sep = std::abs(alpha(r, k, 0.0));
    for (int j = 2; j <= rep.j_max; ++j) min_sep = std::min(min_sep, std::abs(alpha(r, k, j * k_c)));
    rep.entries.push_back({"A3", min_sep > tol_sep, min_sep, tol_sep});

    const double dk = alpha_dk(r, k, k_c);
    rep.entries.push_back({"A4", std::abs(dk) < tol_root, dk, tol_root});

    const double deps = alpha_deps(params, k, k_c);
    rep.entries.push_back({"A5", deps > tol_sep, deps, tol_sep});

    const double d2 = alpha_dk2(r, k, k_c);
    rep.entries.push_back({"A6", d2 < -tol_sep, d2, tol_sep});

    rep.wedge_bound = d2 < 0.0 ? 2.0 * deps / (-d2) : std::numeric_limits<double>::quiet_NaN();
    rep.entries.push_back({"A7", std::isfinite(rep.wedge_bound) && rep.wedge_bound > 0.0, rep.wedge_bound, 0.0});

    double omega = std::numeric_limits<double>::quiet_NaN();
    try {
        omega = omega_coefficient(params, k, k_c);
    } catch (const Error&) {
    }
    rep.entries.push_back({"A8", std::isfinite(omega) && omega > tol_sep, omega, tol_sep});

    rep.minus_ft_negative = fourier(k.minus, k_c) < 0.0;
    rep.minus_positive_at_zero = evaluate(k.minus, 0.0) > 0.0;
    return rep;
}

} // namespace dnfkpp
