#include "dnfkpp/scaling_limit.hpp"

#include "dnfkpp/errors.hpp"
#include "dnfkpp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dnfkpp {

double ScaledParams::kappa_plus_eps() const {
    return (1.0 + eps) * (base.kappa_plus() + kappa_extra) / (sigma * sigma);
}

double ScaledParams::kappa_minus_eps() const {
    return (1.0 + eps * (base.kappa_plus() + kappa_extra) / (sigma * sigma * base.gamma_lin())) * base.kappa_minus();
}

double ScaledParams::m_tilde() const {
    return base.m() + (base.kappa_plus() + kappa_extra) / (sigma * sigma) - base.kappa_plus();
}

double gamma_second_moment(const Kernel& a_plus) { return 0.5 * second_moment(a_plus); }

double tilde_alpha(double eps, double p, double sigma, double kappa_extra, const ModelParams& base,
                   const KernelPair& k) {
    const double K = base.kappa_plus() + kappa_extra;
    if (sigma <= 0.0) {
        if (eps != 0.0) {
            throw Error(ErrorKind::UnsupportedExtension, "the sigma <= 0 extension is defined only for eps = 0");
        }
        return -gamma_second_moment(k.plus) * K * p * p - base.gamma_lin() * fourier(k.minus, p);
    }
    const double s2 = sigma * sigma;
    return (1.0 + eps) * K / s2 * fourier_minus_one(k.plus, sigma * p) -
           (eps * K / s2 + base.gamma_lin()) * fourier(k.minus, p);
}

double tilde_alpha_dk(double p, double sigma, double kappa_extra, const ModelParams& base, const KernelPair& k) {
    const double K = base.kappa_plus() + kappa_extra;
    const double plus = sigma <= 0.0 ? -2.0 * gamma_second_moment(k.plus) * K * p
                                     : K / sigma * fourier_d1(k.plus, sigma * p);
    return plus - base.gamma_lin() * fourier_d1(k.minus, p);
}

double tilde_alpha_dk2(double p, double sigma, double kappa_extra, const ModelParams& base, const KernelPair& k) {
    const double K = base.kappa_plus() + kappa_extra;
    const double plus = sigma <= 0.0 ? -2.0 * gamma_second_moment(k.plus) * K : K * fourier_d2(k.plus, sigma * p);
    return plus - base.gamma_lin() * fourier_d2(k.minus, p);
}

double tilde_alpha_dkappa(double p, double sigma, const KernelPair& k) {
    if (sigma <= 0.0) return -gamma_second_moment(k.plus) * p * p;
    return fourier_minus_one(k.plus, sigma * p) / (sigma * sigma);
}

double tilde_alpha_dkappa_dk(double p, double sigma, const KernelPair& k) {
    if (sigma <= 0.0) return -2.0 * gamma_second_moment(k.plus) * p;
    return fourier_d1(k.plus, sigma * p) / sigma;
}

double tilde_alpha_deps(double p, double sigma, double kappa_extra, const ModelParams& base, const KernelPair& k) {
    if (sigma <= 0.0) {
        throw Error(ErrorKind::UnsupportedExtension, "d/d eps of the rescaled dispersion has no sigma <= 0 limit");
    }
    const double K = base.kappa_plus() + kappa_extra;
    return K / (sigma * sigma) * (fourier_minus_one(k.plus, sigma * p) - fourier(k.minus, p));
}

double local_d(double mu, double k, const Kernel& a_minus) { return -k * k - mu * fourier(a_minus, k); }
double local_d_dk(double mu, double k, const Kernel& a_minus) { return -2.0 * k - mu * fourier_d1(a_minus, k); }
double local_d_dk2(double mu, double k, const Kernel& a_minus) { return -2.0 - mu * fourier_d2(a_minus, k); }

LocalLimitData local_quantities(const ModelParams& base, const KernelFamily& family, double h_lo, double h_hi) {
    const double mu = base.gamma_lin() / base.kappa_plus();
    TangencyProblem pr;
    pr.f = [mu, family](double h, double p) { return local_d(mu, p, family.at(h).minus); };
    pr.f_p = [mu, family](double h, double p) { return local_d_dk(mu, p, family.at(h).minus); };
    pr.f_pp = [mu, family](double h, double p) { return local_d_dk2(mu, p, family.at(h).minus); };
    if (family.analytic_dh) {
        pr.f_h = [mu, family](double h, double p) { return -mu * fourier_dshift(family.at(h).minus, p); };
        pr.f_hp = [mu, family](double h, double p) { return -mu * fourier_dshift_dp(family.at(h).minus, p); };
    }
    // d ≤ −p² + μ, so nothing beyond √(2μ) can approach zero.
    pr.p_max = [mu](double) { return 2.0 * std::sqrt(mu) + 0.5; };
    pr.p_step = [family](double h) { return std::min(0.01, 1.0 / (100.0 * length_scale(family.at(h).minus))); };
    const TangencyResult t = solve_tangency(pr, h_lo, h_hi);

    LocalLimitData out;
    out.mu_c = mu;
    out.h_c = t.h;
    out.k_c = t.k;
    out.kernels = family.at(t.h);
    const Kernel& am = out.kernels.minus;
    out.d = local_d(mu, t.k, am);
    out.d_k = local_d_dk(mu, t.k, am);
    out.d_kk = local_d_dk2(mu, t.k, am);
    const double a1 = fourier(am, t.k);
    const double a2 = fourier(am, 2.0 * t.k);
    out.omega_1 = -mu * a1 * (mu * (a1 + a2) / (4.0 * t.k * t.k + mu * a2) + 2.0 * (1.0 + a1));
    const double d2a = fourier_d2(am, t.k);
    out.omega0_eps = -base.m() * a1;
    out.omega0_delta = -base.kappa_plus() * (1.0 + 0.5 * mu * d2a);
    out.omega0_delta_printed = -base.kappa_plus() * (1.0 + 0.5 * mu) * d2a;
    out.omega_0 = base.kappa_plus() * out.omega_1 / (base.theta() * base.theta());
    return out;
}

KappaSolution solve_k_and_kappa(double sigma, const ModelParams& base, const KernelPair& k,
                                const LocalLimitData& local, int substeps) {
    KappaSolution sol{local.k_c, 0.0, 0.0, 0.0, 0};
    auto residuals = [&](double s, double kk, double ka) {
        return std::pair{tilde_alpha(0.0, kk, s, ka, base, k), tilde_alpha_dk(kk, s, ka, base, k)};
    };
    const int stages = sigma <= 0.0 ? 1 : std::max(1, substeps);
    for (int stage = 1; stage <= stages; ++stage) {
        const double s = sigma <= 0.0 ? sigma : sigma * stage / stages;
        bool ok = false;
        for (int it = 0; it < 50; ++it) {
            const auto [r1, r2] = residuals(s, sol.k, sol.kappa);
            if (!std::isfinite(r1) || !std::isfinite(r2)) break;
            if (std::abs(r1) < 1e-2 * tol_root && std::abs(r2) < 1e-2 * tol_root) {
                ok = true;
                break;
            }
            const double j11 = r2;
            const double j12 = tilde_alpha_dkappa(sol.k, s, k);
            const double j21 = tilde_alpha_dk2(sol.k, s, sol.kappa, base, k);
            const double j22 = tilde_alpha_dkappa_dk(sol.k, s, k);
            const double det = j11 * j22 - j12 * j21;
            if (det == 0.0 || !std::isfinite(det)) break;
            const double dk = (r1 * j22 - j12 * r2) / det;
            const double dka = (j11 * r2 - j21 * r1) / det;
            sol.k -= dk;
            sol.kappa -= dka;
            ++sol.iters;
            if (std::abs(dk) < 1e-15 * std::max(1.0, std::abs(sol.k)) && std::abs(dka) < 1e-15) {
                ok = true;
                break;
            }
        }
        const auto [r1, r2] = residuals(s, sol.k, sol.kappa);
        sol.residual_value = r1;
        sol.residual_slope = r2;
        if (!ok && !(std::abs(r1) < tol_root && std::abs(r2) < tol_root)) {
            std::ostringstream msg;
            msg << "(k, kappa) continuation failed at sigma = " << s << " (residuals " << r1 << ", " << r2 << ")";
            throw Error(ErrorKind::NewtonDiverged, msg.str());
        }
    }
    if (!(std::abs(sol.residual_value) < tol_root && std::abs(sol.residual_slope) < tol_root) || !(sol.k > 0.0)) {
        std::ostringstream msg;
        msg << "(k, kappa) Newton stalled at sigma = " << sigma;
        throw Error(ErrorKind::NewtonDiverged, msg.str());
    }
    return sol;
}

ConvergenceStudy convergence_study(const ModelParams& base, const KernelPair& k, const LocalLimitData& local,
                                   const std::vector<double>& sigma_list) {
    ConvergenceStudy study;
    const double theta = base.theta();
    std::vector<double> xs, kap, dk;
    for (double sigma : sigma_list) {
        const KappaSolution sol = solve_k_and_kappa(sigma, base, k, local);
        ConvergenceRow row;
        row.sigma = sigma;
        row.k_c = sol.k;
        row.kappa = sol.kappa;
        row.d_eps = sigma > 0.0 ? tilde_alpha_deps(sol.k, sigma, sol.kappa, base, k)
                                : std::numeric_limits<double>::quiet_NaN();
        row.d_eps_reduced = tilde_alpha(0.0, sol.k, sigma, sol.kappa, base, k) - base.m() * fourier(k.minus, sol.k);
        row.d_kk = tilde_alpha_dk2(sol.k, sigma, sol.kappa, base, k);
        row.omega = omega_from_values(base.kappa_minus(), fourier(k.minus, sol.k), fourier(k.minus, 2.0 * sol.k),
                                      tilde_alpha(0.0, 2.0 * sol.k, sigma, sol.kappa, base, k),
                                      tilde_alpha(0.0, 0.0, sigma, sol.kappa, base, k));
        row.omega_discrepancy = row.omega * theta * theta - base.kappa_plus() * local.omega_1;
        study.rows.push_back(row);
        if (sigma > 0.0 && sol.kappa != 0.0) {
            xs.push_back(sigma);
            kap.push_back(sol.kappa);
            dk.push_back(sol.k - local.k_c);
        }
    }
    if (xs.size() >= 2) {
        study.kappa_rate = quad::loglog_slope(xs, kap);
        study.k_rate = quad::loglog_slope(xs, dk);
    }
    return study;
}

} // namespace dnfkpp
