#include "dnfkpp/critical.hpp"

#include "dnfkpp/errors.hpp"
#include "dnfkpp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dnfkpp {

namespace {

constexpr double kFdStep = 1e-6;

double fd_h(const std::function<double(double, double)>& g, double h, double p) {
    return (g(h + kFdStep, p) - g(h - kFdStep, p)) / (2.0 * kFdStep);
}

std::function<double(double)> slice(const std::function<double(double, double)>& g, double h) {
    return [g, h](double p) { return g(h, p); };
}

} // namespace

KernelFamily shift_family(const Kernel& plus, const Kernel& minus_template) {
    KernelFamily fam;
    if (const auto* g = minus_template.as<GaussianPair>()) {
        const double q = g->q;
        fam.name = "gaussian_pair shift";
        fam.at = [plus, q](double h) { return KernelPair{plus, Kernel::gaussian_pair(q, h)}; };
    } else if (const auto* u = minus_template.as<UniformPair>()) {
        const double q = u->q;
        fam.name = "uniform_pair centre";
        fam.at = [plus, q](double h) { return KernelPair{plus, Kernel::uniform_pair(q, h - 0.5 * q)}; };
    } else {
        throw Error(ErrorKind::InvalidArgument, "shift families need a gaussian_pair or uniform_pair minus kernel");
    }
    fam.analytic_dh = true;
    return fam;
}

KernelFamily gaussian_example_family(double l, double q) {
    return shift_family(Kernel::gaussian(l), Kernel::gaussian_pair(q, 0.0));
}

KernelFamily uniform_example_family(double l, double q) {
    return shift_family(Kernel::uniform(l), Kernel::uniform_pair(q, 0.0));
}

ScanResult scan_sup(const std::function<double(double)>& f, double p_max, double p_step) {
    const int n = std::max(2, static_cast<int>(std::ceil(p_max / p_step)));
    const double step = p_max / n;
    ScanResult best{f(step), step};
    int best_i = 1;
    for (int i = 2; i <= n; ++i) {
        const double v = f(i * step);
        if (v > best.sup) {
            best = {v, i * step};
            best_i = i;
        }
    }
    const double lo = (best_i - 1) * step;
    const double hi = std::min(p_max, (best_i + 1) * step);
    const double pm = quad::golden_max(f, lo, hi);
    const double vm = f(pm);
    if (vm > best.sup) best = {vm, pm};
    return best;
}

std::vector<ScanResult> scan_local_maxima(const std::function<double(double)>& f, double p_max, double p_step) {
    const int n = std::max(3, static_cast<int>(std::ceil(p_max / p_step)));
    const double step = p_max / n;
    std::vector<double> v(n + 2);
    for (int i = 0; i <= n + 1; ++i) v[i] = f(i * step);
    std::vector<ScanResult> out;
    for (int i = 1; i <= n; ++i) {
        if (v[i] >= v[i - 1] && v[i] >= v[i + 1]) {
            const double pm = quad::golden_max(f, (i - 1) * step, (i + 1) * step);
            out.push_back({std::max(v[i], f(pm)), pm});
        }
    }
    return out;
}

TangencyResult polish_tangency(const TangencyProblem& pr, double h0, double k0, int max_iter) {
    auto fh = [&](double h, double p) { return pr.f_h ? pr.f_h(h, p) : fd_h(pr.f, h, p); };
    auto fhp = [&](double h, double p) { return pr.f_hp ? pr.f_hp(h, p) : fd_h(pr.f_p, h, p); };

    TangencyResult res;
    double h = h0, k = k0;
    bool done = false;
    for (int it = 0; it < max_iter; ++it) {
        const double r1 = pr.f(h, k);
        const double r2 = pr.f_p(h, k);
        if (!std::isfinite(r1) || !std::isfinite(r2)) break;
        res.newton_iters = it;
        if (std::abs(r1) < 1e-2 * tol_root && std::abs(r2) < 1e-2 * tol_root) {
            done = true;
            break;
        }
        const double j11 = fh(h, k), j12 = r2;
        const double j21 = fhp(h, k), j22 = pr.f_pp(h, k);
        const double det = j11 * j22 - j12 * j21;
        if (det == 0.0 || !std::isfinite(det)) break;
        const double dh = (r1 * j22 - j12 * r2) / det;
        const double dk = (j11 * r2 - j21 * r1) / det;
        h -= dh;
        k -= dk;
        if (std::abs(dh) < 1e-15 * std::max(1.0, std::abs(h)) && std::abs(dk) < 1e-15 * std::max(1.0, std::abs(k))) {
            res.newton_iters = it + 1;
            done = true;
            break;
        }
    }
    res.h = h;
    res.k = k;
    res.residual_value = pr.f(h, k);
    res.residual_slope = pr.f_p(h, k);
    if (!done && !(std::abs(res.residual_value) < tol_root && std::abs(res.residual_slope) < tol_root)) {
        std::ostringstream msg;
        msg << "tangency Newton did not converge in " << max_iter << " iterations (h = " << h << ", k = " << k
            << ", residuals " << res.residual_value << ", " << res.residual_slope << ")";
        throw Error(ErrorKind::NewtonDiverged, msg.str());
    }
    if (!(std::abs(res.residual_value) < tol_root && std::abs(res.residual_slope) < tol_root) || !(k > 0.0)) {
        std::ostringstream msg;
        msg << "tangency Newton stalled at h = " << h << ", k = " << k << " with residuals " << res.residual_value
            << ", " << res.residual_slope;
        throw Error(ErrorKind::NewtonDiverged, msg.str());
    }
    res.second_derivative = pr.f_pp(h, k);
    return res;
}

TangencyResult solve_tangency(const TangencyProblem& pr, double h_lo, double h_hi, const TangencyOptions& opt) {
    if (!(h_hi > h_lo)) throw Error(ErrorKind::InvalidArgument, "h range must be increasing");
    auto sup_at = [&](double h) { return scan_sup(slice(pr.f, h), pr.p_max(h), pr.p_step(h)); };

    const int n = std::max(2, opt.h_samples);
    double prev_h = h_lo;
    ScanResult prev = sup_at(h_lo);
    if (prev.sup >= 0.0) {
        std::ostringstream msg;
        msg << "sup_p alpha is already non-negative (" << prev.sup << ") at the lower end h = " << h_lo;
        throw Error(ErrorKind::NoTangency, msg.str());
    }
    double lo = 0.0, hi = 0.0;
    bool bracketed = false;
    for (int i = 1; i < n; ++i) {
        const double h = h_lo + (h_hi - h_lo) * i / (n - 1);
        const ScanResult cur = sup_at(h);
        if (cur.sup >= 0.0) {
            lo = prev_h;
            hi = h;
            bracketed = true;
            break;
        }
        prev_h = h;
        prev = cur;
    }
    if (!bracketed) {
        std::ostringstream msg;
        msg << "sup_p alpha stays negative on h in [" << h_lo << ", " << h_hi << "] (last value " << prev.sup << ")";
        throw Error(ErrorKind::NoTangency, msg.str());
    }

    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (sup_at(mid).sup >= 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    const double oracle_h = 0.5 * (lo + hi);
    const ScanResult oracle = sup_at(oracle_h);

    TangencyResult res = polish_tangency(pr, oracle_h, oracle.argmax, opt.max_iter);
    res.oracle_h = oracle_h;
    res.oracle_k = oracle.argmax;

    const double step = pr.p_step(res.h);
    const double pmax = std::max(pr.p_max(res.h), 1.5 * res.k);
    const auto maxima = scan_local_maxima(slice(pr.f, res.h), pmax, step);
    res.grid_sup = -1e300;
    for (const auto& mx : maxima) {
        res.grid_sup = std::max(res.grid_sup, mx.sup);
        if (std::abs(mx.argmax - res.k) > 3.0 * step && mx.sup > -tol_sep) {
            std::ostringstream msg;
            msg << "second near-zero maximum at p = " << mx.argmax << " (value " << mx.sup
                << ") besides k_c = " << res.k;
            throw Error(ErrorKind::NonUnique, msg.str());
        }
    }
    return res;
}

double scan_step(const KernelPair& k) {
    const double L = std::max(length_scale(k.plus), length_scale(k.minus));
    return std::min(0.01, 1.0 / (100.0 * L));
}

double scan_horizon(const Rates& r, const KernelPair& k) {
    return kernel_decay_horizon(r, k, 0.5 * r.kappa_plus);
}

ScanResult scan_sup_alpha(const ModelParams& params, const KernelPair& k) {
    const Rates& r = params.rates();
    return scan_sup([&](double p) { return alpha(r, k, p); }, scan_horizon(r, k), scan_step(k));
}

TangencyProblem dispersion_tangency_problem(const ModelParams& params, const KernelFamily& family) {
    const Rates r = params.rates();
    const double g = params.gamma_lin();
    TangencyProblem pr;
    pr.f = [r, family](double h, double p) { return alpha(r, family.at(h), p); };
    pr.f_p = [r, family](double h, double p) { return alpha_dk(r, family.at(h), p); };
    pr.f_pp = [r, family](double h, double p) { return alpha_dk2(r, family.at(h), p); };
    if (family.analytic_dh) {
        pr.f_h = [g, family](double h, double p) { return -g * fourier_dshift(family.at(h).minus, p); };
        pr.f_hp = [g, family](double h, double p) { return -g * fourier_dshift_dp(family.at(h).minus, p); };
    }
    pr.p_max = [r, family](double h) { return scan_horizon(r, family.at(h)); };
    pr.p_step = [family](double h) { return scan_step(family.at(h)); };
    return pr;
}

CriticalPoint find_tangency(const ModelParams& params, const KernelFamily& family, double h_lo, double h_hi,
                            const TangencyOptions& opt) {
    const TangencyProblem pr = dispersion_tangency_problem(params, family);
    const TangencyResult t = solve_tangency(pr, h_lo, h_hi, opt);

    const KernelPair kernels = family.at(t.h);
    return CriticalPoint{t.h,
                         t.k,
                         t.residual_value,
                         t.residual_slope,
                         t.oracle_h,
                         t.oracle_k,
                         t.newton_iters,
                         t.grid_sup,
                         kernels,
                         check_assumptions(params, kernels, t.k)};
}

} // namespace dnfkpp
