#include "dnfkpp/uniqueness.hpp"

#include "dnfkpp/errors.hpp"
#include "dnfkpp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace dnfkpp {

std::string to_string(DominanceStatus s) {
    switch (s) {
    case DominanceStatus::Pass: return "pass";
    case DominanceStatus::Fail: return "fail";
    case DominanceStatus::Indeterminate: return "indeterminate";
    }
    return "unknown";
}

namespace {

bool compact(const Kernel& a) {
    return a.as<Uniform>() || a.as<UniformPair>() || a.as<Tabulated>();
}

// Beyond this radius the density is non-increasing in |x|.
double monotone_radius(const Kernel& a) {
    if (const auto* g = a.as<GaussianPair>()) return g->h;
    if (compact(a)) {
        const auto b = breakpoints(a);
        return b.empty() ? 0.0 : std::abs(b.back());
    }
    return 0.0;
}

// Radius past which the density is exactly 0 in double precision.
double vanishing_radius(const Kernel& a) {
    if (compact(a)) return monotone_radius(a);
    double r = std::max(1.0, monotone_radius(a) + length_scale(a));
    while (evaluate(a, r) > 0.0) r *= 1.25;
    return r;
}

} // namespace

DominanceReport check_dominance(const ModelParams& params, const KernelPair& k, int grid_points) {
    const double kp = params.kappa_plus();
    const double g = params.gamma_lin();
    DominanceReport rep;
    rep.grid_extent = std::max(vanishing_radius(k.plus), vanishing_radius(k.minus));

    std::vector<double> xs;
    const int n = std::max(2, grid_points);
    for (int i = 0; i < n; ++i) xs.push_back(rep.grid_extent * i / (n - 1));
    for (const Kernel* a : {&k.plus, &k.minus}) {
        for (double b : breakpoints(*a)) {
            if (b < 0.0) continue;
            const double eps = 1e-12 * std::max(1.0, b);
            xs.push_back(b - eps);
            xs.push_back(b + eps);
        }
    }
    std::sort(xs.begin(), xs.end());

    bool negative = false, touching = false;
    rep.min_margin = 1e300;
    for (double x : xs) {
        if (x < 0.0) continue;
        const double p = kp * evaluate(k.plus, x);
        const double q = g * evaluate(k.minus, x);
        const double margin = p - q;
        if (margin < rep.min_margin) {
            rep.min_margin = margin;
            rep.argmin = x;
        }
        const double scale = p + q;
        if (scale > 0.0 && std::abs(margin) <= 1e-12 * scale) {
            touching = true;
        } else if (margin < 0.0) {
            negative = true;
        }
    }
    const double a0 = evaluate(k.minus, 0.0);
    rep.margin_at_zero = kp * evaluate(k.plus, 0.0) - g * a0;

    if (negative) {
        rep.status = DominanceStatus::Fail;
        std::ostringstream msg;
        msg << "kappa+ a+ < (kappa+ - m) a- at x = " << rep.argmin << "; no conclusion";
        rep.conclusion = msg.str();
    } else if (touching || !(rep.margin_at_zero > 0.0)) {
        rep.status = DominanceStatus::Indeterminate;
        rep.conclusion = "densities touch on the grid; resolution cannot certify dominance";
    } else if (!(a0 > 0.0)) {
        rep.status = DominanceStatus::Indeterminate;
        rep.conclusion = "a-(0) = 0: the dominance criterion does not apply";
    } else {
        rep.status = DominanceStatus::Pass;
        rep.conclusion = "only constant solutions u = 0 and u = theta";
    }
    return rep;
}

CertifiedValue i_p_bound(const Kernel& a, double p, int x_grid) {
    if (!(p > 0.0)) throw Error(ErrorKind::InvalidArgument, "period must be positive");
    const double r_mono = monotone_radius(a);
    const double r_sum = compact(a) ? r_mono : r_mono + 40.0 * length_scale(a);
    const int J = static_cast<int>(std::ceil(r_sum / p)) + 2;

    auto cells = [&](double x) {
        double s = 0.0;
        for (int j = -J; j <= J; ++j) {
            const double hi = squared_cdf(a, x - j * p);
            const double lo = squared_cdf(a, x - (j + 1) * p);
            s += std::sqrt(std::max(0.0, hi - lo));
        }
        return s;
    };
    int best_i = 0;
    double best = cells(0.0);
    for (int i = 1; i < x_grid; ++i) {
        const double v = cells(p * i / x_grid);
        if (v > best) {
            best = v;
            best_i = i;
        }
    }
    const double step = p / x_grid;
    const double xm = quad::golden_max(cells, (best_i - 1) * step, (best_i + 1) * step);
    best = std::max(best, cells(xm));

    // Cells beyond J sit at distance >= n·p >= r_mono where the density is
    // non-increasing, so each L² norm is at most √p·a(n·p).
    double tail = 0.0;
    for (int n = J; n < J + 1000000; ++n) {
        const double an = evaluate(a, n * p);
        if (an == 0.0) break;
        tail += 2.0 * std::sqrt(p) * an;
    }
    const double sp = std::sqrt(p);
    return {sp * (best + tail), sp * tail};
}

double gamma_p(const ModelParams& params, const KernelPair& k, double p) {
    const Rates& r = params.rates();
    // Beyond P every mode has α ≤ −κ⁺ + m/2 < α(0) = −κ⁺ + m.
    const double P = kernel_decay_horizon(r, k, 0.5 * r.m);
    const long J = static_cast<long>(std::ceil(P * p / (2.0 * std::numbers::pi))) + 1;
    double sup = alpha(r, k, 0.0);
    for (long j = 1; j <= J; ++j) sup = std::max(sup, alpha(r, k, 2.0 * std::numbers::pi * j / p));
    return -sup;
}

double l2_uniqueness_radius(const ModelParams& params, const KernelPair& k, double p) {
    const double g = gamma_p(params, k, p);
    if (!(g > tol_sep)) {
        std::ostringstream msg;
        msg << "gamma_p = " << g << " is not positive for p = " << p;
        throw Error(ErrorKind::NotApplicable, msg.str());
    }
    return g / (2.0 * params.kappa_minus() * i_p_bound(k.minus, p).value);
}

CertifiedValue j_theta_l1(const ModelParams& params, const KernelPair& k) {
    const double kp = params.kappa_plus();
    const double g = params.gamma_lin();
    const double R = std::max(support_radius(k.plus, 1e-17), support_radius(k.minus, 1e-17));
    std::vector<double> breaks;
    for (const Kernel* a : {&k.plus, &k.minus}) {
        if (a->as<Tabulated>()) continue;
        for (double b : breakpoints(*a)) breaks.push_back(b);
    }
    auto f = [&](double x) { return kp * evaluate(k.plus, x) - g * evaluate(k.minus, x); };
    const double body = quad::integrate_abs(f, -R, R, breaks, 8000, 32);
    const double tail = kp * tail_mass(k.plus, R) + g * tail_mass(k.minus, R);
    return {body + tail, tail};
}

double linf_uniqueness_radius(const ModelParams& params, const KernelPair& k) {
    const double J = j_theta_l1(params, k).value;
    if (!(J < params.kappa_plus())) {
        std::ostringstream msg;
        msg << "||J_theta||_1 = " << J << " is not below kappa+ = " << params.kappa_plus();
        throw Error(ErrorKind::NotApplicable, msg.str());
    }
    return (params.kappa_plus() - J) / (2.0 * params.kappa_minus());
}

} // namespace dnfkpp
