#include "dnfkpp/stationary.hpp"

#include "dnfkpp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dnfkpp {

namespace {

Eigen::VectorXd to_vec(const FourierField& f) {
    return Eigen::Map<const Eigen::VectorXd>(f.c.data(), static_cast<Eigen::Index>(f.c.size()));
}

FourierField from_vec(const Eigen::VectorXd& v, double k) {
    return FourierField{std::vector<double>(v.data(), v.data() + v.size()), k};
}

FourierField residual_with(const FourierField& v, const ModeTables& t, double kappa_minus) {
    const FourierField w = apply_multiplier(v, t.minus);
    const FourierField nl = product(v, w);
    FourierField out = apply_multiplier(v, t.alpha);
    for (std::size_t j = 0; j < out.c.size(); ++j) out.c[j] -= kappa_minus * nl.c[j];
    return out;
}

Eigen::MatrixXd jacobian_with(const FourierField& v, const ModeTables& t, double kappa_minus) {
    const int n = v.order();
    const FourierField w = apply_multiplier(v, t.minus);
    Eigen::MatrixXd J(n + 1, n + 1);
    for (int j = 0; j <= n; ++j) {
        FourierField e = FourierField::zeros(n, v.k);
        e.c[j] = 1.0;
        const FourierField ae = apply_multiplier(e, t.minus);
        const FourierField p1 = product(e, w);
        const FourierField p2 = product(v, ae);
        for (int i = 0; i <= n; ++i) {
            J(i, j) = (i == j ? t.alpha[i] : 0.0) - kappa_minus * (p1.c[i] + p2.c[i]);
        }
    }
    return J;
}

bool decay_ok(const FourierField& f) {
    double mx = 0.0;
    for (double c : f.c) mx = std::max(mx, std::abs(c));
    return std::abs(f.c.back()) <= 1e-10 * mx;
}

struct NewtonOutcome {
    FourierField field;
    double residual = 0.0;
    int iters = 0;
};

NewtonOutcome newton(FourierField v, const Rates& r, const KernelPair& k, const SolveOptions& opt) {
    const ModeTables t = mode_tables(r, k, v.k, v.order());
    FourierField F = residual_with(v, t, r.kappa_minus);
    double fn = F.norm();
    int it = 0;
    for (; it < opt.max_iter && fn >= opt.tol; ++it) {
        const Eigen::MatrixXd J = jacobian_with(v, t, r.kappa_minus);
        const Eigen::VectorXd dx = J.fullPivLu().solve(-to_vec(F));
        if (!dx.allFinite()) throw Error(ErrorKind::NewtonDiverged, "singular Jacobian in the Galerkin Newton step");
        double lambda = 1.0;
        FourierField trial;
        FourierField Ftrial;
        double ftrial = 0.0;
        for (;;) {
            trial = from_vec(to_vec(v) + lambda * dx, v.k);
            Ftrial = residual_with(trial, t, r.kappa_minus);
            ftrial = Ftrial.norm();
            if (std::isfinite(ftrial) && ftrial <= (1.0 - 1e-4 * lambda) * fn) break;
            lambda *= 0.5;
            if (lambda < 1e-8) break;
        }
        if (!std::isfinite(ftrial)) throw Error(ErrorKind::NewtonDiverged, "non-finite Galerkin residual");
        if (lambda < 1e-8 && ftrial >= fn) {
            std::ostringstream msg;
            msg << "Galerkin Newton stalled at residual " << fn << " after " << it << " iterations";
            throw Error(ErrorKind::NewtonDiverged, msg.str());
        }
        v = std::move(trial);
        F = std::move(Ftrial);
        fn = ftrial;
    }
    if (fn >= opt.tol) {
        std::ostringstream msg;
        msg << "Galerkin Newton reached max_iter = " << opt.max_iter << " with residual " << fn;
        throw Error(ErrorKind::NewtonDiverged, msg.str());
    }
    return {std::move(v), fn, it};
}

} // namespace

ModeTables mode_tables(const Rates& r, const KernelPair& k, double wave, int order) {
    ModeTables t;
    t.alpha.resize(order + 1);
    t.minus.resize(order + 1);
    for (int j = 0; j <= order; ++j) {
        t.alpha[j] = alpha(r, k, j * wave);
        t.minus[j] = fourier(k.minus, j * wave);
    }
    return t;
}

FourierField residual(const FourierField& field, const Rates& r, const KernelPair& k) {
    return residual_with(field, mode_tables(r, k, field.k, field.order()), r.kappa_minus);
}

FourierField residual(const FourierField& field, const EpsParams& params, const KernelPair& k) {
    return residual(field, params.rates(), k);
}

Eigen::MatrixXd jacobian(const FourierField& field, const EpsParams& params, const KernelPair& k) {
    const Rates r = params.rates();
    return jacobian_with(field, mode_tables(r, k, field.k, field.order()), r.kappa_minus);
}

double predicted_amplitude(const ModelParams& params, const KernelPair& k, const CriticalPoint& crit, double eps,
                           double delta) {
    const double Om = capital_omega(params, k, crit.k_c, eps, delta);
    const double om = omega_coefficient(params, k, crit.k_c);
    return 2.0 * std::sqrt(std::max(Om, 0.0) / om);
}

FourierField asymptotic_seed(const ModelParams& params, const KernelPair& k, const CriticalPoint& crit, double eps,
                             double delta, int order, bool second_order) {
    const double Om = capital_omega(params, k, crit.k_c, eps, delta);
    const double scale = std::abs(alpha_deps(params, k, crit.k_c) * eps) + 1.0;
    if (Om < -1e-14 * scale) {
        std::ostringstream msg;
        msg << "(eps, delta) = (" << eps << ", " << delta << ") lies outside the existence wedge (Omega = " << Om
            << ")";
        throw Error(ErrorKind::OutsideWedge, msg.str());
    }
    const double om = omega_coefficient(params, k, crit.k_c);
    if (!(om > 0.0)) throw Error(ErrorKind::DegenerateDenominator, "omega must be positive for an amplitude");
    const double s = std::sqrt(std::max(Om, 0.0) / om);
    const double wave = crit.k_c + delta;
    FourierField f = FourierField::zeros(std::max(order, 2), wave);
    f.c[1] = 2.0 * s;
    if (second_order) {
        const EpsParams ep{params, eps};
        const double km = ep.kappa_minus_eps();
        const double am = fourier(k.minus, wave);
        const double g2 = km * am / alpha(ep, k, 2.0 * wave);
        const double g0 = 2.0 * km * am / alpha(ep, k, 0.0);
        f.c[2] = 2.0 * g2 * s * s;
        f.c[0] = g0 * s * s;
    }
    return f;
}

BranchPoint solve_branch_point(const FourierField& seed, const EpsParams& params, const KernelPair& k,
                               const SolveOptions& opt) {
    const Rates r = params.rates();
    NewtonOutcome out = newton(seed, r, k, opt);
    while (!decay_ok(out.field)) {
        const int next = 2 * out.field.order();
        if (next > opt.max_order) {
            std::ostringstream msg;
            msg << "spectral tail |c_N| = " << std::abs(out.field.c.back()) << " still too large at N = "
                << out.field.order();
            throw Error(ErrorKind::Resolution, msg.str());
        }
        const int prev_iters = out.iters;
        out = newton(out.field.resized(next), r, k, opt);
        out.iters += prev_iters;
    }

    FourierField& f = out.field;
    if (f.order() >= 1 && f.c[1] < 0.0) {
        for (std::size_t j = 1; j < f.c.size(); j += 2) f.c[j] = -f.c[j];
    }
    const double c1 = f.order() >= 1 ? f.c[1] : 0.0;
    if (opt.require_pattern && !(c1 > tol_sep)) {
        const double theta = params.base.theta();
        const char* which = std::abs(f.c[0] + theta) < std::abs(f.c[0]) ? "v = -theta (u = 0)" : "v = 0 (u = theta)";
        std::ostringstream msg;
        msg << "Newton collapsed to the constant solution " << which << " (c_1 = " << c1 << ")";
        throw Error(ErrorKind::CollapsedToConstant, msg.str());
    }

    BranchPoint bp;
    bp.eps = params.eps;
    bp.field = f;
    bp.amplitude_measured = c1;
    bp.amplitude_predicted = std::nan("");
    bp.residual_norm = out.residual;
    bp.newton_iters = out.iters;
    return bp;
}

BranchPoint solve_at(const ModelParams& params, const KernelPair& k, const CriticalPoint& crit, double eps,
                     double delta, int order, const SolveOptions& opt) {
    const FourierField seed = asymptotic_seed(params, k, crit, eps, delta, order);
    BranchPoint bp = solve_branch_point(seed, EpsParams{params, eps}, k, opt);
    bp.delta = delta;
    bp.amplitude_predicted = predicted_amplitude(params, k, crit, eps, delta);
    return bp;
}

std::vector<BranchPoint> continue_branch(const ModelParams& params, const KernelPair& k, const CriticalPoint& crit,
                                         const std::vector<double>& eps_grid, double delta, int order,
                                         const SolveOptions& opt) {
    std::vector<BranchPoint> out;
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        const double eps = eps_grid[i];
        if (i > 0 && !(eps > eps_grid[i - 1])) throw Error(ErrorKind::InvalidArgument, "eps grid must be increasing");
        try {
            if (!(eps > 0.0) || !(std::abs(delta) < delta_bound(params, k, crit.k_c, eps))) {
                std::ostringstream msg;
                msg << "delta = " << delta << " is outside the existence wedge at eps = " << eps;
                throw Error(ErrorKind::OutsideWedge, msg.str());
            }
            FourierField seed = out.empty() ? asymptotic_seed(params, k, crit, eps, delta, order) : out.back().field;
            BranchPoint bp = solve_branch_point(seed, EpsParams{params, eps}, k, opt);
            bp.delta = delta;
            bp.amplitude_predicted = predicted_amplitude(params, k, crit, eps, delta);
            out.push_back(std::move(bp));
        } catch (const Error& e) {
            std::ostringstream msg;
            msg << "at eps = " << eps << ": " << e.what();
            throw Error(e.kind(), msg.str());
        }
    }
    return out;
}

} // namespace dnfkpp
