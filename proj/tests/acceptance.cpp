// Acceptance checks. `acceptance N` runs criterion N, no argument runs all.
// Each criterion prints one PASS/FAIL line; sub-check details go to stderr.
#include "common.hpp"

#include "dnfkpp/errors.hpp"
#include "dnfkpp/evolution.hpp"
#include "dnfkpp/reporting.hpp"
#include "dnfkpp/scaling_limit.hpp"
#include "dnfkpp/stability.hpp"
#include "dnfkpp/stationary.hpp"
#include "dnfkpp/uniqueness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

using namespace dnfkpp;
namespace fs = std::filesystem;

namespace {

// Tolerances pinned by the acceptance criteria.
constexpr double tol_constant = 1e-14;
constexpr double tol_affine = 1e-12;
constexpr double tol_far = 1e-10;
constexpr double tol_tangency = 1e-10;
constexpr double max_seconds = 10.0;
constexpr double amp_rel_max = 0.1;
constexpr double amp_truncation = 1e-10;
constexpr double ratio_lo = -1.65, ratio_hi = -1.35, ratio_target = -1.5;
constexpr double tol_translation = 1e-8;
constexpr double min_similarity = 0.999;
constexpr double tol_dyn = 1e-9;
constexpr double tol_limit_identity = 1e-12;
constexpr double tol_certificate = 1e-12;

class Checks {
public:
    void expect(bool ok, const std::string& what) {
        std::fprintf(stderr, "  [%s] %s\n", ok ? "ok" : "FAIL", what.c_str());
        all_ &= ok;
    }
    bool passed() const { return all_; }

private:
    bool all_ = true;
};

std::string fmt(double x) { return report::format_double(x); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

KernelPair random_pair(std::mt19937_64& g) {
    const auto ks = testing::builtin_kernels();
    return {ks[g() % ks.size()], ks[g() % ks.size()]};
}

void criterion_1(Checks& c) {
    auto g = testing::rng(101);
    double worst_zero = 0.0, worst_theta = 0.0;
    for (int i = 0; i < 100; ++i) {
        const ModelParams p = testing::random_params(g);
        const KernelPair k = random_pair(g);
        FourierField v = FourierField::zeros(8, testing::uniform(g, 0.1, 3.0));
        worst_zero = std::max(worst_zero, residual(v, EpsParams{p, 0.0}, k).norm());
        v.c[0] = -p.theta();
        worst_theta = std::max(worst_theta, residual(v, EpsParams{p, 0.0}, k).norm());
    }
    c.expect(worst_zero <= tol_constant, "max residual at v = 0 over 100 sets: " + fmt(worst_zero));
    c.expect(worst_theta <= tol_constant, "max residual at v = -theta over 100 sets: " + fmt(worst_theta));
}

void criterion_2(Checks& c) {
    auto g = testing::rng(102);
    double w0 = 0.0, waff = 0.0, wfar = 0.0;
    for (int i = 0; i < 100; ++i) {
        const ModelParams p = testing::random_params(g);
        const KernelPair k = random_pair(g);
        const double eps = testing::uniform(g, -0.3, 0.3);
        const EpsParams e{p, eps};
        w0 = std::max(w0, std::abs(alpha(e, k, 0.0) + (e.kappa_plus_eps() - p.m())));
        const double q = testing::uniform(g, 0.0, 10.0);
        const double e1 = eps - 0.1, e3 = eps + 0.2;
        const double a1 = alpha(EpsParams{p, e1}, k, q), a2 = alpha(e, k, q), a3 = alpha(EpsParams{p, e3}, k, q);
        waff = std::max(waff, std::abs(a1 + (a3 - a1) * (eps - e1) / (e3 - e1) - a2));
        const double P = kernel_decay_horizon(e.rates(), k, tol_far);
        for (int j = 0; j < 20; ++j) {
            const double far = P * (1.0 + testing::uniform(g, 0.0, 3.0));
            wfar = std::max(wfar, std::abs(alpha(e, k, far) + e.kappa_plus_eps()));
        }
    }
    c.expect(w0 <= tol_constant, "max |alpha(eps,0) + (kappa+_eps - m)|: " + fmt(w0));
    c.expect(waff <= tol_affine, "max three-point collinearity defect in eps: " + fmt(waff));
    c.expect(wfar <= tol_far, "max |alpha + kappa+_eps| beyond the decay horizon: " + fmt(wfar));
}

report::json example_json(const std::string& which) {
    report::json j;
    j["model"] = {{"kappa_plus", 1.0}, {"kappa_minus", 1.0}, {"m", 0.5}};
    if (which == "gaussian") {
        j["kernels"] = {{"plus", {{"type", "gaussian"}, {"l", 2.0}}}, {"minus", {{"type", "gaussian_pair"}, {"q", 2.0}}}};
        j["family"] = {{"h_min", 0.1}, {"h_max", 20.0}};
    } else {
        j["kernels"] = {{"plus", {{"type", "uniform"}, {"l", 1.0}}}, {"minus", {{"type", "uniform_pair"}, {"q", 2.0}}}};
        j["family"] = {{"h_min", 1.0}, {"h_max", 10.0}};
    }
    j["seed"] = 7;
    return j;
}

report::json read_json(const fs::path& p) {
    std::ifstream in(p);
    return report::json::parse(in);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("dnfkpp_acceptance_" + name);
    fs::remove_all(d);
    return d;
}

void criterion_3(Checks& c) {
    for (const std::string which : {"gaussian", "uniform"}) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto cfg = report::parse_config(example_json(which));
        report::RunOptions o;
        o.subcommand = "critical";
        o.out_dir = scratch("critical_" + which).string();
        const int rc = report::run(cfg, o);
        const double secs = seconds_since(t0);
        c.expect(rc == 0, which + ": critical exit code " + std::to_string(rc));
        if (rc != 0) continue;
        const auto j = read_json(fs::path(o.out_dir) / "critical.json");
        const double ra = std::abs(j["residual_alpha"].get<double>()), rk = std::abs(j["residual_dk"].get<double>());
        c.expect(ra < tol_tangency && rk < tol_tangency,
                 which + ": h_c = " + fmt(j["h_c"].get<double>()) + ", k_c = " + fmt(j["k_c"].get<double>()) +
                     ", residuals " + fmt(ra) + ", " + fmt(rk));
        bool all = j["assumptions"]["pass"].get<bool>();
        std::string names;
        for (const auto& e : j["assumptions"]["entries"]) {
            if (!e["pass"].get<bool>()) names += " " + e["name"].get<std::string>();
        }
        c.expect(all, which + ": assumptions A1-A8 pass" + (names.empty() ? "" : " (failing:" + names + ")"));
        c.expect(j["omega"].get<double>() > 0.0, which + ": omega = " + fmt(j["omega"].get<double>()));
        c.expect(j["touching_maxima"].get<int>() == 1,
                 which + ": touching maxima on the dispersion curve = " + std::to_string(j["touching_maxima"].get<int>()));
        const std::string curve = slurp(fs::path(o.out_dir) / "dispersion.csv");
        c.expect(curve.rfind("p,alpha\n", 0) == 0 && std::count(curve.begin(), curve.end(), '\n') > 100,
                 which + ": dispersion curve written");
        c.expect(secs < max_seconds, which + ": runtime " + fmt(secs) + " s");
    }
}

void criterion_4(Checks& c) {
    const ModelParams& mp = testing::example_params();
    for (const CriticalPoint* cp : {&testing::gaussian_critical(), &testing::uniform_critical()}) {
        const std::string name = cp == &testing::gaussian_critical() ? "gaussian" : "uniform";
        double prev = 1e300;
        bool decreasing = true;
        std::string errs;
        for (double eps : {1e-2, 1e-3, 1e-4}) {
            const BranchPoint bp = solve_at(mp, cp->kernels, *cp, eps, 0.0, 16);
            const double rel = std::abs(bp.amplitude_measured - bp.amplitude_predicted) / bp.amplitude_predicted;
            decreasing &= rel < prev;
            prev = rel;
            errs += " " + fmt(rel);
        }
        c.expect(decreasing, name + ": relative amplitude errors strictly decreasing:" + errs);
        c.expect(prev < amp_rel_max, name + ": relative error at eps = 1e-4: " + fmt(prev));
        const double a16 = solve_at(mp, cp->kernels, *cp, 1e-3, 0.0, 16).amplitude_measured;
        const double a32 = solve_at(mp, cp->kernels, *cp, 1e-3, 0.0, 32).amplitude_measured;
        c.expect(std::abs(a16 - a32) < amp_truncation, name + ": |c1(N=16) - c1(N=32)| = " + fmt(std::abs(a16 - a32)));
    }
}

void criterion_5(Checks& c) {
    const ModelParams& mp = testing::example_params();
    const CriticalPoint& cp = testing::gaussian_critical();
    std::vector<double> ratios;
    std::string list;
    for (double eps : {1e-2, 1e-3, 1e-4, 1e-5}) {
        const BranchPoint bp = solve_at(mp, cp.kernels, cp, eps, 0.0);
        const SpectrumReport s = spectrum(bp.field, EpsParams{mp, eps}, cp.kernels);
        ratios.push_back(s.leading_in_Y / capital_omega(mp, cp.kernels, cp.k_c, eps, 0.0));
        list += " " + fmt(ratios.back());
        if (eps == 1e-4) {
            c.expect(std::abs(s.translation_eigenvalue) < tol_translation,
                     "translation eigenvalue |lambda| = " + fmt(std::abs(s.translation_eigenvalue)));
            c.expect(s.translation_similarity > min_similarity,
                     "translation eigenvector similarity to v' = " + fmt(s.translation_similarity));
        }
    }
    c.expect(ratios[2] >= ratio_lo && ratios[2] <= ratio_hi,
             "leading_in_Y / Omega at eps = 1e-4: " + fmt(ratios[2]) + " (band [-1.65, -1.35])");
    bool toward = true;
    for (std::size_t i = 2; i < ratios.size(); ++i)
        toward &= std::abs(ratios[i] - ratio_target) < std::abs(ratios[i - 1] - ratio_target);
    c.expect(toward, "ratio trend toward -3/2 over eps = 1e-2..1e-5:" + list);
}

void criterion_6(Checks& c) {
    const ModelParams& mp = testing::example_params();
    const CriticalPoint& cp = testing::gaussian_critical();
    const double eps = 1e-3;
    const EpsParams e{mp, eps};
    const BranchPoint bp = solve_at(mp, cp.kernels, cp, eps, 0.0);
    const double lead = spectrum(bp.field, e, cp.kernels).leading_in_Y;
    const TrigField target = TrigField::from(bp.field);

    auto g = testing::rng(106);
    TrigField d = TrigField::zeros(target.order(), target.k);
    for (int j = 0; j <= d.order(); ++j) d.a[j] = testing::uniform(g, -1.0, 1.0);
    TrigField init = target;
    for (int j = 0; j <= d.order(); ++j) init.a[j] += 1e-3 * d.a[j] / d.norm();
    const double limit = 50.0 / std::abs(lead);
    EvolutionOptions opt;
    opt.tol_dyn = tol_dyn;
    const EvolutionOutcome back = integrate(init, e, cp.kernels, limit, 1.0, target, opt);
    c.expect(back.status == EvolutionStatus::Converged && back.final_distance < tol_dyn,
             "pattern + even 1e-3 perturbation: " + to_string(back.status) + " at t = " + fmt(back.t_final) +
                 " (limit " + fmt(limit) + "), distance " + fmt(back.final_distance));

    TrigField th = TrigField::zeros(target.order(), cp.k_c);
    th.a[1] = 1e-4;
    const EvolutionOutcome grow = integrate(th, e, cp.kernels, 2e5, 1.0, target, opt);
    c.expect(grow.final_field.norm() > 10.0 * th.norm(),
             "theta + 1e-4 cos(k_c x) grows: |v| " + fmt(th.norm()) + " -> " + fmt(grow.final_field.norm()));
    c.expect(grow.status == EvolutionStatus::Converged && grow.final_distance < tol_dyn,
             "and reaches the pattern orbit: " + to_string(grow.status) + " at t = " + fmt(grow.t_final) +
                 ", distance " + fmt(grow.final_distance));
}

void criterion_7(Checks& c) {
    auto g = testing::rng(107);
    const KernelPair k = testing::gaussian_critical().kernels;
    const double theta_ref = 0.5;
    for (int i = 0; i < 3; ++i) {
        const double kp = testing::uniform(g, 0.2, 2.0);
        const Rates r{kp, testing::uniform(g, 0.2, 2.0), kp * testing::uniform(g, 1.1, 3.0)};
        TrigField v = TrigField::zeros(8, 1.0), target = TrigField::zeros(8, 1.0);
        v.a[0] = theta_ref / 2 - r.theta();
        target.a[0] = -r.theta();
        const EvolutionOutcome out = integrate(v, r, k, 1e4, 0.05, target);
        TrigField u = out.final_field;
        u.a[0] += r.theta();
        c.expect(u.norm() < tol_dyn, "kappa+ = " + fmt(r.kappa_plus) + " < m = " + fmt(r.m) + ": |u| -> " +
                                          fmt(u.norm()) + " at t = " + fmt(out.t_final));
    }
    for (int i = 0; i < 3; ++i) {
        const ModelParams p = testing::random_params(g);
        const double l = testing::uniform(g, 0.2, 0.9) * p.theta();
        TrigField v = TrigField::zeros(8, testing::uniform(g, 0.3, 1.5));
        v.a[0] = l / 2 - p.theta();
        const EvolutionOutcome out = integrate(v, p.rates(), k, 1e4, 0.05, TrigField::zeros(8, v.k));
        double u_max = -1e300;
        for (int s = 0; s < 64; ++s) u_max = std::max(u_max, p.theta() + out.final_field(2 * std::numbers::pi * s / 64));
        c.expect(u_max > l, "band [0, " + fmt(l) + "] with theta = " + fmt(p.theta()) + ": u reaches " + fmt(u_max) +
                                " (" + to_string(out.status) + ")");
    }
}

void criterion_8(Checks& c) {
    const ModelParams& mp = testing::example_params();
    const LocalLimitData ld = local_quantities(mp, gaussian_example_family(2.0, 2.0), 0.1, 20.0);
    c.expect(gamma_second_moment(ld.kernels.plus) == 1.0, "gamma of a+ = " + fmt(gamma_second_moment(ld.kernels.plus)));
    const ConvergenceStudy st = convergence_study(mp, ld.kernels, ld, {0.2, 0.1, 0.05, 0.025});
    bool dk = true, dka = true, dw = true;
    std::string rows;
    for (std::size_t i = 0; i < st.rows.size(); ++i) {
        const auto& r = st.rows[i];
        rows += " (" + fmt(r.sigma) + ": " + fmt(r.k_c - ld.k_c) + ", " + fmt(r.kappa) + ", " +
                fmt(r.omega * mp.theta() * mp.theta() - ld.omega_1) + ")";
        if (i == 0) continue;
        const auto& q = st.rows[i - 1];
        dk &= std::abs(r.k_c - ld.k_c) < std::abs(q.k_c - ld.k_c);
        dka &= std::abs(r.kappa) < std::abs(q.kappa);
        dw &= std::abs(r.omega * mp.theta() * mp.theta() - ld.omega_1) <
              std::abs(q.omega * mp.theta() * mp.theta() - ld.omega_1);
    }
    std::fprintf(stderr, "  sigma: (k_c(sigma) - k_c, kappa, omega theta^2 - omega_1):%s\n", rows.c_str());
    c.expect(dk, "|k_c(sigma) - k_c| decreasing");
    c.expect(dka, "|kappa(sigma)| decreasing");
    c.expect(dw, "|omega(sigma) theta^2 - omega_1| decreasing");
    c.expect(std::isfinite(st.kappa_rate), "fitted log-log rate of kappa(sigma): " + fmt(st.kappa_rate));
    double worst = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const double p = 0.01 * i;
        worst = std::max(worst, std::abs(tilde_alpha(0.0, p, 0.0, 0.0, mp, ld.kernels) -
                                         mp.kappa_plus() * local_d(ld.mu_c, p, ld.kernels.minus)));
    }
    c.expect(worst <= tol_limit_identity, "max |alpha~(0,k,0,0) - kappa+ d(mu_c,k)| on k in [0,4]: " + fmt(worst));
}

void criterion_9(Checks& c) {
    const ModelParams& mp = testing::example_params();
    const KernelPair same{Kernel::gaussian(2.0), Kernel::gaussian(2.0)};
    const double J = j_theta_l1(mp, same).value;
    const double rinf = linf_uniqueness_radius(mp, same);
    c.expect(std::abs(J - mp.m()) <= tol_certificate, "a+ = a-: ||J_theta||_1 = " + fmt(J) + " vs m = " + fmt(mp.m()));
    c.expect(std::abs(rinf - mp.theta() / 2) <= tol_certificate,
             "a+ = a-: radius = " + fmt(rinf) + " vs theta/2 = " + fmt(mp.theta() / 2));

    const CriticalPoint& cp = testing::gaussian_critical();
    const double pc = 2.0 * std::numbers::pi / cp.k_c;
    const double gp = gamma_p(mp, cp.kernels, pc);
    bool detected = false;
    try {
        l2_uniqueness_radius(mp, cp.kernels, pc);
    } catch (const Error& e) {
        detected = e.kind() == ErrorKind::NotApplicable;
    }
    c.expect(std::abs(gp) < tol_root && detected, "gamma_p at p = 2 pi/k_c = " + fmt(gp) + ", NotApplicable raised");

    const double p = 2.0 * std::numbers::pi;
    const double r2 = l2_uniqueness_radius(mp, same, p);
    const double r = std::min(r2, rinf);
    c.expect(check_dominance(mp, same).status == DominanceStatus::Pass, "dominance certified for a+ = a-");
    auto g = testing::rng(109);
    SolveOptions o;
    o.require_pattern = false;
    int collapsed = 0;
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        FourierField v = FourierField::zeros(8, 1.0);
        double l1 = 0.0;
        for (auto& x : v.c) {
            x = testing::uniform(g, -1.0, 1.0);
            l1 += std::abs(x);
        }
        // sup norm and period-L² norm both stay within r/2
        const double s = testing::uniform(g, 0.05, 1.0) * 0.5 * r / (l1 * std::max(1.0, std::sqrt(p)));
        for (auto& x : v.c) x *= s;
        const BranchPoint bp = solve_branch_point(v, EpsParams{mp, 0.0}, same, o);
        worst = std::max(worst, bp.field.norm());
        if (bp.field.norm() < 1e-12) ++collapsed;
    }
    c.expect(collapsed == 50, "Newton starts inside the ball (radius " + fmt(r) + ") collapsing to theta: " +
                                  std::to_string(collapsed) + "/50, worst |v| = " + fmt(worst));
}

void criterion_10(Checks& c) {
    auto j = example_json("gaussian");
    j["branch"] = {{"eps", {1e-2, 1e-3}}};
    j["stability"] = {{"eps", {1e-3}}};
    j["evolve"] = {{"eps", 1e-3}, {"t_max", 2000.0}, {"dt", 1.0}, {"initial", "pattern-perturbation"}};
    j["sweep"] = {{"m", {0.3, 0.4, 0.5, 0.6}}, {"h", {2.0, 3.0, 4.0, 5.0, 6.0}}};
    const auto cfg = report::parse_config(j);
    for (const std::string sub : {"analyze", "evolve", "sweep"}) {
        std::vector<fs::path> dirs{scratch(sub + "_a"), scratch(sub + "_b")};
        for (const auto& d : dirs) {
            report::RunOptions o;
            o.subcommand = sub;
            o.out_dir = d.string();
            o.threads = 4;
            report::run(cfg, o);
        }
        bool same = true;
        int files = 0;
        for (const auto& e : fs::directory_iterator(dirs[0])) {
            const std::string name = e.path().filename().string();
            ++files;
            if (name == "manifest.json") {
                auto a = read_json(e.path()), b = read_json(dirs[1] / name);
                a.erase("wall_time_s");
                b.erase("wall_time_s");
                same &= a == b;
            } else {
                same &= slurp(e.path()) == slurp(dirs[1] / name);
            }
        }
        c.expect(same && files > 1, sub + ": repeated runs byte-identical over " + std::to_string(files) + " files");
    }
    const auto serial = report::sweep_table(report::run_sweep(cfg, 1)).csv();
    const auto parallel = report::sweep_table(report::run_sweep(cfg, 4)).csv();
    c.expect(serial == parallel, "4-worker sweep CSV equals the serial one");
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<std::function<void(Checks&)>> criteria{criterion_1, criterion_2, criterion_3, criterion_4,
                                                             criterion_5, criterion_6, criterion_7, criterion_8,
                                                             criterion_9, criterion_10};
    std::vector<int> which;
    if (argc > 1) {
        for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
    } else {
        for (int i = 1; i <= 10; ++i) which.push_back(i);
    }
    bool all = true;
    for (int n : which) {
        if (n < 1 || n > 10) {
            std::fprintf(stderr, "no criterion %d\n", n);
            return 2;
        }
        Checks c;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[n - 1](c);
        } catch (const std::exception& e) {
            c.expect(false, std::string("exception: ") + e.what());
        }
        std::printf("criterion %d: %s (%.2f s)\n", n, c.passed() ? "PASS" : "FAIL", seconds_since(t0));
        std::fflush(stdout);
        all &= c.passed();
    }
    return all ? 0 : 1;
}
