#include "dnfkpp/kernels.hpp"

#include "dnfkpp/errors.hpp"
#include "dnfkpp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace dnfkpp {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// sin(z)/z and its first two derivatives. Power series below |z| = 1, where
// the closed forms lose digits to cancellation.
struct Sinc {
    double value;
    double d1;
    double d2;
    double minus_one;
};

Sinc sinc(double z) {
    if (std::abs(z) < 1.0) {
        Sinc s{1.0, 0.0, 0.0, 0.0};
        const double z2 = z * z;
        double zpow = 1.0; // z^(2n-2)
        double fact = 1.0; // (2n+1)!
        double sign = 1.0;
        for (int n = 1; n <= 14; ++n) {
            fact *= (2.0 * n) * (2.0 * n + 1.0);
            sign = -sign;
            const double term2 = sign * zpow / fact; // coefficient of z^(2n) divided by z^2
            s.minus_one += term2 * z2;
            s.d1 += term2 * 2.0 * n * z;
            s.d2 += term2 * 2.0 * n * (2.0 * n - 1.0);
            zpow *= z2;
        }
        s.value = 1.0 + s.minus_one;
        return s;
    }
    const double sz = std::sin(z);
    const double cz = std::cos(z);
    const double v = sz / z;
    return Sinc{v, (z * cz - sz) / (z * z), ((2.0 - z * z) * sz - 2.0 * z * cz) / (z * z * z), v - 1.0};
}

// Envelope of a pair kernel: Gaussian or sinc profile of one bump, centred at 0.
struct Envelope {
    double value;
    double d1;
    double d2;
    double minus_one;
};

Envelope gaussian_envelope(double var, double p) {
    const double e = std::exp(-0.5 * var * p * p);
    return Envelope{e, -var * p * e, (var * var * p * p - var) * e, std::expm1(-0.5 * var * p * p)};
}

Envelope sinc_envelope(double half_width, double p) {
    const Sinc s = sinc(half_width * p);
    return Envelope{s.value, half_width * s.d1, half_width * half_width * s.d2, s.minus_one};
}

// â(p) = cos(c p) E(p) for both pair kernels.
struct PairForm {
    double center;
    Envelope env;
};

PairForm pair_form(const GaussianPair& g, double p) { return {g.h, gaussian_envelope(g.q, p)}; }
PairForm pair_form(const UniformPair& u, double p) {
    return {u.h_inner + 0.5 * u.q, sinc_envelope(0.5 * u.q, p)};
}

double pair_value(const PairForm& f, double p) { return std::cos(f.center * p) * f.env.value; }
double pair_d1(const PairForm& f, double p) {
    const double c = f.center;
    return -c * std::sin(c * p) * f.env.value + std::cos(c * p) * f.env.d1;
}
double pair_d2(const PairForm& f, double p) {
    const double c = f.center;
    const double cs = std::cos(c * p);
    const double sn = std::sin(c * p);
    return -c * c * cs * f.env.value - 2.0 * c * sn * f.env.d1 + cs * f.env.d2;
}
double pair_minus_one(const PairForm& f, double p) {
    const double s = std::sin(0.5 * f.center * p);
    return -2.0 * s * s * f.env.value + f.env.minus_one;
}
double pair_dshift(const PairForm& f, double p) { return -p * std::sin(f.center * p) * f.env.value; }
double pair_dshift_dp(const PairForm& f, double p) {
    const double c = f.center;
    const double sn = std::sin(c * p);
    return -sn * f.env.value - c * p * std::cos(c * p) * f.env.value - p * sn * f.env.d1;
}

double normal_pdf(double x, double var) { return std::exp(-0.5 * x * x / var) / std::sqrt(2.0 * kPi * var); }

// ∫_{-inf}^t N(0,var)(x)^2 dx.
double normal_sq_cdf(double t, double var) {
    return (1.0 + std::erf(t / std::sqrt(var))) / (4.0 * std::sqrt(kPi * var));
}

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

// Mass of the interval [lo, hi] intersected with {|x| > r}.
double interval_outside(double lo, double hi, double r) {
    double out = 0.0;
    if (hi > r) out += hi - std::max(lo, r);
    if (lo < -r) out += std::min(hi, -r) - lo;
    return std::max(out, 0.0);
}

void check_nyquist(const Tabulated& t, double p) {
    if (std::abs(p) * t.data->dx >= kPi) {
        std::ostringstream msg;
        msg << "wave number " << p << " exceeds the Nyquist limit " << kPi / t.data->dx
            << " of the tabulated kernel";
        throw Error(ErrorKind::Resolution, msg.str());
    }
}

// Trapezoidal weight of sample i.
double trap_weight(const Tabulated& t, std::size_t i) {
    const std::size_t n = t.data->x.size();
    return (i == 0 || i + 1 == n) ? 0.5 * t.data->dx : t.data->dx;
}

double tab_evaluate(const Tabulated& t, double x) {
    const auto& d = *t.data;
    if (x < d.x.front() || x > d.x.back()) return 0.0;
    const double s = (x - d.x.front()) / d.dx;
    const std::size_t i = std::min(static_cast<std::size_t>(s), d.x.size() - 2);
    const double w = s - static_cast<double>(i);
    return (1.0 - w) * d.a[i] + w * d.a[i + 1];
}

// ∫_{-inf}^t a^2 for the piecewise-linear interpolant (exact).
double tab_sq_cdf(const Tabulated& t, double x) {
    const auto& d = *t.data;
    if (x <= d.x.front()) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < d.x.size(); ++i) {
        const double x0 = d.x[i];
        const double x1 = std::min(d.x[i + 1], x);
        if (x1 <= x0) break;
        const double a0 = d.a[i];
        const double a1 = tab_evaluate(t, x1);
        total += (x1 - x0) * (a0 * a0 + a0 * a1 + a1 * a1) / 3.0;
        if (x <= d.x[i + 1]) break;
    }
    return total;
}

// ∫_r^inf a for the piecewise-linear interpolant (exact).
double tab_upper_mass(const Tabulated& t, double r) {
    const auto& d = *t.data;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < d.x.size(); ++i) {
        const double x0 = std::max(d.x[i], r);
        const double x1 = d.x[i + 1];
        if (x1 <= x0) continue;
        total += 0.5 * (x1 - x0) * (tab_evaluate(t, x0) + d.a[i + 1]);
    }
    return total;
}

// Closed-form tail constants for built-ins; the sampled maximum of a(x)(1 + x^2)
// for tables.
TailBound default_tail(const Kernel::Variant& v) {
    return std::visit(
        overloaded{
            [](const Gaussian& g) {
                const double two_l = 2.0 * g.l;
                const double peak = two_l > 1.0 ? two_l * std::exp(-(two_l - 1.0) / two_l) : 1.0;
                return TailBound{peak / std::sqrt(2.0 * kPi * g.l) * (1.0 + 1e-12), 1.0};
            },
            [](const GaussianPair& g) {
                // (1 + x^2) <= 1 + 2y^2 + 2h^2 with y = x -/+ h, and max y^2 φ(y) = 2q/(e sqrt(2πq)).
                const double c = (1.0 + 2.0 * g.h * g.h + 4.0 * g.q / std::exp(1.0)) / std::sqrt(2.0 * kPi * g.q);
                return TailBound{c, 1.0};
            },
            [](const Uniform& u) { return TailBound{(1.0 + u.l * u.l) / (2.0 * u.l), 1.0}; },
            [](const UniformPair& u) {
                const double r = u.h_inner + u.q;
                return TailBound{(1.0 + r * r) / (2.0 * u.q), 1.0};
            },
            [](const Tabulated& t) {
                double c = 0.0;
                for (std::size_t i = 0; i < t.data->x.size(); ++i) {
                    const double x = t.data->x[i];
                    c = std::max(c, t.data->a[i] * (1.0 + x * x));
                }
                return TailBound{c * (1.0 + 1e-12), 1.0};
            },
        },
        v);
}

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw Error(ErrorKind::InvalidArgument, std::string(name) + " must be positive and finite");
    }
}

bool tail_holds(const Tabulated& t, const TailBound& tb) {
    for (std::size_t i = 0; i < t.data->x.size(); ++i) {
        const double x = std::abs(t.data->x[i]);
        const double bound = tb.C / (1.0 + std::pow(x, 1.0 + tb.xi));
        if (t.data->a[i] > bound * (1.0 + 1e-12)) return false;
    }
    return true;
}

} // namespace

Kernel::Kernel() : Kernel(Gaussian{1.0}, default_tail(Gaussian{1.0})) {}

Kernel Kernel::gaussian(double l) {
    require_positive(l, "gaussian variance l");
    Variant v = Gaussian{l};
    return Kernel(v, default_tail(v));
}

Kernel Kernel::gaussian_pair(double q, double h) {
    require_positive(q, "gaussian_pair variance q");
    if (!(h >= 0.0) || !std::isfinite(h)) throw Error(ErrorKind::InvalidArgument, "gaussian_pair shift h must be >= 0");
    Variant v = GaussianPair{q, h};
    return Kernel(v, default_tail(v));
}

Kernel Kernel::uniform(double l) {
    require_positive(l, "uniform half_width l");
    Variant v = Uniform{l};
    return Kernel(v, default_tail(v));
}

Kernel Kernel::uniform_pair(double q, double h_inner) {
    require_positive(q, "uniform_pair width q");
    if (!(h_inner >= 0.0) || !std::isfinite(h_inner)) {
        throw Error(ErrorKind::InvalidArgument, "uniform_pair inner offset must be >= 0");
    }
    Variant v = UniformPair{q, h_inner};
    return Kernel(v, default_tail(v));
}

Kernel Kernel::tabulated(std::vector<double> x, std::vector<double> a, std::optional<TailBound> tail) {
    if (x.size() != a.size() || x.size() < 3) {
        throw Error(ErrorKind::InvalidArgument, "tabulated kernel needs >= 3 (x, a) samples of equal length");
    }
    const std::size_t n = x.size();
    const double dx = (x.back() - x.front()) / static_cast<double>(n - 1);
    if (!(dx > 0.0)) throw Error(ErrorKind::InvalidArgument, "tabulated grid must be increasing");
    double amax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(x[i] - (x.front() + static_cast<double>(i) * dx)) > 1e-9 * dx * static_cast<double>(n)) {
            throw Error(ErrorKind::InvalidArgument, "tabulated grid must be uniform");
        }
        if (!(a[i] >= 0.0) || !std::isfinite(a[i])) {
            throw Error(ErrorKind::InvalidArgument, "tabulated density must be finite and non-negative");
        }
        amax = std::max(amax, a[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = n - 1 - i;
        if (std::abs(x[i] + x[j]) > 1e-9 * dx || std::abs(a[i] - a[j]) > 1e-12 * amax) {
            throw Error(ErrorKind::InvalidArgument, "tabulated kernel must be symmetric about 0");
        }
    }
    auto data = std::make_shared<Tabulated::Data>();
    data->x = std::move(x);
    data->a = std::move(a);
    data->dx = dx;
    Tabulated t{data};
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) mass += trap_weight(t, i) * t.data->a[i];
    if (std::abs(mass - 1.0) > 1e-10) {
        std::ostringstream msg;
        msg << "tabulated kernel mass " << mass << " differs from 1 by more than 1e-10";
        throw Error(ErrorKind::InvalidArgument, msg.str());
    }
    Variant v = t;
    const TailBound tb = tail.value_or(default_tail(v));
    if (!tail_holds(t, tb)) {
        throw Error(ErrorKind::InvalidArgument, "declared tail bound is violated on the tabulated grid");
    }
    return Kernel(v, tb);
}

std::string Kernel::type_name() const {
    return std::visit(overloaded{[](const Gaussian&) { return std::string("gaussian"); },
                                 [](const GaussianPair&) { return std::string("gaussian_pair"); },
                                 [](const Uniform&) { return std::string("uniform"); },
                                 [](const UniformPair&) { return std::string("uniform_pair"); },
                                 [](const Tabulated&) { return std::string("tabulated"); }},
                      variant_);
}

Kernel load_tabulated_csv(const std::string& path, std::optional<TailBound> tail) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Config, "cannot open kernel table " + path);
    std::vector<double> xs, as;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double x = 0.0, a = 0.0;
        if (!(row >> x >> a)) {
            if (xs.empty()) continue; // header
            throw Error(ErrorKind::Config, "malformed row in " + path + ": " + line);
        }
        xs.push_back(x);
        as.push_back(a);
    }
    return Kernel::tabulated(std::move(xs), std::move(as), tail);
}

Kernel tabulate(const Kernel& kernel, double half_width, double dx) {
    const auto half = static_cast<std::size_t>(std::llround(half_width / dx));
    const std::size_t n = 2 * half + 1;
    std::vector<double> x(n), a(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = (static_cast<double>(i) - static_cast<double>(half)) * dx;
        x[i] = xi;
        a[i] = evaluate(kernel, std::abs(xi));
    }
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) mass += ((i == 0 || i + 1 == n) ? 0.5 : 1.0) * dx * a[i];
    for (double& v : a) v /= mass;
    return Kernel::tabulated(std::move(x), std::move(a));
}

double fourier(const Kernel& kernel, double p) {
    return std::visit(overloaded{
                          [&](const Gaussian& g) { return std::exp(-0.5 * g.l * p * p); },
                          [&](const GaussianPair& g) { return pair_value(pair_form(g, p), p); },
                          [&](const Uniform& u) { return sinc(u.l * p).value; },
                          [&](const UniformPair& u) { return pair_value(pair_form(u, p), p); },
                          [&](const Tabulated& t) {
                              check_nyquist(t, p);
                              double s = 0.0;
                              for (std::size_t i = 0; i < t.data->x.size(); ++i) {
                                  s += trap_weight(t, i) * t.data->a[i] * std::cos(p * t.data->x[i]);
                              }
                              return s;
                          },
                      },
                      kernel.variant());
}

double fourier_d1(const Kernel& kernel, double p) {
    return std::visit(overloaded{
                          [&](const Gaussian& g) { return -g.l * p * std::exp(-0.5 * g.l * p * p); },
                          [&](const GaussianPair& g) { return pair_d1(pair_form(g, p), p); },
                          [&](const Uniform& u) { return u.l * sinc(u.l * p).d1; },
                          [&](const UniformPair& u) { return pair_d1(pair_form(u, p), p); },
                          [&](const Tabulated& t) {
                              check_nyquist(t, p);
                              double s = 0.0;
                              for (std::size_t i = 0; i < t.data->x.size(); ++i) {
                                  const double x = t.data->x[i];
                                  s -= trap_weight(t, i) * t.data->a[i] * x * std::sin(p * x);
                              }
                              return s;
                          },
                      },
                      kernel.variant());
}

double fourier_d2(const Kernel& kernel, double p) {
    return std::visit(overloaded{
                          [&](const Gaussian& g) {
                              return (g.l * g.l * p * p - g.l) * std::exp(-0.5 * g.l * p * p);
                          },
                          [&](const GaussianPair& g) { return pair_d2(pair_form(g, p), p); },
                          [&](const Uniform& u) { return u.l * u.l * sinc(u.l * p).d2; },
                          [&](const UniformPair& u) { return pair_d2(pair_form(u, p), p); },
                          [&](const Tabulated& t) {
                              check_nyquist(t, p);
                              double s = 0.0;
                              for (std::size_t i = 0; i < t.data->x.size(); ++i) {
                                  const double x = t.data->x[i];
                                  s -= trap_weight(t, i) * t.data->a[i] * x * x * std::cos(p * x);
                              }
                              return s;
                          },
                      },
                      kernel.variant());
}

double fourier_minus_one(const Kernel& kernel, double p) {
    return std::visit(overloaded{
                          [&](const Gaussian& g) { return std::expm1(-0.5 * g.l * p * p); },
                          [&](const GaussianPair& g) { return pair_minus_one(pair_form(g, p), p); },
                          [&](const Uniform& u) { return sinc(u.l * p).minus_one; },
                          [&](const UniformPair& u) { return pair_minus_one(pair_form(u, p), p); },
                          [&](const Tabulated& t) {
                              check_nyquist(t, p);
                              double s = 0.0, mass = 0.0;
                              for (std::size_t i = 0; i < t.data->x.size(); ++i) {
                                  const double w = trap_weight(t, i) * t.data->a[i];
                                  const double sn = std::sin(0.5 * p * t.data->x[i]);
                                  s -= 2.0 * w * sn * sn;
                                  mass += w;
                              }
                              return s + (mass - 1.0);
                          },
                      },
                      kernel.variant());
}

double fourier_dshift(const Kernel& kernel, double p) {
    return std::visit(overloaded{
                          [&](const Gaussian&) { return 0.0; },
                          [&](const GaussianPair& g) { return pair_dshift(pair_form(g, p), p); },
                          [&](const Uniform&) { return 0.0; },
                          [&](const UniformPair& u) { return pair_dshift(pair_form(u, p), p); },
                          [&](const Tabulated&) -> double {
                              throw Error(ErrorKind::InvalidArgument, "tabulated kernels have no shift parameter");
                          },
                      },
                      kernel.variant());
}

double fourier_dshift_dp(const Kernel& kernel, double p) {
    return std::visit(overloaded{
                          [&](const Gaussian&) { return 0.0; },
                          [&](const GaussianPair& g) { return pair_dshift_dp(pair_form(g, p), p); },
                          [&](const Uniform&) { return 0.0; },
                          [&](const UniformPair& u) { return pair_dshift_dp(pair_form(u, p), p); },
                          [&](const Tabulated&) -> double {
                              throw Error(ErrorKind::InvalidArgument, "tabulated kernels have no shift parameter");
                          },
                      },
                      kernel.variant());
}

double decay_envelope(const Kernel& kernel, double p) {
    const double ap = std::abs(p);
    return std::visit(overloaded{
                          [&](const Gaussian& g) { return std::exp(-0.5 * g.l * ap * ap); },
                          [&](const GaussianPair& g) { return std::exp(-0.5 * g.q * ap * ap); },
                          [&](const Uniform& u) { return std::min(1.0, 1.0 / (u.l * ap)); },
                          [&](const UniformPair& u) { return std::min(1.0, 2.0 / (u.q * ap)); },
                          [&](const Tabulated& t) {
                              // Integration by parts: |â(p)| <= TV(a)/|p| for the interpolant.
                              const auto& a = t.data->a;
                              double tv = a.front() + a.back();
                              for (std::size_t i = 0; i + 1 < a.size(); ++i) tv += std::abs(a[i + 1] - a[i]);
                              return std::min(1.0, tv / ap);
                          },
                      },
                      kernel.variant());
}

double evaluate(const Kernel& kernel, double x) {
    return std::visit(overloaded{
                          [&](const Gaussian& g) { return normal_pdf(x, g.l); },
                          [&](const GaussianPair& g) {
                              return 0.5 * (normal_pdf(x - g.h, g.q) + normal_pdf(x + g.h, g.q));
                          },
                          [&](const Uniform& u) { return std::abs(x) <= u.l ? 0.5 / u.l : 0.0; },
                          [&](const UniformPair& u) {
                              const double ax = std::abs(x);
                              return (ax >= u.h_inner && ax <= u.h_inner + u.q) ? 0.5 / u.q : 0.0;
                          },
                          [&](const Tabulated& t) { return tab_evaluate(t, x); },
                      },
                      kernel.variant());
}

double second_moment(const Kernel& kernel) {
    return std::visit(overloaded{
                          [](const Gaussian& g) { return g.l; },
                          [](const GaussianPair& g) { return g.q + g.h * g.h; },
                          [](const Uniform& u) { return u.l * u.l / 3.0; },
                          [](const UniformPair& u) {
                              const double r = u.h_inner + u.q;
                              return (r * r * r - u.h_inner * u.h_inner * u.h_inner) / (3.0 * u.q);
                          },
                          [](const Tabulated& t) {
                              double s = 0.0;
                              for (std::size_t i = 0; i < t.data->x.size(); ++i) {
                                  const double x = t.data->x[i];
                                  s += trap_weight(t, i) * t.data->a[i] * x * x;
                              }
                              return s;
                          },
                      },
                      kernel.variant());
}

double length_scale(const Kernel& kernel) { return std::sqrt(second_moment(kernel)); }

std::vector<double> breakpoints(const Kernel& kernel) {
    return std::visit(overloaded{
                          [](const Gaussian&) { return std::vector<double>{}; },
                          [](const GaussianPair&) { return std::vector<double>{}; },
                          [](const Uniform& u) { return std::vector<double>{-u.l, u.l}; },
                          [](const UniformPair& u) {
                              const double r = u.h_inner + u.q;
                              return std::vector<double>{-r, -u.h_inner, u.h_inner, r};
                          },
                          [](const Tabulated& t) { return t.data->x; },
                      },
                      kernel.variant());
}

double l1_distance_shift(const Kernel& kernel, double shift) {
    if (shift == 0.0) return 0.0;
    const double s = shift;
    auto diff = [&](double x) { return evaluate(kernel, x + s) - evaluate(kernel, x); };
    return std::visit(
        overloaded{
            [&](const Gaussian& g) { return 2.0 * std::erf(std::abs(s) / (2.0 * std::sqrt(2.0 * g.l))); },
            [&](const GaussianPair& g) {
                const double r = g.h + 40.0 * std::sqrt(g.q) + std::abs(s);
                return quad::integrate_abs(diff, -r, r);
            },
            [&](const Tabulated& t) {
                // Piecewise linear between the union of both grids: exact.
                std::vector<double> cuts = t.data->x;
                for (double x : t.data->x) cuts.push_back(x - s);
                std::sort(cuts.begin(), cuts.end());
                double total = 0.0;
                for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
                    const double w = cuts[i + 1] - cuts[i];
                    if (w <= 0.0) continue;
                    const double fl = diff(cuts[i] + 1e-15 * w) ;
                    const double fr = diff(cuts[i + 1] - 1e-15 * w);
                    if ((fl >= 0) == (fr >= 0)) {
                        total += 0.5 * w * (std::abs(fl) + std::abs(fr));
                    } else {
                        total += 0.5 * w * (fl * fl + fr * fr) / (std::abs(fl) + std::abs(fr));
                    }
                }
                return total;
            },
            [&](const auto&) {
                // Piecewise constant: exact on the union of breakpoints.
                std::vector<double> cuts = breakpoints(kernel);
                const std::size_t nb = cuts.size();
                for (std::size_t i = 0; i < nb; ++i) cuts.push_back(cuts[i] - s);
                std::sort(cuts.begin(), cuts.end());
                double total = 0.0;
                for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
                    const double w = cuts[i + 1] - cuts[i];
                    if (w > 0.0) total += w * std::abs(diff(0.5 * (cuts[i] + cuts[i + 1])));
                }
                return total;
            },
        },
        kernel.variant());
}

double squared_cdf(const Kernel& kernel, double t) {
    return std::visit(overloaded{
                          [&](const Gaussian& g) { return normal_sq_cdf(t, g.l); },
                          [&](const GaussianPair& g) {
                              const double cross = std::exp(-g.h * g.h / g.q);
                              return 0.25 * (normal_sq_cdf(t - g.h, g.q) + normal_sq_cdf(t + g.h, g.q) +
                                             2.0 * cross * normal_sq_cdf(t, g.q));
                          },
                          [&](const Uniform& u) { return (clamp(t, -u.l, u.l) + u.l) / (4.0 * u.l * u.l); },
                          [&](const UniformPair& u) {
                              const double r = u.h_inner + u.q;
                              const double len = (clamp(t, -r, -u.h_inner) + r) + (clamp(t, u.h_inner, r) - u.h_inner);
                              return len / (4.0 * u.q * u.q);
                          },
                          [&](const Tabulated& tab) { return tab_sq_cdf(tab, t); },
                      },
                      kernel.variant());
}

double tail_mass(const Kernel& kernel, double radius) {
    const double r = std::max(radius, 0.0);
    return std::visit(overloaded{
                          [&](const Gaussian& g) { return std::erfc(r / std::sqrt(2.0 * g.l)); },
                          [&](const GaussianPair& g) {
                              const double s = std::sqrt(2.0 * g.q);
                              return 0.5 * std::erfc((r - g.h) / s) + 0.5 * std::erfc((r + g.h) / s);
                          },
                          [&](const Uniform& u) { return std::max(0.0, u.l - r) / u.l; },
                          [&](const UniformPair& u) {
                              const double hi = u.h_inner + u.q;
                              return (interval_outside(u.h_inner, hi, r) + interval_outside(-hi, -u.h_inner, r)) /
                                     (2.0 * u.q);
                          },
                          [&](const Tabulated& t) { return 2.0 * tab_upper_mass(t, r); },
                      },
                      kernel.variant());
}

double support_radius(const Kernel& kernel, double mass) {
    double hi = std::max(1.0, 2.0 * length_scale(kernel));
    while (tail_mass(kernel, hi) > mass && hi < 1e12) hi *= 2.0;
    double lo = 0.0;
    for (int i = 0; i < 60 && hi - lo > 1e-3 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (tail_mass(kernel, mid) > mass) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return hi;
}

bool KernelCheck::ok() const {
    return symmetric && normalization_error <= 1e-10 && std::isfinite(second_moment) && tail_bound_holds;
}

KernelCheck check_kernel(const Kernel& kernel) {
    KernelCheck check;
    check.second_moment = second_moment(kernel);
    if (const auto* t = kernel.as<Tabulated>()) {
        double amax = 0.0;
        for (double v : t->data->a) amax = std::max(amax, v);
        const std::size_t n = t->data->x.size();
        check.symmetric = true;
        double mass = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(t->data->a[i] - t->data->a[n - 1 - i]) > 1e-12 * amax) check.symmetric = false;
            mass += trap_weight(*t, i) * t->data->a[i];
        }
        check.normalization_error = std::abs(mass - 1.0);
        check.tail_bound_holds = tail_holds(*t, kernel.tail());
        return check;
    }
    // Built-ins are symmetric and normalized by construction; the tail bound
    // is re-sampled on a grid reaching well into the tail.
    check.symmetric = true;
    check.normalization_error = 0.0;
    const double reach = support_radius(kernel, 1e-14) * 2.0 + 10.0;
    const TailBound& tb = kernel.tail();
    bool holds = true;
    const int n = 20000;
    for (int i = 0; i <= n; ++i) {
        const double x = reach * i / n;
        if (evaluate(kernel, x) > tb.C / (1.0 + std::pow(x, 1.0 + tb.xi)) * (1.0 + 1e-9)) holds = false;
    }
    check.tail_bound_holds = holds;
    return check;
}

} // namespace dnfkpp
