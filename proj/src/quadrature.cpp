#include "dnfkpp/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace dnfkpp::quad {

namespace {

constexpr std::array<double, 5> kNodes = {
    0.1488743389816312108848260, 0.4333953941292471907992659, 0.6794095682990244062343274,
    0.8650633666889845107320967, 0.9739065285171717200779640};
constexpr std::array<double, 5> kWeights = {
    0.2955242247147528701738930, 0.2692667193099963550912269, 0.2190863625159820439955349,
    0.1494513491505805931457763, 0.0666713443086881375935688};

double bisect_root(const Fn& f, double lo, double hi, double flo) {
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

double gauss_legendre(const Fn& f, double lo, double hi, int panels) {
    if (hi <= lo || panels < 1) return 0.0;
    const double width = (hi - lo) / panels;
    double total = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double center = lo + (k + 0.5) * width;
        const double half = 0.5 * width;
        double s = 0.0;
        for (std::size_t i = 0; i < kNodes.size(); ++i) {
            s += kWeights[i] * (f(center - half * kNodes[i]) + f(center + half * kNodes[i]));
        }
        total += s * half;
    }
    return total;
}

double integrate_abs(const Fn& f, double lo, double hi, const std::vector<double>& breaks,
                     int scan_points, int panels_per_piece) {
    if (hi <= lo) return 0.0;
    std::vector<double> cuts{lo, hi};
    for (double b : breaks) {
        if (b > lo && b < hi) cuts.push_back(b);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    // Sign changes inside each smooth piece. Evaluation stays strictly inside
    // the piece so one-sided limits at discontinuities are respected.
    std::vector<double> pieces;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double a = cuts[c];
        const double b = cuts[c + 1];
        pieces.push_back(a);
        const int n = std::max(8, static_cast<int>(scan_points * (b - a) / (hi - lo)));
        const double step = (b - a) / n;
        const double inset = 1e-12 * std::max(1.0, std::abs(a) + std::abs(b));
        double x_prev = a + inset;
        double f_prev = f(x_prev);
        for (int i = 1; i <= n; ++i) {
            const double x = (i == n) ? b - inset : a + i * step;
            const double fx = f(x);
            if ((fx < 0) != (f_prev < 0) && fx != 0.0 && f_prev != 0.0) {
                pieces.push_back(bisect_root(f, x_prev, x, f_prev));
            }
            x_prev = x;
            f_prev = fx;
        }
    }
    pieces.push_back(hi);

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
        total += std::abs(gauss_legendre(f, pieces[i], pieces[i + 1], panels_per_piece));
    }
    return total;
}

double golden_max(const Fn& f, double lo, double hi, double tol) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol * std::max(1.0, std::abs(a) + std::abs(b))) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = std::min(x.size(), y.size());
    if (n < 2) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(std::abs(x[i]));
        const double ly = std::log(std::abs(y[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double dn = static_cast<double>(n);
    return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

} // namespace dnfkpp::quad
