#include "dnfkpp/fields.hpp"

#include "dnfkpp/errors.hpp"
#include "dnfkpp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dnfkpp {

FourierField FourierField::zeros(int n, double k) {
    return FourierField{std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0), k};
}

double FourierField::operator()(double x) const {
    double s = c.empty() ? 0.0 : c[0];
    for (std::size_t j = 1; j < c.size(); ++j) s += c[j] * std::cos(static_cast<double>(j) * x);
    return s;
}

double FourierField::norm() const {
    double s = 0.0;
    for (double v : c) s += v * v;
    return std::sqrt(s);
}

FourierField FourierField::resized(int n) const {
    FourierField out = zeros(n, k);
    for (std::size_t j = 0; j < std::min(c.size(), out.c.size()); ++j) out.c[j] = c[j];
    return out;
}

TrigField TrigField::zeros(int n, double k) {
    const std::size_t m = static_cast<std::size_t>(n) + 1;
    return TrigField{std::vector<double>(m, 0.0), std::vector<double>(m, 0.0), k};
}

TrigField TrigField::from(const FourierField& f) {
    TrigField t = zeros(f.order(), f.k);
    t.a = f.c;
    return t;
}

double TrigField::operator()(double x) const {
    double s = a[0];
    for (std::size_t j = 1; j < a.size(); ++j) {
        const double jx = static_cast<double>(j) * x;
        s += a[j] * std::cos(jx) + b[j] * std::sin(jx);
    }
    return s;
}

double TrigField::norm() const {
    double s = a[0] * a[0];
    for (std::size_t j = 1; j < a.size(); ++j) s += a[j] * a[j] + b[j] * b[j];
    return std::sqrt(s);
}

TrigField TrigField::shifted(double s) const {
    TrigField out = *this;
    for (std::size_t j = 1; j < a.size(); ++j) {
        const double cs = std::cos(static_cast<double>(j) * s);
        const double sn = std::sin(static_cast<double>(j) * s);
        out.a[j] = a[j] * cs + b[j] * sn;
        out.b[j] = b[j] * cs - a[j] * sn;
    }
    return out;
}

FourierField TrigField::even_part() const { return FourierField{a, k}; }

TrigField product(const TrigField& x, const TrigField& y) {
    const int n = x.order();
    if (y.order() != n) throw Error(ErrorKind::InvalidArgument, "product of fields with different orders");
    const int full = 2 * n;
    std::vector<double> ca(full + 1, 0.0), cb(full + 1, 0.0);
    for (int i = 0; i <= n; ++i) {
        const double xa = x.a[i], xb = i > 0 ? x.b[i] : 0.0;
        if (xa == 0.0 && xb == 0.0) continue;
        for (int j = 0; j <= n; ++j) {
            const double ya = y.a[j], yb = j > 0 ? y.b[j] : 0.0;
            const int s = i + j;
            const int d = std::abs(i - j);
            // cos i cos j = ½[cos(i−j) + cos(i+j)]
            const double aa = 0.5 * xa * ya;
            ca[d] += aa;
            ca[s] += aa;
            // sin i sin j = ½[cos(i−j) − cos(i+j)]
            const double bb = 0.5 * xb * yb;
            ca[d] += bb;
            ca[s] -= bb;
            // cos i sin j = ½[sin(i+j) + sin(j−i)]
            const double ab = 0.5 * xa * yb;
            cb[s] += ab;
            if (j > i) cb[d] += ab;
            if (j < i) cb[d] -= ab;
            // sin i cos j = ½[sin(i+j) + sin(i−j)]
            const double ba = 0.5 * xb * ya;
            cb[s] += ba;
            if (i > j) cb[d] += ba;
            if (i < j) cb[d] -= ba;
        }
    }
    TrigField out = TrigField::zeros(n, x.k);
    for (int j = 0; j <= n; ++j) {
        out.a[j] = ca[j];
        out.b[j] = j > 0 ? cb[j] : 0.0;
    }
    return out;
}

FourierField product(const FourierField& x, const FourierField& y) {
    const int n = x.order();
    if (y.order() != n) throw Error(ErrorKind::InvalidArgument, "product of fields with different orders");
    std::vector<double> c(2 * n + 1, 0.0);
    for (int i = 0; i <= n; ++i) {
        if (x.c[i] == 0.0) continue;
        for (int j = 0; j <= n; ++j) {
            const double v = 0.5 * x.c[i] * y.c[j];
            c[std::abs(i - j)] += v;
            c[i + j] += v;
        }
    }
    c.resize(n + 1);
    return FourierField{std::move(c), x.k};
}

TrigField apply_multiplier(const TrigField& f, const std::vector<double>& mult) {
    TrigField out = f;
    for (std::size_t j = 0; j < f.a.size(); ++j) {
        out.a[j] *= mult[j];
        out.b[j] *= mult[j];
    }
    return out;
}

FourierField apply_multiplier(const FourierField& f, const std::vector<double>& mult) {
    FourierField out = f;
    for (std::size_t j = 0; j < f.c.size(); ++j) out.c[j] *= mult[j];
    return out;
}

double distance(const TrigField& x, const TrigField& y) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.a.size(); ++j) {
        const double da = x.a[j] - y.a[j];
        const double db = j > 0 ? x.b[j] - y.b[j] : 0.0;
        s += da * da + db * db;
    }
    return std::sqrt(s);
}

double distance_mod_shift(const TrigField& x, const TrigField& target) {
    bool constant_target = true;
    for (std::size_t j = 1; j < target.a.size(); ++j) {
        if (target.a[j] != 0.0 || target.b[j] != 0.0) constant_target = false;
    }
    if (constant_target) return distance(x, target);

    const int n = std::max(1, 4 * x.order());
    const double step = 2.0 * std::numbers::pi / n;
    auto neg_dist = [&](double s) { return -distance(x.shifted(s), target); };
    int best_i = 0;
    double best = neg_dist(0.0);
    for (int i = 1; i < n; ++i) {
        const double v = neg_dist(i * step);
        if (v > best) {
            best = v;
            best_i = i;
        }
    }
    const double s = quad::golden_max(neg_dist, (best_i - 1) * step, (best_i + 1) * step, 1e-15);
    return std::min(-best, -neg_dist(s));
}

} // namespace dnfkpp
