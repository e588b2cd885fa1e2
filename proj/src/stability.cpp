#include "dnfkpp/stability.hpp"

#include "dnfkpp/errors.hpp"
#include "dnfkpp/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace dnfkpp {

namespace {

std::vector<double> to_coeffs(const TrigField& f) {
    const int n = f.order();
    std::vector<double> out(2 * n + 1);
    for (int j = 0; j <= n; ++j) out[j] = f.a[j];
    for (int j = 1; j <= n; ++j) out[n + j] = f.b[j];
    return out;
}

Eigen::VectorXcd sorted_eigenvalues(const Eigen::MatrixXd& m) {
    if (m.rows() == 0) return {};
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    if (es.info() != Eigen::Success) throw Error(ErrorKind::EigenSolve, "dense eigensolver failed");
    Eigen::VectorXcd ev = es.eigenvalues();
    std::sort(ev.data(), ev.data() + ev.size(),
              [](const std::complex<double>& a, const std::complex<double>& b) { return a.real() > b.real(); });
    return ev;
}

} // namespace

Eigen::MatrixXd assemble_L(const FourierField& field, const EpsParams& params, const KernelPair& k, Space space) {
    const int n = field.order();
    const Rates r = params.rates();
    const ModeTables t = mode_tables(r, k, field.k, n);
    const TrigField v = TrigField::from(field);
    const TrigField w = apply_multiplier(v, t.minus);
    const int dim = 2 * n + 1;
    Eigen::MatrixXd L(dim, dim);
    for (int col = 0; col < dim; ++col) {
        TrigField e = TrigField::zeros(n, field.k);
        if (col <= n) {
            e.a[col] = 1.0;
        } else {
            e.b[col - n] = 1.0;
        }
        const TrigField lin = apply_multiplier(e, t.alpha);
        const TrigField p1 = product(e, w);
        const TrigField p2 = product(v, apply_multiplier(e, t.minus));
        const std::vector<double> a = to_coeffs(lin);
        const std::vector<double> b1 = to_coeffs(p1);
        const std::vector<double> b2 = to_coeffs(p2);
        for (int row = 0; row < dim; ++row) L(row, col) = a[row] - r.kappa_minus * (b1[row] + b2[row]);
    }
    if (space == Space::Full || n < 1) return L;

    const int drop = n + 1; // sin(x)
    Eigen::MatrixXd Y(dim - 1, dim - 1);
    for (int i = 0, ri = 0; i < dim; ++i) {
        if (i == drop) continue;
        for (int j = 0, rj = 0; j < dim; ++j) {
            if (j == drop) continue;
            Y(ri, rj++) = L(i, j);
        }
        ++ri;
    }
    return Y;
}

std::pair<double, double> essential_range(const FourierField& field, const EpsParams& params, const KernelPair& k,
                                          int grid_size) {
    const Rates r = params.rates();
    const ModeTables t = mode_tables(r, k, field.k, field.order());
    const FourierField w = apply_multiplier(field, t.minus);
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i < grid_size; ++i) {
        const double x = 2.0 * std::numbers::pi * i / grid_size;
        const double v = -r.kappa_plus - r.kappa_minus * w(x);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

SpectrumReport spectrum(const FourierField& field, const EpsParams& params, const KernelPair& k) {
    const int n = field.order();
    const Eigen::MatrixXd L = assemble_L(field, params, k, Space::Full);
    const Eigen::MatrixXd even = L.topLeftCorner(n + 1, n + 1);
    const Eigen::MatrixXd odd = L.bottomRightCorner(n, n);

    SpectrumReport rep;
    const Eigen::VectorXcd ev_even = sorted_eigenvalues(even);
    const Eigen::VectorXcd ev_odd_y = sorted_eigenvalues(odd.bottomRightCorner(n - 1, n - 1));
    for (Eigen::Index i = 0; i < ev_even.size(); ++i) rep.eigenvalues.push_back(ev_even[i]);

    Eigen::EigenSolver<Eigen::MatrixXd> es(odd, true);
    if (es.info() != Eigen::Success) throw Error(ErrorKind::EigenSolve, "dense eigensolver failed on the odd block");
    const Eigen::VectorXcd ev_odd = es.eigenvalues();
    Eigen::Index best = 0;
    for (Eigen::Index i = 0; i < ev_odd.size(); ++i) {
        rep.eigenvalues.push_back(ev_odd[i]);
        if (std::abs(ev_odd[i]) < std::abs(ev_odd[best])) best = i;
    }
    std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(),
              [](const std::complex<double>& a, const std::complex<double>& b) { return a.real() > b.real(); });

    rep.translation_eigenvalue = ev_odd[best];
    const Eigen::VectorXcd vec = es.eigenvectors().col(best);
    Eigen::VectorXd dv(n);
    for (int j = 1; j <= n; ++j) dv[j - 1] = -j * field.c[j];
    const double nv = vec.norm() * dv.norm();
    rep.translation_similarity = nv > 0.0 ? std::abs(vec.dot(dv.cast<std::complex<double>>())) / nv : 0.0;

    rep.leading_in_Y = -1e300;
    if (ev_even.size() > 0) rep.leading_in_Y = ev_even[0].real();
    if (ev_odd_y.size() > 0) rep.leading_in_Y = std::max(rep.leading_in_Y, ev_odd_y[0].real());

    for (const auto& ev : rep.eigenvalues) {
        if (std::abs(ev.imag()) > 1e-8) {
            std::ostringstream msg;
            msg << "eigenvalue " << ev.real() << " + " << ev.imag() << "i has a non-negligible imaginary part";
            rep.warnings.push_back(msg.str());
        }
    }
    rep.essential_interval = essential_range(field, params, k);
    return rep;
}

} // namespace dnfkpp
