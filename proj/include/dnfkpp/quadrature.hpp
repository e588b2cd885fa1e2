#pragma once

#include <functional>
#include <vector>

namespace dnfkpp::quad {

using Fn = std::function<double(double)>;

/// Composite 10-point Gauss-Legendre rule on `panels` equal panels.
double gauss_legendre(const Fn& f, double lo, double hi, int panels);

/// ∫_lo^hi |f|. Sign changes are located on a `scan_points` grid and refined by
/// bisection so every Gauss-Legendre panel sees a smooth integrand. Points in
/// `breaks` (discontinuities of f) are always used as panel boundaries.
double integrate_abs(const Fn& f, double lo, double hi, const std::vector<double>& breaks = {},
                     int scan_points = 4000, int panels_per_piece = 16);

/// Maximizes f on [lo, hi] by golden-section search; returns the argmax.
double golden_max(const Fn& f, double lo, double hi, double tol = 1e-13);

/// Least-squares slope of log|y| against log|x|.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace dnfkpp::quad
