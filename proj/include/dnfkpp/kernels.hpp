#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace dnfkpp {

/// Certifies a(x) <= C / (1 + |x|^(1+xi)) for all x.
struct TailBound {
    double C = 0.0;
    double xi = 1.0;
};

/// Centered normal density with variance `l`.
struct Gaussian {
    double l;
};

/// Equal mixture of normals N(h, q) and N(-h, q).
struct GaussianPair {
    double q;
    double h;
};

/// 1/(2l) on [-l, l].
struct Uniform {
    double l;
};

/// 1/(2q) on [-q - h_inner, -h_inner] and on [h_inner, h_inner + q].
struct UniformPair {
    double q;
    double h_inner;
};

/// Samples of a symmetric density on a uniform grid; the density is taken to
/// be the piecewise-linear interpolant inside the grid and zero outside.
struct Tabulated {
    struct Data {
        std::vector<double> x;
        std::vector<double> a;
        double dx = 0.0;
    };
    std::shared_ptr<const Data> data;
};

/// Immutable symmetric probability density. Built-in variants carry closed
/// forms for the Fourier transform and its derivatives; tabulated kernels use
/// trapezoidal quadrature on their grid.
class Kernel {
public:
    using Variant = std::variant<Gaussian, GaussianPair, Uniform, UniformPair, Tabulated>;

    /// Standard normal density (variance 1).
    Kernel();

    static Kernel gaussian(double l);
    static Kernel gaussian_pair(double q, double h);
    static Kernel uniform(double l);
    static Kernel uniform_pair(double q, double h_inner);
    /// Validates grid uniformity, symmetry, non-negativity, unit mass (1e-10)
    /// and the tail bound at every sample; throws InvalidArgument otherwise.
    static Kernel tabulated(std::vector<double> x, std::vector<double> a,
                            std::optional<TailBound> tail = std::nullopt);

    const Variant& variant() const { return variant_; }
    const TailBound& tail() const { return tail_; }
    std::string type_name() const;

    template <class T>
    const T* as() const { return std::get_if<T>(&variant_); }

private:
    Kernel(Variant v, TailBound t) : variant_(std::move(v)), tail_(t) {}

    Variant variant_;
    TailBound tail_;
};

struct KernelPair {
    Kernel plus;
    Kernel minus;
};

/// Reads a two-column CSV (x, a(x)); a header line is skipped if present.
Kernel load_tabulated_csv(const std::string& path, std::optional<TailBound> tail = std::nullopt);

/// Samples `kernel` on a symmetric uniform grid [-half_width, half_width] and
/// renormalizes the samples to unit trapezoidal mass.
Kernel tabulate(const Kernel& kernel, double half_width, double dx);

// Fourier transform  â(p) = ∫ a(x) e^{-ipx} dx  (real by symmetry) and its
// p-derivatives. Tabulated kernels throw ErrorKind::Resolution when |p|·dx >= π.
double fourier(const Kernel& kernel, double p);
double fourier_d1(const Kernel& kernel, double p);
double fourier_d2(const Kernel& kernel, double p);

/// â(p) - 1 without cancellation for small |p|.
double fourier_minus_one(const Kernel& kernel, double p);

/// Derivative of â(p) (and of ∂p â(p)) with respect to the shift parameter of
/// a pair kernel: h for gaussian_pair, h_inner for uniform_pair. Zero for the
/// single-bump kernels; InvalidArgument for tabulated ones.
double fourier_dshift(const Kernel& kernel, double p);
double fourier_dshift_dp(const Kernel& kernel, double p);

/// Upper bound on |â(p')| valid for every |p'| >= |p|; non-increasing in |p|.
double decay_envelope(const Kernel& kernel, double p);

double evaluate(const Kernel& kernel, double x);
double second_moment(const Kernel& kernel);
/// sqrt of the second moment; the spatial scale the kernel acts on.
double length_scale(const Kernel& kernel);

/// ∫ |a(x + shift) - a(x)| dx.
double l1_distance_shift(const Kernel& kernel, double shift);

/// ∫_{-inf}^{t} a(x)^2 dx.
double squared_cdf(const Kernel& kernel, double t);

/// ∫_{|x| > radius} a(x) dx.
double tail_mass(const Kernel& kernel, double radius);

/// Smallest radius (to within a few percent) whose tail mass is below `mass`.
double support_radius(const Kernel& kernel, double mass);

/// Points where the density is discontinuous (empty for smooth kernels).
std::vector<double> breakpoints(const Kernel& kernel);

struct KernelCheck {
    bool symmetric = false;
    double normalization_error = 0.0;
    double second_moment = 0.0;
    bool tail_bound_holds = false;
    bool ok() const;
};

/// Re-verifies the kernel invariants (exact for built-ins, sampled for tables).
KernelCheck check_kernel(const Kernel& kernel);

} // namespace dnfkpp
