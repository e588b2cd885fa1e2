#pragma once

#include <vector>

namespace dnfkpp {

/// Even 2π-periodic deviation v(x) = c_0 + Σ_{j=1..N} c_j cos(jx) at wave
/// number k (physical period 2π/k).
struct FourierField {
    std::vector<double> c;
    double k = 1.0;

    static FourierField zeros(int n, double k);
    int order() const { return static_cast<int>(c.size()) - 1; }
    double operator()(double x) const;
    /// ℓ² norm of the coefficient vector.
    double norm() const;
    /// Zero-padded (or truncated) copy with order n.
    FourierField resized(int n) const;
};

/// General real trigonometric polynomial a_0 + Σ a_j cos(jx) + b_j sin(jx).
/// b[0] is unused and kept at zero.
struct TrigField {
    std::vector<double> a;
    std::vector<double> b;
    double k = 1.0;

    static TrigField zeros(int n, double k);
    static TrigField from(const FourierField& f);
    int order() const { return static_cast<int>(a.size()) - 1; }
    double operator()(double x) const;
    /// sqrt(a_0² + Σ a_j² + b_j²).
    double norm() const;
    /// x ↦ v(x + s).
    TrigField shifted(double s) const;
    /// The cosine part as a FourierField.
    FourierField even_part() const;
};

/// Product of two trigonometric polynomials of order N, formed exactly at
/// order 2N and truncated back to N.
TrigField product(const TrigField& x, const TrigField& y);
FourierField product(const FourierField& x, const FourierField& y);

/// Multiplies mode j (both cos and sin) by mult[j].
TrigField apply_multiplier(const TrigField& f, const std::vector<double>& mult);
FourierField apply_multiplier(const FourierField& f, const std::vector<double>& mult);

/// ℓ² distance between x and y.
double distance(const TrigField& x, const TrigField& y);

/// min over shifts s of ‖x(· + s) − target‖: a grid of 4N shifts refined by
/// golden-section search. Returns the minimizing distance.
double distance_mod_shift(const TrigField& x, const TrigField& target);

} // namespace dnfkpp
