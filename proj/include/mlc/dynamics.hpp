#pragma once

// Vector fields of the periodically driven MLC circuit in
// its two-cell state-controlled CNN form, plus the classical form used as an
// independent cross-check.

#include <cmath>

namespace mlc {

/// Dimensionless circuit and drive parameters.
struct CircuitParams {
    double a = -1.02;     // inner slope of the piecewise-linear diode
    double b = -0.55;     // outer slope
    double nu = 0.015;    // damping correction
    double beta = 1.0;    // coupling
    double omega = 1.0;   // drive angular frequency
    double f = 0.1;       // drive amplitude
    double bias = 0.0;    // constant bias E
    double noise_d = 0.0; // noise intensity D
    double delta = 0.2;   // logic-input amplitude

    /// Throws std::invalid_argument if an invariant is violated.
    void validate() const;
};

/// Cell weights of the two-cell SC-CNN realization.
struct SCCNNWeights {
    double a1 = 0.0;
    double s11 = 0.0;
    double s12 = 0.0;
    double s21 = 0.0;
    double s22 = 0.0;
    double i1 = 0.0;
};

struct SystemState {
    double x1 = 0.0;
    double x2 = 0.0;
    double z = 0.0; // drive phase, unwrapped
    double t = 0.0;

    bool finite() const noexcept {
        return std::isfinite(x1) && std::isfinite(x2) && std::isfinite(z) && std::isfinite(t);
    }
};

/// Time derivative of (x1, x2, z).
struct Derivative {
    double dx1 = 0.0;
    double dx2 = 0.0;
    double dz = 0.0;
};

SCCNNWeights derive_weights(const CircuitParams& params) noexcept;

/// Three-segment piecewise-linear diode characteristic h(x).
inline double h_pwl(double x, double a, double b) noexcept {
    if (x > 1.0) {
        return b * x + (a - b);
    }
    if (x < -1.0) {
        return b * x - (a - b);
    }
    return a * x;
}

/// Standard CNN saturation 0.5 * (|x + 1| - |x - 1|).
inline double cnn_output(double x1) noexcept {
    return 0.5 * (std::abs(x1 + 1.0) - std::abs(x1 - 1.0));
}

/// SC-CNN drift. `drive` is the full scalar F entering the second cell.
inline Derivative drift_sccnn(const SystemState& s, const SCCNNWeights& w, double omega,
                              double drive) noexcept {
    return {
        -s.x1 + w.a1 * cnn_output(s.x1) + w.s11 * s.x1 + w.s12 * s.x2 + w.i1,
        -s.x2 + w.s21 * s.x1 + w.s22 * s.x2 + drive,
        omega,
    };
}

/// Classical MLC drift: x' = y - h(x), y' = -beta(1+nu) y - beta x + F.
inline Derivative drift_mlc(const SystemState& s, const CircuitParams& p, double drive) noexcept {
    return {
        s.x2 - h_pwl(s.x1, p.a, p.b),
        -p.beta * (1.0 + p.nu) * s.x2 - p.beta * s.x1 + drive,
        p.omega,
    };
}

} // namespace mlc
