#include "mlc/dynamics.hpp"

#include <stdexcept>
#include <string>

namespace mlc {

void CircuitParams::validate() const {
    const double all[] = {a, b, nu, beta, omega, f, bias, noise_d, delta};
    for (double v : all) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("circuit parameters must be finite");
        }
    }
    if (noise_d < 0.0) {
        throw std::invalid_argument("noise intensity D must be >= 0, got " + std::to_string(noise_d));
    }
    if (delta <= 0.0) {
        throw std::invalid_argument("logic amplitude delta must be > 0, got " + std::to_string(delta));
    }
    if (omega <= 0.0) {
        throw std::invalid_argument("drive frequency omega must be > 0, got " + std::to_string(omega));
    }
}

SCCNNWeights derive_weights(const CircuitParams& p) noexcept {
    SCCNNWeights w;
    w.a1 = p.b - p.a;
    w.s11 = 1.0 - p.b;
    w.s12 = 1.0;
    w.s21 = -p.beta;
    w.s22 = 1.0 - p.beta * (1.0 + p.nu);
    w.i1 = 0.0;
    return w;
}

} // namespace mlc
