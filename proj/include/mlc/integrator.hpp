#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mlc/dynamics.hpp"

namespace mlc {

enum class Scheme {
    rk4_deterministic,
    rk4_noise, // RK4 drift plus additive Euler-Maruyama increment on x2
};

std::string_view to_string(Scheme scheme) noexcept;
Scheme parse_scheme(std::string_view name);

struct IntegratorConfig {
    double dt = 0.01;
    Scheme scheme = Scheme::rk4_noise;
    double divergence_bound = 1e3;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Thrown when |x1| or |x2| leaves the divergence bound (or goes non-finite).
class Diverged : public std::runtime_error {
public:
    explicit Diverged(double time);
    double time() const noexcept { return time_; }

private:
    double time_;
};

/// Seeded standard-normal source; one instance per trajectory.
class NoiseSource {
public:
    explicit NoiseSource(std::uint64_t seed) : engine_(seed) {}
    double gaussian() { return normal_(engine_); }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

struct Sample {
    double t;
    double x1;
    double x2;
    double i_level;
    double f_det; // E + I + f sin(z), noise excluded
};

struct Trajectory {
    std::vector<Sample> samples;
    std::size_t stride = 1;
};

/// Deterministic part of the drive at phase z.
inline double deterministic_drive(const CircuitParams& p, double i_now, double z) noexcept {
    return p.bias + i_now + p.f * std::sin(z);
}

/// One RK4 step of `drift(state, F)` with the drive held at `i_now` across
/// stages, followed by `noise_amplitude * g` added to x2 when the amplitude
/// is nonzero. Exposed as a template so tests can swap the drift.
template <class Drift>
SystemState advance(const SystemState& s, const CircuitParams& p, double i_now, double dt,
                    double noise_amplitude, NoiseSource& noise, Drift&& drift) {
    const double half = 0.5 * dt;
    const auto at = [&](double x1, double x2, double z) {
        SystemState stage{x1, x2, z, s.t};
        return drift(stage, deterministic_drive(p, i_now, z));
    };
    const Derivative k1 = at(s.x1, s.x2, s.z);
    const Derivative k2 = at(s.x1 + half * k1.dx1, s.x2 + half * k1.dx2, s.z + half * k1.dz);
    const Derivative k3 = at(s.x1 + half * k2.dx1, s.x2 + half * k2.dx2, s.z + half * k2.dz);
    const Derivative k4 = at(s.x1 + dt * k3.dx1, s.x2 + dt * k3.dx2, s.z + dt * k3.dz);

    SystemState next;
    next.x1 = s.x1 + dt / 6.0 * (k1.dx1 + 2.0 * k2.dx1 + 2.0 * k3.dx1 + k4.dx1);
    next.x2 = s.x2 + dt / 6.0 * (k1.dx2 + 2.0 * k2.dx2 + 2.0 * k3.dx2 + k4.dx2);
    next.z = s.z + dt / 6.0 * (k1.dz + 2.0 * k2.dz + 2.0 * k3.dz + k4.dz);
    next.t = s.t + dt;
    if (noise_amplitude != 0.0) {
        next.x2 += noise_amplitude * noise.gaussian();
    }
    return next;
}

/// Amplitude sqrt(D dt) of the per-step noise increment (0 for the
/// deterministic scheme).
double noise_amplitude(const CircuitParams& params, const IntegratorConfig& config) noexcept;

/// Single step of the SC-CNN system. Throws Diverged.
SystemState step(const SystemState& state, const CircuitParams& params, const SCCNNWeights& weights,
                 double i_now, const IntegratorConfig& config, NoiseSource& noise);

using DriveProgram = std::function<double(double)>;

/// Integrates from `initial` to `t_end`, sampling I from `drive` at the start
/// of every step and recording every `stride`-th state (plus the initial one).
/// The final state is always recorded. Throws Diverged.
Trajectory integrate(const SystemState& initial, const CircuitParams& params, const DriveProgram& drive,
                     double t_end, const IntegratorConfig& config, std::size_t stride = 1);

/// CSV with header `t,x1,x2,I,F_det`, 17 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

} // namespace mlc
