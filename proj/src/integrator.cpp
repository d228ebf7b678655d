#include "mlc/integrator.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace mlc {

std::string_view to_string(Scheme scheme) noexcept {
    switch (scheme) {
    case Scheme::rk4_deterministic:
        return "rk4";
    case Scheme::rk4_noise:
        return "rk4-noise";
    }
    return "rk4-noise";
}

Scheme parse_scheme(std::string_view name) {
    if (name == "rk4") {
        return Scheme::rk4_deterministic;
    }
    if (name == "rk4-noise") {
        return Scheme::rk4_noise;
    }
    throw std::invalid_argument("unknown integration scheme '" + std::string(name) + "'");
}

void IntegratorConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("dt must be > 0");
    }
    if (!(divergence_bound > 1.0)) {
        throw std::invalid_argument("divergence bound must be > 1");
    }
}

Diverged::Diverged(double time)
    : std::runtime_error("trajectory diverged at t = " + std::to_string(time)), time_(time) {}

double noise_amplitude(const CircuitParams& params, const IntegratorConfig& config) noexcept {
    if (config.scheme == Scheme::rk4_deterministic || params.noise_d <= 0.0) {
        return 0.0;
    }
    return std::sqrt(params.noise_d * config.dt);
}

namespace {

bool escaped(const SystemState& s, double bound) noexcept {
    // Written so that NaN also counts as escaped.
    return !(std::abs(s.x1) <= bound) || !(std::abs(s.x2) <= bound);
}

SystemState step_with(const SystemState& state, const CircuitParams& params, const SCCNNWeights& weights,
                      double i_now, double dt, double amplitude, double bound, NoiseSource& noise) {
    const double omega = params.omega;
    SystemState next = advance(state, params, i_now, dt, amplitude, noise,
                               [&](const SystemState& s, double drive) {
                                   return drift_sccnn(s, weights, omega, drive);
                               });
    if (escaped(next, bound)) {
        throw Diverged(next.t);
    }
    return next;
}

} // namespace

SystemState step(const SystemState& state, const CircuitParams& params, const SCCNNWeights& weights,
                 double i_now, const IntegratorConfig& config, NoiseSource& noise) {
    return step_with(state, params, weights, i_now, config.dt, noise_amplitude(params, config),
                     config.divergence_bound, noise);
}

Trajectory integrate(const SystemState& initial, const CircuitParams& params, const DriveProgram& drive,
                     double t_end, const IntegratorConfig& config, std::size_t stride) {
    config.validate();
    if (stride < 1) {
        throw std::invalid_argument("sample stride must be >= 1");
    }
    if (!(t_end > initial.t)) {
        throw std::invalid_argument("t_end must exceed the initial time");
    }
    if (!initial.finite()) {
        throw std::invalid_argument("initial state must be finite");
    }

    const SCCNNWeights weights = derive_weights(params);
    const double amplitude = noise_amplitude(params, config);
    const auto n_steps = static_cast<std::size_t>(std::llround((t_end - initial.t) / config.dt));
    if (n_steps == 0) {
        throw std::invalid_argument("integration interval shorter than one step");
    }

    Trajectory traj;
    traj.stride = stride;
    traj.samples.reserve(n_steps / stride + 2);

    NoiseSource noise(config.seed);
    SystemState s = initial;
    double i_now = drive(s.t);
    traj.samples.push_back({s.t, s.x1, s.x2, i_now, deterministic_drive(params, i_now, s.z)});

    for (std::size_t k = 1; k <= n_steps; ++k) {
        s = step_with(s, params, weights, i_now, config.dt, amplitude, config.divergence_bound, noise);
        // Recompute t and z from the step index: bit edges never drift and the
        // phase carries no accumulated rounding.
        s.t = initial.t + static_cast<double>(k) * config.dt;
        s.z = initial.z + params.omega * static_cast<double>(k) * config.dt;
        i_now = drive(s.t);
        if (k % stride == 0 || k == n_steps) {
            traj.samples.push_back({s.t, s.x1, s.x2, i_now, deterministic_drive(params, i_now, s.z)});
        }
    }
    return traj;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
    const auto old_precision = out.precision(17);
    out << "t,x1,x2,I,F_det\n";
    for (const Sample& s : trajectory.samples) {
        out << s.t << ',' << s.x1 << ',' << s.x2 << ',' << s.i_level << ',' << s.f_det << '\n';
    }
    out.precision(old_precision);
}

} // namespace mlc
