#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mlc/decode.hpp"
#include "mlc/dynamics.hpp"
#include "mlc/experiments.hpp"
#include "mlc/signal.hpp"

namespace mlc {

/// Flat run configuration shared by every CLI subcommand. Serializes to a
/// flat JSON object; loading a written snapshot reproduces the run.
struct RunConfig {
    // circuit
    double a = -1.02;
    double b = -0.55;
    double nu = 0.015;
    double beta = 1.0;
    double omega = 1.0;
    std::optional<double> f;    // defaults to the gate's operating point
    std::optional<double> bias; // likewise
    double noise_d = 0.0;
    double delta = 0.2;

    // integrator
    double dt = 0.01;
    std::string scheme = "rk4-noise";
    double divergence_bound = 1e3;
    double x1_0 = 0.1;
    double x2_0 = 0.1;

    // logic program
    std::string gate = "or";
    std::vector<int> bits; // flat, tuple-major; empty = random program
    std::size_t n_bits = 20;
    double bit_duration = 100.0;
    double transient = 500.0;

    // decoding
    double settle_fraction = 0.5;
    double agreement_threshold = 0.9;
    double xnor_half_width = kXnorBandHalfWidth;

    // output
    std::size_t sample_stride = 10;
    std::string out = "out";
    std::uint64_t seed = 0;

    // sweep
    std::string axis = "d";
    double from = 0.0;
    double to = 1.0;
    std::size_t points = 11;
    std::size_t n_sets = 20;
    std::size_t n_runs = 5;

    GateSpec gate_spec() const;
    CircuitParams circuit_params() const; // operating point filled in from the gate when unset
    ExperimentSettings experiment_settings() const;
    SweepGrid sweep_grid() const;

    /// The program given by `bits`, or a random one drawn from the seed.
    LogicProgram program() const;
    std::uint64_t program_seed() const noexcept;
    std::uint64_t noise_seed() const noexcept;

    /// Fills unset f and bias from the gate's operating point.
    RunConfig resolved() const;

    /// Throws std::invalid_argument on any invalid field.
    void validate() const;
};

nlohmann::json to_json(const RunConfig& config);

/// Unknown keys are rejected. Missing keys keep their defaults.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path);

/// Parses "0,0,0,1" (commas and/or whitespace) into bits.
std::vector<int> parse_bit_list(const std::string& text);

} // namespace mlc
