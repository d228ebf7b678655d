#include "mlc/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "mlc/seeds.hpp"

namespace mlc {

GateSpec RunConfig::gate_spec() const {
    return canonical_gate(parse_gate(gate), xnor_half_width);
}

CircuitParams RunConfig::circuit_params() const {
    const GateSpec g = gate_spec();
    CircuitParams p;
    p.a = a;
    p.b = b;
    p.nu = nu;
    p.beta = beta;
    p.omega = omega;
    p.f = f.value_or(g.operating_f);
    p.bias = bias.value_or(g.operating_bias);
    p.noise_d = noise_d;
    p.delta = delta;
    return p;
}

ExperimentSettings RunConfig::experiment_settings() const {
    ExperimentSettings s;
    s.integrator.dt = dt;
    s.integrator.scheme = parse_scheme(scheme);
    s.integrator.divergence_bound = divergence_bound;
    s.integrator.seed = noise_seed();
    s.decode.settle_fraction = settle_fraction;
    s.decode.agreement_threshold = agreement_threshold;
    s.bit_duration = bit_duration;
    s.transient = transient;
    s.initial = SystemState{x1_0, x2_0, 0.0, 0.0};
    s.sample_stride = sample_stride;
    return s;
}

SweepGrid RunConfig::sweep_grid() const {
    return SweepGrid::linspace(parse_axis(axis), from, to, points, PLogicProtocol{n_sets, n_runs, n_bits});
}

std::uint64_t RunConfig::program_seed() const noexcept {
    return mlc::program_seed(seed, 0);
}

std::uint64_t RunConfig::noise_seed() const noexcept {
    return mlc::noise_seed(seed, 0, 0, 1);
}

LogicProgram RunConfig::program() const {
    const GateSpec g = gate_spec();
    const ProgramTiming timing{bit_duration, delta, transient};
    if (bits.empty()) {
        if (n_bits == 0) {
            return program_from_flat_bits({}, g.combiner, timing);
        }
        return program_for_gate(g, n_bits, program_seed(), timing);
    }
    std::vector<std::uint8_t> flat;
    flat.reserve(bits.size());
    for (int bit : bits) {
        if (bit != 0 && bit != 1) {
            throw std::invalid_argument("bits must be 0 or 1");
        }
        flat.push_back(static_cast<std::uint8_t>(bit));
    }
    return program_from_flat_bits(flat, g.combiner, timing);
}

RunConfig RunConfig::resolved() const {
    RunConfig r = *this;
    const GateSpec g = gate_spec();
    r.f = f.value_or(g.operating_f);
    r.bias = bias.value_or(g.operating_bias);
    return r;
}

void RunConfig::validate() const {
    const GateSpec g = gate_spec();
    g.rule.validate();
    circuit_params().validate();
    experiment_settings().integrator.validate();
    experiment_settings().decode.validate();
    if (sample_stride < 1) {
        throw std::invalid_argument("sample_stride must be >= 1");
    }
    if (!(xnor_half_width > 0.0)) {
        throw std::invalid_argument("xnor_half_width must be > 0");
    }
    program().validate(dt);
    parse_axis(axis);
    if (points < 1) {
        throw std::invalid_argument("points must be >= 1");
    }
    if (n_sets < 1 || n_runs < 1) {
        throw std::invalid_argument("n_sets and n_runs must be >= 1");
    }
}

nlohmann::json to_json(const RunConfig& c) {
    nlohmann::json j = {
        {"a", c.a},
        {"b", c.b},
        {"nu", c.nu},
        {"beta", c.beta},
        {"omega", c.omega},
        {"noise_d", c.noise_d},
        {"delta", c.delta},
        {"dt", c.dt},
        {"scheme", c.scheme},
        {"divergence_bound", c.divergence_bound},
        {"x1_0", c.x1_0},
        {"x2_0", c.x2_0},
        {"gate", c.gate},
        {"bits", c.bits},
        {"n_bits", c.n_bits},
        {"bit_duration", c.bit_duration},
        {"transient", c.transient},
        {"settle_fraction", c.settle_fraction},
        {"agreement_threshold", c.agreement_threshold},
        {"xnor_half_width", c.xnor_half_width},
        {"sample_stride", c.sample_stride},
        {"out", c.out},
        {"seed", c.seed},
        {"axis", c.axis},
        {"from", c.from},
        {"to", c.to},
        {"points", c.points},
        {"n_sets", c.n_sets},
        {"n_runs", c.n_runs},
    };
    j["f"] = c.f ? nlohmann::json(*c.f) : nlohmann::json(nullptr);
    j["bias"] = c.bias ? nlohmann::json(*c.bias) : nlohmann::json(nullptr);
    return j;
}

RunConfig config_from_json(const nlohmann::json& j, RunConfig c) {
    if (!j.is_object()) {
        throw std::invalid_argument("config must be a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "a") c.a = value.get<double>();
            else if (key == "b") c.b = value.get<double>();
            else if (key == "nu") c.nu = value.get<double>();
            else if (key == "beta") c.beta = value.get<double>();
            else if (key == "omega") c.omega = value.get<double>();
            else if (key == "f") c.f = value.is_null() ? std::nullopt : std::optional<double>(value.get<double>());
            else if (key == "bias") c.bias = value.is_null() ? std::nullopt : std::optional<double>(value.get<double>());
            else if (key == "noise_d") c.noise_d = value.get<double>();
            else if (key == "delta") c.delta = value.get<double>();
            else if (key == "dt") c.dt = value.get<double>();
            else if (key == "scheme") c.scheme = value.get<std::string>();
            else if (key == "divergence_bound") c.divergence_bound = value.get<double>();
            else if (key == "x1_0") c.x1_0 = value.get<double>();
            else if (key == "x2_0") c.x2_0 = value.get<double>();
            else if (key == "gate") c.gate = value.get<std::string>();
            else if (key == "bits") c.bits = value.get<std::vector<int>>();
            else if (key == "n_bits") c.n_bits = value.get<std::size_t>();
            else if (key == "bit_duration") c.bit_duration = value.get<double>();
            else if (key == "transient") c.transient = value.get<double>();
            else if (key == "settle_fraction") c.settle_fraction = value.get<double>();
            else if (key == "agreement_threshold") c.agreement_threshold = value.get<double>();
            else if (key == "xnor_half_width") c.xnor_half_width = value.get<double>();
            else if (key == "sample_stride") c.sample_stride = value.get<std::size_t>();
            else if (key == "out") c.out = value.get<std::string>();
            else if (key == "seed") c.seed = value.get<std::uint64_t>();
            else if (key == "axis") c.axis = value.get<std::string>();
            else if (key == "from") c.from = value.get<double>();
            else if (key == "to") c.to = value.get<double>();
            else if (key == "points") c.points = value.get<std::size_t>();
            else if (key == "n_sets") c.n_sets = value.get<std::size_t>();
            else if (key == "n_runs") c.n_runs = value.get<std::size_t>();
            else throw std::invalid_argument("unknown config key '" + key + "'");
        } catch (const nlohmann::json::exception& e) {
            throw std::invalid_argument("config key '" + key + "': " + e.what());
        }
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config file " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("config file " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

std::vector<int> parse_bit_list(const std::string& text) {
    std::vector<int> bits;
    std::string token;
    const auto flush = [&] {
        if (token.empty()) {
            return;
        }
        if (token != "0" && token != "1") {
            throw std::invalid_argument("bad bit '" + token + "' in bit list");
        }
        bits.push_back(token[0] - '0');
        token.clear();
    };
    for (char ch : text) {
        if (ch == ',' || std::isspace(static_cast<unsigned char>(ch))) {
            flush();
        } else {
            token.push_back(ch);
        }
    }
    flush();
    return bits;
}

} // namespace mlc
