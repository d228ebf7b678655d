#include "mlc/decode.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace mlc {

std::string_view to_string(GateKind kind) noexcept {
    switch (kind) {
    case GateKind::OR:
        return "or";
    case GateKind::AND:
        return "and";
    case GateKind::NOR:
        return "nor";
    case GateKind::NAND:
        return "nand";
    case GateKind::XOR:
        return "xor";
    case GateKind::XNOR:
        return "xnor";
    case GateKind::OR3:
        return "or3";
    case GateKind::AND3:
        return "and3";
    case GateKind::SR_HIGH:
        return "sr-high";
    case GateKind::SR_LOW:
        return "sr-low";
    }
    return "or";
}

GateKind parse_gate(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    std::replace(lower.begin(), lower.end(), '_', '-');
    if (lower == "sr") {
        return GateKind::SR_LOW;
    }
    constexpr GateKind all[] = {GateKind::OR,  GateKind::AND,  GateKind::NOR, GateKind::NAND,    GateKind::XOR,
                                GateKind::XNOR, GateKind::OR3, GateKind::AND3, GateKind::SR_HIGH, GateKind::SR_LOW};
    for (GateKind kind : all) {
        if (lower == to_string(kind)) {
            return kind;
        }
    }
    throw std::invalid_argument("unknown gate '" + std::string(name) + "'");
}

bool is_latch(GateKind kind) noexcept {
    return kind == GateKind::SR_HIGH || kind == GateKind::SR_LOW;
}

GateKind complement(GateKind kind) noexcept {
    switch (kind) {
    case GateKind::OR:
        return GateKind::NOR;
    case GateKind::NOR:
        return GateKind::OR;
    case GateKind::AND:
        return GateKind::NAND;
    case GateKind::NAND:
        return GateKind::AND;
    case GateKind::XOR:
        return GateKind::XNOR;
    case GateKind::XNOR:
        return GateKind::XOR;
    case GateKind::SR_HIGH:
        return GateKind::SR_LOW;
    case GateKind::SR_LOW:
        return GateKind::SR_HIGH;
    case GateKind::OR3:
    case GateKind::AND3:
        return kind;
    }
    return kind;
}

Combiner combiner_for(GateKind kind) noexcept {
    switch (kind) {
    case GateKind::OR3:
    case GateKind::AND3:
        return Combiner::sum3;
    case GateKind::SR_HIGH:
    case GateKind::SR_LOW:
        return Combiner::diff2;
    default:
        return Combiner::sum2;
    }
}

std::string_view to_string(DecodeVar var) noexcept {
    return var == DecodeVar::x1 ? "x1" : "x2";
}

std::string_view to_string(DecodeRule::Kind kind) noexcept {
    switch (kind) {
    case DecodeRule::Kind::sign_pos:
        return "sign_pos";
    case DecodeRule::Kind::sign_neg:
        return "sign_neg";
    case DecodeRule::Kind::band:
        return "band";
    case DecodeRule::Kind::band_complement:
        return "band_complement";
    }
    return "sign_pos";
}

void DecodeRule::validate() const {
    if ((kind == Kind::band || kind == Kind::band_complement) && !(lo < hi)) {
        throw std::invalid_argument("band decode rule requires lo < hi");
    }
}

GateSpec canonical_gate(GateKind kind, double xnor_half_width) {
    GateSpec g;
    g.kind = kind;
    g.combiner = combiner_for(kind);
    g.operating_f = 0.1;
    switch (kind) {
    case GateKind::OR:
        g.decode_var = DecodeVar::x1;
        g.rule = DecodeRule::sign_pos();
        g.operating_bias = 0.01;
        break;
    case GateKind::NOR:
        g.decode_var = DecodeVar::x2;
        g.rule = DecodeRule::sign_pos();
        g.operating_bias = 0.01;
        break;
    case GateKind::AND:
        g.decode_var = DecodeVar::x1;
        g.rule = DecodeRule::sign_pos();
        g.operating_bias = -0.01;
        break;
    case GateKind::NAND:
        g.decode_var = DecodeVar::x2;
        g.rule = DecodeRule::sign_pos();
        g.operating_bias = -0.01;
        break;
    case GateKind::XOR:
        g.decode_var = DecodeVar::x1;
        g.rule = DecodeRule::band(-kXorBandHalfWidth, kXorBandHalfWidth);
        g.operating_bias = 0.01;
        g.operating_f = 0.16;
        break;
    case GateKind::XNOR:
        g.decode_var = DecodeVar::x2;
        g.rule = DecodeRule::band_complement(-xnor_half_width, xnor_half_width);
        g.operating_bias = 0.01;
        g.operating_f = 0.16;
        break;
    case GateKind::OR3:
        g.decode_var = DecodeVar::x1;
        g.rule = DecodeRule::sign_pos();
        g.operating_bias = 0.25;
        break;
    case GateKind::AND3:
        g.decode_var = DecodeVar::x1;
        g.rule = DecodeRule::sign_pos();
        g.operating_bias = -0.25;
        break;
    case GateKind::SR_HIGH:
        g.decode_var = DecodeVar::x2;
        g.rule = DecodeRule::sign_pos();
        g.operating_bias = 0.0;
        break;
    case GateKind::SR_LOW:
        g.decode_var = DecodeVar::x1;
        g.rule = DecodeRule::sign_pos();
        g.operating_bias = 0.0;
        break;
    }
    return g;
}

bool oracle(GateKind kind, std::span<const std::uint8_t> bits, bool prev_q) {
    const std::size_t width = arity(combiner_for(kind));
    if (bits.size() != width) {
        throw ArityMismatch(width, bits.size());
    }
    const auto ones = static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
    switch (kind) {
    case GateKind::OR:
    case GateKind::OR3:
        return ones > 0;
    case GateKind::AND:
    case GateKind::AND3:
        return ones == width;
    case GateKind::NOR:
        return ones == 0;
    case GateKind::NAND:
        return ones != width;
    case GateKind::XOR:
        return ones == 1;
    case GateKind::XNOR:
        return ones != 1;
    case GateKind::SR_HIGH:
    case GateKind::SR_LOW: {
        const bool set = bits[0] == 1;
        const bool reset = bits[1] == 1;
        if (set && reset) {
            throw ForbiddenInput();
        }
        if (!set && !reset) {
            return prev_q;
        }
        return kind == GateKind::SR_LOW ? set : reset;
    }
    }
    return false;
}

void DecodeSettings::validate() const {
    if (!(settle_fraction >= 0.0 && settle_fraction < 1.0)) {
        throw std::invalid_argument("settle_fraction must lie in [0, 1)");
    }
    if (!(agreement_threshold > 0.5 && agreement_threshold <= 1.0)) {
        throw std::invalid_argument("agreement_threshold must lie in (0.5, 1]");
    }
}

BitDecode decode_bit(std::span<const double> segment, const DecodeRule& rule, double settle_fraction,
                     double agreement_threshold) {
    DecodeSettings{settle_fraction, agreement_threshold}.validate();
    rule.validate();
    const auto skip = static_cast<std::size_t>(std::floor(settle_fraction * static_cast<double>(segment.size())));
    if (skip >= segment.size()) {
        throw EmptySegment();
    }
    const auto kept = segment.subspan(skip);
    const auto hits = std::count_if(kept.begin(), kept.end(), [&](double v) { return rule.holds(v); });

    BitDecode out;
    out.residence = static_cast<double>(hits) / static_cast<double>(kept.size());
    if (out.residence >= agreement_threshold) {
        out.value = true;
    } else if (1.0 - out.residence >= agreement_threshold) {
        out.value = false;
    }
    return out;
}

std::vector<double> segment_values(const Trajectory& trajectory, DecodeVar var, double start, double end) {
    const auto& samples = trajectory.samples;
    // Same edge tolerance as bit_index_at.
    const double slack = 1e-9 * (end - start);
    const auto by_time = [](const Sample& s, double t) { return s.t < t; };
    const auto first = std::lower_bound(samples.begin(), samples.end(), start - slack, by_time);
    const auto last = std::lower_bound(first, samples.end(), end - slack, by_time);
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(last - first));
    for (auto it = first; it != last; ++it) {
        values.push_back(var == DecodeVar::x1 ? it->x1 : it->x2);
    }
    return values;
}

TrialOutcome score_trial(const Trajectory& trajectory, const LogicProgram& program, const GateSpec& gate,
                         const DecodeSettings& settings) {
    settings.validate();
    if (program.combiner != gate.combiner) {
        throw std::invalid_argument("program combiner " + std::string(to_string(program.combiner)) +
                                    " does not match gate " + std::string(to_string(gate.kind)));
    }
    if (is_latch(gate.kind) && program.has_forbidden_pair()) {
        throw ForbiddenInput();
    }

    TrialOutcome outcome;
    outcome.kind = gate.kind;
    outcome.bits.reserve(program.n_bits());

    std::vector<BitDecode> decoded;
    decoded.reserve(program.n_bits());
    for (std::size_t k = 0; k < program.n_bits(); ++k) {
        const double start = program.bit_start(k);
        const auto values = segment_values(trajectory, gate.decode_var, start, start + program.bit_duration);
        decoded.push_back(decode_bit(values, gate.rule, settings.settle_fraction, settings.agreement_threshold));
    }

    bool prev_q = !decoded.empty() && decoded.front().value.value_or(false);
    outcome.success = true;
    for (std::size_t k = 0; k < program.n_bits(); ++k) {
        BitRecord rec;
        rec.inputs = program.bits_at(k);
        rec.expected = oracle(gate.kind, rec.inputs, prev_q);
        rec.decoded = decoded[k].value;
        rec.residence = decoded[k].residence;
        rec.match = rec.decoded.has_value() && *rec.decoded == rec.expected;
        outcome.success = outcome.success && rec.match;
        prev_q = rec.expected;
        outcome.bits.push_back(std::move(rec));
    }
    return outcome;
}

nlohmann::json to_json(const TrialOutcome& outcome) {
    nlohmann::json bits = nlohmann::json::array();
    for (const BitRecord& rec : outcome.bits) {
        nlohmann::json inputs = nlohmann::json::array();
        for (std::uint8_t b : rec.inputs) {
            inputs.push_back(static_cast<int>(b));
        }
        bits.push_back({
            {"inputs", inputs},
            {"expected", rec.expected ? 1 : 0},
            {"decoded", rec.decoded ? nlohmann::json(*rec.decoded ? 1 : 0) : nlohmann::json("indeterminate")},
            {"residence", rec.residence},
            {"match", rec.match},
        });
    }
    return {
        {"gate", std::string(to_string(outcome.kind))},
        {"success", outcome.success},
        {"bits", bits},
    };
}

} // namespace mlc
