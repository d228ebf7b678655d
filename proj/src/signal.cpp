#include "mlc/signal.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace mlc {

namespace {

// Times within this fraction of a bit of an edge belong to the later bit,
// so t = transient + k * bit_duration computed in floating point always
// lands on bit k.
constexpr double kEdgeTolerance = 1e-9;

bool whole_multiple(double value, double dt) {
    const double ratio = value / dt;
    return std::abs(ratio - std::round(ratio)) <= 1e-6 * std::max(1.0, ratio);
}

} // namespace

std::string_view to_string(Combiner combiner) noexcept {
    switch (combiner) {
    case Combiner::sum2:
        return "sum2";
    case Combiner::diff2:
        return "diff2";
    case Combiner::sum3:
        return "sum3";
    }
    return "sum2";
}

Combiner parse_combiner(std::string_view name) {
    if (name == "sum2") {
        return Combiner::sum2;
    }
    if (name == "diff2") {
        return Combiner::diff2;
    }
    if (name == "sum3") {
        return Combiner::sum3;
    }
    throw std::invalid_argument("unknown combiner '" + std::string(name) + "'");
}

std::size_t arity(Combiner combiner) noexcept {
    return combiner == Combiner::sum3 ? 3 : 2;
}

ArityMismatch::ArityMismatch(std::size_t expected, std::size_t got)
    : std::invalid_argument("combiner expects " + std::to_string(expected) + " channels, got " +
                            std::to_string(got)) {}

std::vector<std::uint8_t> LogicProgram::bits_at(std::size_t k) const {
    std::vector<std::uint8_t> out;
    out.reserve(channels.size());
    for (const auto& ch : channels) {
        out.push_back(ch.at(k));
    }
    return out;
}

double LogicProgram::level_at(std::size_t k) const {
    double levels[3];
    const std::size_t n = std::min<std::size_t>(channels.size(), 3);
    for (std::size_t c = 0; c < n; ++c) {
        levels[c] = encode_channel(channels[c][k], delta);
    }
    return combine(std::span<const double>(levels, n), combiner);
}

bool LogicProgram::has_forbidden_pair() const noexcept {
    if (combiner != Combiner::diff2 || channels.size() != 2) {
        return false;
    }
    for (std::size_t k = 0; k < n_bits(); ++k) {
        if (channels[0][k] == 1 && channels[1][k] == 1) {
            return true;
        }
    }
    return false;
}

void LogicProgram::validate(double dt) const {
    if (channels.size() != arity(combiner)) {
        throw ArityMismatch(arity(combiner), channels.size());
    }
    for (const auto& ch : channels) {
        if (ch.size() != n_bits()) {
            throw std::invalid_argument("all channels must have the same length");
        }
        for (std::uint8_t bit : ch) {
            if (bit > 1) {
                throw std::invalid_argument("bits must be 0 or 1");
            }
        }
    }
    if (!(bit_duration > 0.0) || !(delta > 0.0) || !(transient >= 0.0)) {
        throw std::invalid_argument("bit_duration and delta must be > 0, transient >= 0");
    }
    if (dt > 0.0 && (!whole_multiple(bit_duration, dt) || !whole_multiple(transient, dt))) {
        throw std::invalid_argument("bit_duration and transient must be whole multiples of dt");
    }
}

double encode_channel(std::uint8_t bit, double delta) {
    if (bit > 1) {
        throw std::invalid_argument("bit must be 0 or 1");
    }
    return bit == 1 ? delta : -delta;
}

double combine(std::span<const double> levels, Combiner combiner) {
    if (levels.size() != arity(combiner)) {
        throw ArityMismatch(arity(combiner), levels.size());
    }
    switch (combiner) {
    case Combiner::sum2:
        return levels[0] + levels[1];
    case Combiner::diff2:
        return levels[0] - levels[1];
    case Combiner::sum3:
        return levels[0] + levels[1] + levels[2];
    }
    return 0.0;
}

std::ptrdiff_t bit_index_at(const LogicProgram& program, double t) noexcept {
    const double position = (t - program.transient) / program.bit_duration + kEdgeTolerance;
    if (position < 0.0) {
        return -1;
    }
    return static_cast<std::ptrdiff_t>(std::floor(position));
}

double sample_I(const LogicProgram& program, double t) {
    const std::size_t n = program.n_bits();
    const std::ptrdiff_t k = bit_index_at(program, t);
    if (n == 0 || k < 0) {
        return 0.0;
    }
    const std::size_t idx = std::min(static_cast<std::size_t>(k), n - 1);
    return program.level_at(idx);
}

LogicProgram random_program(std::size_t n_bits, std::size_t channels, Combiner combiner, std::uint64_t seed,
                            const ProgramTiming& timing, bool latch_mode) {
    if (n_bits < 1) {
        throw std::invalid_argument("a random program needs at least one bit");
    }
    if (channels != arity(combiner)) {
        throw ArityMismatch(arity(combiner), channels);
    }
    LogicProgram program;
    program.combiner = combiner;
    program.bit_duration = timing.bit_duration;
    program.delta = timing.delta;
    program.transient = timing.transient;
    program.channels.assign(channels, std::vector<std::uint8_t>(n_bits, 0));

    std::mt19937_64 engine(seed);
    const auto draw = [&engine] { return static_cast<std::uint8_t>(engine() >> 63); };
    const bool reject_forbidden = latch_mode && combiner == Combiner::diff2;
    for (std::size_t k = 0; k < n_bits; ++k) {
        do {
            for (auto& ch : program.channels) {
                ch[k] = draw();
            }
        } while (reject_forbidden && program.channels[0][k] == 1 && program.channels[1][k] == 1);
    }
    return program;
}

LogicProgram program_from_flat_bits(std::span<const std::uint8_t> flat, Combiner combiner,
                                    const ProgramTiming& timing) {
    const std::size_t width = arity(combiner);
    if (flat.size() % width != 0) {
        throw std::invalid_argument("bit list length " + std::to_string(flat.size()) +
                                    " is not a multiple of the channel count " + std::to_string(width));
    }
    LogicProgram program;
    program.combiner = combiner;
    program.bit_duration = timing.bit_duration;
    program.delta = timing.delta;
    program.transient = timing.transient;
    program.channels.assign(width, {});
    for (std::size_t i = 0; i < flat.size(); ++i) {
        if (flat[i] > 1) {
            throw std::invalid_argument("bits must be 0 or 1");
        }
        program.channels[i % width].push_back(flat[i]);
    }
    return program;
}

void write_program_csv(std::ostream& out, const LogicProgram& program) {
    out << "bit_index";
    for (std::size_t c = 0; c < program.n_channels(); ++c) {
        out << ",ch" << (c + 1);
    }
    out << '\n';
    for (std::size_t k = 0; k < program.n_bits(); ++k) {
        out << k;
        for (const auto& ch : program.channels) {
            out << ',' << static_cast<int>(ch[k]);
        }
        out << '\n';
    }
}

LogicProgram read_program_csv(std::istream& in, Combiner combiner, const ProgramTiming& timing) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("program CSV is empty");
    }
    const std::size_t width = arity(combiner);
    const auto header_columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
    if (line.rfind("bit_index", 0) != 0 || header_columns != width + 1) {
        throw ArityMismatch(width, header_columns - 1);
    }
    std::vector<std::uint8_t> flat;
    std::size_t expected_index = 0;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        std::string cell;
        std::getline(row, cell, ',');
        if (std::stoul(cell) != expected_index) {
            throw std::invalid_argument("program CSV bit_index out of order at row " + std::to_string(expected_index));
        }
        std::size_t cols = 0;
        while (std::getline(row, cell, ',')) {
            const unsigned long bit = std::stoul(cell);
            if (bit > 1) {
                throw std::invalid_argument("bits must be 0 or 1");
            }
            flat.push_back(static_cast<std::uint8_t>(bit));
            ++cols;
        }
        if (cols != width) {
            throw ArityMismatch(width, cols);
        }
        ++expected_index;
    }
    return program_from_flat_bits(flat, combiner, timing);
}

} // namespace mlc
