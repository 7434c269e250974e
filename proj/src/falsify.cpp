#include "pulsefal/falsify.hpp"

#include <cctype>
#include <cmath>
#include <limits>

namespace pulsefal {

char param_letter(PulseParam p) { return "LPWHD"[static_cast<int>(p)]; }

std::size_t FreeMask::size() const {
    std::size_t n = 0;
    for (bool b : params) n += b ? 1 : 0;
    return n;
}

std::string FreeMask::label() const {
    std::string out;
    for (auto p : kAllPulseParams) {
        if (!has(p)) continue;
        if (!out.empty()) out += '-';
        out += param_letter(p);
    }
    if (include_static_params) out += out.empty() ? "S" : "+S";
    return out;
}

FreeMask FreeMask::parse(const std::string& text) {
    FreeMask m;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(text[i])));
        if (c == '-' || c == ',' || c == ' ' || c == '+') continue;
        switch (c) {
            case 'L': m.set(PulseParam::Low); break;
            case 'P': m.set(PulseParam::Period); break;
            case 'W': m.set(PulseParam::Width); break;
            case 'H': m.set(PulseParam::High); break;
            case 'D': m.set(PulseParam::Delay); break;
            case 'S': m.include_static_params = true; break;
            default: throw std::invalid_argument("unknown mask letter '" + std::string(1, text[i]) + "' in '" + text + "'");
        }
    }
    return m;
}

FreeMask FreeMask::of(std::initializer_list<PulseParam> ps) {
    FreeMask m;
    for (auto p : ps) m.set(p);
    return m;
}

PulseParams fixed_pulse_defaults() { return PulseParams{0.0, 0.5, 0.5, 1.0, 0.0}; }

ParamSpace build_param_space(const Benchmark& benchmark, const FreeMask& mask) {
    if (mask.empty() && !(mask.include_static_params && !benchmark.static_params.empty()))
        throw std::invalid_argument("free-parameter mask is empty");
    ParamSpace space;
    space.benchmark = &benchmark;
    space.mask = mask;
    space.fixed_defaults = fixed_pulse_defaults();
    const double period_max = mask.has(PulseParam::Delay) ? 1.0 : 2.0;
    for (std::size_t ch = 0; ch < benchmark.inputs.size(); ++ch) {
        for (auto p : kAllPulseParams) {
            if (!mask.has(p)) continue;
            Coordinate c;
            c.kind = Coordinate::Kind::Pulse;
            c.channel = ch;
            c.param = p;
            c.native = {0.0, p == PulseParam::Period ? period_max : 1.0};
            space.coordinates.push_back(c);
        }
    }
    if (mask.include_static_params) {
        for (std::size_t i = 0; i < benchmark.static_params.size(); ++i) {
            Coordinate c;
            c.kind = Coordinate::Kind::Static;
            c.channel = i;
            c.native = benchmark.static_params[i].range;
            space.coordinates.push_back(c);
        }
    }
    return space;
}

DecodedPoint decode(std::span<const double> point, const ParamSpace& space) {
    if (point.size() != space.dimension())
        throw std::invalid_argument("point has " + std::to_string(point.size()) + " coordinates, space has " +
                                    std::to_string(space.dimension()));
    const Benchmark& b = *space.benchmark;
    DecodedPoint out;
    out.channels.assign(b.inputs.size(), space.fixed_defaults);
    out.static_values = b.default_static_values();
    for (std::size_t i = 0; i < point.size(); ++i) {
        const double x = point[i];
        if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("point lies outside the unit cube");
        const Coordinate& c = space.coordinates[i];
        const double v = c.native.lower + x * (c.native.upper - c.native.lower);
        if (c.kind == Coordinate::Kind::Static) {
            out.static_values[b.static_params[c.channel].name] = v;
            continue;
        }
        PulseParams& pp = out.channels[c.channel];
        switch (c.param) {
            case PulseParam::Low: pp.low_n = v; break;
            case PulseParam::Period: pp.period_n = v; break;
            case PulseParam::Width: pp.width_n = v; break;
            case PulseParam::High: pp.high_n = v; break;
            case PulseParam::Delay: pp.delay_n = v; break;
        }
    }
    return out;
}

Signal synthesize_inputs(const Benchmark& benchmark, const DecodedPoint& decoded) {
    const std::size_t steps = benchmark.steps();
    Signal s = Signal::on_grid(benchmark.dt, steps);
    for (std::size_t ch = 0; ch < benchmark.inputs.size(); ++ch) {
        const auto& in = benchmark.inputs[ch];
        const PhysicalPulse pulse = denormalize(decoded.channels.at(ch), in.range, benchmark.horizon);
        s.add_channel(in.name, pulse_values(pulse, benchmark.dt, steps));
    }
    return s;
}

double evaluate_point(const Benchmark& benchmark, const stl::Formula& spec, const DecodedPoint& decoded,
                      stl::Semantics semantics) {
    try {
        const Signal trace = simulate(benchmark, synthesize_inputs(benchmark, decoded), decoded.static_values);
        const double rho = stl::robustness(spec, trace, 0.0, semantics);
        return std::isfinite(rho) ? rho : std::numeric_limits<double>::infinity();
    } catch (const SimulationFailure&) {
        return std::numeric_limits<double>::infinity();
    }
}

FalsificationOutcome falsify(const Benchmark& benchmark, const std::string& spec_name, const FreeMask& mask,
                             opt::OptimizerConfig config, stl::Semantics semantics) {
    auto it = benchmark.specs.find(spec_name);
    if (it == benchmark.specs.end()) throw std::invalid_argument("unknown spec '" + spec_name + "'");
    const stl::Formula& spec = it->second;
    const ParamSpace space = build_param_space(benchmark, mask);
    const std::size_t dim = space.dimension();
    if (config.init_samples == 0) config.init_samples = 2 * dim;
    if (config.kind == opt::OptimizerKind::TurboLite && config.budget < config.init_samples)
        throw std::invalid_argument("budget must be at least the initial sample count (2 * dimension)");

    auto objective = [&](std::span<const double> p) {
        return evaluate_point(benchmark, spec, decode(p, space), semantics);
    };

    FalsificationOutcome out;
    out.optimization = opt::minimize(objective, dim, config);
    const auto& res = out.optimization;
    out.simulations_used = res.evaluations_used;
    out.best_robustness = res.best.value;
    out.falsified = res.best.value < 0.0;
    out.best_point = decode(res.best.point, space);
    out.history.reserve(res.history.size());
    for (const auto& rec : res.history) out.history.push_back(rec.value);
    if (out.falsified) out.witness = synthesize_inputs(benchmark, out.best_point);
    return out;
}

}  // namespace pulsefal
