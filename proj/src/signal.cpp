#include "pulsefal/signal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pulsefal {

namespace {

// Relative slack used when comparing grid instants against analytic times.
constexpr double kGridSlack = 1e-9;

bool finite(double v) { return std::isfinite(v); }

}  // namespace

Signal::Signal(std::vector<double> times, std::vector<std::vector<double>> channels,
               std::vector<std::string> names)
    : times_(std::move(times)) {
    if (times_.size() < 2) throw SignalError("signal needs at least two time instants");
    if (times_.front() != 0.0) throw SignalError("signal must start at t = 0");
    dt_ = times_[1] - times_[0];
    if (!(dt_ > 0.0) || !finite(dt_)) throw SignalError("signal time step must be positive");
    for (std::size_t k = 1; k < times_.size(); ++k) {
        const double step = times_[k] - times_[k - 1];
        if (!(step > 0.0)) throw SignalError("signal times must be strictly increasing");
        if (std::abs(step - dt_) > 1e-6 * dt_) throw SignalError("signal times must be uniform");
    }
    if (channels.size() != names.size())
        throw SignalError("channel names and channel data differ in count");
    for (std::size_t i = 0; i < channels.size(); ++i) add_channel(std::move(names[i]), std::move(channels[i]));
}

Signal Signal::on_grid(double dt, std::size_t steps) {
    if (!(dt > 0.0) || !finite(dt)) throw SignalError("dt must be positive and finite");
    if (steps == 0) throw SignalError("grid needs at least one step");
    Signal s;
    s.dt_ = dt;
    s.times_.resize(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) s.times_[k] = static_cast<double>(k) * dt;
    return s;
}

void Signal::add_channel(std::string name, std::vector<double> values) {
    if (values.size() != times_.size())
        throw SignalError("channel '" + name + "' length does not match the time grid");
    if (find_channel(name)) throw SignalError("duplicate channel name '" + name + "'");
    names_.push_back(std::move(name));
    channels_.push_back(std::move(values));
}

std::optional<std::size_t> Signal::find_channel(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names_.begin());
}

const std::vector<double>& Signal::channel(const std::string& name) const {
    auto idx = find_channel(name);
    if (!idx) throw SignalError("unknown channel '" + name + "'");
    return channels_[*idx];
}

std::vector<double> Signal::sample_at(double t) const {
    if (times_.empty()) throw SignalError("empty signal");
    if (!finite(t) || t < 0.0 || t > end_time() + kGridSlack * dt_) {
        std::ostringstream os;
        os << "time " << t << " outside [0, " << end_time() << "]";
        throw SignalError(os.str());
    }
    // Greatest grid instant <= t.
    auto it = std::upper_bound(times_.begin(), times_.end(), t + kGridSlack * dt_);
    const auto k = static_cast<std::size_t>(it - times_.begin()) - 1;
    std::vector<double> out;
    out.reserve(channels_.size());
    for (const auto& ch : channels_) out.push_back(ch[k]);
    return out;
}

std::size_t grid_steps(double horizon, double dt) {
    if (!finite(horizon) || !(horizon > 0.0)) throw SignalError("horizon must be positive and finite");
    if (!finite(dt) || !(dt > 0.0) || dt > horizon) throw SignalError("dt must lie in (0, horizon]");
    const double ratio = horizon / dt;
    const double steps = std::round(ratio);
    if (std::abs(ratio - steps) > 1e-6) throw SignalError("horizon must be a multiple of dt");
    return static_cast<std::size_t>(steps);
}

void InputRange::validate() const {
    if (!finite(lower) || !finite(upper)) throw SignalError("input range bounds must be finite");
    if (!(lower < upper)) throw SignalError("input range needs lower < upper");
}

PhysicalPulse denormalize(const PulseParams& p, const InputRange& range, double horizon) {
    for (double v : {p.low_n, p.period_n, p.width_n, p.high_n, p.delay_n})
        if (!finite(v)) throw SignalError("pulse parameters must be finite");
    if (!finite(horizon) || !(horizon > 0.0)) throw SignalError("horizon must be positive and finite");
    range.validate();
    if (auto err = validate_period_range(p, false)) throw SignalError(*err);

    PhysicalPulse out;
    out.horizon = horizon;
    out.period = p.period_n * horizon;
    out.width = p.width_n * out.period;
    out.delay = p.delay_n * horizon;
    out.low = range.lower + p.low_n * (range.upper - range.lower);
    out.high = out.low + p.high_n * (range.upper - out.low);
    // Rounding in the affine maps can land one ulp past the bound.
    out.low = std::clamp(out.low, range.lower, range.upper);
    out.high = std::clamp(out.high, out.low, range.upper);
    return out;
}

std::vector<double> pulse_values(const PhysicalPulse& pulse, double dt, std::size_t steps) {
    const double slack = kGridSlack * dt;
    std::vector<double> values(steps + 1, pulse.low);
    // A pulse that would only start on the final instant stays low throughout.
    if (pulse.delay >= static_cast<double>(steps) * dt - slack) return values;
    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        if (t < pulse.delay - slack) continue;
        if (!(pulse.period > 0.0)) continue;
        double phase = std::fmod(std::max(0.0, t - pulse.delay), pulse.period);
        if (phase > pulse.period - slack) phase = 0.0;
        if (phase < pulse.width - slack) values[k] = pulse.high;
    }
    return values;
}

Signal synthesize_pulse(const PulseParams& params, const InputRange& range, double horizon, double dt,
                        const std::string& channel_name) {
    const PhysicalPulse pulse = denormalize(params, range, horizon);
    const std::size_t steps = grid_steps(horizon, dt);
    Signal s = Signal::on_grid(dt, steps);
    s.add_channel(channel_name, pulse_values(pulse, dt, steps));
    return s;
}

std::optional<std::string> validate_period_range(const PulseParams& p, bool delay_is_free) {
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_unit(p.low_n)) return "low' must lie in [0, 1]";
    if (!in_unit(p.width_n)) return "width' must lie in [0, 1]";
    if (!in_unit(p.high_n)) return "high' must lie in [0, 1]";
    if (!in_unit(p.delay_n)) return "delay' must lie in [0, 1]";
    const double period_max = delay_is_free ? 1.0 : 2.0;
    if (!(p.period_n >= 0.0 && p.period_n <= period_max)) {
        std::ostringstream os;
        os << "period' = " << p.period_n << " outside [0, " << period_max << "]"
           << (delay_is_free ? " (delay' is free)" : "");
        return os.str();
    }
    return std::nullopt;
}

}  // namespace pulsefal
