#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pulsefal {

class SignalError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Multi-channel piecewise-constant time series on a uniform grid starting at 0.
/// Values between grid instants follow a zero-order hold.
class Signal {
public:
    Signal() = default;

    /// Validates the grid (strictly increasing, uniform, starts at 0, at least
    /// two instants) and the channel shapes.
    Signal(std::vector<double> times, std::vector<std::vector<double>> channels,
           std::vector<std::string> names);

    /// Grid {0, dt, ..., steps*dt} with no channels attached yet.
    static Signal on_grid(double dt, std::size_t steps);

    void add_channel(std::string name, std::vector<double> values);

    double dt() const noexcept { return dt_; }
    std::size_t size() const noexcept { return times_.size(); }
    double end_time() const noexcept { return times_.empty() ? 0.0 : times_.back(); }
    const std::vector<double>& times() const noexcept { return times_; }
    std::size_t channel_count() const noexcept { return channels_.size(); }
    const std::vector<std::string>& channel_names() const noexcept { return names_; }

    const std::vector<double>& channel(std::size_t i) const { return channels_.at(i); }
    const std::vector<double>& channel(const std::string& name) const;
    std::optional<std::size_t> find_channel(const std::string& name) const;

    /// Zero-order hold lookup across all channels.
    std::vector<double> sample_at(double t) const;

    bool operator==(const Signal&) const = default;

private:
    double dt_ = 0.0;
    std::vector<double> times_;
    std::vector<std::vector<double>> channels_;
    std::vector<std::string> names_;
};

/// Number of dt steps covering [0, horizon]; throws unless horizon is an
/// integer multiple of dt (up to rounding).
std::size_t grid_steps(double horizon, double dt);

struct InputRange {
    double lower = 0.0;
    double upper = 1.0;

    /// Throws SignalError unless lower < upper and both are finite.
    void validate() const;
};

/// Normalized pulse-generator parameters.
struct PulseParams {
    double low_n = 0.0;
    double period_n = 0.5;
    double width_n = 0.5;
    double high_n = 1.0;
    double delay_n = 0.0;

    bool operator==(const PulseParams&) const = default;
};

struct PhysicalPulse {
    double period = 0.0;
    double width = 0.0;
    double delay = 0.0;
    double low = 0.0;
    double high = 0.0;
    double horizon = 0.0;
};

PhysicalPulse denormalize(const PulseParams& params, const InputRange& range, double horizon);

/// Square wave sampled on {0, dt, ..., horizon}. LOW during the initial delay,
/// then each period starts with `width` seconds of HIGH followed by LOW.
/// A zero period yields constant LOW. Transitions between grid instants land on
/// the first instant at or after them.
Signal synthesize_pulse(const PulseParams& params, const InputRange& range, double horizon,
                        double dt, const std::string& channel_name = "u");

/// Raw waveform values only; used when assembling multi-channel inputs.
std::vector<double> pulse_values(const PhysicalPulse& pulse, double dt, std::size_t steps);

/// nullopt when valid, otherwise a description of the violated bound.
/// period_n must lie in [0,1] when delay is a free variable and in [0,2] otherwise;
/// the other four parameters always lie in [0,1].
std::optional<std::string> validate_period_range(const PulseParams& params, bool delay_is_free);

}  // namespace pulsefal
