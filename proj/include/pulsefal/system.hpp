#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "pulsefal/signal.hpp"
#include "pulsefal/stl.hpp"

namespace pulsefal {

class BenchmarkError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A simulation that produced non-finite state. Callers score it instead of aborting.
class SimulationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ModelKind { FirstOrderLag, ChasingCars, DeltaSigma, SwitchedSystem };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& text);

struct ModelSpec {
    ModelKind kind = ModelKind::FirstOrderLag;
    /// Fully populated: defaults for the kind overlaid with configured values.
    std::map<std::string, double> params;
};

/// Default constants for each model kind; also the set of accepted parameter names.
std::map<std::string, double> default_model_params(ModelKind kind);

/// Number of input channels each model kind consumes (in declaration order).
std::size_t model_input_count(ModelKind kind);

/// Output channel names each model kind produces.
std::vector<std::string> model_output_names(ModelKind kind);

struct InputChannel {
    std::string name;
    InputRange range;
};

/// Non-signal search variable; overrides the model parameter of the same name.
struct StaticParam {
    std::string name;
    InputRange range;
    double default_value = 0.0;
};

struct Benchmark {
    std::string name;
    std::vector<InputChannel> inputs;
    double horizon = 0.0;
    double dt = 0.0;
    ModelSpec model;
    std::map<std::string, std::string> spec_text;
    std::map<std::string, stl::Formula> specs;
    std::vector<StaticParam> static_params;

    std::size_t steps() const { return grid_steps(horizon, dt); }
    std::map<std::string, double> default_static_values() const;

    /// Checks every structural invariant; load_benchmark calls this.
    void validate() const;
};

Benchmark load_benchmark(const std::string& json_text);
Benchmark load_benchmark_file(const std::string& path);

/// Output trace on the input grid. The returned signal carries the input
/// channels followed by the model outputs. Throws BenchmarkError on missing
/// channels or out-of-range static values and SimulationFailure on non-finite state.
Signal simulate(const Benchmark& benchmark, const Signal& inputs,
                const std::map<std::string, double>& static_values = {});

/// Classical fourth-order Runge-Kutta step with the input held over the step.
/// `derivative(state, input)` returns d(state)/dt.
template <class Derivative>
std::vector<double> rk4_step(Derivative&& derivative, const std::vector<double>& state,
                             const std::vector<double>& input, double dt) {
    const std::size_t n = state.size();
    auto shifted = [&](const std::vector<double>& k, double h) {
        std::vector<double> s(n);
        for (std::size_t i = 0; i < n; ++i) s[i] = state[i] + h * k[i];
        return s;
    };
    const std::vector<double> k1 = derivative(state, input);
    const std::vector<double> k2 = derivative(shifted(k1, dt / 2), input);
    const std::vector<double> k3 = derivative(shifted(k2, dt / 2), input);
    const std::vector<double> k4 = derivative(shifted(k3, dt), input);
    std::vector<double> next(n);
    for (std::size_t i = 0; i < n; ++i) {
        next[i] = state[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (!std::isfinite(next[i])) throw SimulationFailure("non-finite state after RK4 step");
    }
    return next;
}

}  // namespace pulsefal
