#include "pulsefal/system.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace pulsefal {

using json = nlohmann::json;

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::FirstOrderLag: return "first_order_lag";
        case ModelKind::ChasingCars: return "chasing_cars";
        case ModelKind::DeltaSigma: return "delta_sigma";
        case ModelKind::SwitchedSystem: return "switched_system";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& text) {
    for (auto k : {ModelKind::FirstOrderLag, ModelKind::ChasingCars, ModelKind::DeltaSigma, ModelKind::SwitchedSystem})
        if (to_string(k) == text) return k;
    throw BenchmarkError("unknown model kind '" + text + "'");
}

std::map<std::string, double> default_model_params(ModelKind kind) {
    switch (kind) {
        case ModelKind::FirstOrderLag: return {{"K", 1.0}, {"tau", 1.0}, {"y0", 0.0}};
        case ModelKind::ChasingCars:
            return {{"k1", 1.0},        {"k2", 2.0},        {"d0", 10.0},  {"throttle_gain", 5.0},
                    {"brake_gain", 8.0}, {"y1_0", 40.0},     {"y2_0", 30.0}, {"y3_0", 20.0},
                    {"y4_0", 10.0},      {"y5_0", 0.0}};
        case ModelKind::DeltaSigma:
            return {{"b1", 0.044}, {"b2", 0.287}, {"b3", 0.8}, {"x1_init", 0.0}, {"x2_init", 0.0}, {"x3_init", 0.0}};
        case ModelKind::SwitchedSystem:
            // A1: stable spiral inside the band |x1| < thresh; A2: slowly growing spiral outside.
            return {{"thresh", 0.8}, {"a1_11", -0.2}, {"a1_12", 1.0}, {"a1_21", -1.0}, {"a1_22", -0.2},
                    {"a2_11", 0.05}, {"a2_12", 1.0},  {"a2_21", -1.0}, {"a2_22", 0.05}, {"b11", 1.0},
                    {"b12", 0.0},    {"b21", 0.0},    {"b22", 1.0},   {"x1_0", 0.0},   {"x2_0", 0.0}};
    }
    return {};
}

std::size_t model_input_count(ModelKind kind) {
    switch (kind) {
        case ModelKind::FirstOrderLag:
        case ModelKind::DeltaSigma: return 1;
        case ModelKind::ChasingCars:
        case ModelKind::SwitchedSystem: return 2;
    }
    return 0;
}

std::vector<std::string> model_output_names(ModelKind kind) {
    switch (kind) {
        case ModelKind::FirstOrderLag: return {"y"};
        case ModelKind::ChasingCars: return {"y1", "y2", "y3", "y4", "y5"};
        case ModelKind::DeltaSigma: return {"x1", "x2", "x3", "v"};
        case ModelKind::SwitchedSystem: return {"x1", "x2"};
    }
    return {};
}

std::map<std::string, double> Benchmark::default_static_values() const {
    std::map<std::string, double> out;
    for (const auto& p : static_params) out[p.name] = p.default_value;
    return out;
}

void Benchmark::validate() const {
    if (name.empty()) throw BenchmarkError("benchmark name must be non-empty");
    if (inputs.empty()) throw BenchmarkError("benchmark needs at least one input channel");
    try {
        grid_steps(horizon, dt);
        for (const auto& in : inputs) in.range.validate();
        for (const auto& p : static_params) p.range.validate();
    } catch (const SignalError& e) {
        throw BenchmarkError(e.what());
    }
    if (inputs.size() != model_input_count(model.kind)) {
        std::ostringstream os;
        os << to_string(model.kind) << " consumes " << model_input_count(model.kind) << " input(s), "
           << inputs.size() << " declared";
        throw BenchmarkError(os.str());
    }

    std::set<std::string> names;
    for (const auto& in : inputs)
        if (!names.insert(in.name).second) throw BenchmarkError("duplicate channel name '" + in.name + "'");
    for (const auto& out : model_output_names(model.kind))
        if (!names.insert(out).second) throw BenchmarkError("input name '" + out + "' clashes with a model output");

    const auto defaults = default_model_params(model.kind);
    for (const auto& [key, value] : model.params) {
        if (!defaults.count(key)) throw BenchmarkError("unknown parameter '" + key + "' for " + to_string(model.kind));
        if (!std::isfinite(value)) throw BenchmarkError("model parameter '" + key + "' must be finite");
    }
    std::set<std::string> static_names;
    for (const auto& p : static_params) {
        if (!static_names.insert(p.name).second) throw BenchmarkError("duplicate static parameter '" + p.name + "'");
        if (!defaults.count(p.name))
            throw BenchmarkError("static parameter '" + p.name + "' is not a parameter of " + to_string(model.kind));
        if (p.default_value < p.range.lower || p.default_value > p.range.upper)
            throw BenchmarkError("static parameter '" + p.name + "' default outside its range");
    }

    for (const auto& [spec_name, formula] : specs) {
        if (stl::horizon_of(formula) > horizon + 1e-9)
            throw BenchmarkError("spec '" + spec_name + "' looks beyond the benchmark horizon");
        for (const auto& sig : stl::signals_of(formula))
            if (!names.count(sig)) throw BenchmarkError("spec '" + spec_name + "' references unknown signal '" + sig + "'");
    }
}

namespace {

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw BenchmarkError(where + " must be an object");
    for (const auto& [key, value] : obj.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            throw BenchmarkError("unknown key '" + key + "' in " + where);
    }
}

const json& required(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw BenchmarkError("missing required key '" + std::string(key) + "' in " + where);
    return *it;
}

double number(const json& v, const std::string& what) {
    if (!v.is_number()) throw BenchmarkError(what + " must be a number");
    return v.get<double>();
}

std::string string_value(const json& v, const std::string& what) {
    if (!v.is_string()) throw BenchmarkError(what + " must be a string");
    return v.get<std::string>();
}

InputRange range_of(const json& entry, const std::string& where) {
    InputRange r{number(required(entry, "min", where), where + ".min"), number(required(entry, "max", where), where + ".max")};
    if (!(r.lower < r.upper)) throw BenchmarkError(where + ": range needs min < max");
    return r;
}

}  // namespace

Benchmark load_benchmark(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw BenchmarkError(std::string("malformed JSON: ") + e.what());
    }
    reject_unknown_keys(doc, {"name", "horizon", "dt", "inputs", "model", "specs", "static_params"}, "benchmark");

    Benchmark b;
    b.name = string_value(required(doc, "name", "benchmark"), "name");
    b.horizon = number(required(doc, "horizon", "benchmark"), "horizon");
    b.dt = number(required(doc, "dt", "benchmark"), "dt");

    const json& inputs = required(doc, "inputs", "benchmark");
    if (!inputs.is_array()) throw BenchmarkError("inputs must be an array");
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const std::string where = "inputs[" + std::to_string(i) + "]";
        reject_unknown_keys(inputs[i], {"name", "min", "max"}, where);
        b.inputs.push_back({string_value(required(inputs[i], "name", where), where + ".name"), range_of(inputs[i], where)});
    }

    const json& model = required(doc, "model", "benchmark");
    reject_unknown_keys(model, {"kind", "params"}, "model");
    b.model.kind = model_kind_from_string(string_value(required(model, "kind", "model"), "model.kind"));
    b.model.params = default_model_params(b.model.kind);
    if (auto it = model.find("params"); it != model.end()) {
        if (!it->is_object()) throw BenchmarkError("model.params must be an object");
        for (const auto& [key, value] : it->items()) {
            if (!b.model.params.count(key))
                throw BenchmarkError("unknown parameter '" + key + "' for " + to_string(b.model.kind));
            b.model.params[key] = number(value, "model.params." + key);
        }
    }

    const json& specs = required(doc, "specs", "benchmark");
    if (!specs.is_object()) throw BenchmarkError("specs must be an object");
    for (const auto& [key, value] : specs.items()) {
        const std::string txt = string_value(value, "specs." + key);
        try {
            b.specs[key] = stl::parse(txt);
        } catch (const stl::ParseError& e) {
            throw BenchmarkError("spec '" + key + "': " + e.what());
        }
        b.spec_text[key] = txt;
    }

    if (auto it = doc.find("static_params"); it != doc.end()) {
        if (!it->is_array()) throw BenchmarkError("static_params must be an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const json& e = (*it)[i];
            const std::string where = "static_params[" + std::to_string(i) + "]";
            reject_unknown_keys(e, {"name", "min", "max", "default"}, where);
            StaticParam p;
            p.name = string_value(required(e, "name", where), where + ".name");
            p.range = range_of(e, where);
            p.default_value = number(required(e, "default", where), where + ".default");
            b.static_params.push_back(p);
        }
    }

    b.validate();
    return b;
}

Benchmark load_benchmark_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BenchmarkError("cannot open benchmark file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return load_benchmark(buf.str());
}

namespace {

using State = std::vector<double>;

class Model {
public:
    Model(const std::map<std::string, double>& params) : p_(params) {}

    double operator[](const char* key) const { return p_.at(key); }

private:
    const std::map<std::string, double>& p_;
};

std::vector<std::vector<double>> run_lag(const Model& m, const std::vector<const std::vector<double>*>& u,
                                         std::size_t samples, double dt) {
    const double gain = m["K"], tau = m["tau"];
    if (!(tau > 0.0)) throw BenchmarkError("first_order_lag needs tau > 0");
    auto f = [&](const State& s, const State& in) { return State{(gain * in[0] - s[0]) / tau}; };
    std::vector<std::vector<double>> out(1, std::vector<double>(samples));
    State s{m["y0"]};
    for (std::size_t k = 0; k < samples; ++k) {
        out[0][k] = s[0];
        if (k + 1 < samples) s = rk4_step(f, s, State{(*u[0])[k]}, dt);
    }
    return out;
}

// State layout: positions y1..y5 then velocities v1..v5. Car 1 leads.
std::vector<std::vector<double>> run_chasing_cars(const Model& m, const std::vector<const std::vector<double>*>& u,
                                                  std::size_t samples, double dt) {
    const double k1 = m["k1"], k2 = m["k2"], d0 = m["d0"];
    const double throttle_gain = m["throttle_gain"], brake_gain = m["brake_gain"];
    auto f = [&](const State& s, const State& in) {
        State d(10);
        for (int i = 0; i < 5; ++i) d[i] = s[5 + i];
        const double lead_accel = throttle_gain * in[0] - brake_gain * in[1];
        d[5] = (s[5] <= 0.0 && lead_accel < 0.0) ? 0.0 : lead_accel;
        for (int i = 1; i < 5; ++i) d[5 + i] = k1 * (s[i - 1] - s[i] - d0) - k2 * s[5 + i];
        return d;
    };
    State s{m["y1_0"], m["y2_0"], m["y3_0"], m["y4_0"], m["y5_0"], 0, 0, 0, 0, 0};
    std::vector<std::vector<double>> out(5, std::vector<double>(samples));
    for (std::size_t k = 0; k < samples; ++k) {
        for (int i = 0; i < 5; ++i) out[i][k] = s[i];
        if (k + 1 < samples) {
            s = rk4_step(f, s, State{(*u[0])[k], (*u[1])[k]}, dt);
            s[5] = std::max(s[5], 0.0);
        }
    }
    return out;
}

// Third-order integrator chain with a one-bit quantizer; one map step per grid instant.
std::vector<std::vector<double>> run_delta_sigma(const Model& m, const std::vector<const std::vector<double>*>& u,
                                                 std::size_t samples) {
    const double b1 = m["b1"], b2 = m["b2"], b3 = m["b3"];
    double x1 = m["x1_init"], x2 = m["x2_init"], x3 = m["x3_init"];
    std::vector<std::vector<double>> out(4, std::vector<double>(samples));
    for (std::size_t k = 0; k < samples; ++k) {
        const double v = x3 >= 0.0 ? 1.0 : -1.0;
        out[0][k] = x1;
        out[1][k] = x2;
        out[2][k] = x3;
        out[3][k] = v;
        const double n1 = x1 + b1 * ((*u[0])[k] - v);
        const double n2 = x2 + b2 * (x1 - v);
        const double n3 = x3 + b3 * (x2 - v);
        x1 = n1;
        x2 = n2;
        x3 = n3;
        if (!std::isfinite(x1) || !std::isfinite(x2) || !std::isfinite(x3))
            throw SimulationFailure("delta_sigma state became non-finite");
    }
    return out;
}

// The active mode is chosen from |x1| at the start of each step and held for the step.
std::vector<std::vector<double>> run_switched(const Model& m, const std::vector<const std::vector<double>*>& u,
                                              std::size_t samples, double dt) {
    const double thresh = m["thresh"];
    const double a1[4] = {m["a1_11"], m["a1_12"], m["a1_21"], m["a1_22"]};
    const double a2[4] = {m["a2_11"], m["a2_12"], m["a2_21"], m["a2_22"]};
    const double bm[4] = {m["b11"], m["b12"], m["b21"], m["b22"]};
    State s{m["x1_0"], m["x2_0"]};
    std::vector<std::vector<double>> out(2, std::vector<double>(samples));
    for (std::size_t k = 0; k < samples; ++k) {
        out[0][k] = s[0];
        out[1][k] = s[1];
        if (k + 1 == samples) break;
        const double* a = std::abs(s[0]) < thresh ? a1 : a2;
        auto f = [&](const State& x, const State& in) {
            return State{a[0] * x[0] + a[1] * x[1] + bm[0] * in[0] + bm[1] * in[1],
                         a[2] * x[0] + a[3] * x[1] + bm[2] * in[0] + bm[3] * in[1]};
        };
        s = rk4_step(f, s, State{(*u[0])[k], (*u[1])[k]}, dt);
    }
    return out;
}

}  // namespace

Signal simulate(const Benchmark& benchmark, const Signal& inputs, const std::map<std::string, double>& static_values) {
    const std::size_t samples = benchmark.steps() + 1;
    if (inputs.size() != samples || std::abs(inputs.dt() - benchmark.dt) > 1e-9 * benchmark.dt)
        throw BenchmarkError("input trace is not on the benchmark grid");

    std::vector<const std::vector<double>*> u;
    for (const auto& in : benchmark.inputs) {
        auto idx = inputs.find_channel(in.name);
        if (!idx) throw BenchmarkError("input trace is missing channel '" + in.name + "'");
        u.push_back(&inputs.channel(*idx));
    }

    std::map<std::string, double> params = benchmark.model.params;
    for (const auto& [key, value] : static_values) {
        auto decl = std::find_if(benchmark.static_params.begin(), benchmark.static_params.end(),
                                 [&](const StaticParam& p) { return p.name == key; });
        if (decl == benchmark.static_params.end()) throw BenchmarkError("unknown static parameter '" + key + "'");
        if (!(value >= decl->range.lower && value <= decl->range.upper))
            throw BenchmarkError("static parameter '" + key + "' outside its declared range");
        params[key] = value;
    }
    for (const auto& p : benchmark.static_params)
        if (!static_values.count(p.name)) params[p.name] = p.default_value;

    const Model model(params);
    std::vector<std::vector<double>> outputs;
    switch (benchmark.model.kind) {
        case ModelKind::FirstOrderLag: outputs = run_lag(model, u, samples, benchmark.dt); break;
        case ModelKind::ChasingCars: outputs = run_chasing_cars(model, u, samples, benchmark.dt); break;
        case ModelKind::DeltaSigma: outputs = run_delta_sigma(model, u, samples); break;
        case ModelKind::SwitchedSystem: outputs = run_switched(model, u, samples, benchmark.dt); break;
    }

    Signal trace = inputs;
    const auto names = model_output_names(benchmark.model.kind);
    for (std::size_t i = 0; i < names.size(); ++i) trace.add_channel(names[i], std::move(outputs[i]));
    return trace;
}

}  // namespace pulsefal
