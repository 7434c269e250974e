#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "pulsefal/stl.hpp"

namespace pulsefal::stl {

namespace {

constexpr double kSlack = 1e-9;

double margin(const Node& n, const Signal& trace, std::size_t k) {
    const double d = n.diff.eval(trace, k);
    return (n.cmp == Comparator::Greater || n.cmp == Comparator::GreaterEq) ? d : -d;
}

// Largest grid offset (in samples) a formula looks ahead of its evaluation instant.
std::size_t lookahead(const Formula& f, double dt) {
    std::size_t child = 0;
    for (const auto& c : f->children) child = std::max(child, lookahead(c, dt));
    switch (f->op) {
        case Op::Always:
        case Op::Eventually:
        case Op::Until: return window_indices(dt, 0, f->interval).last + child;
        default: return child;
    }
}

// Sliding-window min (or max) over values[i + a .. i + b] for i in [0, count).
std::vector<double> sliding_extremum(const std::vector<double>& values, std::size_t a, std::size_t b,
                                     std::size_t count, bool take_min) {
    std::vector<double> out(count);
    std::deque<std::size_t> window;
    auto better = [take_min](double x, double y) { return take_min ? x <= y : x >= y; };
    std::size_t next = a;
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t hi = i + b;
        for (; next <= hi; ++next) {
            while (!window.empty() && better(values[next], values[window.back()])) window.pop_back();
            window.push_back(next);
        }
        while (window.front() < i + a) window.pop_front();
        out[i] = values[window.front()];
    }
    return out;
}

class Monitor {
public:
    Monitor(const Signal& trace, Semantics sem) : trace_(trace), sem_(sem), dt_(trace.dt()) {}

    // Robustness of f at every grid index in [first, last].
    std::vector<double> eval(const Formula& f, std::size_t first, std::size_t last) const {
        const std::size_t count = last - first + 1;
        switch (f->op) {
            case Op::Atom: {
                std::vector<double> out(count);
                for (std::size_t i = 0; i < count; ++i) out[i] = margin(*f, trace_, first + i);
                return out;
            }
            case Op::Not: {
                auto out = eval(f->children[0], first, last);
                for (double& v : out) v = -v;
                return out;
            }
            case Op::And:
            case Op::Or: return combine(f, first, last, f->op == Op::And);
            case Op::Implies: {
                auto lhs = eval(f->children[0], first, last);
                auto rhs = eval(f->children[1], first, last);
                for (std::size_t i = 0; i < count; ++i) lhs[i] = disj2(-lhs[i], rhs[i]);
                return lhs;
            }
            case Op::Always:
            case Op::Eventually: return temporal(f, first, last, f->op == Op::Always);
            case Op::Until: return until_op(f, first, last);
        }
        return {};
    }

private:
    double conj2(double x, double y) const {
        return sem_ == Semantics::Classic ? std::min(x, y) : additive_and({x, y});
    }
    double disj2(double x, double y) const {
        return sem_ == Semantics::Classic ? std::max(x, y) : additive_or({x, y});
    }

    std::vector<double> combine(const Formula& f, std::size_t first, std::size_t last, bool is_and) const {
        const std::size_t count = last - first + 1;
        std::vector<std::vector<double>> parts;
        parts.reserve(f->children.size());
        for (const auto& c : f->children) parts.push_back(eval(c, first, last));
        std::vector<double> out(count);
        std::vector<double> column(parts.size());
        for (std::size_t i = 0; i < count; ++i) {
            for (std::size_t j = 0; j < parts.size(); ++j) column[j] = parts[j][i];
            if (sem_ == Semantics::Classic) {
                out[i] = is_and ? *std::min_element(column.begin(), column.end())
                                : *std::max_element(column.begin(), column.end());
            } else {
                out[i] = is_and ? additive_and(column) : additive_or(column);
            }
        }
        return out;
    }

    std::vector<double> temporal(const Formula& f, std::size_t first, std::size_t last, bool is_always) const {
        const IndexWindow w = window_indices(dt_, 0, f->interval);
        const std::size_t count = last - first + 1;
        const auto child = eval(f->children[0], first + w.first, last + w.last);
        if (sem_ == Semantics::Classic) return sliding_extremum(child, 0, w.last - w.first, count, is_always);
        std::vector<double> out(count);
        std::vector<double> window;
        for (std::size_t i = 0; i < count; ++i) {
            window.assign(child.begin() + static_cast<std::ptrdiff_t>(i),
                          child.begin() + static_cast<std::ptrdiff_t>(i + w.last - w.first + 1));
            out[i] = is_always ? additive_and(window) : additive_or(window);
        }
        return out;
    }

    // max over k' in window of conj(rhs(k'), lhs(k..k')).
    std::vector<double> until_op(const Formula& f, std::size_t first, std::size_t last) const {
        const IndexWindow w = window_indices(dt_, 0, f->interval);
        const std::size_t count = last - first + 1;
        const auto lhs = eval(f->children[0], first, last + w.last);
        const auto rhs = eval(f->children[1], first, last + w.last);
        std::vector<double> out(count);
        std::vector<double> candidates;
        for (std::size_t i = 0; i < count; ++i) {
            double lhs_min = std::numeric_limits<double>::infinity();
            double lhs_negative_sum = 0.0;
            candidates.clear();
            for (std::size_t j = i; j <= i + w.last; ++j) {
                lhs_min = std::min(lhs_min, lhs[j]);
                if (lhs[j] < 0.0) lhs_negative_sum += lhs[j];
                if (j < i + w.first) continue;
                double v;
                if (sem_ == Semantics::Classic) {
                    v = std::min(rhs[j], lhs_min);
                } else {
                    // Additive conjunction over {rhs(j)} and every lhs value up to j.
                    const double lo = std::min(rhs[j], lhs_min);
                    v = lo > 0.0 ? lo : lhs_negative_sum + std::min(rhs[j], 0.0);
                }
                candidates.push_back(v);
            }
            if (sem_ == Semantics::Classic) {
                out[i] = *std::max_element(candidates.begin(), candidates.end());
            } else {
                out[i] = additive_or(candidates);
            }
        }
        return out;
    }

    const Signal& trace_;
    Semantics sem_;
    double dt_;
};

}  // namespace

double additive_and(const std::vector<double>& values) {
    double lo = std::numeric_limits<double>::infinity();
    double negative_sum = 0.0;
    for (double v : values) {
        lo = std::min(lo, v);
        if (v < 0.0) negative_sum += v;
    }
    return lo > 0.0 ? lo : negative_sum;
}

double additive_or(const std::vector<double>& values) {
    double hi = -std::numeric_limits<double>::infinity();
    double positive_sum = 0.0;
    for (double v : values) {
        hi = std::max(hi, v);
        if (v > 0.0) positive_sum += v;
    }
    return hi < 0.0 ? hi : positive_sum;
}

IndexWindow window_indices(double dt, std::size_t k0, const Interval& iv) {
    const auto first = static_cast<std::size_t>(std::ceil(iv.lo / dt - kSlack));
    const auto last_raw = static_cast<std::size_t>(std::floor(iv.hi / dt + kSlack));
    return {k0 + first, k0 + std::max(first, last_raw)};
}

double robustness(const Formula& f, const Signal& trace, double t0, Semantics semantics) {
    if (!f) throw EvalError("null formula");
    if (trace.size() < 2) throw EvalError("trace needs at least two samples");
    if (!std::isfinite(t0) || t0 < 0.0) throw EvalError("evaluation time must be finite and non-negative");
    for (const auto& name : signals_of(f))
        if (!trace.find_channel(name)) throw EvalError("formula references unknown signal '" + name + "'");

    const double dt = trace.dt();
    const auto k0 = static_cast<std::size_t>(std::ceil(t0 / dt - kSlack));
    const std::size_t need = k0 + lookahead(f, dt);
    if (need >= trace.size()) {
        std::ostringstream os;
        os << "trace ends at " << trace.end_time() << " s but the formula evaluated at t0 = " << t0
           << " needs " << horizon_of(f) << " s of lookahead";
        throw EvalError(os.str());
    }
    const double value = Monitor(trace, semantics).eval(f, k0, k0).front();
    if (std::isnan(value)) throw EvalError("robustness is NaN (non-finite trace values?)");
    return value;
}

}  // namespace pulsefal::stl
