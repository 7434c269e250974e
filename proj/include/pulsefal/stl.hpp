#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pulsefal/signal.hpp"

namespace pulsefal::stl {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t line, std::size_t column);
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// constant + sum(coefficient * signal)
struct Affine {
    double constant = 0.0;
    std::map<std::string, double> terms;

    double eval(const Signal& trace, std::size_t k) const;
    bool is_constant() const;
};

enum class Comparator { Less, LessEq, Greater, GreaterEq };

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

enum class Op { Atom, Not, And, Or, Implies, Always, Eventually, Until };

struct Node;
using Formula = std::shared_ptr<const Node>;

struct Node {
    Op op = Op::Atom;
    // Atom: lhs cmp rhs, stored as the difference lhs - rhs.
    Affine diff;
    Comparator cmp = Comparator::Less;
    Interval interval;
    std::vector<Formula> children;
};

// Builders. Intervals are checked (0 <= lo <= hi, finite).
Formula atom(Affine lhs_minus_rhs, Comparator cmp);
Formula atom(const std::string& signal, Comparator cmp, double threshold);
Formula negation(Formula f);
Formula conjunction(std::vector<Formula> fs);
Formula disjunction(std::vector<Formula> fs);
Formula implies(Formula lhs, Formula rhs);
Formula always(Interval iv, Formula f);
Formula eventually(Interval iv, Formula f);
Formula until(Interval iv, Formula lhs, Formula rhs);

Formula parse(std::string_view text);

/// Round-trippable textual form.
std::string to_string(const Formula& f);

/// Longest nested sum of interval upper bounds.
double horizon_of(const Formula& f);

/// Names of every signal referenced by an atom.
std::vector<std::string> signals_of(const Formula& f);

enum class Semantics { Classic, Additive };

/// Robustness at t0 evaluated over grid instants only. Throws EvalError when the
/// trace is too short or a signal is missing.
double robustness(const Formula& f, const Signal& trace, double t0, Semantics semantics);

inline double robustness_classic(const Formula& f, const Signal& trace, double t0 = 0.0) {
    return robustness(f, trace, t0, Semantics::Classic);
}
inline double robustness_additive(const Formula& f, const Signal& trace, double t0 = 0.0) {
    return robustness(f, trace, t0, Semantics::Additive);
}

/// Additive combination rules. Conjunction: min if every value is positive,
/// otherwise the sum of the strictly negative values. Disjunction is the dual.
double additive_and(const std::vector<double>& values);
double additive_or(const std::vector<double>& values);

/// Inclusive grid index range covered by [t0 + a, t0 + b]. An interval that
/// contains no grid instant snaps to the first instant at or after t0 + a.
struct IndexWindow {
    std::size_t first;
    std::size_t last;
};
IndexWindow window_indices(double dt, std::size_t k0, const Interval& iv);

}  // namespace pulsefal::stl
