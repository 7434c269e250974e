#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "pulsefal/stl.hpp"

namespace pulsefal::stl {

double Affine::eval(const Signal& trace, std::size_t k) const {
    double v = constant;
    for (const auto& [name, coef] : terms) v += coef * trace.channel(name)[k];
    return v;
}

bool Affine::is_constant() const { return terms.empty(); }

namespace {

void check_interval(const Interval& iv) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi)) throw std::invalid_argument("interval bounds must be finite");
    if (iv.lo < 0.0) throw std::invalid_argument("interval lower bound must be >= 0");
    if (iv.lo > iv.hi) throw std::invalid_argument("interval lower bound exceeds upper bound");
}

Formula make(Node n) { return std::make_shared<const Node>(std::move(n)); }

Formula nary(Op op, std::vector<Formula> fs) {
    if (fs.empty()) throw std::invalid_argument("connective needs at least one operand");
    if (fs.size() == 1) return fs.front();
    Node n;
    n.op = op;
    // Flatten nested connectives of the same kind.
    for (auto& f : fs) {
        if (f->op == op) {
            n.children.insert(n.children.end(), f->children.begin(), f->children.end());
        } else {
            n.children.push_back(std::move(f));
        }
    }
    return make(std::move(n));
}

const char* cmp_text(Comparator c) {
    switch (c) {
        case Comparator::Less: return "<";
        case Comparator::LessEq: return "<=";
        case Comparator::Greater: return ">";
        case Comparator::GreaterEq: return ">=";
    }
    return "?";
}

std::string number_text(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string affine_text(const Affine& a) {
    std::ostringstream os;
    bool first = true;
    for (const auto& [name, coef] : a.terms) {
        if (!first) os << (coef < 0 ? " - " : " + ");
        else if (coef < 0) os << "-";
        const double mag = std::abs(coef);
        if (mag != 1.0) os << number_text(mag) << " * ";
        os << name;
        first = false;
    }
    if (first) {
        os << number_text(a.constant);
    } else if (a.constant != 0.0) {
        os << (a.constant < 0 ? " - " : " + ") << number_text(std::abs(a.constant));
    }
    return os.str();
}

void collect_signals(const Formula& f, std::set<std::string>& out) {
    if (f->op == Op::Atom) {
        for (const auto& [name, coef] : f->diff.terms) out.insert(name);
    }
    for (const auto& c : f->children) collect_signals(c, out);
}

}  // namespace

Formula atom(Affine diff, Comparator cmp) {
    Node n;
    n.op = Op::Atom;
    n.diff = std::move(diff);
    n.cmp = cmp;
    return make(std::move(n));
}

Formula atom(const std::string& signal, Comparator cmp, double threshold) {
    Affine a;
    a.terms[signal] = 1.0;
    a.constant = -threshold;
    return atom(std::move(a), cmp);
}

Formula negation(Formula f) {
    Node n;
    n.op = Op::Not;
    n.children.push_back(std::move(f));
    return make(std::move(n));
}

Formula conjunction(std::vector<Formula> fs) { return nary(Op::And, std::move(fs)); }
Formula disjunction(std::vector<Formula> fs) { return nary(Op::Or, std::move(fs)); }

Formula implies(Formula lhs, Formula rhs) {
    Node n;
    n.op = Op::Implies;
    n.children = {std::move(lhs), std::move(rhs)};
    return make(std::move(n));
}

Formula always(Interval iv, Formula f) {
    check_interval(iv);
    Node n;
    n.op = Op::Always;
    n.interval = iv;
    n.children.push_back(std::move(f));
    return make(std::move(n));
}

Formula eventually(Interval iv, Formula f) {
    check_interval(iv);
    Node n;
    n.op = Op::Eventually;
    n.interval = iv;
    n.children.push_back(std::move(f));
    return make(std::move(n));
}

Formula until(Interval iv, Formula lhs, Formula rhs) {
    check_interval(iv);
    Node n;
    n.op = Op::Until;
    n.interval = iv;
    n.children = {std::move(lhs), std::move(rhs)};
    return make(std::move(n));
}

std::string to_string(const Formula& f) {
    auto iv = [](const Interval& i) { return "[" + number_text(i.lo) + ", " + number_text(i.hi) + "]"; };
    switch (f->op) {
        case Op::Atom: {
            // Print as "signals cmp constant".
            Affine lhs = f->diff;
            const double c = -lhs.constant;
            lhs.constant = 0.0;
            if (lhs.terms.empty()) return number_text(f->diff.constant) + " " + cmp_text(f->cmp) + " 0";
            return affine_text(lhs) + " " + cmp_text(f->cmp) + " " + number_text(c);
        }
        case Op::Not: return "not (" + to_string(f->children[0]) + ")";
        case Op::And:
        case Op::Or: {
            std::string out = "(";
            for (std::size_t i = 0; i < f->children.size(); ++i) {
                if (i) out += f->op == Op::And ? " and " : " or ";
                out += "(" + to_string(f->children[i]) + ")";
            }
            return out + ")";
        }
        case Op::Implies: return "(" + to_string(f->children[0]) + ") -> (" + to_string(f->children[1]) + ")";
        case Op::Always: return "alw" + iv(f->interval) + " (" + to_string(f->children[0]) + ")";
        case Op::Eventually: return "ev" + iv(f->interval) + " (" + to_string(f->children[0]) + ")";
        case Op::Until:
            return "((" + to_string(f->children[0]) + ") U" + iv(f->interval) + " (" + to_string(f->children[1]) + "))";
    }
    return {};
}

double horizon_of(const Formula& f) {
    double child_h = 0.0;
    for (const auto& c : f->children) child_h = std::max(child_h, horizon_of(c));
    switch (f->op) {
        case Op::Always:
        case Op::Eventually:
        case Op::Until: return f->interval.hi + child_h;
        default: return child_h;
    }
}

std::vector<std::string> signals_of(const Formula& f) {
    std::set<std::string> names;
    collect_signals(f, names);
    return {names.begin(), names.end()};
}

}  // namespace pulsefal::stl
