#include "pulsefal/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

namespace pulsefal::opt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shared bookkeeping: budget, stop-on-negative and best tracking.
class Ledger {
public:
    Ledger(const Objective& objective, std::size_t budget) : objective_(objective), budget_(budget) {}

    bool done() const { return stopped_ || result_.history.size() >= budget_; }
    std::size_t used() const { return result_.history.size(); }

    const EvalRecord& evaluate(std::vector<double> point) {
        double value = objective_(point);
        if (!std::isfinite(value)) value = kInf;
        EvalRecord rec{std::move(point), value, result_.history.size() + 1};
        if (result_.history.empty() || value < result_.best.value) result_.best = rec;
        result_.history.push_back(std::move(rec));
        if (value < 0.0) stopped_ = true;
        return result_.history.back();
    }

    OptimizationResult finish() {
        result_.stopped_early = stopped_;
        result_.evaluations_used = result_.history.size();
        return std::move(result_);
    }

    OptimizationResult& result() { return result_; }

private:
    const Objective& objective_;
    std::size_t budget_;
    bool stopped_ = false;
    OptimizationResult result_;
};

double cubic(double r) { return r * r * r; }

double distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

}  // namespace

void OptimizerConfig::validate() const {
    if (budget < 1) throw OptimizerError("budget must be at least 1");
    const auto& tr = trust_region;
    if (!(tr.min_side > 0.0 && tr.min_side < tr.initial_side && tr.initial_side <= tr.max_side))
        throw OptimizerError("trust region sides must satisfy 0 < min < initial <= max");
    if (tr.success_tolerance < 1 || tr.failure_tolerance < 0) throw OptimizerError("invalid trust region tolerances");
    if (tr.per_dim_candidates < 1 || tr.max_candidates < 1 || tr.max_fit_points < 2)
        throw OptimizerError("invalid candidate or fit limits");
}

std::vector<std::vector<double>> latin_hypercube(std::size_t n, std::size_t dim, Rng& rng) {
    if (n < 1 || dim < 1) throw OptimizerError("latin hypercube needs n >= 1 and dim >= 1");
    std::vector<std::vector<double>> points(n, std::vector<double>(dim));
    std::vector<std::size_t> perm(n);
    const double width = 1.0 / static_cast<double>(n);
    for (std::size_t d = 0; d < dim; ++d) {
        std::iota(perm.begin(), perm.end(), 0);
        // Fisher-Yates with our own RNG so the permutation is library independent.
        for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = (static_cast<double>(perm[i]) + rng.uniform()) * width;
            points[i][d] = std::min(x, 1.0);
        }
    }
    return points;
}

OptimizationResult random_search(const Objective& objective, std::size_t dim, const OptimizerConfig& config) {
    config.validate();
    if (dim < 1) throw OptimizerError("dimension must be at least 1");
    Rng rng(config.seed);
    Ledger ledger(objective, config.budget);
    while (!ledger.done()) {
        std::vector<double> p(dim);
        for (double& x : p) x = rng.uniform();
        ledger.evaluate(std::move(p));
    }
    return ledger.finish();
}

std::optional<RbfSurrogate> fit_surrogate(const std::vector<std::vector<double>>& points,
                                          const std::vector<double>& values) {
    if (points.size() != values.size() || points.empty()) throw OptimizerError("points and values differ in count");
    const std::size_t dim = points.front().size();

    // Drop duplicate points (first occurrence wins).
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const bool dup = std::any_of(keep.begin(), keep.end(), [&](std::size_t j) { return points[j] == points[i]; });
        if (!dup) keep.push_back(i);
    }
    if (keep.size() < 2) return std::nullopt;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (*lo == *hi || !std::isfinite(*lo) || !std::isfinite(*hi)) return std::nullopt;

    const std::size_t n = keep.size();
    // A linear tail is only unisolvent with enough points; otherwise fall back to a constant.
    const std::size_t tail = n >= dim + 2 ? dim + 1 : 1;
    const std::size_t m = n + tail;

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < n; ++i) {
        const auto& pi = points[keep[i]];
        for (std::size_t j = 0; j < n; ++j) a(i, j) = cubic(distance(pi, points[keep[j]]));
        a(i, n) = a(n, i) = 1.0;
        for (std::size_t d = 0; d + 1 < tail; ++d) a(i, n + 1 + d) = a(n + 1 + d, i) = pi[d];
        rhs(i) = values[keep[i]];
    }

    Eigen::VectorXd sol;
    for (double ridge : {0.0, 1e-8}) {
        Eigen::MatrixXd sys = a;
        for (std::size_t i = 0; i < n; ++i) sys(i, i) += ridge;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
        if (lu.isInvertible()) {
            sol = lu.solve(rhs);
            break;
        }
    }
    if (sol.size() == 0 || !sol.allFinite()) return std::nullopt;

    RbfSurrogate s;
    s.dim_ = dim;
    for (std::size_t i = 0; i < n; ++i) {
        s.centers_.push_back(points[keep[i]]);
        s.weights_.push_back(sol(static_cast<Eigen::Index>(i)));
    }
    s.tail_.assign(dim + 1, 0.0);
    for (std::size_t d = 0; d < tail; ++d) s.tail_[d] = sol(static_cast<Eigen::Index>(n + d));
    return s;
}

double RbfSurrogate::predict(std::span<const double> x) const {
    double v = tail_[0];
    for (std::size_t d = 0; d < dim_; ++d) v += tail_[d + 1] * x[d];
    for (std::size_t i = 0; i < centers_.size(); ++i) v += weights_[i] * cubic(distance(x, centers_[i]));
    return v;
}

OptimizationResult turbo_lite_minimize(const Objective& objective, std::size_t dim, const OptimizerConfig& config) {
    config.validate();
    if (dim < 1) throw OptimizerError("dimension must be at least 1");
    const std::size_t init = config.init_samples ? config.init_samples : 2 * dim;
    if (config.budget < init) throw OptimizerError("budget must cover the initial design");
    const auto& tr = config.trust_region;
    const int failure_tolerance = tr.failure_tolerance ? tr.failure_tolerance : static_cast<int>(dim);
    const auto candidate_count =
        static_cast<std::size_t>(std::min<long long>(static_cast<long long>(tr.per_dim_candidates) * static_cast<long long>(dim), tr.max_candidates));

    Rng rng(config.seed);
    Ledger ledger(objective, config.budget);
    bool first_design = true;

    while (!ledger.done()) {
        // Fresh design: initial or after a trust-region collapse.
        const std::size_t local_begin = ledger.used();
        for (auto& p : latin_hypercube(init, dim, rng)) {
            if (ledger.done()) break;
            ledger.evaluate(std::move(p));
        }
        if (first_design) {
            ledger.result().initial_design_evaluations = ledger.used();
            first_design = false;
        }

        const auto& hist = ledger.result().history;
        std::size_t incumbent = local_begin;
        for (std::size_t i = local_begin; i < hist.size(); ++i)
            if (hist[i].value < hist[incumbent].value) incumbent = i;

        double side = tr.initial_side;
        int successes = 0, failures = 0;
        while (!ledger.done()) {
            if (side < tr.min_side) {
                ++ledger.result().restarts;
                break;
            }
            const std::vector<double> center = hist[incumbent].point;

            // Local training set: nearest points of this restart to the incumbent.
            std::vector<std::size_t> idx(hist.size() - local_begin);
            std::iota(idx.begin(), idx.end(), local_begin);
            if (idx.size() > static_cast<std::size_t>(tr.max_fit_points)) {
                std::vector<double> dist(hist.size());
                for (auto i : idx) dist[i] = distance(hist[i].point, center);
                std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
                idx.resize(static_cast<std::size_t>(tr.max_fit_points));
            }
            std::vector<std::vector<double>> pts;
            std::vector<double> vals;
            double worst_finite = -kInf;
            for (auto i : idx)
                if (std::isfinite(hist[i].value)) worst_finite = std::max(worst_finite, hist[i].value);
            for (auto i : idx) {
                pts.push_back(hist[i].point);
                vals.push_back(std::isfinite(hist[i].value) ? hist[i].value : worst_finite);
            }
            std::optional<RbfSurrogate> model;
            if (std::isfinite(worst_finite)) model = fit_surrogate(pts, vals);

            std::vector<double> lo(dim), hi(dim);
            for (std::size_t d = 0; d < dim; ++d) {
                lo[d] = std::max(0.0, center[d] - side / 2);
                hi[d] = std::min(1.0, center[d] + side / 2);
            }
            std::vector<double> chosen, cand(dim);
            double chosen_pred = kInf;
            const std::size_t draws = model ? candidate_count : 1;
            for (std::size_t c = 0; c < draws; ++c) {
                for (std::size_t d = 0; d < dim; ++d) cand[d] = lo[d] + rng.uniform() * (hi[d] - lo[d]);
                const double pred = model ? model->predict(cand) : 0.0;
                if (chosen.empty() || pred < chosen_pred) {
                    chosen = cand;
                    chosen_pred = pred;
                }
            }

            const EvalRecord& rec = ledger.evaluate(std::move(chosen));
            if (rec.value < hist[incumbent].value) {
                incumbent = rec.index - 1;
                ++successes;
                failures = 0;
            } else {
                ++failures;
                successes = 0;
            }
            if (successes == tr.success_tolerance) {
                side = std::min(2 * side, tr.max_side);
                successes = 0;
            }
            if (failures == failure_tolerance) {
                side /= 2;
                failures = 0;
            }
        }
    }
    return ledger.finish();
}

OptimizationResult minimize(const Objective& objective, std::size_t dim, const OptimizerConfig& config) {
    return config.kind == OptimizerKind::RandomSearch ? random_search(objective, dim, config)
                                                      : turbo_lite_minimize(objective, dim, config);
}

}  // namespace pulsefal::opt
