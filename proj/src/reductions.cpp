#include "fifa/reductions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "fifa/rng.hpp"

namespace fifa {

namespace {

void require_binary(const LabeledDataset& data, const char* who) {
    if (data.num_classes() != 2)
        throw std::runtime_error(std::string(who) + ": the reduction machinery requires binary labels");
}

std::vector<std::size_t> event_counts(const ConstraintSystem& system,
                                      const LabeledDataset& data) {
    std::vector<std::size_t> counts(system.events.size(), 0);
    for (std::size_t j = 0; j < data.size(); ++j)
        for (std::size_t e = 0; e < system.events.size(); ++e)
            if (system.events[e].contains(data.labels[j], data.attributes[j])) counts[e] += 1;
    return counts;
}

}  // namespace

ConstraintSystem build_constraints(ConstraintKind kind, const LabeledDataset& data,
                                   double eps) {
    require_binary(data, "build_constraints");
    if (eps < 0.0) throw std::runtime_error("build_constraints: eps must be non-negative");
    const int m = data.num_attributes();

    ConstraintSystem system;
    system.kind = kind;

    const bool dp = kind == ConstraintKind::DemographicParity;
    const bool eqopt = kind == ConstraintKind::EqualizedOpportunity;

    // Events: one per attribute (crossed with labels for EO, restricted to
    // y = 1 for EqOpt, label-free for DP), plus the matching wildcard events.
    std::vector<int> event_labels;
    if (dp) event_labels = {-1};
    else if (eqopt) event_labels = {1};
    else event_labels = {0, 1};

    auto event_index = [&](int attr, int label) {
        for (std::size_t e = 0; e < system.events.size(); ++e)
            if (system.events[e].attribute == attr && system.events[e].label == label)
                return e;
        throw std::logic_error("build_constraints: event lookup failed");
    };

    for (int a = 0; a < m; ++a)
        for (int y : event_labels) system.events.push_back(Event{a, y});
    for (int y : event_labels) system.events.push_back(Event{-1, y});

    const std::vector<std::size_t> counts = event_counts(system, data);
    for (std::size_t e = 0; e < system.events.size(); ++e)
        if (counts[e] == 0)
            throw std::runtime_error("build_constraints: event (attr " +
                                     std::to_string(system.events[e].attribute) + ", label " +
                                     std::to_string(system.events[e].label) + ") is empty");

    // Rows: (attribute, label, sign) with the (+, -) pair adjacent.  For DP
    // the label only flips the sign of the underlying rate difference.
    std::vector<int> row_labels = eqopt ? std::vector<int>{1} : std::vector<int>{0, 1};
    for (int a = 0; a < m; ++a)
        for (int y : row_labels)
            for (int sign : {+1, -1}) {
                ConstraintRow row;
                row.attribute = a;
                row.label = y;
                row.sign = sign;
                row.event_index = event_index(a, dp ? -1 : y);
                row.base_event_index = event_index(-1, dp ? -1 : y);
                system.rows.push_back(row);
            }

    system.coefficients = Matrix(system.rows.size(), system.events.size());
    for (std::size_t r = 0; r < system.rows.size(); ++r) {
        const ConstraintRow& row = system.rows[r];
        // mu is the event-conditional rate of predicting 1; for DP rows
        // about label 0 the rate difference of predicting 0 is the negation.
        double orient = static_cast<double>(row.sign);
        if (dp && row.label == 0) orient = -orient;
        system.coefficients(r, row.event_index) = orient;
        system.coefficients(r, row.base_event_index) = -orient;
    }
    system.targets.assign(system.rows.size(), 0.0);
    system.relaxations.assign(system.rows.size(), eps);
    system.targets_relaxed.assign(system.rows.size(), eps);
    return system;
}

namespace {

// Margin-shifted prediction: the true-class logit is lowered by
// Delta_{y,a}; ties resolve to the smaller class, matching predict().
inline bool shifted_predicts_one(const LabeledDataset& data, std::size_t j,
                                 const MarginSchedule* schedule,
                                 const std::vector<double>& s0, const std::vector<double>& s1) {
    double a = s0[j], b = s1[j];
    if (schedule != nullptr) {
        const double shift = schedule->at(data.labels[j], data.attributes[j]);
        if (data.labels[j] == 0) a -= shift; else b -= shift;
    }
    return b > a;
}

// Precomputed per-sample scores for both classes.
void all_scores(const LinearScorer& scorer, const LabeledDataset& data,
                std::vector<double>& s0, std::vector<double>& s1) {
    require_binary(data, "reductions");
    if (scorer.num_classes() != 2)
        throw std::runtime_error("reductions: scorer must have two classes");
    s0.resize(data.size());
    s1.resize(data.size());
    std::vector<double> s(2);
    for (std::size_t j = 0; j < data.size(); ++j) {
        score(scorer, std::span<const double>(data.features.row(j), data.dim()), s);
        s0[j] = s[0];
        s1[j] = s[1];
    }
}

}  // namespace

std::vector<double> moments(const LinearScorer& scorer, const LabeledDataset& data,
                            const ConstraintSystem& system, const MarginSchedule* schedule) {
    std::vector<double> s0, s1;
    all_scores(scorer, data, s0, s1);
    std::vector<double> sums(system.events.size(), 0.0);
    std::vector<std::size_t> counts(system.events.size(), 0);
    for (std::size_t j = 0; j < data.size(); ++j) {
        const bool one = shifted_predicts_one(data, j, schedule, s0, s1);
        for (std::size_t e = 0; e < system.events.size(); ++e)
            if (system.events[e].contains(data.labels[j], data.attributes[j])) {
                counts[e] += 1;
                if (one) sums[e] += 1.0;
            }
    }
    for (std::size_t e = 0; e < system.events.size(); ++e) {
        if (counts[e] == 0)
            throw std::runtime_error("moments: event " + std::to_string(e) + " is empty");
        sums[e] /= static_cast<double>(counts[e]);
    }
    return sums;
}

std::vector<double> moments(const RandomizedClassifier& mixture, const LabeledDataset& data,
                            const ConstraintSystem& system, const MarginSchedule* schedule) {
    mixture.validate();
    std::vector<double> out(system.events.size(), 0.0);
    for (std::size_t h = 0; h < mixture.members.size(); ++h) {
        const std::vector<double> mu = moments(mixture.members[h], data, system, schedule);
        for (std::size_t e = 0; e < out.size(); ++e) out[e] += mixture.q[h] * mu[e];
    }
    return out;
}

double shifted_error(const LinearScorer& scorer, const LabeledDataset& data,
                     const MarginSchedule* schedule) {
    std::vector<double> s0, s1;
    all_scores(scorer, data, s0, s1);
    std::size_t wrong = 0;
    for (std::size_t j = 0; j < data.size(); ++j) {
        const int y = data.labels[j];
        double own = (y == 0 ? s0[j] : s1[j]);
        const double other = (y == 0 ? s1[j] : s0[j]);
        if (schedule != nullptr) own -= schedule->at(y, data.attributes[j]);
        if (own <= other) ++wrong;  // ties count as errors, by convention
    }
    return static_cast<double>(wrong) / static_cast<double>(data.size());
}

double shifted_error(const RandomizedClassifier& mixture, const LabeledDataset& data,
                     const MarginSchedule* schedule) {
    mixture.validate();
    double err = 0.0;
    for (std::size_t h = 0; h < mixture.members.size(); ++h)
        err += mixture.q[h] * shifted_error(mixture.members[h], data, schedule);
    return err;
}

namespace {

std::vector<double> constraint_gains(const ConstraintSystem& system,
                                     const std::vector<double>& mu) {
    std::vector<double> g(system.num_rows(), 0.0);
    for (std::size_t r = 0; r < system.num_rows(); ++r) {
        double v = 0.0;
        for (std::size_t e = 0; e < system.num_events(); ++e)
            v += system.coefficients(r, e) * mu[e];
        g[r] = v - system.targets_relaxed[r];
    }
    return g;
}

double lagrangian_from_parts(double err, const std::vector<double>& lambda,
                             const std::vector<double>& gains) {
    double v = err;
    for (std::size_t r = 0; r < lambda.size(); ++r) v += lambda[r] * gains[r];
    return v;
}

}  // namespace

double lagrangian(const LinearScorer& scorer, const std::vector<double>& lambda,
                  const LabeledDataset& data, const ConstraintSystem& system,
                  const MarginSchedule* schedule) {
    if (lambda.size() != system.num_rows())
        throw std::runtime_error("lagrangian: lambda length mismatch");
    return lagrangian_from_parts(shifted_error(scorer, data, schedule), lambda,
                                 constraint_gains(system, moments(scorer, data, system, schedule)));
}

double lagrangian(const RandomizedClassifier& mixture, const std::vector<double>& lambda,
                  const LabeledDataset& data, const ConstraintSystem& system,
                  const MarginSchedule* schedule) {
    if (lambda.size() != system.num_rows())
        throw std::runtime_error("lagrangian: lambda length mismatch");
    return lagrangian_from_parts(shifted_error(mixture, data, schedule), lambda,
                                 constraint_gains(system, moments(mixture, data, system, schedule)));
}

ReductionProblem reduction_problem(const std::vector<double>& lambda,
                                   const LabeledDataset& data,
                                   const ConstraintSystem& system) {
    require_binary(data, "reduction_problem");
    if (lambda.size() != system.num_rows())
        throw std::runtime_error("reduction_problem: lambda length mismatch");

    // Per-event coefficient of the constraint part of L on the event's rate
    // of predicting 1.
    std::vector<double> event_coef(system.num_events(), 0.0);
    for (std::size_t r = 0; r < system.num_rows(); ++r)
        for (std::size_t e = 0; e < system.num_events(); ++e)
            event_coef[e] += lambda[r] * system.coefficients(r, e);

    const std::vector<std::size_t> counts = event_counts(system, data);
    for (std::size_t e = 0; e < counts.size(); ++e)
        if (counts[e] == 0)
            throw std::runtime_error("reduction_problem: event " + std::to_string(e) + " is empty");

    const double n = static_cast<double>(data.size());
    ReductionProblem out;
    out.labels.resize(data.size());
    out.weights.resize(data.size());
    for (std::size_t j = 0; j < data.size(); ++j) {
        // Lagrangian cost of predicting 1 versus 0 on this sample.
        double cost1 = (data.labels[j] == 0) ? 1.0 / n : 0.0;
        const double cost0 = (data.labels[j] == 1) ? 1.0 / n : 0.0;
        for (std::size_t e = 0; e < system.num_events(); ++e)
            if (system.events[e].contains(data.labels[j], data.attributes[j]))
                cost1 += event_coef[e] / static_cast<double>(counts[e]);
        out.labels[j] = cost1 < cost0 ? 1 : 0;
        out.weights[j] = std::abs(cost0 - cost1) * n;  // scaled for conditioning only
    }
    return out;
}

LinearScorer best_response(const std::vector<double>& lambda, const LabeledDataset& data,
                           const ConstraintSystem& system, const MarginSchedule& schedule,
                           const TrainConfig& train_config, LossKind loss) {
    const ReductionProblem rp = reduction_problem(lambda, data, system);
    return train(data, rp.labels, rp.weights, loss, schedule, train_config);
}

ExpGradResult expgrad(const LabeledDataset& data, const ConstraintSystem& system,
                      const MarginSchedule& schedule, const ExpGradConfig& config) {
    if (!(config.bound > 0.0) || !(config.nu > 0.0))
        throw std::runtime_error("expgrad: bound and nu must be positive");
    const std::size_t K = system.num_rows();
    const double B = config.bound;
    const double logK1 = std::log(static_cast<double>(K) + 1.0);

    // Multiplicative-weights state over |K| + 1 coordinates; the extra null
    // coordinate keeps its log-weight at 0.
    std::vector<double> theta(K, 0.0);
    auto lambda_of_theta = [&]() {
        const double top = std::max(0.0, *std::max_element(theta.begin(), theta.end()));
        double denom = std::exp(-top);  // null coordinate
        std::vector<double> lam(K);
        for (std::size_t r = 0; r < K; ++r) {
            lam[r] = std::exp(theta[r] - top);
            denom += lam[r];
        }
        for (std::size_t r = 0; r < K; ++r) lam[r] *= B / denom;
        return lam;
    };

    ExpGradResult result;
    std::vector<double> lambda_sum(K, 0.0);
    std::vector<double> mu_sum(system.num_events(), 0.0);
    double err_sum = 0.0;
    double rho = 0.0;
    double eta = config.eta;

    auto iteration_cap = [&](double measured_rho) {
        if (measured_rho <= 0.0) return std::size_t{1};
        const double cap = 4.0 * measured_rho * measured_rho * B * B * logK1 /
                           (config.nu * config.nu);
        return static_cast<std::size_t>(std::ceil(cap));
    };

    std::size_t t = 0;
    while (true) {
        ++t;
        const std::vector<double> lam = lambda_of_theta();

        TrainConfig inner = config.inner;
        inner.seed = derive_seed(config.inner.seed, "expgrad-iter", t);
        const LinearScorer h = best_response(lam, data, system, schedule, inner, config.loss);

        const std::vector<double> mu = moments(h, data, system, &schedule);
        const double err = shifted_error(h, data, &schedule);
        const std::vector<double> gains = constraint_gains(system, mu);
        for (double g : gains) rho = std::max(rho, std::abs(g));
        if (eta <= 0.0) eta = config.nu / (2.0 * std::max(rho, 1e-12) * std::max(rho, 1e-12) * B);

        result.classifier.members.push_back(h);
        for (std::size_t r = 0; r < K; ++r) lambda_sum[r] += lam[r];
        for (std::size_t e = 0; e < mu.size(); ++e) mu_sum[e] += mu[e];
        err_sum += err;

        for (std::size_t r = 0; r < K; ++r) theta[r] += eta * gains[r];

        // Saddle-gap certificate for the uniform iterate averages.
        const double inv_t = 1.0 / static_cast<double>(t);
        std::vector<double> mu_avg(mu_sum);
        for (double& v : mu_avg) v *= inv_t;
        const std::vector<double> gains_avg = constraint_gains(system, mu_avg);
        const double worst = *std::max_element(gains_avg.begin(), gains_avg.end());
        const double L_max = err_sum * inv_t + B * std::max(0.0, worst);

        std::vector<double> lambda_avg(lambda_sum);
        for (double& v : lambda_avg) v *= inv_t;
        TrainConfig probe = config.inner;
        probe.seed = derive_seed(config.inner.seed, "expgrad-probe", t);
        const LinearScorer h_min =
            best_response(lambda_avg, data, system, schedule, probe, config.loss);
        const double L_min =
            lagrangian(h_min, lambda_avg, data, system, &schedule);

        const double gap = L_max - L_min;
        const std::size_t cap = iteration_cap(rho);
        const std::size_t hard_cap = config.max_iters > 0 ? std::min(config.max_iters, cap) : cap;

        if (gap <= config.nu || t >= hard_cap) {
            result.lambda_avg = lambda_avg;
            result.classifier.q.assign(t, inv_t);
            result.certificate.gap = gap;
            result.certificate.rho = rho;
            result.certificate.iterations = t;
            result.certificate.iteration_cap = cap;
            result.certificate.converged = gap <= config.nu;
            result.classifier.validate();
            return result;
        }
    }
}

GridSearchResult grid_search(const LabeledDataset& data, const ConstraintSystem& system,
                             const MarginSchedule& schedule,
                             const std::vector<std::vector<double>>& grid,
                             const TrainConfig& train_config, LossKind loss) {
    if (grid.empty()) throw std::runtime_error("grid_search: empty grid");
    const double eps = system.relaxations.empty() ? 0.0 : system.relaxations.front();

    GridSearchResult result;
    std::vector<LinearScorer> scorers;
    scorers.reserve(grid.size());
    for (const std::vector<double>& lam : grid) {
        GridPointReport point;
        point.lambda = lam;
        LinearScorer h = best_response(lam, data, system, schedule, train_config, loss);
        point.train_report = evaluate(h, data, system.kind);  // true labels
        point.feasible = point.train_report.fairness_violation <= eps;
        scorers.push_back(std::move(h));
        result.points.push_back(std::move(point));
    }

    // Smallest training combined loss among feasible points; fall back to
    // the smallest violation when nothing is feasible.
    std::size_t best = grid.size();
    for (std::size_t i = 0; i < result.points.size(); ++i) {
        if (!result.points[i].feasible) continue;
        if (best == grid.size() ||
            result.points[i].train_report.combined_loss <
                result.points[best].train_report.combined_loss)
            best = i;
    }
    result.feasible = best != grid.size();
    if (!result.feasible) {
        best = 0;
        for (std::size_t i = 1; i < result.points.size(); ++i)
            if (result.points[i].train_report.fairness_violation <
                result.points[best].train_report.fairness_violation)
                best = i;
    }
    result.best_index = best;
    result.best = scorers[best];
    return result;
}

std::vector<std::vector<double>> make_lambda_grid(const ConstraintSystem& system,
                                                  double bound, std::size_t budget) {
    if (budget == 0) throw std::runtime_error("make_lambda_grid: budget must be positive");
    const std::size_t pairs = system.num_rows() / 2;
    const std::vector<double> magnitudes = {bound / 8.0, bound / 4.0, bound / 2.0, bound};
    const std::size_t options = 1 + 2 * magnitudes.size();  // 0, or one side at a magnitude

    double total_d = 1.0;
    for (std::size_t p = 0; p < pairs; ++p) total_d *= static_cast<double>(options);
    const std::size_t total = total_d > 1e18 ? static_cast<std::size_t>(1e18)
                                             : static_cast<std::size_t>(total_d);
    const std::size_t count = std::min(budget, total);

    std::vector<std::vector<double>> grid;
    grid.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        // Uniform stride through the mixed-radix enumeration.
        std::size_t code = count == total ? i : (i * total) / count;
        std::vector<double> lam(system.num_rows(), 0.0);
        for (std::size_t p = 0; p < pairs; ++p) {
            const std::size_t opt = code % options;
            code /= options;
            if (opt > 0) {
                const std::size_t side = (opt - 1) % 2;       // 0 -> '+' row, 1 -> '-' row
                const std::size_t mag = (opt - 1) / 2;
                lam[2 * p + side] = magnitudes[mag];
            }
        }
        grid.push_back(std::move(lam));
    }
    return grid;
}

}  // namespace fifa
