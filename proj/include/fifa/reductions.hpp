#pragma once

#include <cstdint>
#include <vector>

#include "fifa/dataset.hpp"
#include "fifa/margins.hpp"
#include "fifa/metrics.hpp"
#include "fifa/model.hpp"

namespace fifa {

/// Conditioning event over (y, a); -1 is a wildcard.
struct Event {
    int attribute = -1;
    int label = -1;

    bool contains(int y, int a) const {
        return (attribute < 0 || attribute == a) && (label < 0 || label == y);
    }
};

/// One signed constraint row: sign * (rate over the (a, y) event minus rate
/// over the matching wildcard event) <= c_hat.
struct ConstraintRow {
    int attribute = 0;
    int label = 0;
    int sign = +1;             // +1 or -1
    std::size_t event_index = 0;
    std::size_t base_event_index = 0;
};

/// Linear constraint system M mu(h) <= c_hat for one fairness notion.
struct ConstraintSystem {
    ConstraintKind kind = ConstraintKind::EqualizedOdds;
    std::vector<Event> events;          // index set J
    std::vector<ConstraintRow> rows;    // index set K
    Matrix coefficients;                // M, |K| x |J|, two nonzeros (+1/-1) per row
    std::vector<double> targets;        // c, zeros
    std::vector<double> relaxations;    // eps >= 0
    std::vector<double> targets_relaxed; // c_hat = c + eps

    std::size_t num_rows() const { return rows.size(); }
    std::size_t num_events() const { return events.size(); }
};

ConstraintSystem build_constraints(ConstraintKind kind, const LabeledDataset& data,
                                   double eps);

/// Event-conditional rates of the margin-shifted prediction: the true-class
/// logit is lowered by Delta_{y,a} before the (tie -> smaller class) argmax.
/// With a null schedule this is exactly the empirical mean of h(X) per event.
std::vector<double> moments(const LinearScorer& scorer, const LabeledDataset& data,
                            const ConstraintSystem& system,
                            const MarginSchedule* schedule);

std::vector<double> moments(const RandomizedClassifier& mixture, const LabeledDataset& data,
                            const ConstraintSystem& system,
                            const MarginSchedule* schedule);

/// Margin-shifted empirical error P(f(X)_Y - Delta_{Y,A} <= f(X)_{1-Y}).
double shifted_error(const LinearScorer& scorer, const LabeledDataset& data,
                     const MarginSchedule* schedule);
double shifted_error(const RandomizedClassifier& mixture, const LabeledDataset& data,
                     const MarginSchedule* schedule);

/// L(Q, lambda) = err(Q) + lambda^T (M mu(Q) - c_hat), margin-shifted.
double lagrangian(const LinearScorer& scorer, const std::vector<double>& lambda,
                  const LabeledDataset& data, const ConstraintSystem& system,
                  const MarginSchedule* schedule);
double lagrangian(const RandomizedClassifier& mixture, const std::vector<double>& lambda,
                  const LabeledDataset& data, const ConstraintSystem& system,
                  const MarginSchedule* schedule);

struct ExpGradConfig {
    double bound = 10.0;        // B, L1 cap on lambda
    double nu = 0.05;           // saddle-gap tolerance
    double eta = 0.0;           // 0 means nu / (2 rho^2 B) with measured rho
    std::size_t max_iters = 0;  // 0 means the theoretical cap
    TrainConfig inner;          // best-response trainer
    LossKind loss = LossKind::SoftmaxCrossEntropy;
};

struct SaddleCertificate {
    double gap = 0.0;
    double rho = 0.0;           // max over observed iterates of |M mu - c_hat|_inf
    std::size_t iterations = 0;
    std::size_t iteration_cap = 0;   // ceil(4 rho^2 B^2 log(|K|+1) / nu^2), measured rho
    bool converged = false;
};

struct ExpGradResult {
    RandomizedClassifier classifier;
    std::vector<double> lambda_avg;
    SaddleCertificate certificate;
};

/// Exponentiated-gradient ascent on lambda over the B-scaled simplex with
/// one extra null coordinate, with a cost-sensitive best response per
/// iteration.  Returns the uniform mixture of iterates and the averaged
/// lambda, with a measured saddle-gap certificate.
ExpGradResult expgrad(const LabeledDataset& data, const ConstraintSystem& system,
                      const MarginSchedule& schedule, const ExpGradConfig& config);

/// Cost-sensitive reduction of min_h L(h, lambda): per-sample reduction
/// labels (the cheaper prediction) and weights (the cost difference).
struct ReductionProblem {
    std::vector<int> labels;
    std::vector<double> weights;
};

ReductionProblem reduction_problem(const std::vector<double>& lambda,
                                   const LabeledDataset& data,
                                   const ConstraintSystem& system);

LinearScorer best_response(const std::vector<double>& lambda, const LabeledDataset& data,
                           const ConstraintSystem& system, const MarginSchedule& schedule,
                           const TrainConfig& train_config,
                           LossKind loss = LossKind::SoftmaxCrossEntropy);

struct GridPointReport {
    std::vector<double> lambda;
    FairnessReport train_report;
    bool feasible = false;
};

struct GridSearchResult {
    LinearScorer best;
    std::size_t best_index = 0;
    bool feasible = false;      // false when no point met the violation cap
    std::vector<GridPointReport> points;
};

/// FIFA combined grid search: trains one scorer per lambda on the reduction
/// labels/weights, logs metrics with true labels, and selects the smallest
/// training combined loss subject to training violation <= eps.
GridSearchResult grid_search(const LabeledDataset& data, const ConstraintSystem& system,
                             const MarginSchedule& schedule,
                             const std::vector<std::vector<double>>& grid,
                             const TrainConfig& train_config,
                             LossKind loss = LossKind::SoftmaxCrossEntropy);

/// Deterministic lambda grid: per paired (+,-) row, one of
/// {0, B/8, B/4, B/2, B} on either side of the pair; the Cartesian product
/// is uniformly stride-subsampled down to `budget` points.
std::vector<std::vector<double>> make_lambda_grid(const ConstraintSystem& system,
                                                  double bound, std::size_t budget);

}  // namespace fifa
