#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fifa/dataset.hpp"
#include "fifa/losses.hpp"

namespace fifa {

/// Multi-class linear scorer.  When `normalized` is set each weight row is
/// rescaled to unit Euclidean norm after every update and inputs are
/// rescaled to unit norm at scoring time.
struct LinearScorer {
    Matrix weights;             // k x d
    std::vector<double> bias;   // length k; empty means no bias
    bool normalized = false;

    int num_classes() const { return static_cast<int>(weights.rows); }
    std::size_t dim() const { return weights.cols; }
};

enum class Optimizer { PlainGd, AdaptiveMoments };

struct TrainConfig {
    double step_size = 1e-4;
    double weight_decay = 5e-5;
    int epochs = 1000;
    int batch_size = 0;             // 0 means full batch
    std::uint64_t seed = 1;
    Optimizer optimizer = Optimizer::AdaptiveMoments;
    bool use_bias = true;
    bool normalized = false;
    // Fixed moment constants for the adaptive optimizer.
    double beta1 = 0.9;
    double beta2 = 0.999;
    double moment_eps = 1e-8;
};

void score(const LinearScorer& scorer, std::span<const double> x, std::span<double> out);
std::vector<double> score(const LinearScorer& scorer, std::span<const double> x);

/// Argmax with ties broken by smallest class index.
int predict(const LinearScorer& scorer, std::span<const double> x);

std::vector<int> predict_all(const LinearScorer& scorer, const LabeledDataset& data);

/// Minimizes (1/sum w) * sum_j w_j * fifa_loss(f(x_j), y~_j, a_j) + wd * |W|^2
/// with the configured first-order method.  `labels_override`, when
/// non-empty, replaces the dataset labels both as training targets and in
/// the Delta lookup (the attribute stays the true one).
LinearScorer train(const LabeledDataset& data,
                   const std::vector<int>& labels_override,
                   const std::vector<double>& sample_weights,
                   LossKind loss, const MarginSchedule& schedule,
                   const TrainConfig& config);

/// Convenience: true labels, unit weights.
LinearScorer train(const LabeledDataset& data, LossKind loss,
                   const MarginSchedule& schedule, const TrainConfig& config);

/// Probability mixture over trained scorers.
struct RandomizedClassifier {
    std::vector<LinearScorer> members;
    std::vector<double> q;      // non-negative, sums to 1

    void validate() const;
};

/// Minimum score margin f(x)_y - max_{l != y} f(x)_l over each class and
/// each (class, attribute) cell.
MarginDiagnostics empirical_margins(const LinearScorer& scorer, const LabeledDataset& data);

std::string scorer_to_json(const LinearScorer& scorer);
LinearScorer scorer_from_json(const std::string& text);

}  // namespace fifa
