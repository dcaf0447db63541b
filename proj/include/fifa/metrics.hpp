#pragma once

#include <vector>

#include "fifa/dataset.hpp"
#include "fifa/margins.hpp"
#include "fifa/model.hpp"

namespace fifa {

struct FairnessReport {
    double balanced_error = 0.0;
    double fairness_violation = 0.0;
    double combined_loss = 0.0;        // always 0.5 * balanced + 0.5 * violation
    double total_error = 0.0;
    Matrix per_cell_rates;             // conditional prediction rates, k x m
    ConstraintKind kind = ConstraintKind::EqualizedOdds;
};

/// Mean over classes of the per-class misclassification rate.  Every class
/// must be present in the data.
double balanced_error(const std::vector<int>& preds, const LabeledDataset& data);

double total_error(const std::vector<int>& preds, const LabeledDataset& data);

/// Sum over classes and unordered attribute pairs of
/// |P(h=i | Y=i, A=a) - P(h=i | Y=i, A=a')|.
double eo_violation(const std::vector<int>& preds, const LabeledDataset& data);

/// EO restricted to the positive class; binary labels only.
double eqopt_violation(const std::vector<int>& preds, const LabeledDataset& data);

/// Sum over classes and unordered attribute pairs of
/// |P(h=i | A=a) - P(h=i | A=a')|.
double dp_violation(const std::vector<int>& preds, const LabeledDataset& data);

double fairness_violation(ConstraintKind kind, const std::vector<int>& preds,
                          const LabeledDataset& data);

/// Equal-weight average of balanced error and fairness violation.
double combined_loss(double balanced, double violation);

/// |test - train|.
double generalization_gap(double train_value, double test_value);

FairnessReport evaluate(const LinearScorer& scorer, const LabeledDataset& data,
                        ConstraintKind kind);

/// Rates and errors are Q-weighted averages over the mixture members;
/// violations are computed from the averaged rates.
FairnessReport evaluate(const RandomizedClassifier& mixture, const LabeledDataset& data,
                        ConstraintKind kind);

}  // namespace fifa
