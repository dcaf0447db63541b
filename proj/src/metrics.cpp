#include "fifa/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fifa {

namespace {

// Per-class misclassification rates; errors if a class is absent.
std::vector<double> class_error_rates(const std::vector<int>& preds,
                                      const LabeledDataset& data) {
    if (preds.size() != data.size())
        throw std::runtime_error("metrics: prediction/data length mismatch");
    const int k = data.num_classes();
    std::vector<std::size_t> total(k, 0), wrong(k, 0);
    for (std::size_t j = 0; j < data.size(); ++j) {
        total[data.labels[j]] += 1;
        if (preds[j] != data.labels[j]) wrong[data.labels[j]] += 1;
    }
    std::vector<double> rates(k);
    for (int i = 0; i < k; ++i) {
        if (total[i] == 0)
            throw std::runtime_error("balanced_error: class " + std::to_string(i) +
                                     " has no samples");
        rates[i] = static_cast<double>(wrong[i]) / static_cast<double>(total[i]);
    }
    return rates;
}

// rates(i, a) = P(pred = i | Y = i, A = a); errors on an empty cell.
Matrix label_conditional_rates(const std::vector<int>& preds, const LabeledDataset& data) {
    const int k = data.num_classes();
    const int m = data.num_attributes();
    Matrix hits(k, m), total(k, m);
    for (std::size_t j = 0; j < data.size(); ++j) {
        total(data.labels[j], data.attributes[j]) += 1.0;
        if (preds[j] == data.labels[j]) hits(data.labels[j], data.attributes[j]) += 1.0;
    }
    Matrix rates(k, m);
    for (int i = 0; i < k; ++i)
        for (int a = 0; a < m; ++a) {
            if (total(i, a) == 0.0)
                throw std::runtime_error("fairness metric: empty cell (class " +
                                         std::to_string(i) + ", attribute " +
                                         std::to_string(a) + ")");
            rates(i, a) = hits(i, a) / total(i, a);
        }
    return rates;
}

// rates(i, a) = P(pred = i | A = a); errors on an empty attribute group.
Matrix group_prediction_rates(const std::vector<int>& preds, const LabeledDataset& data) {
    const int k = data.num_classes();
    const int m = data.num_attributes();
    std::vector<double> total(m, 0.0);
    Matrix hits(k, m);
    for (std::size_t j = 0; j < data.size(); ++j) {
        total[data.attributes[j]] += 1.0;
        hits(preds[j], data.attributes[j]) += 1.0;
    }
    Matrix rates(k, m);
    for (int a = 0; a < m; ++a) {
        if (total[a] == 0.0)
            throw std::runtime_error("dp_violation: attribute group " + std::to_string(a) +
                                     " has no samples");
        for (int i = 0; i < k; ++i) rates(i, a) = hits(i, a) / total[a];
    }
    return rates;
}

// Sum over the listed classes and unordered attribute pairs of rate gaps.
double pairwise_gap_sum(const Matrix& rates, int class_begin, int class_end) {
    double sum = 0.0;
    for (int i = class_begin; i < class_end; ++i)
        for (std::size_t a = 0; a < rates.cols; ++a)
            for (std::size_t b = a + 1; b < rates.cols; ++b)
                sum += std::abs(rates(i, a) - rates(i, b));
    return sum;
}

}  // namespace

double balanced_error(const std::vector<int>& preds, const LabeledDataset& data) {
    const std::vector<double> rates = class_error_rates(preds, data);
    double sum = 0.0;
    for (double r : rates) sum += r;
    return sum / static_cast<double>(rates.size());
}

double total_error(const std::vector<int>& preds, const LabeledDataset& data) {
    if (preds.size() != data.size())
        throw std::runtime_error("metrics: prediction/data length mismatch");
    std::size_t wrong = 0;
    for (std::size_t j = 0; j < data.size(); ++j)
        if (preds[j] != data.labels[j]) ++wrong;
    return static_cast<double>(wrong) / static_cast<double>(data.size());
}

double eo_violation(const std::vector<int>& preds, const LabeledDataset& data) {
    const Matrix rates = label_conditional_rates(preds, data);
    return pairwise_gap_sum(rates, 0, data.num_classes());
}

double eqopt_violation(const std::vector<int>& preds, const LabeledDataset& data) {
    if (data.num_classes() != 2)
        throw std::runtime_error("eqopt_violation: requires binary labels");
    const Matrix rates = label_conditional_rates(preds, data);
    return pairwise_gap_sum(rates, 1, 2);
}

double dp_violation(const std::vector<int>& preds, const LabeledDataset& data) {
    const Matrix rates = group_prediction_rates(preds, data);
    return pairwise_gap_sum(rates, 0, data.num_classes());
}

double fairness_violation(ConstraintKind kind, const std::vector<int>& preds,
                          const LabeledDataset& data) {
    switch (kind) {
        case ConstraintKind::EqualizedOdds: return eo_violation(preds, data);
        case ConstraintKind::DemographicParity: return dp_violation(preds, data);
        case ConstraintKind::EqualizedOpportunity: return eqopt_violation(preds, data);
    }
    throw std::runtime_error("fairness_violation: unknown kind");
}

double combined_loss(double balanced, double violation) {
    if (balanced < 0.0 || violation < 0.0)
        throw std::runtime_error("combined_loss: inputs must be non-negative");
    return 0.5 * balanced + 0.5 * violation;
}

double generalization_gap(double train_value, double test_value) {
    return std::abs(test_value - train_value);
}

namespace {

FairnessReport report_from_member_stats(ConstraintKind kind,
                                        const std::vector<double>& class_errors,
                                        const Matrix& rates, double total_err) {
    FairnessReport report;
    report.kind = kind;
    report.total_error = total_err;
    double bal = 0.0;
    for (double r : class_errors) bal += r;
    report.balanced_error = bal / static_cast<double>(class_errors.size());
    report.per_cell_rates = rates;
    if (kind == ConstraintKind::EqualizedOpportunity)
        report.fairness_violation = pairwise_gap_sum(rates, 1, 2);
    else
        report.fairness_violation = pairwise_gap_sum(rates, 0, static_cast<int>(rates.rows));
    report.combined_loss = combined_loss(report.balanced_error, report.fairness_violation);
    return report;
}

}  // namespace

FairnessReport evaluate(const LinearScorer& scorer, const LabeledDataset& data,
                        ConstraintKind kind) {
    RandomizedClassifier single;
    single.members.push_back(scorer);
    single.q.push_back(1.0);
    return evaluate(single, data, kind);
}

FairnessReport evaluate(const RandomizedClassifier& mixture, const LabeledDataset& data,
                        ConstraintKind kind) {
    mixture.validate();
    if (mixture.members.empty())
        throw std::runtime_error("evaluate: empty classifier mixture");
    const bool dp = kind == ConstraintKind::DemographicParity;
    if (kind == ConstraintKind::EqualizedOpportunity && data.num_classes() != 2)
        throw std::runtime_error("evaluate: EqOpt requires binary labels");

    std::vector<double> class_errors(data.num_classes(), 0.0);
    Matrix rates(data.num_classes(), data.num_attributes());
    double total_err = 0.0;
    for (std::size_t h = 0; h < mixture.members.size(); ++h) {
        const std::vector<int> preds = predict_all(mixture.members[h], data);
        const std::vector<double> ce = class_error_rates(preds, data);
        const Matrix r = dp ? group_prediction_rates(preds, data)
                            : label_conditional_rates(preds, data);
        const double w = mixture.q[h];
        for (std::size_t i = 0; i < ce.size(); ++i) class_errors[i] += w * ce[i];
        for (std::size_t i = 0; i < rates.data.size(); ++i) rates.data[i] += w * r.data[i];
        total_err += w * total_error(preds, data);
    }
    return report_from_member_stats(kind, class_errors, rates, total_err);
}

}  // namespace fifa
