#include "fifa/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fifa {

const char* to_string(LossKind kind) {
    switch (kind) {
        case LossKind::ZeroOne: return "zero_one";
        case LossKind::Hinge: return "hinge";
        case LossKind::SoftmaxCrossEntropy: return "ce";
    }
    return "?";
}

LossKind loss_kind_from_string(const std::string& name) {
    if (name == "zero_one") return LossKind::ZeroOne;
    if (name == "hinge") return LossKind::Hinge;
    if (name == "ce" || name == "softmax_cross_entropy") return LossKind::SoftmaxCrossEntropy;
    throw std::runtime_error("unknown loss kind '" + name + "'");
}

namespace {

void check_inputs(std::span<const double> scores, int y) {
    if (scores.size() < 2) throw std::runtime_error("loss: need at least two classes");
    if (y < 0 || y >= static_cast<int>(scores.size()))
        throw std::runtime_error("loss: class index out of range");
}

// Loss of the (already shifted) true-class score against the competitors.
double loss_of_shifted(LossKind kind, std::span<const double> scores, int y,
                       double true_score) {
    double best_other = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < scores.size(); ++i)
        if (static_cast<int>(i) != y) best_other = std::max(best_other, scores[i]);

    switch (kind) {
        case LossKind::ZeroOne:
            return true_score < best_other ? 1.0 : 0.0;
        case LossKind::Hinge:
            return std::max(best_other - true_score, 0.0);
        case LossKind::SoftmaxCrossEntropy: {
            const double top = std::max(true_score, best_other);
            double denom = std::exp(true_score - top);
            for (std::size_t i = 0; i < scores.size(); ++i)
                if (static_cast<int>(i) != y) denom += std::exp(scores[i] - top);
            return -((true_score - top) - std::log(denom));
        }
    }
    throw std::runtime_error("loss: unknown kind");
}

}  // namespace

double base_loss(LossKind kind, std::span<const double> scores, int y) {
    check_inputs(scores, y);
    return loss_of_shifted(kind, scores, y, scores[y]);
}

double fifa_loss(LossKind kind, std::span<const double> scores, int y, int attr,
                 const MarginSchedule& schedule) {
    check_inputs(scores, y);
    if (y >= static_cast<int>(schedule.offsets.rows) ||
        attr < 0 || attr >= static_cast<int>(schedule.offsets.cols))
        throw std::runtime_error("fifa_loss: (class, attribute) not covered by the schedule");
    return loss_of_shifted(kind, scores, y, scores[y] - schedule.at(y, attr));
}

void fifa_gradient(LossKind kind, std::span<const double> scores, int y, int attr,
                   const MarginSchedule& schedule, std::span<double> grad_out) {
    check_inputs(scores, y);
    if (grad_out.size() != scores.size())
        throw std::runtime_error("fifa_gradient: output size mismatch");
    if (kind == LossKind::ZeroOne)
        throw std::runtime_error("fifa_gradient: zero_one loss is not differentiable");
    if (y >= static_cast<int>(schedule.offsets.rows) ||
        attr < 0 || attr >= static_cast<int>(schedule.offsets.cols))
        throw std::runtime_error("fifa_gradient: (class, attribute) not covered by the schedule");

    const int k = static_cast<int>(scores.size());
    const double true_score = scores[y] - schedule.at(y, attr);
    std::fill(grad_out.begin(), grad_out.end(), 0.0);

    if (kind == LossKind::Hinge) {
        int best = -1;
        double best_val = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < k; ++i) {
            if (i == y) continue;
            if (scores[i] > best_val) { best_val = scores[i]; best = i; }
        }
        if (best_val - true_score > 0.0) {
            grad_out[best] = 1.0;
            grad_out[y] = -1.0;
        }
        return;
    }

    // Softmax cross-entropy: gradient is softmax(shifted scores) - e_y.
    double top = true_score;
    for (int i = 0; i < k; ++i)
        if (i != y) top = std::max(top, scores[i]);
    double denom = 0.0;
    for (int i = 0; i < k; ++i) {
        const double s = (i == y ? true_score : scores[i]);
        grad_out[i] = std::exp(s - top);
        denom += grad_out[i];
    }
    for (int i = 0; i < k; ++i) grad_out[i] /= denom;
    grad_out[y] -= 1.0;
}

std::vector<double> fifa_gradient(LossKind kind, std::span<const double> scores, int y,
                                  int attr, const MarginSchedule& schedule) {
    std::vector<double> grad(scores.size());
    fifa_gradient(kind, scores, y, attr, schedule, grad);
    return grad;
}

MarginSchedule zero_schedule(int num_classes, int num_attributes) {
    MarginSchedule schedule;
    schedule.adjusted_sizes.assign(num_classes, 1.0);
    schedule.deltas = Matrix(num_classes, num_attributes);
    schedule.offsets = Matrix(num_classes, num_attributes);
    return schedule;
}

}  // namespace fifa
