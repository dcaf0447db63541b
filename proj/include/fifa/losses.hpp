#pragma once

#include <span>
#include <string>
#include <vector>

#include "fifa/margins.hpp"

namespace fifa {

enum class LossKind { ZeroOne, Hinge, SoftmaxCrossEntropy };

const char* to_string(LossKind kind);
LossKind loss_kind_from_string(const std::string& name);

/// Logits-based loss of the score vector for true class y.
/// zero_one is evaluation-only and has no gradient.
double base_loss(LossKind kind, std::span<const double> scores, int y);

/// Loss with the true-class logit shifted down by the schedule offset
/// Delta_{y,a}.  Competing logits are untouched.
double fifa_loss(LossKind kind, std::span<const double> scores, int y, int attr,
                 const MarginSchedule& schedule);

/// Gradient of fifa_loss with respect to the raw scores.  The hinge picks
/// the smallest-index maximizer among competitors and is zero at the kink.
void fifa_gradient(LossKind kind, std::span<const double> scores, int y, int attr,
                   const MarginSchedule& schedule, std::span<double> grad_out);

std::vector<double> fifa_gradient(LossKind kind, std::span<const double> scores, int y,
                                  int attr, const MarginSchedule& schedule);

/// Schedule with Delta identically zero, for which fifa_loss == base_loss.
MarginSchedule zero_schedule(int num_classes, int num_attributes);

}  // namespace fifa
