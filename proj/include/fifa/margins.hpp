#pragma once

#include <optional>
#include <vector>

#include "fifa/dataset.hpp"

namespace fifa {

enum class ConstraintKind { EqualizedOdds, DemographicParity, EqualizedOpportunity };

const char* to_string(ConstraintKind kind);
ConstraintKind constraint_kind_from_string(const std::string& name);

/// Per-(class, attribute) margin schedule Delta[i][a] = C / n_adj_i^{1/4} + delta[i][a].
struct MarginSchedule {
    double scale = 0.0;                    // C
    double alpha = 0.0;
    std::vector<double> adjusted_sizes;    // length k
    Matrix deltas;                         // k x m
    Matrix offsets;                        // k x m, the Delta matrix
    ConstraintKind kind = ConstraintKind::EqualizedOdds;

    double at(int cls, int attr) const { return offsets(cls, attr); }
    bool all_zero() const;
};

/// Empirical minimum margins per class and per cell; cells with no samples
/// are reported as absent.
struct MarginDiagnostics {
    std::vector<std::optional<double>> class_margins;
    std::vector<std::vector<std::optional<double>>> cell_margins;
};

/// Adjusted per-class sample size.  EO and DP share the multi-group form
///   n_adj_i = n_i * P / (sqrt(P) + alpha * sum_j sqrt(n_i * P / n_{i,j}))^2,
/// with P the product of the class's cell counts.  EqualizedOpportunity
/// adjusts only class 1 and leaves class 0 at n_0.
double adjusted_size(const SubgroupCounts& counts, double alpha,
                     ConstraintKind kind, int class_index);

/// Normalized vector proportional to adjusted_sizes^{-1/4}, max entry 1.
std::vector<double> class_margin_ratio(const std::vector<double>& adjusted_sizes);

/// Assigns the sorted non-negative levels (levels[0] must be 0) to the
/// attributes of one class: the biggest cell receives 0, the smallest the
/// largest level.  Equal-count cells break ties by attribute code.
std::vector<double> assign_deltas(const SubgroupCounts& counts, int class_index,
                                  const std::vector<double>& levels);

/// delta_levels[i] are the levels for class i; an empty outer vector means
/// all-zero deltas.
MarginSchedule build_schedule(const SubgroupCounts& counts, double scale, double alpha,
                              const std::vector<std::vector<double>>& delta_levels,
                              ConstraintKind kind);

}  // namespace fifa
