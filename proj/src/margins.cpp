#include "fifa/margins.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fifa {

const char* to_string(ConstraintKind kind) {
    switch (kind) {
        case ConstraintKind::EqualizedOdds: return "eo";
        case ConstraintKind::DemographicParity: return "dp";
        case ConstraintKind::EqualizedOpportunity: return "eqopt";
    }
    return "?";
}

ConstraintKind constraint_kind_from_string(const std::string& name) {
    if (name == "eo") return ConstraintKind::EqualizedOdds;
    if (name == "dp") return ConstraintKind::DemographicParity;
    if (name == "eqopt") return ConstraintKind::EqualizedOpportunity;
    throw std::runtime_error("unknown constraint kind '" + name + "'");
}

bool MarginSchedule::all_zero() const {
    return std::all_of(offsets.data.begin(), offsets.data.end(),
                       [](double v) { return v == 0.0; });
}

namespace {

// n_adj = n_i * P / (sqrt(P) + alpha * sum_j sqrt(n_i * P / n_{i,j}))^2
// with P the product of the class's cell counts.
double adjusted_size_formula(const SubgroupCounts& counts, double alpha, int i) {
    const int m = static_cast<int>(counts.per_cell.cols);
    const double n_class = static_cast<double>(counts.per_class[i]);
    double product = 1.0;
    for (int a = 0; a < m; ++a) {
        const double c = counts.per_cell(i, a);
        if (c <= 0.0)
            throw std::runtime_error("adjusted_size: empty cell (class " + std::to_string(i) +
                                     ", attribute " + std::to_string(a) + ")");
        product *= c;
    }
    // The fairness term vanishes and sqrt(P)^2 round-trips inexactly, so
    // return the degenerate value directly.
    if (alpha == 0.0) return n_class;
    double cross = 0.0;
    for (int a = 0; a < m; ++a) cross += std::sqrt(n_class * product / counts.per_cell(i, a));
    const double denom = std::sqrt(product) + alpha * cross;
    return n_class * product / (denom * denom);
}

}  // namespace

double adjusted_size(const SubgroupCounts& counts, double alpha, ConstraintKind kind,
                     int class_index) {
    if (alpha < 0.0) throw std::runtime_error("adjusted_size: alpha must be non-negative");
    if (class_index < 0 || class_index >= static_cast<int>(counts.per_class.size()))
        throw std::runtime_error("adjusted_size: class index out of range");
    if (kind == ConstraintKind::EqualizedOpportunity) {
        if (counts.per_class.size() != 2)
            throw std::runtime_error("adjusted_size: EqOpt requires binary labels");
        if (class_index == 0) return static_cast<double>(counts.per_class[0]);
        return adjusted_size_formula(counts, alpha, 1);
    }
    return adjusted_size_formula(counts, alpha, class_index);
}

std::vector<double> class_margin_ratio(const std::vector<double>& adjusted_sizes) {
    if (adjusted_sizes.empty()) throw std::runtime_error("class_margin_ratio: empty input");
    std::vector<double> out(adjusted_sizes.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!(adjusted_sizes[i] > 0.0))
            throw std::runtime_error("class_margin_ratio: non-positive adjusted size");
        out[i] = std::pow(adjusted_sizes[i], -0.25);
    }
    const double top = *std::max_element(out.begin(), out.end());
    for (double& v : out) v /= top;
    return out;
}

std::vector<double> assign_deltas(const SubgroupCounts& counts, int class_index,
                                  const std::vector<double>& levels) {
    const int m = static_cast<int>(counts.per_cell.cols);
    if (static_cast<int>(levels.size()) != m)
        throw std::runtime_error("assign_deltas: need one level per attribute group");
    if (levels.front() != 0.0)
        throw std::runtime_error("assign_deltas: smallest level must be 0");
    if (!std::is_sorted(levels.begin(), levels.end()))
        throw std::runtime_error("assign_deltas: levels must be sorted non-decreasing");

    // Largest cell gets the smallest level; ties by attribute code.
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double ca = counts.per_cell(class_index, a);
        const double cb = counts.per_cell(class_index, b);
        if (ca != cb) return ca > cb;
        return a < b;
    });
    std::vector<double> deltas(m, 0.0);
    for (int rank = 0; rank < m; ++rank) deltas[order[rank]] = levels[rank];
    return deltas;
}

MarginSchedule build_schedule(const SubgroupCounts& counts, double scale, double alpha,
                              const std::vector<std::vector<double>>& delta_levels,
                              ConstraintKind kind) {
    if (scale < 0.0) throw std::runtime_error("build_schedule: C must be non-negative");
    const int k = static_cast<int>(counts.per_class.size());
    const int m = static_cast<int>(counts.per_cell.cols);

    MarginSchedule schedule;
    schedule.scale = scale;
    schedule.alpha = alpha;
    schedule.kind = kind;
    schedule.adjusted_sizes.resize(k);
    schedule.deltas = Matrix(k, m);
    schedule.offsets = Matrix(k, m);
    for (int i = 0; i < k; ++i) {
        schedule.adjusted_sizes[i] = adjusted_size(counts, alpha, kind, i);
        const std::vector<double> levels =
            delta_levels.empty() ? std::vector<double>(m, 0.0) : delta_levels.at(i);
        const std::vector<double> deltas = assign_deltas(counts, i, levels);
        const double base = scale / std::pow(schedule.adjusted_sizes[i], 0.25);
        for (int a = 0; a < m; ++a) {
            schedule.deltas(i, a) = deltas[a];
            schedule.offsets(i, a) = base + deltas[a];
        }
    }
    return schedule;
}

}  // namespace fifa
