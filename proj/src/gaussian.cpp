#include "fifa/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "fifa/rng.hpp"

namespace fifa {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const std::vector<double>& v) { return std::sqrt(dot(v, v)); }

}  // namespace

void GaussianSpec::validate() const {
    if (mu1.size() != dim || mu2.size() != dim || beta.size() != dim)
        throw std::runtime_error("gaussian spec: vector dimensions disagree");
    if (norm(beta) == 0.0) throw std::runtime_error("gaussian spec: beta must be nonzero");
    for (double p : {pi0[0], pi0[1], pi1[0], pi1[1]})
        if (p < 0.0) throw std::runtime_error("gaussian spec: negative mixture weight");
    if (std::abs(pi0[0] + pi0[1] - 1.0) > 1e-12 || std::abs(pi1[0] + pi1[1] - 1.0) > 1e-12)
        throw std::runtime_error("gaussian spec: class mixture weights must sum to 1");
    if (alpha < 0.0) throw std::runtime_error("gaussian spec: alpha must be non-negative");
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double criterion_closed_form(const GaussianSpec& spec, double threshold) {
    spec.validate();
    const double bn = norm(spec.beta);
    const double b2 = bn * bn;
    const double bm1 = dot(spec.beta, spec.mu1);
    const double bm2 = dot(spec.beta, spec.mu2);
    const double c = threshold;

    // Class-balanced error of 1{beta.x > c}: class 0 errs when beta.x > c,
    // class 1 (means shifted by beta) errs when beta.x <= c.
    const double err0 = spec.pi0[0] * normal_cdf((bm1 - c) / bn) +
                        spec.pi0[1] * normal_cdf((bm2 - c) / bn);
    const double err1 = spec.pi1[0] * normal_cdf((c - bm1 - b2) / bn) +
                        spec.pi1[1] * normal_cdf((c - bm2 - b2) / bn);

    // Subgroup rate gaps within each class.
    const double gap0 = std::abs(normal_cdf((bm1 - c) / bn) - normal_cdf((bm2 - c) / bn));
    const double gap1 = std::abs(normal_cdf((bm1 + b2 - c) / bn) -
                                 normal_cdf((bm2 + b2 - c) / bn));

    return 0.5 * err0 + 0.5 * err1 + spec.alpha * gap0 + spec.alpha * gap1;
}

double threshold_for_ratio(const GaussianSpec& spec, double gamma_ratio) {
    spec.validate();
    if (!(gamma_ratio > 0.0))
        throw std::runtime_error("threshold_for_ratio: ratio must be positive");
    const double b2 = dot(spec.beta, spec.beta);
    return dot(spec.beta, spec.mu1) + b2 / (1.0 + gamma_ratio);
}

Example1Comparison compare_example1(const GaussianSpec& spec, const SubgroupCounts& counts) {
    spec.validate();
    if (counts.per_class.size() != 2)
        throw std::runtime_error("compare_example1: binary classes required");

    Example1Comparison out;
    const double n0 = static_cast<double>(counts.per_class[0]);
    const double n1 = static_cast<double>(counts.per_class[1]);
    const double adj0 = adjusted_size(counts, spec.alpha, ConstraintKind::EqualizedOdds, 0);
    const double adj1 = adjusted_size(counts, spec.alpha, ConstraintKind::EqualizedOdds, 1);
    out.gamma_plain = std::pow(n1 / n0, 0.25);
    out.gamma_fifa = std::pow(adj1 / adj0, 0.25);
    out.criterion_plain = criterion_closed_form(spec, threshold_for_ratio(spec, out.gamma_plain));
    out.criterion_fifa = criterion_closed_form(spec, threshold_for_ratio(spec, out.gamma_fifa));
    out.fifa_wins = out.criterion_fifa < out.criterion_plain;
    return out;
}

LabeledDataset sample(const GaussianSpec& spec, std::size_t n0, std::size_t n1,
                      std::uint64_t seed) {
    spec.validate();
    if (n0 == 0 || n1 == 0) throw std::runtime_error("sample: counts must be positive");

    LabeledDataset data;
    data.class_names = {"0", "1"};
    data.attribute_names = {"a1", "a2"};
    for (std::size_t i = 0; i < spec.dim; ++i)
        data.feature_names.push_back("x" + std::to_string(i));
    const std::size_t n = n0 + n1;
    data.features = Matrix(n, spec.dim);
    data.labels.resize(n);
    data.attributes.resize(n);

    std::mt19937_64 gen(seed);
    for (std::size_t j = 0; j < n; ++j) {
        const int y = j < n0 ? 0 : 1;
        const double p_first = y == 0 ? spec.pi0[0] : spec.pi1[0];
        const int a = uniform01(gen) < p_first ? 0 : 1;
        const std::vector<double>& mu = a == 0 ? spec.mu1 : spec.mu2;
        for (std::size_t i = 0; i < spec.dim; ++i) {
            double v = mu[i] + standard_normal(gen);
            if (y == 1) v += spec.beta[i];
            data.features(j, i) = v;
        }
        data.labels[j] = y;
        data.attributes[j] = a;
    }
    return data;
}

}  // namespace fifa
