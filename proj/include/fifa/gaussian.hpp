#pragma once

#include <cstdint>
#include <vector>

#include "fifa/dataset.hpp"
#include "fifa/margins.hpp"

namespace fifa {

/// Two-component Gaussian mixture per class: class 0 draws subgroup a_i
/// from pi0 and then N(mu_i, I); class 1 shifts the means by beta.
struct GaussianSpec {
    std::size_t dim = 1;
    std::vector<double> mu1;
    std::vector<double> mu2;
    std::vector<double> beta;       // separation direction, nonzero
    double pi0[2] = {0.5, 0.5};     // subgroup weights within class 0
    double pi1[2] = {0.5, 0.5};     // subgroup weights within class 1
    double alpha = 1.0;

    void validate() const;
};

/// Predicts 1 when beta . x > c.
struct ThresholdClassifier {
    double threshold = 0.0;
};

/// Standard normal CDF, accurate to ~1e-15 relative via erfc.
double normal_cdf(double x);

/// Closed-form performance criterion (balanced error plus alpha-weighted
/// fairness terms) of the threshold classifier on the mixture.
double criterion_closed_form(const GaussianSpec& spec, double threshold);

/// Population threshold c = beta.mu1 + |beta|^2 / (1 + gamma) for a class
/// margin ratio gamma = gamma0/gamma1.
double threshold_for_ratio(const GaussianSpec& spec, double gamma_ratio);

struct Example1Comparison {
    double gamma_plain = 0.0;   // (n1/n0)^{1/4}
    double gamma_fifa = 0.0;    // (n1_adj/n0_adj)^{1/4}
    double criterion_plain = 0.0;
    double criterion_fifa = 0.0;
    bool fifa_wins = false;
};

/// Evaluates both margin-ratio choices through the closed form.
Example1Comparison compare_example1(const GaussianSpec& spec, const SubgroupCounts& counts);

/// Seeded draw of n0 + n1 samples; the attribute code records the mixture
/// component that generated each point.
LabeledDataset sample(const GaussianSpec& spec, std::size_t n0, std::size_t n1,
                      std::uint64_t seed);

}  // namespace fifa
