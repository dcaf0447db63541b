#include "fifa/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "fifa/rng.hpp"

namespace fifa {

namespace {

double row_norm(const double* v, std::size_t d) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += v[i] * v[i];
    return std::sqrt(s);
}

void score_into(const LinearScorer& scorer, const double* x, double inv_norm, double* out) {
    const std::size_t d = scorer.dim();
    const int k = scorer.num_classes();
    for (int c = 0; c < k; ++c) {
        const double* w = scorer.weights.row(c);
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) s += w[i] * x[i];
        s *= inv_norm;
        if (!scorer.bias.empty()) s += scorer.bias[c];
        out[c] = s;
    }
}

double input_scale(const LinearScorer& scorer, const double* x) {
    if (!scorer.normalized) return 1.0;
    const double nrm = row_norm(x, scorer.dim());
    return nrm > 0.0 ? 1.0 / nrm : 1.0;  // zero vectors pass through unscaled
}

}  // namespace

void score(const LinearScorer& scorer, std::span<const double> x, std::span<double> out) {
    if (x.size() != scorer.dim())
        throw std::runtime_error("score: input has " + std::to_string(x.size()) +
                                 " entries, scorer expects " + std::to_string(scorer.dim()));
    if (out.size() != static_cast<std::size_t>(scorer.num_classes()))
        throw std::runtime_error("score: output size mismatch");
    score_into(scorer, x.data(), input_scale(scorer, x.data()), out.data());
}

std::vector<double> score(const LinearScorer& scorer, std::span<const double> x) {
    std::vector<double> out(scorer.num_classes());
    score(scorer, x, out);
    return out;
}

int predict(const LinearScorer& scorer, std::span<const double> x) {
    const std::vector<double> s = score(scorer, x);
    int best = 0;
    for (int i = 1; i < static_cast<int>(s.size()); ++i)
        if (s[i] > s[best]) best = i;  // ties keep the smaller index
    return best;
}

std::vector<int> predict_all(const LinearScorer& scorer, const LabeledDataset& data) {
    if (data.dim() != scorer.dim())
        throw std::runtime_error("predict_all: feature dimension mismatch");
    std::vector<int> preds(data.size());
    std::vector<double> s(scorer.num_classes());
    for (std::size_t j = 0; j < data.size(); ++j) {
        const double* x = data.features.row(j);
        score_into(scorer, x, input_scale(scorer, x), s.data());
        int best = 0;
        for (int i = 1; i < static_cast<int>(s.size()); ++i)
            if (s[i] > s[best]) best = i;
        preds[j] = best;
    }
    return preds;
}

void RandomizedClassifier::validate() const {
    if (members.size() != q.size())
        throw std::runtime_error("randomized classifier: member/weight count mismatch");
    double sum = 0.0;
    for (double w : q) {
        if (w < 0.0) throw std::runtime_error("randomized classifier: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::runtime_error("randomized classifier: weights sum to " + std::to_string(sum));
}

LinearScorer train(const LabeledDataset& data, const std::vector<int>& labels_override,
                   const std::vector<double>& sample_weights, LossKind loss,
                   const MarginSchedule& schedule, const TrainConfig& config) {
    const std::size_t n = data.size();
    const std::size_t d = data.dim();
    const int k = std::max(data.num_classes(), 2);
    if (n == 0) throw std::runtime_error("train: empty dataset");
    if (!labels_override.empty() && labels_override.size() != n)
        throw std::runtime_error("train: labels_override length mismatch");
    if (sample_weights.size() != n)
        throw std::runtime_error("train: sample_weights length mismatch");

    double weight_sum = 0.0;
    for (double w : sample_weights) {
        if (w < 0.0) throw std::runtime_error("train: negative sample weight");
        weight_sum += w;
    }
    if (weight_sum <= 0.0) throw std::runtime_error("train: all sample weights are zero");

    const std::vector<int>& targets = labels_override.empty() ? data.labels : labels_override;

    LinearScorer scorer;
    scorer.weights = Matrix(k, d);
    scorer.normalized = config.normalized;
    if (config.use_bias) scorer.bias.assign(k, 0.0);
    {
        std::mt19937_64 gen(derive_seed(config.seed, "init"));
        for (double& w : scorer.weights.data) w = uniform(gen, -0.01, 0.01);
    }
    if (scorer.normalized)
        for (int c = 0; c < k; ++c) {
            const double nrm = row_norm(scorer.weights.row(c), d);
            if (nrm > 0.0)
                for (std::size_t i = 0; i < d; ++i) scorer.weights(c, i) /= nrm;
        }

    const std::size_t batch = (config.batch_size <= 0 ||
                               static_cast<std::size_t>(config.batch_size) >= n)
                                  ? n
                                  : static_cast<std::size_t>(config.batch_size);
    std::mt19937_64 shuffle_gen(derive_seed(config.seed, "shuffle"));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    const std::size_t nparams = k * d + (config.use_bias ? k : 0);
    std::vector<double> grad(nparams), m1(nparams, 0.0), m2(nparams, 0.0);
    std::vector<double> scores(k), g(k);
    std::size_t step = 0;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        if (batch < n) {
            for (std::size_t i = n; i > 1; --i)
                std::swap(order[i - 1], order[shuffle_gen() % i]);
        }
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n; start += batch) {
            const std::size_t stop = std::min(start + batch, n);
            std::fill(grad.begin(), grad.end(), 0.0);
            double batch_weight = 0.0;
            for (std::size_t p = start; p < stop; ++p) batch_weight += sample_weights[order[p]];
            if (batch_weight <= 0.0) continue;

            for (std::size_t p = start; p < stop; ++p) {
                const std::size_t j = order[p];
                const double wj = sample_weights[j];
                if (wj == 0.0) continue;
                const double* x = data.features.row(j);
                const double scale = input_scale(scorer, x);
                score_into(scorer, x, scale, scores.data());
                epoch_loss += wj * fifa_loss(loss, scores, targets[j], data.attributes[j], schedule);
                fifa_gradient(loss, scores, targets[j], data.attributes[j], schedule, g);
                const double f = wj / batch_weight;
                for (int c = 0; c < k; ++c) {
                    const double gc = f * g[c] * scale;
                    if (gc != 0.0) {
                        double* wrow = grad.data() + static_cast<std::size_t>(c) * d;
                        for (std::size_t i = 0; i < d; ++i) wrow[i] += gc * x[i];
                    }
                    if (config.use_bias) grad[k * d + c] += f * g[c];
                }
            }
            // Additive L2 penalty on the weight matrix (bias excluded).
            if (config.weight_decay > 0.0)
                for (std::size_t i = 0; i < static_cast<std::size_t>(k) * d; ++i)
                    grad[i] += 2.0 * config.weight_decay * scorer.weights.data[i];

            ++step;
            auto param = [&](std::size_t i) -> double& {
                return i < static_cast<std::size_t>(k) * d ? scorer.weights.data[i]
                                                           : scorer.bias[i - k * d];
            };
            if (config.optimizer == Optimizer::PlainGd) {
                for (std::size_t i = 0; i < nparams; ++i) param(i) -= config.step_size * grad[i];
            } else {
                const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
                const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
                for (std::size_t i = 0; i < nparams; ++i) {
                    m1[i] = config.beta1 * m1[i] + (1.0 - config.beta1) * grad[i];
                    m2[i] = config.beta2 * m2[i] + (1.0 - config.beta2) * grad[i] * grad[i];
                    param(i) -= config.step_size * (m1[i] / bc1) /
                                (std::sqrt(m2[i] / bc2) + config.moment_eps);
                }
            }
            if (scorer.normalized)
                for (int c = 0; c < k; ++c) {
                    const double nrm = row_norm(scorer.weights.row(c), d);
                    if (nrm > 0.0)
                        for (std::size_t i = 0; i < d; ++i) scorer.weights(c, i) /= nrm;
                }
        }
        if (!std::isfinite(epoch_loss))
            throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch));
    }
    return scorer;
}

LinearScorer train(const LabeledDataset& data, LossKind loss, const MarginSchedule& schedule,
                   const TrainConfig& config) {
    return train(data, {}, std::vector<double>(data.size(), 1.0), loss, schedule, config);
}

MarginDiagnostics empirical_margins(const LinearScorer& scorer, const LabeledDataset& data) {
    const int k = data.num_classes();
    const int m = data.num_attributes();
    MarginDiagnostics diag;
    diag.class_margins.assign(k, std::nullopt);
    diag.cell_margins.assign(k, std::vector<std::optional<double>>(m, std::nullopt));
    std::vector<double> s(scorer.num_classes());
    for (std::size_t j = 0; j < data.size(); ++j) {
        const double* x = data.features.row(j);
        score_into(scorer, x, input_scale(scorer, x), s.data());
        const int y = data.labels[j];
        double best_other = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < static_cast<int>(s.size()); ++i)
            if (i != y) best_other = std::max(best_other, s[i]);
        const double margin = s[y] - best_other;
        auto& cell = diag.cell_margins[y][data.attributes[j]];
        if (!cell || margin < *cell) cell = margin;
        auto& cls = diag.class_margins[y];
        if (!cls || margin < *cls) cls = margin;
    }
    return diag;
}

std::string scorer_to_json(const LinearScorer& scorer) {
    nlohmann::json j;
    j["rows"] = scorer.weights.rows;
    j["cols"] = scorer.weights.cols;
    j["weights"] = scorer.weights.data;
    j["bias"] = scorer.bias;
    j["normalized"] = scorer.normalized;
    return j.dump();
}

LinearScorer scorer_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    LinearScorer scorer;
    scorer.weights.rows = j.at("rows").get<std::size_t>();
    scorer.weights.cols = j.at("cols").get<std::size_t>();
    scorer.weights.data = j.at("weights").get<std::vector<double>>();
    if (scorer.weights.data.size() != scorer.weights.rows * scorer.weights.cols)
        throw std::runtime_error("scorer_from_json: shape header disagrees with payload");
    scorer.bias = j.at("bias").get<std::vector<double>>();
    scorer.normalized = j.at("normalized").get<bool>();
    return scorer;
}

}  // namespace fifa
