#include "fifa/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "fifa/gaussian.hpp"
#include "fifa/rng.hpp"

namespace fifa {

const char* to_string(Algorithm a) {
    switch (a) {
        case Algorithm::Plain: return "plain";
        case Algorithm::ExpGrad: return "expgrad";
        case Algorithm::GridSearch: return "gridsearch";
    }
    return "?";
}

Algorithm algorithm_from_string(const std::string& name) {
    if (name == "plain") return Algorithm::Plain;
    if (name == "expgrad") return Algorithm::ExpGrad;
    if (name == "gridsearch") return Algorithm::GridSearch;
    throw std::runtime_error("unknown algorithm '" + name + "'");
}

RunRecord run_on(const ExperimentConfig& config, const LabeledDataset& train_data,
                 const LabeledDataset& test_data) {
    const auto t0 = std::chrono::steady_clock::now();

    RunRecord record;
    record.config = config;

    const SubgroupCounts counts = census(train_data);
    const MarginSchedule schedule = build_schedule(counts, config.margin_scale, config.alpha,
                                                   config.delta_levels, config.kind);

    TrainConfig train_config = config.train;
    train_config.seed = derive_seed(config.seed, "train");

    if (config.algorithm == Algorithm::Plain) {
        const LinearScorer scorer =
            train(train_data, config.loss, schedule, train_config);
        record.train_report = evaluate(scorer, train_data, config.kind);
        record.test_report = evaluate(scorer, test_data, config.kind);
    } else {
        const ConstraintSystem system = build_constraints(config.kind, train_data, config.eps);
        if (config.algorithm == Algorithm::ExpGrad) {
            ExpGradConfig eg = config.expgrad;
            eg.inner = train_config;
            eg.loss = config.loss;
            const ExpGradResult result = expgrad(train_data, system, schedule, eg);
            record.certificate = result.certificate;
            record.train_report = evaluate(result.classifier, train_data, config.kind);
            record.test_report = evaluate(result.classifier, test_data, config.kind);
        } else {
            const auto grid = make_lambda_grid(system, config.expgrad.bound, config.grid_budget);
            const GridSearchResult result =
                grid_search(train_data, system, schedule, grid, train_config, config.loss);
            record.grid_feasible = result.feasible;
            record.train_report = evaluate(result.best, train_data, config.kind);
            record.test_report = evaluate(result.best, test_data, config.kind);
        }
    }

    record.combined_gap = generalization_gap(record.train_report.combined_loss,
                                             record.test_report.combined_loss);
    record.fairness_gap = generalization_gap(record.train_report.fairness_violation,
                                             record.test_report.fairness_violation);
    record.balanced_gap = generalization_gap(record.train_report.balanced_error,
                                             record.test_report.balanced_error);
    record.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return record;
}

RunRecord run(const ExperimentConfig& config) {
    const LabeledDataset full = load_table(config.dataset_path, config.schema);
    auto [train_raw, test_raw] =
        split(full, config.split_ratio, derive_seed(config.seed, "split"));
    auto [train_std, test_std] = standardize(train_raw, test_raw);
    return run_on(config, train_std, test_std);
}

namespace {

// Draws one trial's hyper-parameters from the sweep ranges; the anchor cell
// of each class keeps delta 0, the others share one sampled level.
ExperimentConfig trial_config(const SweepConfig& sweep_config, std::size_t trial,
                              int num_classes, int num_attributes) {
    ExperimentConfig cfg = sweep_config.base;
    cfg.seed = derive_seed(sweep_config.base.seed, "trial", trial);

    double u_c = 0.0, u_a = 0.0, u_d = 0.0;
    if (sweep_config.strategy == SweepStrategy::SeededRandom) {
        std::mt19937_64 gen(derive_seed(sweep_config.base.seed, "trial-params", trial));
        u_c = uniform01(gen);
        u_a = uniform01(gen);
        u_d = uniform01(gen);
    } else {
        // Grid strategy: evenly spaced along the diagonal of the box.
        u_c = u_a = u_d = sweep_config.budget <= 1
                              ? 0.0
                              : static_cast<double>(trial) /
                                    static_cast<double>(sweep_config.budget - 1);
    }
    cfg.margin_scale = sweep_config.scale_range.lo +
                       u_c * (sweep_config.scale_range.hi - sweep_config.scale_range.lo);
    cfg.alpha = sweep_config.alpha_range.lo +
                u_a * (sweep_config.alpha_range.hi - sweep_config.alpha_range.lo);
    const double level = sweep_config.delta_range.lo +
                         u_d * (sweep_config.delta_range.hi - sweep_config.delta_range.lo);
    cfg.delta_levels.assign(num_classes, [&] {
        std::vector<double> levels(num_attributes, level);
        levels[0] = 0.0;
        return levels;
    }());
    return cfg;
}

}  // namespace

SweepResult sweep_on(const SweepConfig& config, const LabeledDataset& train_data,
                     const LabeledDataset& test_data) {
    if (config.budget == 0) throw std::runtime_error("sweep: budget must be at least 1");
    SweepResult result;
    std::string first_error;
    for (std::size_t trial = 0; trial < config.budget; ++trial) {
        ExperimentConfig cfg = trial_config(config, trial, train_data.num_classes(),
                                            train_data.num_attributes());
        try {
            result.trials.push_back(run_on(cfg, train_data, test_data));
        } catch (const std::exception& e) {
            RunRecord failed;
            failed.config = cfg;
            failed.status = std::string("failed: ") + e.what();
            if (first_error.empty()) first_error = e.what();
            result.trials.push_back(std::move(failed));
        }
    }
    result.best_index = result.trials.size();
    for (std::size_t i = 0; i < result.trials.size(); ++i) {
        if (result.trials[i].status != "ok") continue;
        if (result.best_index == result.trials.size() ||
            result.trials[i].test_report.combined_loss <
                result.trials[result.best_index].test_report.combined_loss)
            result.best_index = i;
    }
    if (result.best_index == result.trials.size())
        throw std::runtime_error("sweep: every trial failed (first error: " + first_error + ")");
    return result;
}

SweepResult sweep(const SweepConfig& config) {
    const LabeledDataset full = load_table(config.base.dataset_path, config.base.schema);
    auto [train_raw, test_raw] =
        split(full, config.base.split_ratio, derive_seed(config.base.seed, "split"));
    auto [train_std, test_std] = standardize(train_raw, test_raw);
    return sweep_on(config, train_std, test_std);
}

std::vector<ParetoPoint> pareto_frontier(const std::vector<ParetoPoint>& points) {
    if (points.empty()) throw std::runtime_error("pareto_frontier: no records");
    std::vector<ParetoPoint> frontier;
    for (const ParetoPoint& p : points) {
        bool dominated = false;
        for (const ParetoPoint& q : points) {
            if (q.balanced_error <= p.balanced_error &&
                q.fairness_violation <= p.fairness_violation &&
                (q.balanced_error < p.balanced_error ||
                 q.fairness_violation < p.fairness_violation)) {
                dominated = true;
                break;
            }
        }
        if (!dominated) frontier.push_back(p);
    }
    std::sort(frontier.begin(), frontier.end(), [](const ParetoPoint& a, const ParetoPoint& b) {
        if (a.balanced_error != b.balanced_error) return a.balanced_error < b.balanced_error;
        return a.fairness_violation < b.fairness_violation;
    });
    return frontier;
}

std::string report_to_json(const FairnessReport& report) {
    nlohmann::json j;
    j["balanced_error"] = report.balanced_error;
    j["fairness_violation"] = report.fairness_violation;
    j["combined_loss"] = report.combined_loss;
    j["total_error"] = report.total_error;
    j["kind"] = to_string(report.kind);
    nlohmann::json rates = nlohmann::json::array();
    for (std::size_t i = 0; i < report.per_cell_rates.rows; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t a = 0; a < report.per_cell_rates.cols; ++a)
            row.push_back(report.per_cell_rates(i, a));
        rates.push_back(row);
    }
    j["per_cell_rates"] = rates;
    return j.dump();
}

std::string schedule_to_json(const MarginSchedule& schedule) {
    nlohmann::json j;
    j["C"] = schedule.scale;
    j["alpha"] = schedule.alpha;
    j["kind"] = to_string(schedule.kind);
    j["adjusted_sizes"] = schedule.adjusted_sizes;
    nlohmann::json offsets;
    for (std::size_t i = 0; i < schedule.offsets.rows; ++i) {
        nlohmann::json row;
        for (std::size_t a = 0; a < schedule.offsets.cols; ++a)
            row[std::to_string(a)] = schedule.offsets(i, a);
        offsets[std::to_string(i)] = row;
    }
    j["Delta"] = offsets;
    return j.dump();
}

std::string record_to_json(const RunRecord& record, bool include_wall_time) {
    nlohmann::json j;
    j["status"] = record.status;
    j["algorithm"] = to_string(record.config.algorithm);
    j["constraint"] = to_string(record.config.kind);
    j["loss"] = to_string(record.config.loss);
    j["eps"] = record.config.eps;
    j["C"] = record.config.margin_scale;
    j["alpha"] = record.config.alpha;
    j["seed"] = record.config.seed;
    if (record.status == "ok") {
        j["train"] = nlohmann::json::parse(report_to_json(record.train_report));
        j["test"] = nlohmann::json::parse(report_to_json(record.test_report));
        j["combined_gap"] = record.combined_gap;
        j["fairness_gap"] = record.fairness_gap;
        j["balanced_gap"] = record.balanced_gap;
        if (record.config.algorithm == Algorithm::ExpGrad) {
            j["certificate"] = {{"gap", record.certificate.gap},
                                {"rho", record.certificate.rho},
                                {"iterations", record.certificate.iterations},
                                {"iteration_cap", record.certificate.iteration_cap},
                                {"converged", record.certificate.converged}};
        }
        if (record.config.algorithm == Algorithm::GridSearch)
            j["grid_feasible"] = record.grid_feasible;
    }
    if (include_wall_time) j["wall_time_s"] = record.wall_time_s;
    return j.dump();
}

}  // namespace fifa
