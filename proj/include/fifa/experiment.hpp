#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fifa/dataset.hpp"
#include "fifa/margins.hpp"
#include "fifa/metrics.hpp"
#include "fifa/reductions.hpp"

namespace fifa {

enum class Algorithm { Plain, ExpGrad, GridSearch };

const char* to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& name);

struct ExperimentConfig {
    std::string dataset_path;
    TableSchema schema;
    double split_ratio = 0.8;
    ConstraintKind kind = ConstraintKind::EqualizedOdds;
    double eps = 0.05;
    Algorithm algorithm = Algorithm::ExpGrad;
    LossKind loss = LossKind::SoftmaxCrossEntropy;
    double margin_scale = 0.0;      // C
    double alpha = 0.0;
    // delta_levels[class] is the sorted level set for assign_deltas; empty
    // means all-zero deltas.
    std::vector<std::vector<double>> delta_levels;
    TrainConfig train;
    ExpGradConfig expgrad;
    std::size_t grid_budget = 32;
    std::uint64_t seed = 1;
    std::string out_dir;
};

struct RunRecord {
    ExperimentConfig config;
    FairnessReport train_report;
    FairnessReport test_report;
    double combined_gap = 0.0;
    double fairness_gap = 0.0;
    double balanced_gap = 0.0;
    SaddleCertificate certificate;  // meaningful for expgrad only
    bool grid_feasible = true;      // meaningful for gridsearch only
    double wall_time_s = 0.0;
    std::string status = "ok";
};

/// Runs one experiment end to end: load, split, standardize, schedule,
/// train, evaluate.  Throws on any module error.
RunRecord run(const ExperimentConfig& config);

/// Same pipeline on an already-materialized train/test pair (used by the
/// sweep driver and tests to avoid re-reading files per trial).
RunRecord run_on(const ExperimentConfig& config, const LabeledDataset& train_data,
                 const LabeledDataset& test_data);

struct ParamRange {
    double lo = 0.0;
    double hi = 0.0;
    bool fixed() const { return lo == hi; }
};

enum class SweepStrategy { Grid, SeededRandom };

struct SweepConfig {
    ExperimentConfig base;
    ParamRange scale_range{0.0, 0.01};   // C
    ParamRange alpha_range{0.0, 0.01};
    ParamRange delta_range{0.0, 0.01};   // non-anchor cell level per class
    std::size_t budget = 30;
    SweepStrategy strategy = SweepStrategy::SeededRandom;
};

struct SweepResult {
    std::vector<RunRecord> trials;
    std::size_t best_index = 0;          // min test combined loss
};

SweepResult sweep(const SweepConfig& config);
SweepResult sweep_on(const SweepConfig& config, const LabeledDataset& train_data,
                     const LabeledDataset& test_data);

struct ParetoPoint {
    double balanced_error = 0.0;
    double fairness_violation = 0.0;
    std::size_t record_index = 0;
};

/// Non-dominated set under joint minimization, sorted by balanced error.
std::vector<ParetoPoint> pareto_frontier(const std::vector<ParetoPoint>& points);

std::string record_to_json(const RunRecord& record, bool include_wall_time = true);
std::string report_to_json(const FairnessReport& report);
std::string schedule_to_json(const MarginSchedule& schedule);

}  // namespace fifa
