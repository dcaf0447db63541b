// Experiment harness for the fairness-aware margin toolkit: single runs,
// hyper-parameter sweeps, Pareto frontiers, the Gaussian-mixture analytic
// check, and dataset census summaries.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fifa/experiment.hpp"
#include "fifa/gaussian.hpp"

namespace {

struct CliOptions {
    fifa::ExperimentConfig config;
    std::string constraint = "eo";
    std::string algorithm = "expgrad";
    std::string loss = "ce";
    std::vector<std::string> delta_flags;   // class:attr:value
    std::string config_file;
    std::size_t budget = 30;
    std::string out_dir;
};

void add_common_flags(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("--dataset", opt.config.dataset_path, "CSV table, first row header")->required();
    cmd->add_option("--label-col", opt.config.schema.label_column, "label column name")->required();
    cmd->add_option("--attr-col", opt.config.schema.attribute_column, "sensitive attribute column name")->required();
    cmd->add_flag("!--no-attr-feature", opt.config.schema.attribute_in_features,
                  "exclude the attribute from the feature one-hot blocks");
    cmd->add_option("--constraint", opt.constraint, "eo, dp or eqopt");
    cmd->add_option("--eps", opt.config.eps, "fairness tolerance");
    cmd->add_option("--algorithm", opt.algorithm, "plain, expgrad or gridsearch");
    cmd->add_option("--loss", opt.loss, "hinge or ce");
    cmd->add_option("--c-margin", opt.config.margin_scale, "margin scale C");
    cmd->add_option("--alpha", opt.config.alpha, "fairness weight alpha");
    cmd->add_option("--delta", opt.delta_flags,
                    "<class>:<attr>:<value>; per-class values are sorted into levels and "
                    "re-assigned by subgroup size (largest cell gets 0)");
    cmd->add_option("--split-ratio", opt.config.split_ratio, "train fraction");
    cmd->add_option("--epochs", opt.config.train.epochs, "training epochs");
    cmd->add_option("--step-size", opt.config.train.step_size, "optimizer step size");
    cmd->add_option("--weight-decay", opt.config.train.weight_decay, "L2 penalty");
    cmd->add_option("--bound", opt.config.expgrad.bound, "lambda L1 bound B");
    cmd->add_option("--nu", opt.config.expgrad.nu, "saddle gap tolerance");
    cmd->add_option("--grid-budget", opt.config.grid_budget, "grid search points");
    cmd->add_option("--seed", opt.config.seed, "master seed");
    cmd->add_option("--out", opt.out_dir, "output directory");
    cmd->add_option("--config", opt.config_file, "JSON config file; values override flags");
}

void apply_config_file(CliOptions& opt) {
    if (opt.config_file.empty()) return;
    std::ifstream in(opt.config_file);
    if (!in) throw std::runtime_error("cannot open config file '" + opt.config_file + "'");
    nlohmann::json j;
    in >> j;
    auto set_if = [&](const char* key, auto& target) {
        if (j.contains(key)) target = j.at(key).get<std::decay_t<decltype(target)>>();
    };
    set_if("dataset", opt.config.dataset_path);
    set_if("label_col", opt.config.schema.label_column);
    set_if("attr_col", opt.config.schema.attribute_column);
    set_if("attribute_in_features", opt.config.schema.attribute_in_features);
    set_if("constraint", opt.constraint);
    set_if("algorithm", opt.algorithm);
    set_if("loss", opt.loss);
    set_if("eps", opt.config.eps);
    set_if("c_margin", opt.config.margin_scale);
    set_if("alpha", opt.config.alpha);
    set_if("split_ratio", opt.config.split_ratio);
    set_if("epochs", opt.config.train.epochs);
    set_if("step_size", opt.config.train.step_size);
    set_if("weight_decay", opt.config.train.weight_decay);
    set_if("bound", opt.config.expgrad.bound);
    set_if("nu", opt.config.expgrad.nu);
    set_if("grid_budget", opt.config.grid_budget);
    set_if("seed", opt.config.seed);
    set_if("out", opt.out_dir);
    set_if("budget", opt.budget);
    if (j.contains("delta")) opt.delta_flags = j.at("delta").get<std::vector<std::string>>();
}

// Turns repeatable class:attr:value flags into per-class sorted level sets.
std::vector<std::vector<double>> delta_levels_from_flags(const std::vector<std::string>& flags,
                                                         int num_classes, int num_attrs) {
    if (flags.empty()) return {};
    fifa::Matrix requested(num_classes, num_attrs);
    for (const std::string& f : flags) {
        std::stringstream ss(f);
        std::string c, a, v;
        if (!std::getline(ss, c, ':') || !std::getline(ss, a, ':') || !std::getline(ss, v))
            throw std::runtime_error("--delta expects <class>:<attr>:<value>, got '" + f + "'");
        requested(std::stoi(c), std::stoi(a)) = std::stod(v);
    }
    std::vector<std::vector<double>> levels(num_classes);
    for (int i = 0; i < num_classes; ++i) {
        for (int a = 0; a < num_attrs; ++a) levels[i].push_back(requested(i, a));
        std::sort(levels[i].begin(), levels[i].end());
        if (levels[i].front() != 0.0)
            throw std::runtime_error("--delta: each class needs a zero level (largest subgroup)");
    }
    return levels;
}

void finalize_config(CliOptions& opt, const fifa::LabeledDataset& data) {
    opt.config.kind = fifa::constraint_kind_from_string(opt.constraint);
    opt.config.algorithm = fifa::algorithm_from_string(opt.algorithm);
    opt.config.loss = fifa::loss_kind_from_string(opt.loss);
    opt.config.delta_levels =
        delta_levels_from_flags(opt.delta_flags, data.num_classes(), data.num_attributes());
    opt.config.out_dir = opt.out_dir;
}

void write_lines(const std::string& dir, const std::string& name,
                 const std::vector<std::string>& lines) {
    if (dir.empty()) return;
    std::filesystem::create_directories(dir);
    std::ofstream out(std::filesystem::path(dir) / name);
    for (const std::string& line : lines) out << line << "\n";
}

std::string sweep_table(const fifa::SweepResult& result) {
    std::ostringstream out;
    out << "trial,status,C,alpha,train_combined,test_combined,train_fairness,test_fairness,"
           "train_balanced,test_balanced,best\n";
    for (std::size_t i = 0; i < result.trials.size(); ++i) {
        const fifa::RunRecord& r = result.trials[i];
        out << i << "," << (r.status == "ok" ? "ok" : "failed") << "," << r.config.margin_scale
            << "," << r.config.alpha << ",";
        if (r.status == "ok") {
            out << r.train_report.combined_loss << "," << r.test_report.combined_loss << ","
                << r.train_report.fairness_violation << "," << r.test_report.fairness_violation
                << "," << r.train_report.balanced_error << "," << r.test_report.balanced_error;
        } else {
            out << ",,,,,";
        }
        out << "," << (i == result.best_index ? 1 : 0) << "\n";
    }
    return out.str();
}

int cmd_run(CliOptions& opt) {
    apply_config_file(opt);
    const fifa::LabeledDataset full = fifa::load_table(opt.config.dataset_path, opt.config.schema);
    finalize_config(opt, full);
    const fifa::RunRecord record = fifa::run(opt.config);
    const std::string json = fifa::record_to_json(record);
    std::cout << json << "\n";
    write_lines(opt.out_dir, "runs.jsonl", {json});
    return 0;
}

int cmd_sweep(CliOptions& opt, fifa::SweepConfig& sweep_config) {
    apply_config_file(opt);
    const fifa::LabeledDataset full = fifa::load_table(opt.config.dataset_path, opt.config.schema);
    finalize_config(opt, full);
    sweep_config.base = opt.config;
    sweep_config.budget = opt.budget;
    const fifa::SweepResult result = fifa::sweep(sweep_config);

    std::vector<std::string> lines;
    for (const fifa::RunRecord& r : result.trials) lines.push_back(fifa::record_to_json(r));
    write_lines(opt.out_dir, "trials.jsonl", lines);
    const std::string table = sweep_table(result);
    write_lines(opt.out_dir, "sweep.csv", {table});
    std::cout << table;
    std::cerr << "best trial " << result.best_index << " test combined loss "
              << result.trials[result.best_index].test_report.combined_loss << "\n";
    return 0;
}

int cmd_pareto(const std::string& records_path, const std::string& out_dir) {
    std::ifstream in(records_path);
    if (!in) throw std::runtime_error("cannot open '" + records_path + "'");
    std::vector<fifa::ParetoPoint> points;
    std::string line;
    std::size_t idx = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const nlohmann::json j = nlohmann::json::parse(line);
        if (j.value("status", "ok") != "ok") { ++idx; continue; }
        fifa::ParetoPoint p;
        p.balanced_error = j.at("test").at("balanced_error").get<double>();
        p.fairness_violation = j.at("test").at("fairness_violation").get<double>();
        p.record_index = idx++;
        points.push_back(p);
    }
    const auto frontier = fifa::pareto_frontier(points);
    std::ostringstream out;
    out << "record,balanced_error,fairness_violation\n";
    for (const fifa::ParetoPoint& p : frontier)
        out << p.record_index << "," << p.balanced_error << "," << p.fairness_violation << "\n";
    std::cout << out.str();
    write_lines(out_dir, "pareto.csv", {out.str()});
    return 0;
}

int cmd_gaussian_check(double beta_norm, double alpha, double mu2,
                       std::vector<std::size_t> cells) {
    if (cells.size() != 4)
        throw std::runtime_error("--counts expects n00,n01,n10,n11");
    fifa::GaussianSpec spec;
    spec.dim = 1;
    spec.mu1 = {0.0};
    spec.mu2 = {mu2};
    spec.beta = {beta_norm};
    spec.alpha = alpha;
    const double n0 = static_cast<double>(cells[0] + cells[1]);
    const double n1 = static_cast<double>(cells[2] + cells[3]);
    spec.pi0[0] = static_cast<double>(cells[0]) / n0;
    spec.pi0[1] = static_cast<double>(cells[1]) / n0;
    spec.pi1[0] = static_cast<double>(cells[2]) / n1;
    spec.pi1[1] = static_cast<double>(cells[3]) / n1;

    fifa::SubgroupCounts counts;
    counts.per_cell = fifa::Matrix(2, 2);
    counts.per_cell(0, 0) = static_cast<double>(cells[0]);
    counts.per_cell(0, 1) = static_cast<double>(cells[1]);
    counts.per_cell(1, 0) = static_cast<double>(cells[2]);
    counts.per_cell(1, 1) = static_cast<double>(cells[3]);
    counts.per_class = {cells[0] + cells[1], cells[2] + cells[3]};
    counts.total = counts.per_class[0] + counts.per_class[1];

    const fifa::Example1Comparison cmp = fifa::compare_example1(spec, counts);
    nlohmann::json j = {{"gamma_plain", cmp.gamma_plain},
                        {"gamma_fifa", cmp.gamma_fifa},
                        {"M_plain", cmp.criterion_plain},
                        {"M_fifa", cmp.criterion_fifa},
                        {"winner", cmp.fifa_wins ? "fifa" : "plain"}};
    std::cout << j.dump() << "\n";
    return 0;
}

int cmd_census(const CliOptions& opt) {
    const fifa::LabeledDataset data = fifa::load_table(opt.config.dataset_path, opt.config.schema);
    const fifa::SubgroupCounts counts = fifa::census(data);
    nlohmann::json j;
    j["total"] = counts.total;
    j["num_features"] = data.dim();
    j["classes"] = data.class_names;
    j["attributes"] = data.attribute_names;
    nlohmann::json cells;
    for (int i = 0; i < data.num_classes(); ++i)
        for (int a = 0; a < data.num_attributes(); ++a)
            cells[data.class_names[i] + "|" + data.attribute_names[a]] = counts.cell(i, a);
    j["cells"] = cells;
    std::cout << j.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fairness-aware imbalanced classification toolkit"};
    app.require_subcommand(1);

    CliOptions run_opt, sweep_opt, census_opt;
    fifa::SweepConfig sweep_config;

    CLI::App* run_cmd = app.add_subcommand("run", "single experiment");
    add_common_flags(run_cmd, run_opt);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "hyper-parameter sweep");
    add_common_flags(sweep_cmd, sweep_opt);
    sweep_cmd->add_option("--budget", sweep_opt.budget, "number of trials");
    std::string strategy = "seeded-random";
    sweep_cmd->add_option("--strategy", strategy, "seeded-random or grid");
    sweep_cmd->add_option("--c-max", sweep_config.scale_range.hi, "upper end of the C range");
    sweep_cmd->add_option("--alpha-max", sweep_config.alpha_range.hi, "upper end of the alpha range");
    sweep_cmd->add_option("--delta-max", sweep_config.delta_range.hi, "upper end of the delta range");

    CLI::App* pareto_cmd = app.add_subcommand("pareto", "non-dominated frontier of run records");
    std::string records_path, pareto_out;
    pareto_cmd->add_option("--records", records_path, "JSONL run records")->required();
    pareto_cmd->add_option("--out", pareto_out, "output directory");

    CLI::App* gauss_cmd = app.add_subcommand("gaussian-check", "analytic mixture comparison");
    double beta_norm = 8.0, g_alpha = 1.0, g_mu2 = 2.5;
    std::vector<std::size_t> cells = {10000, 10000, 9900, 100};
    gauss_cmd->add_option("--beta-norm", beta_norm, "separation |beta|");
    gauss_cmd->add_option("--alpha", g_alpha, "fairness weight");
    gauss_cmd->add_option("--mu2", g_mu2, "second subgroup mean along beta");
    gauss_cmd->add_option("--counts", cells, "cell counts n00,n01,n10,n11")->delimiter(',');

    CLI::App* census_cmd = app.add_subcommand("census", "subgroup counts of a table");
    census_cmd->add_option("--dataset", census_opt.config.dataset_path)->required();
    census_cmd->add_option("--label-col", census_opt.config.schema.label_column)->required();
    census_cmd->add_option("--attr-col", census_opt.config.schema.attribute_column)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return cmd_run(run_opt);
        if (sweep_cmd->parsed()) {
            sweep_config.strategy = strategy == "grid" ? fifa::SweepStrategy::Grid
                                                       : fifa::SweepStrategy::SeededRandom;
            return cmd_sweep(sweep_opt, sweep_config);
        }
        if (pareto_cmd->parsed()) return cmd_pareto(records_path, pareto_out);
        if (gauss_cmd->parsed()) return cmd_gaussian_check(beta_norm, g_alpha, g_mu2, cells);
        if (census_cmd->parsed()) return cmd_census(census_opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
