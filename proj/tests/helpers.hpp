#pragma once

#include <random>
#include <string>
#include <vector>

#include "fifa/dataset.hpp"
#include "fifa/model.hpp"
#include "fifa/rng.hpp"

namespace testutil {

// Builds a dataset directly from parallel vectors, with trivial decode tables.
inline fifa::LabeledDataset make_dataset(const std::vector<std::vector<double>>& rows,
                                         const std::vector<int>& labels,
                                         const std::vector<int>& attrs,
                                         int num_classes = 2, int num_attrs = 2) {
    fifa::LabeledDataset d;
    d.features = fifa::Matrix(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) d.features(r, c) = rows[r][c];
    d.labels = labels;
    d.attributes = attrs;
    for (std::size_t c = 0; c < d.features.cols; ++c)
        d.feature_names.push_back("x" + std::to_string(c));
    for (int i = 0; i < num_classes; ++i) d.class_names.push_back(std::to_string(i));
    for (int a = 0; a < num_attrs; ++a) d.attribute_names.push_back("g" + std::to_string(a));
    return d;
}

// Random dataset with every (class, attribute) cell occupied.
inline fifa::LabeledDataset random_dataset(std::mt19937_64& gen, std::size_t n, int dim,
                                           int num_classes, int num_attrs) {
    std::vector<std::vector<double>> rows(n, std::vector<double>(dim));
    std::vector<int> labels(n), attrs(n);
    std::size_t j = 0;
    for (int i = 0; i < num_classes; ++i)
        for (int a = 0; a < num_attrs; ++a) {
            labels[j] = i;
            attrs[j] = a;
            ++j;
        }
    for (; j < n; ++j) {
        labels[j] = static_cast<int>(gen() % num_classes);
        attrs[j] = static_cast<int>(gen() % num_attrs);
    }
    for (std::size_t r = 0; r < n; ++r)
        for (int c = 0; c < dim; ++c)
            rows[r][c] = fifa::uniform(gen, -2.0, 2.0) + labels[r];
    return make_dataset(rows, labels, attrs, num_classes, num_attrs);
}

inline fifa::LinearScorer random_scorer(std::mt19937_64& gen, int k, int dim,
                                        bool with_bias = true) {
    fifa::LinearScorer s;
    s.weights = fifa::Matrix(k, dim);
    for (double& w : s.weights.data) w = fifa::uniform(gen, -1.0, 1.0);
    if (with_bias) {
        s.bias.resize(k);
        for (double& b : s.bias) b = fifa::uniform(gen, -0.5, 0.5);
    }
    return s;
}

inline fifa::SubgroupCounts make_counts(const std::vector<std::vector<std::size_t>>& cells) {
    fifa::SubgroupCounts c;
    c.per_cell = fifa::Matrix(cells.size(), cells.front().size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        std::size_t row_total = 0;
        for (std::size_t a = 0; a < cells[i].size(); ++a) {
            c.per_cell(i, a) = static_cast<double>(cells[i][a]);
            row_total += cells[i][a];
        }
        c.per_class.push_back(row_total);
        c.total += row_total;
    }
    return c;
}

}  // namespace testutil
