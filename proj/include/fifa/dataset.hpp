#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fifa {

/// Row-major dense matrix, the only linear-algebra container used in the
/// toolkit.  Kept deliberately simple: the models here are linear scorers
/// on at most a few hundred columns.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }
    double* row(std::size_t r) { return data.data() + r * cols; }
};

/// Tabular sample set: features plus per-row class label and sensitive
/// attribute code.
struct LabeledDataset {
    Matrix features;                       // n x d
    std::vector<int> labels;               // values in [0, num_classes)
    std::vector<int> attributes;           // values in [0, num_attributes)
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;
    std::vector<std::string> attribute_names;

    std::size_t size() const { return labels.size(); }
    std::size_t dim() const { return features.cols; }
    int num_classes() const { return static_cast<int>(class_names.size()); }
    int num_attributes() const { return static_cast<int>(attribute_names.size()); }

    /// Throws if any structural invariant is broken (row counts, code
    /// ranges, non-finite feature values).
    void validate() const;
};

/// Census over (class, attribute) cells.
struct SubgroupCounts {
    std::size_t total = 0;
    std::vector<std::size_t> per_class;    // n_i, length k
    Matrix per_cell;                       // n_{i,a}, k x m (integral values)

    std::size_t cell(int cls, int attr) const {
        return static_cast<std::size_t>(per_cell(cls, attr));
    }
};

/// Column roles for load_table.
struct TableSchema {
    std::string label_column;
    std::string attribute_column;
    bool attribute_in_features = true;     // include the attribute as a one-hot block
    char delimiter = ',';
};

/// Reads a delimited text table (first row header), expands categorical
/// columns to full one-hot indicators and encodes label/attribute columns.
/// A column is numeric only when every cell parses as a double; anything
/// else (including empty cells and placeholder strings like "?") becomes
/// a category of its own.
LabeledDataset load_table(const std::string& path, const TableSchema& schema);

/// Same parse applied to in-memory lines; used by load_table and tests.
LabeledDataset parse_table(const std::vector<std::string>& lines,
                           const TableSchema& schema,
                           const std::string& origin = "<memory>");

/// Column-wise z-normalization with population (divide-by-n) variance.
/// Test columns are shifted/scaled by the training statistics.
/// Zero-variance columns are centered but not scaled.
std::pair<LabeledDataset, LabeledDataset> standardize(const LabeledDataset& train,
                                                      const LabeledDataset& test);

/// Deterministic shuffled partition. Train size is llround(ratio * n).
std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& data,
                                                double ratio, std::uint64_t seed);

/// Subset of rows by index, preserving decode tables.
LabeledDataset take_rows(const LabeledDataset& data, const std::vector<std::size_t>& idx);

SubgroupCounts census(const LabeledDataset& data);

}  // namespace fifa
