#include "fifa/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "fifa/rng.hpp"

namespace fifa {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, delim)) out.push_back(trim(cell));
    if (!line.empty() && line.back() == delim) out.push_back("");
    return out;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* begin = s.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    return end == begin + s.size() && std::isfinite(out);
}

}  // namespace

void LabeledDataset::validate() const {
    const std::size_t n = labels.size();
    if (features.rows != n || attributes.size() != n)
        throw std::runtime_error("dataset: row counts disagree");
    if (feature_names.size() != features.cols)
        throw std::runtime_error("dataset: feature name count disagrees with columns");
    for (std::size_t j = 0; j < n; ++j) {
        if (labels[j] < 0 || labels[j] >= num_classes())
            throw std::runtime_error("dataset: label code out of range at row " + std::to_string(j));
        if (attributes[j] < 0 || attributes[j] >= num_attributes())
            throw std::runtime_error("dataset: attribute code out of range at row " + std::to_string(j));
    }
    for (double v : features.data)
        if (!std::isfinite(v)) throw std::runtime_error("dataset: non-finite feature value");
}

LabeledDataset parse_table(const std::vector<std::string>& lines, const TableSchema& schema,
                           const std::string& origin) {
    if (lines.empty())
        throw std::runtime_error("load_table: " + origin + " is empty");

    const std::vector<std::string> header = split_line(lines[0], schema.delimiter);
    const std::size_t ncols = header.size();

    auto find_col = [&](const std::string& name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw std::runtime_error("load_table: " + origin + " has no column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t label_col = find_col(schema.label_column);
    const std::size_t attr_col = find_col(schema.attribute_column);

    std::vector<std::vector<std::string>> cells;
    cells.reserve(lines.size() - 1);
    for (std::size_t r = 1; r < lines.size(); ++r) {
        if (trim(lines[r]).empty()) continue;
        std::vector<std::string> row = split_line(lines[r], schema.delimiter);
        if (row.size() != ncols)
            throw std::runtime_error("load_table: " + origin + " row " + std::to_string(r + 1) +
                                     " has " + std::to_string(row.size()) + " cells, expected " +
                                     std::to_string(ncols));
        cells.push_back(std::move(row));
    }
    const std::size_t n = cells.size();
    if (n == 0)
        throw std::runtime_error("load_table: " + origin + " has a header but no data rows");

    // A feature column is numeric only when every cell parses as a double.
    std::vector<bool> numeric(ncols, true);
    for (std::size_t c = 0; c < ncols; ++c) {
        if (c == label_col || c == attr_col) { numeric[c] = false; continue; }
        for (std::size_t r = 0; r < n && numeric[c]; ++r) {
            double v;
            if (!parse_double(cells[r][c], v)) numeric[c] = false;
        }
    }

    auto sorted_values = [&](std::size_t c) {
        std::vector<std::string> vals;
        for (std::size_t r = 0; r < n; ++r) vals.push_back(cells[r][c]);
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        return vals;
    };

    LabeledDataset out;
    out.class_names = sorted_values(label_col);
    out.attribute_names = sorted_values(attr_col);
    std::map<std::string, int> label_code, attr_code;
    for (std::size_t i = 0; i < out.class_names.size(); ++i)
        label_code[out.class_names[i]] = static_cast<int>(i);
    for (std::size_t i = 0; i < out.attribute_names.size(); ++i)
        attr_code[out.attribute_names[i]] = static_cast<int>(i);

    // Column layout: numeric columns pass through, categorical ones expand
    // to a full one-hot block (no reference level dropped).
    struct Block {
        std::size_t source;
        bool numeric;
        std::vector<std::string> values;   // categorical only
        std::map<std::string, std::size_t> value_index;
    };
    std::vector<Block> blocks;
    for (std::size_t c = 0; c < ncols; ++c) {
        if (c == label_col) continue;
        if (c == attr_col && !schema.attribute_in_features) continue;
        Block b;
        b.source = c;
        b.numeric = numeric[c];
        if (!b.numeric) {
            b.values = sorted_values(c);
            for (std::size_t i = 0; i < b.values.size(); ++i) b.value_index[b.values[i]] = i;
        }
        blocks.push_back(std::move(b));
    }

    std::size_t d = 0;
    for (const Block& b : blocks) {
        if (b.numeric) {
            out.feature_names.push_back(header[b.source]);
            ++d;
        } else {
            for (const std::string& v : b.values)
                out.feature_names.push_back(header[b.source] + "=" + v);
            d += b.values.size();
        }
    }

    out.features = Matrix(n, d);
    out.labels.resize(n);
    out.attributes.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        out.labels[r] = label_code.at(cells[r][label_col]);
        out.attributes[r] = attr_code.at(cells[r][attr_col]);
        std::size_t col = 0;
        for (const Block& b : blocks) {
            if (b.numeric) {
                double v;
                if (!parse_double(cells[r][b.source], v))
                    throw std::runtime_error("load_table: " + origin + " unparseable cell at row " +
                                             std::to_string(r + 2) + " column '" + header[b.source] + "'");
                out.features(r, col++) = v;
            } else {
                out.features(r, col + b.value_index.at(cells[r][b.source])) = 1.0;
                col += b.values.size();
            }
        }
    }
    out.validate();
    return out;
}

LabeledDataset load_table(const std::string& path, const TableSchema& schema) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_table: cannot open '" + path + "'");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return parse_table(lines, schema, path);
}

std::pair<LabeledDataset, LabeledDataset> standardize(const LabeledDataset& train,
                                                      const LabeledDataset& test) {
    if (train.size() == 0) throw std::runtime_error("standardize: empty training set");
    if (test.dim() != train.dim())
        throw std::runtime_error("standardize: train has " + std::to_string(train.dim()) +
                                 " columns, test has " + std::to_string(test.dim()));

    const std::size_t n = train.size(), d = train.dim();
    std::vector<double> mean(d, 0.0), sd(d, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < d; ++c) mean[c] += train.features(r, c);
    for (std::size_t c = 0; c < d; ++c) mean[c] /= static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < d; ++c) {
            const double dev = train.features(r, c) - mean[c];
            sd[c] += dev * dev;
        }
    for (std::size_t c = 0; c < d; ++c) sd[c] = std::sqrt(sd[c] / static_cast<double>(n));

    auto apply = [&](const LabeledDataset& src) {
        LabeledDataset out = src;
        for (std::size_t r = 0; r < out.size(); ++r)
            for (std::size_t c = 0; c < d; ++c) {
                double v = out.features(r, c) - mean[c];
                if (sd[c] > 0.0) v /= sd[c];
                out.features(r, c) = v;
            }
        return out;
    };
    return {apply(train), apply(test)};
}

LabeledDataset take_rows(const LabeledDataset& data, const std::vector<std::size_t>& idx) {
    LabeledDataset out;
    out.feature_names = data.feature_names;
    out.class_names = data.class_names;
    out.attribute_names = data.attribute_names;
    out.features = Matrix(idx.size(), data.dim());
    out.labels.resize(idx.size());
    out.attributes.resize(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const std::size_t r = idx[i];
        std::copy(data.features.row(r), data.features.row(r) + data.dim(), out.features.row(i));
        out.labels[i] = data.labels[r];
        out.attributes[i] = data.attributes[r];
    }
    return out;
}

std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& data, double ratio,
                                                std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0))
        throw std::runtime_error("split: ratio must lie strictly between 0 and 1");
    const std::size_t n = data.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 gen(seed);
    // Fisher-Yates with an explicit bounded draw; self-contained so the
    // partition does not depend on the standard library implementation.
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(gen() % i);
        std::swap(idx[i - 1], idx[j]);
    }
    const auto train_n = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
    std::vector<std::size_t> train_idx(idx.begin(), idx.begin() + train_n);
    std::vector<std::size_t> test_idx(idx.begin() + train_n, idx.end());
    return {take_rows(data, train_idx), take_rows(data, test_idx)};
}

SubgroupCounts census(const LabeledDataset& data) {
    if (data.size() == 0) throw std::runtime_error("census: empty dataset");
    SubgroupCounts counts;
    counts.total = data.size();
    counts.per_class.assign(data.num_classes(), 0);
    counts.per_cell = Matrix(data.num_classes(), data.num_attributes());
    for (std::size_t j = 0; j < data.size(); ++j) {
        counts.per_class[data.labels[j]] += 1;
        counts.per_cell(data.labels[j], data.attributes[j]) += 1.0;
    }
    return counts;
}

}  // namespace fifa
