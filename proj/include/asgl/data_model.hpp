#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace asgl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Covariate matrix X (n x p) with response y (n). Immutable after construction.
struct Dataset {
    Matrix X;
    Vector y;
    std::vector<std::string> feature_names;  // empty or size p

    Dataset() = default;
    Dataset(Matrix X_, Vector y_, std::vector<std::string> names = {});

    Eigen::Index n() const { return X.rows(); }
    Eigen::Index p() const { return X.cols(); }
};

/// Partition of {0..p-1} into K groups. group_of is the source of truth;
/// groups need not be contiguous in column order.
struct GroupStructure {
    std::vector<int> group_of;  // size p, values in [0, K)
    int K = 0;
    std::vector<int> sizes;  // size K

    GroupStructure() = default;
    explicit GroupStructure(std::vector<int> group_of_);

    /// Single group covering all p variables.
    static GroupStructure trivial(int p);
    /// K contiguous groups of equal size.
    static GroupStructure contiguous(int K, int group_size);

    int p() const { return static_cast<int>(group_of.size()); }
    /// Column indices of group l.
    std::vector<int> members(int l) const;
};

struct SplitSpec {
    Eigen::Index n_train = 0;
    Eigen::Index n_val = 0;
    Eigen::Index n_test = 0;
    std::uint64_t seed = 0;
};

/// Column means/scales estimated on one dataset, applicable to another.
struct StandardizeParams {
    Vector x_mean;
    Vector x_scale;  // sample sd, denominator n-1
    double y_mean = 0.0;
    bool center_y = false;

    Dataset apply(const Dataset& d) const;
};

Dataset load_csv(const std::string& path, bool has_header,
                 const std::string& response_column);

/// Group file: two-column CSV (feature name or 0-based index, group index).
GroupStructure load_groups(const std::string& path, const Dataset& d);

std::pair<Dataset, StandardizeParams> standardize(const Dataset& d,
                                                  bool center_y = false);

struct Split {
    Dataset train, val, test;
    std::vector<Eigen::Index> train_idx, val_idx, test_idx;
};

Split split(const Dataset& d, const SplitSpec& s);

}  // namespace asgl
