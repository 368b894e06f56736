#include "asgl/data_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace asgl {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim whitespace and CR
        auto b = cell.find_first_not_of(" \t\r");
        auto e = cell.find_last_not_of(" \t\r");
        cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back("");
    return cells;
}

double parse_cell(const std::string& s, std::size_t row, std::size_t col) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error("CSV parse failure at row " + std::to_string(row) +
                                 ", column " + std::to_string(col) + ": '" + s + "'");
    }
    if (pos != s.size())
        throw std::runtime_error("CSV parse failure at row " + std::to_string(row) +
                                 ", column " + std::to_string(col) + ": '" + s + "'");
    if (!std::isfinite(v))
        throw std::runtime_error("non-finite value at row " + std::to_string(row) +
                                 ", column " + std::to_string(col));
    return v;
}

}  // namespace

Dataset::Dataset(Matrix X_, Vector y_, std::vector<std::string> names)
    : X(std::move(X_)), y(std::move(y_)), feature_names(std::move(names)) {
    if (X.rows() < 1 || X.cols() < 1)
        throw std::invalid_argument("Dataset requires n >= 1 and p >= 1");
    if (X.rows() != y.size())
        throw std::invalid_argument("row count of X must equal length of y");
    if (!X.allFinite() || !y.allFinite())
        throw std::invalid_argument("Dataset contains non-finite entries");
    if (!feature_names.empty() &&
        feature_names.size() != static_cast<std::size_t>(X.cols()))
        throw std::invalid_argument("feature_names size must equal p");
}

GroupStructure::GroupStructure(std::vector<int> group_of_)
    : group_of(std::move(group_of_)) {
    if (group_of.empty()) throw std::invalid_argument("empty group assignment");
    K = 1 + *std::max_element(group_of.begin(), group_of.end());
    sizes.assign(K, 0);
    for (int g : group_of) {
        if (g < 0 || g >= K) throw std::invalid_argument("group index out of range");
        ++sizes[g];
    }
    for (int l = 0; l < K; ++l)
        if (sizes[l] == 0)
            throw std::invalid_argument("group " + std::to_string(l) +
                                        " has no variables");
}

GroupStructure GroupStructure::trivial(int p) {
    return GroupStructure(std::vector<int>(p, 0));
}

GroupStructure GroupStructure::contiguous(int K, int group_size) {
    std::vector<int> g(static_cast<std::size_t>(K) * group_size);
    for (std::size_t j = 0; j < g.size(); ++j) g[j] = static_cast<int>(j) / group_size;
    return GroupStructure(std::move(g));
}

std::vector<int> GroupStructure::members(int l) const {
    std::vector<int> idx;
    for (int j = 0; j < p(); ++j)
        if (group_of[j] == l) idx.push_back(j);
    return idx;
}

Dataset load_csv(const std::string& path, bool has_header,
                 const std::string& response_column) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);

    std::vector<std::vector<double>> rows;
    std::vector<std::string> header;
    std::string line;
    std::size_t lineno = 0;
    std::size_t ncols = 0;
    while (std::getline(in, line)) {
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        auto cells = split_line(line);
        if (lineno == 0 && has_header) {
            header = cells;
            ncols = cells.size();
            ++lineno;
            continue;
        }
        if (ncols == 0) ncols = cells.size();
        if (cells.size() != ncols)
            throw std::runtime_error("row " + std::to_string(lineno) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(ncols));
        std::vector<double> row(ncols);
        for (std::size_t c = 0; c < ncols; ++c) row[c] = parse_cell(cells[c], lineno, c);
        rows.push_back(std::move(row));
        ++lineno;
    }
    if (rows.empty()) throw std::runtime_error("empty CSV: " + path);

    // resolve response column: by name when a header exists, else by index
    std::size_t resp = ncols;
    if (has_header) {
        for (std::size_t c = 0; c < header.size(); ++c)
            if (header[c] == response_column) resp = c;
    }
    if (resp == ncols) {
        try {
            std::size_t pos = 0;
            long idx = std::stol(response_column, &pos);
            if (pos == response_column.size() && idx >= 0 &&
                static_cast<std::size_t>(idx) < ncols)
                resp = static_cast<std::size_t>(idx);
        } catch (const std::exception&) {
        }
    }
    if (resp == ncols)
        throw std::runtime_error("response column '" + response_column +
                                 "' not found");
    if (ncols < 2)
        throw std::runtime_error("no covariates remain after extracting the response "
                                 "(p=0)");

    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto p = static_cast<Eigen::Index>(ncols - 1);
    Matrix X(n, p);
    Vector y(n);
    std::vector<std::string> names;
    for (std::size_t c = 0; c < ncols; ++c)
        if (c != resp && has_header) names.push_back(header[c]);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index k = 0;
        for (std::size_t c = 0; c < ncols; ++c) {
            if (c == resp)
                y(i) = rows[i][c];
            else
                X(i, k++) = rows[i][c];
        }
    }
    return Dataset(std::move(X), std::move(y), std::move(names));
}

GroupStructure load_groups(const std::string& path, const Dataset& d) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::vector<int> group_of(d.p(), -1);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        auto cells = split_line(line);
        if (cells.size() != 2)
            throw std::runtime_error("group file row " + std::to_string(lineno) +
                                     ": expected 2 columns");
        // first column: feature name (if names available) or 0-based index
        int j = -1;
        if (!d.feature_names.empty()) {
            auto it = std::find(d.feature_names.begin(), d.feature_names.end(), cells[0]);
            if (it != d.feature_names.end())
                j = static_cast<int>(it - d.feature_names.begin());
        }
        if (j < 0) {
            try {
                j = std::stoi(cells[0]);
            } catch (const std::exception&) {
                throw std::runtime_error("group file row " + std::to_string(lineno) +
                                         ": unknown feature '" + cells[0] + "'");
            }
        }
        if (j < 0 || j >= d.p())
            throw std::runtime_error("group file row " + std::to_string(lineno) +
                                     ": feature index out of range");
        group_of[j] = std::stoi(cells[1]);
    }
    for (int j = 0; j < d.p(); ++j)
        if (group_of[j] < 0)
            throw std::runtime_error("feature " + std::to_string(j) +
                                     " has no group assignment");
    // compact to 0-based dense indices preserving order of first appearance
    std::vector<int> remap;
    for (int& g : group_of) {
        auto it = std::find(remap.begin(), remap.end(), g);
        if (it == remap.end()) {
            remap.push_back(g);
            g = static_cast<int>(remap.size()) - 1;
        } else {
            g = static_cast<int>(it - remap.begin());
        }
    }
    return GroupStructure(group_of);
}

Dataset StandardizeParams::apply(const Dataset& d) const {
    if (d.p() != x_mean.size())
        throw std::invalid_argument("standardization parameter dimension mismatch");
    Matrix X = (d.X.rowwise() - x_mean.transpose()).array().rowwise() /
               x_scale.transpose().array();
    Vector y = d.y;
    if (center_y) y.array() -= y_mean;
    return Dataset(std::move(X), std::move(y), d.feature_names);
}

std::pair<Dataset, StandardizeParams> standardize(const Dataset& d, bool center_y) {
    const auto n = d.n();
    if (n < 2) throw std::invalid_argument("standardize requires n >= 2");
    StandardizeParams par;
    par.x_mean = d.X.colwise().mean();
    Matrix centered = d.X.rowwise() - par.x_mean.transpose();
    par.x_scale =
        (centered.array().square().colwise().sum() / double(n - 1)).sqrt();
    for (Eigen::Index j = 0; j < d.p(); ++j)
        if (par.x_scale(j) <= 0.0)
            throw std::invalid_argument("constant column " + std::to_string(j) +
                                        " cannot be standardized");
    par.center_y = center_y;
    par.y_mean = center_y ? d.y.mean() : 0.0;
    return {par.apply(d), par};
}

Split split(const Dataset& d, const SplitSpec& s) {
    if (s.n_train < 1) throw std::invalid_argument("n_train must be >= 1");
    const auto total = s.n_train + s.n_val + s.n_test;
    if (total > d.n())
        throw std::invalid_argument("split sizes exceed available rows: " +
                                    std::to_string(total) + " > " +
                                    std::to_string(d.n()));
    std::vector<Eigen::Index> perm(d.n());
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(s.seed);
    for (Eigen::Index i = d.n() - 1; i > 0; --i) {
        auto j = static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(i + 1));
        std::swap(perm[i], perm[j]);
    }

    auto take = [&](Eigen::Index offset, Eigen::Index count) {
        std::vector<Eigen::Index> idx(perm.begin() + offset,
                                      perm.begin() + offset + count);
        Matrix X(count, d.p());
        Vector y(count);
        for (Eigen::Index i = 0; i < count; ++i) {
            X.row(i) = d.X.row(idx[i]);
            y(i) = d.y(idx[i]);
        }
        return std::make_pair(Dataset(std::move(X), std::move(y), d.feature_names),
                              std::move(idx));
    };

    Split out;
    auto [tr, ti] = take(0, s.n_train);
    out.train = std::move(tr);
    out.train_idx = std::move(ti);
    if (s.n_val > 0) {
        auto [va, vi] = take(s.n_train, s.n_val);
        out.val = std::move(va);
        out.val_idx = std::move(vi);
    }
    if (s.n_test > 0) {
        auto [te, tei] = take(s.n_train + s.n_val, s.n_test);
        out.test = std::move(te);
        out.test_idx = std::move(tei);
    }
    return out;
}

}  // namespace asgl
