#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace acnet {

//! Row-major n x d matrix of observations.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::size_t rows, std::size_t cols, std::vector<double> values, bool normalized = false);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool normalized() const { return normalized_; }
    std::span<const double> values() const { return values_; }
    std::span<const double> row(std::size_t i) const
    {
        return std::span<const double>(values_).subspan(i * cols_, cols_);
    }
    double at(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }

    //! Rows selected by index, in the given order.
    Dataset select(std::span<const std::size_t> rows) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
    bool normalized_ = false;
};

//! Row-major n x d per-coordinate intervals [lower, upper].
class CensoredDataset {
public:
    CensoredDataset() = default;
    CensoredDataset(std::size_t rows, std::size_t cols, std::vector<double> lower, std::vector<double> upper,
                    double noise = 0.0);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double noise() const { return noise_; }
    std::span<const double> lower_row(std::size_t i) const
    {
        return std::span<const double>(lower_).subspan(i * cols_, cols_);
    }
    std::span<const double> upper_row(std::size_t i) const
    {
        return std::span<const double>(upper_).subspan(i * cols_, cols_);
    }
    std::span<const double> lower() const { return lower_; }
    std::span<const double> upper() const { return upper_; }

    CensoredDataset select(std::span<const std::size_t> rows) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> lower_;
    std::vector<double> upper_;
    double noise_ = 0.0;
};

//! Each column replaced by rank / (n + 1), ties sharing their average rank.
Dataset rank_normalize(const Dataset& raw);

struct SplitResult {
    Dataset train;
    Dataset test;
};

//! Seeded random partition; train gets round(n * ratio / (ratio + 1)) rows.
//! Each part is rank-normalized on its own when `normalize` is set.
SplitResult split(const Dataset& data, double ratio, std::uint64_t seed, bool normalize = true);

//! Appends floor(n * rate) i.i.d. uniform points.
Dataset inject_outliers(const Dataset& data, double rate, std::uint64_t seed);

//! u -> 1 - u on the given coordinates.
Dataset flip(const Dataset& data, std::span<const int> coords);

//! Intervals [max(0, u - d1), min(1, u + d2)], d1, d2 ~ U[0, noise].
CensoredDataset censor(const Dataset& data, double noise, std::uint64_t seed);

//! CSV with an optional header and d numeric columns. Malformed rows are
//! reported with their line number.
Dataset read_csv(std::istream& in, const std::string& source = "<stream>");
Dataset read_csv_file(const std::string& path);

//! Censored CSV: 2d columns, lower bounds then upper bounds.
CensoredDataset read_censored_csv_file(const std::string& path);

//! One row per point, 17 significant digits.
void write_csv(std::ostream& out, const Dataset& data);
void write_csv_file(const std::string& path, const Dataset& data);
void write_censored_csv_file(const std::string& path, const CensoredDataset& data);

//! Formats x with 17 significant digits.
std::string format_g17(double x);

} // namespace acnet
