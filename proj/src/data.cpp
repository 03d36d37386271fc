#include "acnet/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "acnet/errors.hpp"
#include "acnet/rng.hpp"

namespace acnet {

Dataset::Dataset(std::size_t rows, std::size_t cols, std::vector<double> values, bool normalized)
    : rows_(rows), cols_(cols), values_(std::move(values)), normalized_(normalized)
{
    if (values_.size() != rows_ * cols_) fail(ErrorKind::structural, "dataset shape does not match its values");
}

Dataset Dataset::select(std::span<const std::size_t> rows) const
{
    std::vector<double> v;
    v.reserve(rows.size() * cols_);
    for (std::size_t r : rows) {
        const auto src = row(r);
        v.insert(v.end(), src.begin(), src.end());
    }
    return Dataset(rows.size(), cols_, std::move(v), normalized_);
}

CensoredDataset::CensoredDataset(std::size_t rows, std::size_t cols, std::vector<double> lower,
                                 std::vector<double> upper, double noise)
    : rows_(rows), cols_(cols), lower_(std::move(lower)), upper_(std::move(upper)), noise_(noise)
{
    if (lower_.size() != rows_ * cols_ || upper_.size() != rows_ * cols_)
        fail(ErrorKind::structural, "censored dataset shape does not match its bounds");
    for (std::size_t k = 0; k < lower_.size(); ++k)
        if (!(0.0 <= lower_[k] && lower_[k] <= upper_[k] && upper_[k] <= 1.0))
            fail(ErrorKind::data, "censored intervals must satisfy 0 <= lower <= upper <= 1");
}

CensoredDataset CensoredDataset::select(std::span<const std::size_t> rows) const
{
    std::vector<double> lo;
    std::vector<double> hi;
    for (std::size_t r : rows) {
        const auto l = lower_row(r);
        const auto u = upper_row(r);
        lo.insert(lo.end(), l.begin(), l.end());
        hi.insert(hi.end(), u.begin(), u.end());
    }
    return CensoredDataset(rows.size(), cols_, std::move(lo), std::move(hi), noise_);
}

Dataset rank_normalize(const Dataset& raw)
{
    const std::size_t n = raw.rows();
    const std::size_t d = raw.cols();
    if (n < 2) fail(ErrorKind::data, "rank normalization needs at least two rows");
    std::vector<double> out(n * d);
    std::vector<std::size_t> order(n);
    for (std::size_t j = 0; j < d; ++j) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return raw.at(a, j) < raw.at(b, j); });
        if (raw.at(order.front(), j) == raw.at(order.back(), j))
            fail(ErrorKind::data, "column " + std::to_string(j) + " is constant");
        std::size_t i = 0;
        while (i < n) {
            std::size_t k = i;
            while (k + 1 < n && raw.at(order[k + 1], j) == raw.at(order[i], j)) ++k;
            // ranks i+1..k+1 share their average
            const double rank = 0.5 * static_cast<double>(i + k) + 1.0;
            for (std::size_t m = i; m <= k; ++m) out[order[m] * d + j] = rank / static_cast<double>(n + 1);
            i = k + 1;
        }
    }
    return Dataset(n, d, std::move(out), true);
}

SplitResult split(const Dataset& data, double ratio, std::uint64_t seed, bool normalize)
{
    if (!(ratio > 0.0)) fail(ErrorKind::domain, "split ratio must be positive");
    const std::size_t n = data.rows();
    const auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratio / (ratio + 1.0)));
    if (n_train == 0 || n_train >= n) fail(ErrorKind::data, "split leaves an empty part");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    CounterRng rng(seed, 0x5b1fULL);
    shuffle(std::span<std::size_t>(idx), rng);
    std::vector<std::size_t> a(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::size_t> b(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    Dataset train = data.select(a);
    Dataset test = data.select(b);
    if (normalize) {
        train = rank_normalize(train);
        test = rank_normalize(test);
    }
    return {std::move(train), std::move(test)};
}

Dataset inject_outliers(const Dataset& data, double rate, std::uint64_t seed)
{
    if (!(rate >= 0.0)) fail(ErrorKind::domain, "outlier rate must be non-negative");
    const auto extra = static_cast<std::size_t>(std::floor(static_cast<double>(data.rows()) * rate + 1e-9));
    std::vector<double> v(data.values().begin(), data.values().end());
    CounterRng rng(seed, 0x0071ULL);
    for (std::size_t k = 0; k < extra * data.cols(); ++k) v.push_back(rng.uniform());
    return Dataset(data.rows() + extra, data.cols(), std::move(v), data.normalized());
}

Dataset flip(const Dataset& data, std::span<const int> coords)
{
    std::vector<double> v(data.values().begin(), data.values().end());
    for (int c : coords) {
        if (c < 0 || static_cast<std::size_t>(c) >= data.cols()) fail(ErrorKind::domain, "flip coordinate out of range");
        for (std::size_t i = 0; i < data.rows(); ++i) {
            double& x = v[i * data.cols() + static_cast<std::size_t>(c)];
            x = 1.0 - x;
        }
    }
    return Dataset(data.rows(), data.cols(), std::move(v), data.normalized());
}

CensoredDataset censor(const Dataset& data, double noise, std::uint64_t seed)
{
    if (!(noise > 0.0) || !std::isfinite(noise)) fail(ErrorKind::domain, "censoring noise must be positive");
    const std::size_t n = data.values().size();
    std::vector<double> lo(n);
    std::vector<double> hi(n);
    CounterRng rng(seed, 0xce45ULL);
    for (std::size_t k = 0; k < n; ++k) {
        const double u = data.values()[k];
        lo[k] = std::max(0.0, u - rng.uniform(0.0, noise));
        hi[k] = std::min(1.0, u + rng.uniform(0.0, noise));
    }
    return CensoredDataset(data.rows(), data.cols(), std::move(lo), std::move(hi), noise);
}

// ---------------------------------------------------------------------------

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view s, double& out)
{
    s = trim(s);
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> f;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        f.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return f;
}

} // namespace

Dataset read_csv(std::istream& in, const std::string& source)
{
    std::string line;
    std::size_t line_no = 0;
    std::size_t cols = 0;
    std::vector<double> values;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        std::vector<double> row;
        bool ok = true;
        for (const auto& f : fields) {
            double x = 0.0;
            if (!parse_double(f, x)) {
                ok = false;
                break;
            }
            row.push_back(x);
        }
        if (!ok) {
            if (first_content) {
                // header row
                first_content = false;
                cols = fields.size();
                continue;
            }
            fail(ErrorKind::data, source + ":" + std::to_string(line_no) + ": malformed row");
        }
        if (cols == 0) cols = row.size();
        if (row.size() != cols)
            fail(ErrorKind::data, source + ":" + std::to_string(line_no) + ": expected " + std::to_string(cols) +
                                      " columns, found " + std::to_string(row.size()));
        first_content = false;
        values.insert(values.end(), row.begin(), row.end());
    }
    if (values.empty()) fail(ErrorKind::data, source + ": no data rows");
    const std::size_t rows = values.size() / cols;
    return Dataset(rows, cols, std::move(values));
}

Dataset read_csv_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) fail(ErrorKind::data, "cannot open " + path);
    Dataset d = read_csv(in, path);
    bool interior = true;
    for (double x : d.values()) interior = interior && x > 0.0 && x < 1.0;
    return Dataset(d.rows(), d.cols(), std::vector<double>(d.values().begin(), d.values().end()), interior);
}

CensoredDataset read_censored_csv_file(const std::string& path)
{
    const Dataset d = read_csv_file(path);
    if (d.cols() % 2 != 0) fail(ErrorKind::data, path + ": censored data needs 2d columns (lower..., upper...)");
    const std::size_t k = d.cols() / 2;
    std::vector<double> lo;
    std::vector<double> hi;
    for (std::size_t i = 0; i < d.rows(); ++i) {
        const auto r = d.row(i);
        lo.insert(lo.end(), r.begin(), r.begin() + static_cast<std::ptrdiff_t>(k));
        hi.insert(hi.end(), r.begin() + static_cast<std::ptrdiff_t>(k), r.end());
    }
    return CensoredDataset(d.rows(), k, std::move(lo), std::move(hi));
}

std::string format_g17(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_csv(std::ostream& out, const Dataset& data)
{
    for (std::size_t i = 0; i < data.rows(); ++i) {
        for (std::size_t j = 0; j < data.cols(); ++j) {
            if (j) out << ',';
            out << format_g17(data.at(i, j));
        }
        out << '\n';
    }
}

void write_csv_file(const std::string& path, const Dataset& data)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::data, "cannot write " + path);
    write_csv(out, data);
}

void write_censored_csv_file(const std::string& path, const CensoredDataset& data)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::data, "cannot write " + path);
    for (std::size_t i = 0; i < data.rows(); ++i) {
        const auto lo = data.lower_row(i);
        const auto hi = data.upper_row(i);
        for (std::size_t j = 0; j < lo.size(); ++j) out << (j ? "," : "") << format_g17(lo[j]);
        for (double x : hi) out << ',' << format_g17(x);
        out << '\n';
    }
}

} // namespace acnet
