#include "fsel/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "fsel/error.hpp"
#include "fsel/rng.hpp"

namespace fsel {

std::size_t Dataset::count_positive() const noexcept {
    return static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
}

void Dataset::validate() const {
    if (y.size() != X.rows()) {
        throw data_error("dataset has " + std::to_string(X.rows()) + " rows but " +
                         std::to_string(y.size()) + " labels");
    }
    if (names.size() != X.cols()) {
        throw data_error("dataset has " + std::to_string(X.cols()) + " columns but " +
                         std::to_string(names.size()) + " feature names");
    }
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] != 1 && y[i] != -1) {
            throw data_error("label at row " + std::to_string(i) + " is " + std::to_string(y[i]) +
                             ", expected -1 or +1");
        }
    }
    for (std::size_t i = 0; i < X.rows(); ++i) {
        for (std::size_t j = 0; j < X.cols(); ++j) {
            if (!std::isfinite(X(i, j))) {
                throw data_error("non-finite entry at row " + std::to_string(i) + ", column " +
                                 std::to_string(j));
            }
        }
    }
}

void Dataset::require_both_classes(const char* context) const {
    validate();
    const std::size_t pos = count_positive();
    if (pos == 0 || pos == size()) {
        throw data_error(std::string(context) + ": training data contains a single class (" +
                         std::to_string(pos) + " positives of " + std::to_string(size()) + ")");
    }
}

double eval_test_function(std::span<const double> x, double alpha) {
    if (x.size() < 7) {
        throw config_error("test function needs dimension >= 7, got " + std::to_string(x.size()));
    }
    double tail = 0.0;
    for (std::size_t j = 6; j < x.size(); ++j) {
        tail += x[j];
    }
    return std::exp(x[0] * x[0]) + std::exp(x[1]) + 3.0 * x[2] + 2.0 * std::cos(x[3] * x[4]) +
           4.0 * x[5] * x[5] + std::pow(10.0, alpha) * tail;
}

Dataset generate_synthetic(std::size_t n, std::size_t d, double alpha, std::uint64_t seed) {
    if (d < 7) {
        throw config_error("synthetic generator needs dimension >= 7, got " + std::to_string(d));
    }
    if (n < 2) {
        throw config_error("synthetic generator needs n >= 2, got " + std::to_string(n));
    }
    Dataset ds;
    ds.X = Matrix(n, d);
    const CounterRng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            ds.X(i, j) = rng.uniform_at(i * d + j);
        }
    }
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        f[i] = eval_test_function(ds.X.row(i), alpha);
    }
    // Sequential sum keeps the threshold independent of any parallel layout.
    double sum = 0.0;
    for (double v : f) {
        sum += v;
    }
    const double mean = sum / static_cast<double>(n);
    ds.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        ds.y[i] = f[i] > mean ? 1 : -1;
    }
    ds.names.reserve(d);
    for (std::size_t j = 0; j < d; ++j) {
        ds.names.push_back("x" + std::to_string(j + 1));
    }
    const std::size_t pos = ds.count_positive();
    if (pos == 0 || pos == n) {
        throw data_error("synthetic labelling is degenerate: " + std::to_string(pos) + " of " +
                         std::to_string(n) + " examples are positive");
    }
    return ds;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

double parse_number(std::string_view cell, std::size_t line_no, std::string_view column) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (!cell.empty() && *first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
        throw data_error("csv line " + std::to_string(line_no) + ", column '" + std::string(column) +
                         "': cannot parse '" + std::string(cell) + "' as a finite number");
    }
    return v;
}

}  // namespace

Dataset parse_csv(std::istream& in, const std::string& label_column) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            for (auto f : split_fields(line)) {
                header.emplace_back(f);
            }
            break;
        }
    }
    if (header.empty()) {
        throw data_error("csv input is empty");
    }
    if (line_no == 1 && header.front().starts_with("\xEF\xBB\xBF")) {
        header.front().erase(0, 3);
    }
    const auto label_it = std::find(header.begin(), header.end(), label_column);
    if (label_it == header.end()) {
        throw data_error("csv header has no label column '" + label_column + "'");
    }
    const std::size_t label_pos = static_cast<std::size_t>(label_it - header.begin());

    Dataset ds;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c != label_pos) {
            ds.names.push_back(header[c]);
        }
    }
    const std::size_t d = ds.names.size();
    std::vector<double> values;
    std::vector<double> raw_labels;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split_fields(line);
        if (fields.size() != header.size()) {
            throw data_error("csv line " + std::to_string(line_no) + " has " +
                             std::to_string(fields.size()) + " fields, header has " +
                             std::to_string(header.size()));
        }
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const double v = parse_number(fields[c], line_no, header[c]);
            if (c == label_pos) {
                if (v != -1.0 && v != 0.0 && v != 1.0) {
                    throw data_error("csv line " + std::to_string(line_no) + ": label '" +
                                     std::string(fields[c]) + "' is not -1, 0 or 1");
                }
                raw_labels.push_back(v);
            } else {
                values.push_back(v);
            }
        }
    }
    if (raw_labels.empty()) {
        throw data_error("csv input has a header but no data rows");
    }
    const bool has_zero = std::find(raw_labels.begin(), raw_labels.end(), 0.0) != raw_labels.end();
    const bool has_minus = std::find(raw_labels.begin(), raw_labels.end(), -1.0) != raw_labels.end();
    if (has_zero && has_minus) {
        throw data_error("csv label column mixes 0 and -1; use either {0,1} or {-1,1}");
    }
    ds.X = Matrix(raw_labels.size(), d);
    ds.X.values() = std::move(values);
    ds.y.reserve(raw_labels.size());
    for (double v : raw_labels) {
        ds.y.push_back(v > 0.0 ? 1 : -1);
    }
    return ds;
}

Dataset load_csv(const std::filesystem::path& path, const std::string& label_column) {
    std::ifstream in(path);
    if (!in) {
        throw data_error("cannot open csv file '" + path.string() + "'");
    }
    return parse_csv(in, label_column);
}

void write_csv(std::ostream& out, const Dataset& ds, const std::string& label_column) {
    for (const auto& name : ds.names) {
        out << name << ',';
    }
    out << label_column << '\n';
    char buf[64];
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (std::size_t j = 0; j < ds.dims(); ++j) {
            // Shortest representation that round-trips exactly.
            const auto res = std::to_chars(buf, buf + sizeof buf, ds.X(i, j));
            out.write(buf, res.ptr - buf);
            out << ',';
        }
        out << ds.y[i] << '\n';
    }
}

Dataset aggregate_by_window(const Matrix& raw, const Labels& raw_labels, std::size_t window,
                            std::vector<std::string> names, WindowLabelRule rule) {
    if (window == 0) {
        throw config_error("aggregation window must be >= 1");
    }
    if (raw.rows() != raw_labels.size()) {
        throw data_error("aggregation input has " + std::to_string(raw.rows()) + " rows but " +
                         std::to_string(raw_labels.size()) + " labels");
    }
    if (window > raw.rows()) {
        throw config_error("aggregation window " + std::to_string(window) + " exceeds " +
                           std::to_string(raw.rows()) + " raw rows");
    }
    if (names.empty()) {
        for (std::size_t j = 0; j < raw.cols(); ++j) {
            names.push_back("x" + std::to_string(j + 1));
        }
    }
    const std::size_t n = raw.rows() / window;
    Dataset ds;
    ds.X = Matrix(n, raw.cols());
    ds.y.resize(n);
    ds.names = std::move(names);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t positives = 0;
        for (std::size_t r = i * window; r < (i + 1) * window; ++r) {
            for (std::size_t j = 0; j < raw.cols(); ++j) {
                ds.X(i, j) += raw(r, j);
            }
            positives += raw_labels[r] == 1 ? 1 : 0;
        }
        for (std::size_t j = 0; j < raw.cols(); ++j) {
            ds.X(i, j) /= static_cast<double>(window);
        }
        const bool positive = rule == WindowLabelRule::any_positive ? positives > 0
                                                                    : 2 * positives > window;
        ds.y[i] = positive ? 1 : -1;
    }
    ds.validate();
    return ds;
}

std::size_t validation_count(std::size_t n, double fraction) {
    // The epsilon absorbs representation error, e.g. 10 * 0.3.
    return static_cast<std::size_t>(std::ceil(static_cast<double>(n) * fraction - 1e-9));
}

namespace {

void shuffle(std::vector<std::size_t>& v, CounterRng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = rng.below(i);
        std::swap(v[i - 1], v[j]);
    }
}

// Largest-remainder allocation of `total` validation slots across classes.
std::vector<std::size_t> allocate(const std::vector<std::size_t>& class_sizes, std::size_t n,
                                  std::size_t total) {
    std::vector<std::size_t> take(class_sizes.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t used = 0;
    for (std::size_t c = 0; c < class_sizes.size(); ++c) {
        const double exact = static_cast<double>(total) * static_cast<double>(class_sizes[c]) /
                             static_cast<double>(n);
        take[c] = static_cast<std::size_t>(std::floor(exact));
        used += take[c];
        remainders.emplace_back(exact - static_cast<double>(take[c]), c);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; used < total && k < remainders.size(); ++k, ++used) {
        ++take[remainders[k].second];
    }
    return take;
}

}  // namespace

std::vector<Split> make_splits(std::size_t n, const Labels& y, const SplitPlan& plan) {
    if (plan.q < 1) {
        throw config_error("split plan needs q >= 1");
    }
    if (!(plan.validation_fraction > 0.0 && plan.validation_fraction < 1.0)) {
        throw config_error("validation fraction must lie in (0,1)");
    }
    if (y.size() != n) {
        throw data_error("split plan: label count does not match n");
    }
    const std::size_t n_valid = validation_count(n, plan.validation_fraction);
    if (n_valid < 1 || n - n_valid < 2) {
        throw config_error("split plan leaves " + std::to_string(n - n_valid) +
                           " training rows for n = " + std::to_string(n));
    }

    std::vector<std::vector<std::size_t>> classes(plan.stratified ? 2 : 1);
    for (std::size_t i = 0; i < n; ++i) {
        classes[plan.stratified ? (y[i] == 1 ? 1 : 0) : 0].push_back(i);
    }
    std::vector<std::size_t> sizes;
    for (const auto& c : classes) {
        sizes.push_back(c.size());
    }
    std::vector<std::size_t> take = allocate(sizes, n, n_valid);
    if (plan.stratified) {
        for (std::size_t c = 0; c < classes.size(); ++c) {
            if (sizes[c] == 0) {
                continue;
            }
            if (sizes[c] < 2) {
                throw data_error("stratified split: class " + std::string(c ? "+1" : "-1") +
                                 " has a single example and cannot appear in both parts");
            }
            // Keep each present class on both sides of the split.
            const std::size_t other = 1 - c;
            if (take[c] == 0) {
                ++take[c];
                if (take[other] > 1) {
                    --take[other];
                }
            } else if (take[c] == sizes[c]) {
                --take[c];
                if (take[other] + 1 < sizes[other]) {
                    ++take[other];
                }
            }
        }
    }

    std::vector<Split> splits;
    splits.reserve(plan.q);
    for (std::size_t h = 0; h < plan.q; ++h) {
        CounterRng rng(substream(plan.seed, h));
        Split s;
        for (std::size_t c = 0; c < classes.size(); ++c) {
            std::vector<std::size_t> members = classes[c];
            shuffle(members, rng);
            s.valid_idx.insert(s.valid_idx.end(), members.begin(), members.begin() + take[c]);
            s.train_idx.insert(s.train_idx.end(), members.begin() + take[c], members.end());
        }
        std::sort(s.train_idx.begin(), s.train_idx.end());
        std::sort(s.valid_idx.begin(), s.valid_idx.end());
        splits.push_back(std::move(s));
    }
    return splits;
}

std::vector<Split> make_folds(const Labels& y, std::size_t folds, std::uint64_t seed) {
    if (folds < 2) {
        throw config_error("cross-validation needs at least 2 folds");
    }
    std::vector<std::vector<std::size_t>> classes(2);
    for (std::size_t i = 0; i < y.size(); ++i) {
        classes[y[i] == 1 ? 1 : 0].push_back(i);
    }
    for (std::size_t c = 0; c < 2; ++c) {
        if (classes[c].size() < folds) {
            throw data_error("stratified " + std::to_string(folds) + "-fold split: class " +
                             std::string(c ? "+1" : "-1") + " has only " +
                             std::to_string(classes[c].size()) + " examples");
        }
    }
    CounterRng rng(seed);
    std::vector<std::size_t> fold_of(y.size());
    for (auto& members : classes) {
        shuffle(members, rng);
        for (std::size_t k = 0; k < members.size(); ++k) {
            fold_of[members[k]] = k % folds;
        }
    }
    std::vector<Split> out(folds);
    for (std::size_t i = 0; i < y.size(); ++i) {
        for (std::size_t f = 0; f < folds; ++f) {
            (fold_of[i] == f ? out[f].valid_idx : out[f].train_idx).push_back(i);
        }
    }
    return out;
}

Scaling fit_scaling(const Matrix& X) {
    Scaling s;
    s.mean.assign(X.cols(), 0.0);
    s.stddev.assign(X.cols(), 0.0);
    if (X.rows() == 0) {
        return s;
    }
    const double n = static_cast<double>(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        for (std::size_t j = 0; j < X.cols(); ++j) {
            s.mean[j] += X(i, j);
        }
    }
    for (double& m : s.mean) {
        m /= n;
    }
    for (std::size_t i = 0; i < X.rows(); ++i) {
        for (std::size_t j = 0; j < X.cols(); ++j) {
            const double dev = X(i, j) - s.mean[j];
            s.stddev[j] += dev * dev;
        }
    }
    for (double& v : s.stddev) {
        v = std::sqrt(v / n);
    }
    return s;
}

void Scaling::apply_row(std::span<const double> in, std::span<double> out) const {
    for (std::size_t j = 0; j < in.size(); ++j) {
        // A constant training feature carries no information; pin it to 0.
        out[j] = stddev[j] > 0.0 ? (in[j] - mean[j]) / stddev[j] : 0.0;
    }
}

Matrix Scaling::apply(const Matrix& X) const {
    if (X.cols() != mean.size()) {
        throw data_error("scaling fitted on " + std::to_string(mean.size()) +
                         " features applied to " + std::to_string(X.cols()));
    }
    Matrix out(X.rows(), X.cols());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        apply_row(X.row(i), out.row(i));
    }
    return out;
}

StandardizeResult standardize(const Dataset& train, std::span<const Dataset> others) {
    StandardizeResult r;
    r.scaling = fit_scaling(train.X);
    r.train = train;
    r.train.X = r.scaling.apply(train.X);
    for (const auto& o : others) {
        Dataset t = o;
        t.X = r.scaling.apply(o.X);
        r.others.push_back(std::move(t));
    }
    return r;
}

Dataset project_features(const Dataset& ds, std::span<const std::size_t> keep) {
    if (keep.empty()) {
        throw config_error("feature projection needs at least one kept feature");
    }
    std::set<std::size_t> seen;
    for (std::size_t k : keep) {
        if (k >= ds.dims()) {
            throw config_error("feature index " + std::to_string(k) + " out of range for " +
                               std::to_string(ds.dims()) + " features");
        }
        if (!seen.insert(k).second) {
            throw config_error("feature index " + std::to_string(k) + " selected twice");
        }
    }
    Dataset out;
    out.X = Matrix(ds.size(), keep.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (std::size_t c = 0; c < keep.size(); ++c) {
            out.X(i, c) = ds.X(i, keep[c]);
        }
    }
    out.y = ds.y;
    for (std::size_t k : keep) {
        out.names.push_back(ds.names[k]);
    }
    return out;
}

Dataset select_rows(const Dataset& ds, std::span<const std::size_t> rows) {
    Dataset out;
    out.X = Matrix(rows.size(), ds.dims());
    out.y.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto src = ds.X.row(rows[r]);
        std::copy(src.begin(), src.end(), out.X.row(r).begin());
        out.y.push_back(ds.y[rows[r]]);
    }
    out.names = ds.names;
    return out;
}

std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t count, std::uint64_t seed) {
    if (count > n) {
        throw config_error("cannot subsample " + std::to_string(count) + " of " +
                           std::to_string(n) + " rows");
    }
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    CounterRng rng(seed);
    // Partial Fisher-Yates: the first `count` slots become the sample.
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + rng.below(n - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(count);
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace fsel
