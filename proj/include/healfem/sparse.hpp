#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace healfem {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

inline void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

/// Shared CSR sparsity pattern. Column indices are sorted within each row and
/// the pattern is structurally symmetric for FE connectivity, which the
/// transpose helpers below rely on.
struct SparsityPattern {
    std::vector<std::int64_t> row_ptr;
    std::vector<std::int32_t> col_idx;

    std::size_t rows() const { return row_ptr.empty() ? 0 : row_ptr.size() - 1; }
    std::size_t nnz() const { return col_idx.size(); }

    /// Index of entry (r, c) in the value array; -1 if not present.
    std::int64_t find(std::size_t r, std::size_t c) const {
        auto lo = col_idx.begin() + row_ptr[r];
        auto hi = col_idx.begin() + row_ptr[r + 1];
        auto it = std::lower_bound(lo, hi, static_cast<std::int32_t>(c));
        if (it == hi || *it != static_cast<std::int32_t>(c)) return -1;
        return it - col_idx.begin();
    }
};

/// Compressed sparse matrix with a shared pattern and a symmetry flag.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(std::shared_ptr<const SparsityPattern> pattern, bool symmetric = false)
        : pattern_(std::move(pattern)),
          values_(pattern_->nnz(), 0.0),
          symmetric_(symmetric) {}

    std::size_t rows() const { return pattern_ ? pattern_->rows() : 0; }
    std::size_t cols() const { return rows(); }
    bool symmetric() const { return symmetric_; }
    void set_symmetric(bool s) { symmetric_ = s; }
    const SparsityPattern& pattern() const { return *pattern_; }
    std::shared_ptr<const SparsityPattern> pattern_ptr() const { return pattern_; }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    void set_zero() { std::fill(values_.begin(), values_.end(), 0.0); }

    void add(std::size_t r, std::size_t c, double v) {
        const auto k = pattern_->find(r, c);
        if (k < 0) throw std::logic_error("SparseMatrix::add outside pattern");
        values_[k] += v;
    }

    double get(std::size_t r, std::size_t c) const {
        const auto k = pattern_->find(r, c);
        return k < 0 ? 0.0 : values_[k];
    }

    void apply(const std::vector<double>& x, std::vector<double>& y) const {
        const auto& p = *pattern_;
        y.assign(p.rows(), 0.0);
        for (std::size_t r = 0; r < p.rows(); ++r) {
            double s = 0.0;
            for (auto k = p.row_ptr[r]; k < p.row_ptr[r + 1]; ++k)
                s += values_[k] * x[p.col_idx[k]];
            y[r] = s;
        }
    }

    std::vector<double> apply(const std::vector<double>& x) const {
        std::vector<double> y;
        apply(x, y);
        return y;
    }

    void apply_transpose(const std::vector<double>& x, std::vector<double>& y) const {
        const auto& p = *pattern_;
        y.assign(p.rows(), 0.0);
        for (std::size_t r = 0; r < p.rows(); ++r)
            for (auto k = p.row_ptr[r]; k < p.row_ptr[r + 1]; ++k)
                y[p.col_idx[k]] += values_[k] * x[r];
    }

    std::vector<double> apply_transpose(const std::vector<double>& x) const {
        std::vector<double> y;
        apply_transpose(x, y);
        return y;
    }

    /// this += alpha * other (same pattern instance required)
    void add_scaled(double alpha, const SparseMatrix& other) {
        require_same_pattern(other);
        for (std::size_t k = 0; k < values_.size(); ++k)
            values_[k] += alpha * other.values_[k];
    }

    /// this += alpha * other^T (pattern must be structurally symmetric)
    void add_scaled_transpose(double alpha, const SparseMatrix& other) {
        require_same_pattern(other);
        const auto& p = *pattern_;
        for (std::size_t r = 0; r < p.rows(); ++r) {
            for (auto k = p.row_ptr[r]; k < p.row_ptr[r + 1]; ++k) {
                const auto kt = p.find(p.col_idx[k], r);
                if (kt < 0) throw std::logic_error("pattern not structurally symmetric");
                values_[kt] += alpha * other.values_[k];
            }
        }
    }

    void scale(double alpha) {
        for (auto& v : values_) v *= alpha;
    }

    /// max |A - A^T| entry
    double asymmetry() const {
        const auto& p = *pattern_;
        double m = 0.0;
        for (std::size_t r = 0; r < p.rows(); ++r) {
            for (auto k = p.row_ptr[r]; k < p.row_ptr[r + 1]; ++k) {
                const std::size_t c = p.col_idx[k];
                if (c < r) continue;
                const auto kt = p.find(c, r);
                const double vt = kt < 0 ? 0.0 : values_[kt];
                m = std::max(m, std::abs(values_[k] - vt));
            }
        }
        return m;
    }

    /// Matrix Market coordinate export (1-based). Symmetric-flagged matrices
    /// are written as "symmetric" with the lower triangle only.
    void write_matrix_market(std::ostream& os) const {
        const auto& p = *pattern_;
        os << "%%MatrixMarket matrix coordinate real "
           << (symmetric_ ? "symmetric" : "general") << "\n";
        std::size_t count = 0;
        for (std::size_t r = 0; r < p.rows(); ++r)
            for (auto k = p.row_ptr[r]; k < p.row_ptr[r + 1]; ++k)
                if (!symmetric_ || static_cast<std::size_t>(p.col_idx[k]) <= r) ++count;
        os << p.rows() << ' ' << p.rows() << ' ' << count << '\n';
        char buf[64];
        for (std::size_t r = 0; r < p.rows(); ++r) {
            for (auto k = p.row_ptr[r]; k < p.row_ptr[r + 1]; ++k) {
                const std::size_t c = p.col_idx[k];
                if (symmetric_ && c > r) continue;
                std::snprintf(buf, sizeof buf, "%zu %zu %.16e\n", r + 1, c + 1, values_[k]);
                os << buf;
            }
        }
    }

private:
    void require_same_pattern(const SparseMatrix& other) const {
        if (pattern_.get() != other.pattern_.get())
            throw std::logic_error("SparseMatrix: pattern mismatch");
    }

    std::shared_ptr<const SparsityPattern> pattern_;
    std::vector<double> values_;
    bool symmetric_ = false;
};

} // namespace healfem
