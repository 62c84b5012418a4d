#include "mbs/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mbs {

void SparseVector::normalize() {
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.index < b.index; });
    std::size_t out = 0;
    for (std::size_t i = 0; i < entries.size();) {
        std::uint32_t idx = entries[i].index;
        double sum = 0.0;
        while (i < entries.size() && entries[i].index == idx)
            sum += entries[i++].value;
        if (sum != 0.0)
            entries[out++] = {idx, sum};
    }
    entries.resize(out);
}

double dot(const SparseVector& a, const SparseVector& b) {
    double s = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.entries.size() && j < b.entries.size()) {
        const std::uint32_t ia = a.entries[i].index, ib = b.entries[j].index;
        if (ia < ib)
            ++i;
        else if (ib < ia)
            ++j;
        else
            s += a.entries[i++].value * b.entries[j++].value;
    }
    return s;
}

void SparseOperator::add(std::size_t row, std::size_t col, double value) {
    if (row >= rows_ || col >= cols_)
        throw std::out_of_range("sparse entry outside matrix shape");
    entries_.push_back({static_cast<std::uint32_t>(row), static_cast<std::uint32_t>(col), value});
    col_ptr_.clear();
}

void SparseOperator::finalize(double threshold) {
    std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
        return a.col != b.col ? a.col < b.col : a.row < b.row;
    });
    std::size_t out = 0;
    for (std::size_t i = 0; i < entries_.size();) {
        const Entry head = entries_[i];
        double sum = 0.0;
        while (i < entries_.size() && entries_[i].col == head.col && entries_[i].row == head.row)
            sum += entries_[i++].value;
        if (std::abs(sum) > threshold)
            entries_[out++] = {head.row, head.col, sum};
    }
    entries_.resize(out);

    col_ptr_.assign(cols_ + 1, 0);
    for (const Entry& e : entries_)
        ++col_ptr_[e.col + 1];
    for (std::size_t c = 0; c < cols_; ++c)
        col_ptr_[c + 1] += col_ptr_[c];
}

std::span<const SparseOperator::Entry> SparseOperator::column(std::size_t col) const {
    if (!finalized())
        throw std::logic_error("sparse operator not finalized");
    return {entries_.data() + col_ptr_[col], col_ptr_[col + 1] - col_ptr_[col]};
}

double SparseOperator::coeff(std::size_t row, std::size_t col) const {
    for (const Entry& e : column(col))
        if (e.row == row)
            return e.value;
    return 0.0;
}

SparseOperator SparseOperator::transposed() const {
    SparseOperator t(cols_, rows_);
    for (const Entry& e : entries_)
        t.add(e.col, e.row, e.value);
    t.finalize(0.0);
    return t;
}

SparseOperator SparseOperator::linear_combination(double a, const SparseOperator& A,
                                                  double b, const SparseOperator& B) {
    if (A.rows() != B.rows() || A.cols() != B.cols())
        throw std::invalid_argument("linear combination: shape mismatch");
    SparseOperator out(A.rows(), A.cols());
    for (const Entry& e : A.entries())
        out.add(e.row, e.col, a * e.value);
    for (const Entry& e : B.entries())
        out.add(e.row, e.col, b * e.value);
    out.finalize();
    return out;
}

} // namespace mbs
