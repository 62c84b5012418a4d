#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mbs {

// Sorted coordinate-list vector over a product-space index.
struct SparseVector {
    struct Entry {
        std::uint32_t index;
        double value;
    };
    std::vector<Entry> entries; // sorted by index, unique

    // Sorts by index and merges duplicates; drops exact zeros.
    void normalize();
};

double dot(const SparseVector& a, const SparseVector& b);

// Real sparse matrix in column-compressed coordinate form. Built by add()
// calls, then finalize() sorts, merges and drops entries at or below the
// zero threshold.
class SparseOperator {
  public:
    struct Entry {
        std::uint32_t row;
        std::uint32_t col;
        double value;
    };

    static constexpr double kZeroThreshold = 1e-14;

    SparseOperator() = default;
    SparseOperator(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool finalized() const { return !col_ptr_.empty(); }

    void add(std::size_t row, std::size_t col, double value);
    void finalize(double threshold = kZeroThreshold);

    const std::vector<Entry>& entries() const { return entries_; }
    std::span<const Entry> column(std::size_t col) const;
    double coeff(std::size_t row, std::size_t col) const;

    SparseOperator transposed() const;
    static SparseOperator linear_combination(double a, const SparseOperator& A,
                                             double b, const SparseOperator& B);

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Entry> entries_;          // sorted by (col, row) once finalized
    std::vector<std::size_t> col_ptr_;    // size cols_+1
};

} // namespace mbs
