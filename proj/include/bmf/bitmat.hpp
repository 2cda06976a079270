#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace bmf {

using Word = std::uint64_t;
inline constexpr std::size_t kWordBits = 64;

constexpr std::size_t words_for(std::size_t bits) { return (bits + kWordBits - 1) / kWordBits; }

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Dense {0,1} matrix stored row-major, 64 entries per word. Rows are padded to
// a whole number of words; padding bits are kept at zero so that word-level
// popcounts never see them. Column capacity may exceed cols() so that columns
// can be appended without repacking every row.
class BinaryMatrix {
public:
    BinaryMatrix() = default;
    BinaryMatrix(std::size_t rows, std::size_t cols, std::size_t col_capacity = 0);

    // Row-wise literal, for tests and small fixtures: {{1,0},{0,1}}.
    static BinaryMatrix from_rows(std::initializer_list<std::initializer_list<int>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t col_capacity() const { return stride_ * kWordBits; }
    std::size_t words_per_row() const { return stride_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    bool get(std::size_t r, std::size_t c) const
    {
        return (bits_[r * stride_ + c / kWordBits] >> (c % kWordBits)) & 1u;
    }
    void set(std::size_t r, std::size_t c, bool v)
    {
        Word& w = bits_[r * stride_ + c / kWordBits];
        const Word mask = Word{1} << (c % kWordBits);
        w = v ? (w | mask) : (w & ~mask);
    }
    bool at(std::size_t r, std::size_t c) const;

    std::span<const Word> row(std::size_t r) const { return {bits_.data() + r * stride_, stride_}; }
    // Caller must keep padding bits beyond cols() at zero.
    std::span<Word> row_mut(std::size_t r) { return {bits_.data() + r * stride_, stride_}; }

    // Appends k all-zero columns, growing capacity geometrically if needed.
    void append_cols(std::size_t k);
    void erase_col(std::size_t c);
    void append_rows(std::size_t k);
    void erase_row(std::size_t r);

    std::size_t count_ones() const;
    std::size_t count_ones_in_col(std::size_t c) const;
    BinaryMatrix transpose() const;
    // Same entries, capacity trimmed to cols().
    BinaryMatrix compact() const;

    friend bool operator==(const BinaryMatrix& a, const BinaryMatrix& b);

private:
    void reserve_cols(std::size_t capacity);

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t stride_ = 0;
    std::vector<Word> bits_;
};

struct PredictionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn_ = 0;

    std::size_t correct() const { return tp + tn; }
    std::size_t wrong() const { return fp + fn_; }
    std::size_t total() const { return tp + fp + tn + fn_; }

    PredictionCounts& operator+=(const PredictionCounts& o)
    {
        tp += o.tp;
        fp += o.fp;
        tn += o.tn;
        fn_ += o.fn_;
        return *this;
    }
    friend bool operator==(const PredictionCounts&, const PredictionCounts&) = default;
};

struct NegativeCounts {
    std::size_t tn = 0;
    std::size_t fn_ = 0;
    friend bool operator==(const NegativeCounts&, const NegativeCounts&) = default;
};

// x_nd = OR_l (z_nl AND u_dl), with Z N×L and U D×L.
BinaryMatrix boolean_product(const BinaryMatrix& z, const BinaryMatrix& u);

PredictionCounts prediction_counts(const BinaryMatrix& x, const BinaryMatrix& z, const BinaryMatrix& u);

// Negative predictions of one row, split into TN (x=0) and FN (x=1).
// x_row holds D bits, z_row holds L bits, u is D×L.
NegativeCounts row_negative_counts(std::span<const Word> x_row, std::span<const Word> z_row,
                                   const BinaryMatrix& u);

// ---------------------------------------------------------------------------
// Word-level kernels shared by the samplers. Spans are equal-length word runs.

std::size_t popcount(std::span<const Word> a);
std::size_t popcount_and(std::span<const Word> a, std::span<const Word> b);

// OR of the rows of `codes` selected by the set bits of `selector` (a row of
// the factor matrix whose columns index rows of `codes`).
void covered_by(std::span<const Word> selector, std::size_t n_codes, const BinaryMatrix& codes,
                std::span<Word> out);

// Tallies of a reconstructed row `pred` against data row `x`, both `width` bits.
PredictionCounts compare_row(std::span<const Word> x, std::span<const Word> pred, std::size_t width);

}  // namespace bmf
