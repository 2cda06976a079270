#include "bmf/bitmat.hpp"

#include <algorithm>
#include <bit>
#include <string>

namespace bmf {

namespace {

void require(bool ok, const char* what)
{
    if (!ok) throw DimensionError(what);
}

}  // namespace

BinaryMatrix::BinaryMatrix(std::size_t rows, std::size_t cols, std::size_t col_capacity)
    : rows_(rows), cols_(cols), stride_(words_for(std::max(cols, col_capacity))), bits_(rows * stride_, 0)
{
}

BinaryMatrix BinaryMatrix::from_rows(std::initializer_list<std::initializer_list<int>> rows)
{
    const std::size_t n = rows.size();
    const std::size_t m = n == 0 ? 0 : rows.begin()->size();
    BinaryMatrix out(n, m);
    std::size_t r = 0;
    for (const auto& row : rows) {
        require(row.size() == m, "from_rows: ragged rows");
        std::size_t c = 0;
        for (int v : row) {
            require(v == 0 || v == 1, "from_rows: entries must be 0 or 1");
            out.set(r, c++, v == 1);
        }
        ++r;
    }
    return out;
}

bool BinaryMatrix::at(std::size_t r, std::size_t c) const
{
    if (r >= rows_ || c >= cols_)
        throw std::out_of_range("BinaryMatrix::at(" + std::to_string(r) + ", " + std::to_string(c) + ")");
    return get(r, c);
}

void BinaryMatrix::reserve_cols(std::size_t capacity)
{
    const std::size_t stride = words_for(capacity);
    if (stride <= stride_) return;
    std::vector<Word> bits(rows_ * stride, 0);
    for (std::size_t r = 0; r < rows_; ++r)
        std::copy_n(bits_.begin() + static_cast<std::ptrdiff_t>(r * stride_), stride_,
                    bits.begin() + static_cast<std::ptrdiff_t>(r * stride));
    bits_ = std::move(bits);
    stride_ = stride;
}

void BinaryMatrix::append_cols(std::size_t k)
{
    if (cols_ + k > col_capacity()) reserve_cols(std::max(cols_ + k, 2 * col_capacity()));
    cols_ += k;
}

void BinaryMatrix::erase_col(std::size_t c)
{
    require(c < cols_, "erase_col: column out of range");
    const std::size_t first = c / kWordBits;
    const std::size_t last = words_for(cols_);
    const Word keep = (Word{1} << (c % kWordBits)) - 1;
    for (std::size_t r = 0; r < rows_; ++r) {
        Word* w = bits_.data() + r * stride_;
        Word shifted = (w[first] >> 1) & ~keep;
        if (first + 1 < last) shifted |= w[first + 1] << (kWordBits - 1);
        w[first] = (w[first] & keep) | shifted;
        for (std::size_t i = first + 1; i < last; ++i) {
            w[i] >>= 1;
            if (i + 1 < last) w[i] |= w[i + 1] << (kWordBits - 1);
        }
    }
    --cols_;
}

void BinaryMatrix::append_rows(std::size_t k)
{
    bits_.resize((rows_ + k) * stride_, 0);
    rows_ += k;
}

void BinaryMatrix::erase_row(std::size_t r)
{
    require(r < rows_, "erase_row: row out of range");
    const auto begin = bits_.begin() + static_cast<std::ptrdiff_t>(r * stride_);
    bits_.erase(begin, begin + static_cast<std::ptrdiff_t>(stride_));
    --rows_;
}

std::size_t BinaryMatrix::count_ones() const
{
    return popcount(bits_);
}

std::size_t BinaryMatrix::count_ones_in_col(std::size_t c) const
{
    std::size_t n = 0;
    for (std::size_t r = 0; r < rows_; ++r) n += get(r, c);
    return n;
}

BinaryMatrix BinaryMatrix::transpose() const
{
    BinaryMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        const Word* w = bits_.data() + r * stride_;
        for (std::size_t i = 0; i < stride_; ++i) {
            Word bits = w[i];
            while (bits) {
                const std::size_t c = i * kWordBits + static_cast<std::size_t>(std::countr_zero(bits));
                t.set(c, r, true);
                bits &= bits - 1;
            }
        }
    }
    return t;
}

BinaryMatrix BinaryMatrix::compact() const
{
    BinaryMatrix out(rows_, cols_);
    const std::size_t w = out.stride_;
    for (std::size_t r = 0; r < rows_; ++r)
        std::copy_n(bits_.begin() + static_cast<std::ptrdiff_t>(r * stride_), w,
                    out.bits_.begin() + static_cast<std::ptrdiff_t>(r * w));
    return out;
}

bool operator==(const BinaryMatrix& a, const BinaryMatrix& b)
{
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
    const std::size_t w = words_for(a.cols_);
    for (std::size_t r = 0; r < a.rows_; ++r)
        if (!std::equal(a.row(r).begin(), a.row(r).begin() + static_cast<std::ptrdiff_t>(w), b.row(r).begin()))
            return false;
    return true;
}

// ---------------------------------------------------------------------------

std::size_t popcount(std::span<const Word> a)
{
    std::size_t n = 0;
    for (Word w : a) n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

std::size_t popcount_and(std::span<const Word> a, std::span<const Word> b)
{
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) n += static_cast<std::size_t>(std::popcount(a[i] & b[i]));
    return n;
}

void covered_by(std::span<const Word> selector, std::size_t n_codes, const BinaryMatrix& codes,
                std::span<Word> out)
{
    std::fill(out.begin(), out.end(), Word{0});
    for (std::size_t i = 0; i < words_for(n_codes); ++i) {
        Word bits = selector[i];
        while (bits) {
            const std::size_t l = i * kWordBits + static_cast<std::size_t>(std::countr_zero(bits));
            const auto code = codes.row(l);
            for (std::size_t k = 0; k < out.size(); ++k) out[k] |= code[k];
            bits &= bits - 1;
        }
    }
}

PredictionCounts compare_row(std::span<const Word> x, std::span<const Word> pred, std::size_t width)
{
    PredictionCounts c;
    const std::size_t n = words_for(width);
    for (std::size_t i = 0; i < n; ++i) {
        c.tp += static_cast<std::size_t>(std::popcount(x[i] & pred[i]));
        c.fp += static_cast<std::size_t>(std::popcount(~x[i] & pred[i]));
        c.fn_ += static_cast<std::size_t>(std::popcount(x[i] & ~pred[i]));
    }
    c.tn = width - c.tp - c.fp - c.fn_;
    return c;
}

BinaryMatrix boolean_product(const BinaryMatrix& z, const BinaryMatrix& u)
{
    require(z.cols() == u.cols(), "boolean_product: Z and U disagree on the latent dimension");
    const BinaryMatrix ut = u.transpose();
    BinaryMatrix out(z.rows(), u.rows());
    for (std::size_t n = 0; n < z.rows(); ++n) covered_by(z.row(n), z.cols(), ut, out.row_mut(n));
    return out;
}

PredictionCounts prediction_counts(const BinaryMatrix& x, const BinaryMatrix& z, const BinaryMatrix& u)
{
    require(z.cols() == u.cols(), "prediction_counts: Z and U disagree on the latent dimension");
    require(x.rows() == z.rows() && x.cols() == u.rows(), "prediction_counts: X is not N×D for the given factors");
    const BinaryMatrix ut = u.transpose();
    std::vector<Word> pred(words_for(x.cols()));
    PredictionCounts total;
    for (std::size_t n = 0; n < x.rows(); ++n) {
        covered_by(z.row(n), z.cols(), ut, pred);
        total += compare_row(x.row(n), pred, x.cols());
    }
    return total;
}

NegativeCounts row_negative_counts(std::span<const Word> x_row, std::span<const Word> z_row,
                                   const BinaryMatrix& u)
{
    require(z_row.size() >= words_for(u.cols()), "row_negative_counts: z_row shorter than L");
    require(x_row.size() >= words_for(u.rows()), "row_negative_counts: x_row shorter than D");
    NegativeCounts c;
    const std::size_t lw = words_for(u.cols());
    for (std::size_t d = 0; d < u.rows(); ++d) {
        const auto urow = u.row(d);
        bool covered = false;
        for (std::size_t i = 0; i < lw && !covered; ++i) covered = (urow[i] & z_row[i]) != 0;
        if (covered) continue;
        if ((x_row[d / kWordBits] >> (d % kWordBits)) & 1u)
            ++c.fn_;
        else
            ++c.tn;
    }
    return c;
}

}  // namespace bmf
