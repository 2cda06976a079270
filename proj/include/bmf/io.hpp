#pragma once

#include "bmf/bitmat.hpp"
#include "bmf/chain.hpp"
#include "bmf/posterior.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

namespace bmf {

enum class MatrixFormat { dense_csv, sparse_coo };

MatrixFormat parse_format(const std::string& name);
std::string format_name(MatrixFormat format);

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input; what() names the file and line.
class ParseError : public IoError {
public:
    ParseError(const std::filesystem::path& path, std::size_t line, const std::string& message);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

struct DatasetSpec {
    std::filesystem::path path;
    MatrixFormat format = MatrixFormat::dense_csv;
    // Entries strictly above the threshold become 1. Without a threshold only
    // the literal values 0 and 1 are accepted.
    std::optional<double> binarize_threshold = 0.0;
};

// Dense CSV: one line per row, comma-separated numbers.
// Sparse COO: header "N D", then one "row col [value]" line per entry with
// zero-based indices; a missing value means 1.
BinaryMatrix load(const DatasetSpec& spec);
void save_matrix(const BinaryMatrix& m, const std::filesystem::path& path, MatrixFormat format);

// Directory layout:
//   chain.json            format version, run configuration, sample counts
//   traces.csv            sample_index,L,lambda (post-burn-in only)
//   factors/z_<i>.coo     per-sample factor snapshots (when recorded)
//   factors/u_<i>.coo
inline constexpr int kChainFormatVersion = 1;
void save_chain(const Chain& chain, const std::filesystem::path& directory);
Chain load_chain(const std::filesystem::path& directory);

// Binary PGM, one pixel per entry, 1 → black and 0 → white.
void export_heatmap(const DenseMatrix& matrix, const std::filesystem::path& path);

// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace bmf
