#include "bmf/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

namespace bmf {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::vector<std::string_view> split_ws(std::string_view s)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
        const std::size_t start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

template <class T>
bool parse_number(std::string_view token, T& out)
{
    if (token.empty()) return false;
    if (token.front() == '+') token.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
    return ec == std::errc{} && ptr == token.data() + token.size();
}

class Binarizer {
public:
    Binarizer(const fs::path& path, std::optional<double> threshold) : path_(path), threshold_(threshold)
    {
        if (threshold && !std::isfinite(*threshold)) throw std::invalid_argument("binarization threshold must be finite");
    }

    bool operator()(std::string_view token, std::size_t line) const
    {
        double v = 0.0;
        if (!parse_number(token, v) || !std::isfinite(v))
            throw ParseError(path_, line, "expected a number, got '" + std::string(token) + "'");
        if (v < 0.0) throw ParseError(path_, line, "negative entry '" + std::string(token) + "'");
        if (threshold_) return v > *threshold_;
        if (v != 0.0 && v != 1.0)
            throw ParseError(path_, line, "entry '" + std::string(token) + "' is not 0 or 1 and no threshold is set");
        return v == 1.0;
    }

private:
    const fs::path& path_;
    std::optional<double> threshold_;
};

std::vector<std::string> read_lines(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(std::move(line));
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty()) throw ParseError(path, 0, "file is empty");
    return lines;
}

BinaryMatrix load_dense(const DatasetSpec& spec)
{
    const auto lines = read_lines(spec.path);
    const Binarizer binarize(spec.path, spec.binarize_threshold);
    std::vector<std::vector<bool>> rows;
    std::size_t width = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto fields = split(lines[i], ',');
        if (i == 0) width = fields.size();
        if (fields.size() != width)
            throw ParseError(spec.path, i + 1,
                             "expected " + std::to_string(width) + " fields, found " + std::to_string(fields.size()));
        std::vector<bool> row(width);
        for (std::size_t c = 0; c < width; ++c) row[c] = binarize(fields[c], i + 1);
        rows.push_back(std::move(row));
    }
    BinaryMatrix m(rows.size(), width);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < width; ++c)
            if (rows[r][c]) m.set(r, c, true);
    return m;
}

BinaryMatrix load_sparse(const DatasetSpec& spec)
{
    const auto lines = read_lines(spec.path);
    const Binarizer binarize(spec.path, spec.binarize_threshold);
    const auto header = split_ws(lines[0]);
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    if (header.size() != 2 || !parse_number(header[0], n_rows) || !parse_number(header[1], n_cols))
        throw ParseError(spec.path, 1, "expected header 'N D'");
    BinaryMatrix m(n_rows, n_cols);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split_ws(lines[i]);
        if (fields.empty()) continue;
        std::size_t r = 0;
        std::size_t c = 0;
        if (fields.size() < 2 || fields.size() > 3 || !parse_number(fields[0], r) || !parse_number(fields[1], c))
            throw ParseError(spec.path, i + 1, "expected 'row col [value]'");
        if (r >= n_rows || c >= n_cols)
            throw ParseError(spec.path, i + 1,
                             "index (" + std::to_string(r) + ", " + std::to_string(c) + ") outside " +
                                 std::to_string(n_rows) + "x" + std::to_string(n_cols));
        if (fields.size() == 2 || binarize(fields[2], i + 1)) m.set(r, c, true);
    }
    return m;
}

std::ofstream open_for_write(const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    return out;
}

void finish(std::ofstream& out, const fs::path& path)
{
    out.flush();
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

fs::path factor_path(const fs::path& dir, char which, std::size_t iteration)
{
    return dir / "factors" / (std::string(1, which) + "_" + std::to_string(iteration) + ".coo");
}

}  // namespace

ParseError::ParseError(const fs::path& path, std::size_t line, const std::string& message)
    : IoError(path.string() + ":" + std::to_string(line) + ": " + message), line_(line)
{
}

MatrixFormat parse_format(const std::string& name)
{
    if (name == "dense-csv" || name == "csv" || name == "dense") return MatrixFormat::dense_csv;
    if (name == "sparse-coo" || name == "coo" || name == "sparse") return MatrixFormat::sparse_coo;
    throw std::invalid_argument("unknown matrix format '" + name + "' (expected dense-csv or sparse-coo)");
}

std::string format_name(MatrixFormat format)
{
    return format == MatrixFormat::dense_csv ? "dense-csv" : "sparse-coo";
}

BinaryMatrix load(const DatasetSpec& spec)
{
    return spec.format == MatrixFormat::dense_csv ? load_dense(spec) : load_sparse(spec);
}

void save_matrix(const BinaryMatrix& m, const fs::path& path, MatrixFormat format)
{
    if (m.rows() == 0 && m.cols() == 0) throw std::invalid_argument("refusing to save a 0x0 matrix");
    if (format == MatrixFormat::dense_csv && (m.rows() == 0 || m.cols() == 0))
        throw std::invalid_argument("dense CSV cannot represent a matrix with no rows or columns");
    auto out = open_for_write(path);
    std::string line;
    if (format == MatrixFormat::dense_csv) {
        for (std::size_t r = 0; r < m.rows(); ++r) {
            line.clear();
            for (std::size_t c = 0; c < m.cols(); ++c) {
                if (c > 0) line += ',';
                line += m.get(r, c) ? '1' : '0';
            }
            line += '\n';
            out << line;
        }
    } else {
        out << m.rows() << ' ' << m.cols() << '\n';
        for (std::size_t r = 0; r < m.rows(); ++r)
            for (std::size_t c = 0; c < m.cols(); ++c)
                if (m.get(r, c)) out << r << ' ' << c << '\n';
    }
    finish(out, path);
}

std::string format_double(double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void save_chain(const Chain& chain, const fs::path& directory)
{
    if (chain.empty()) throw std::invalid_argument("refusing to save a chain with no samples");
    fs::create_directories(directory);

    nlohmann::json meta = {{"format_version", kChainFormatVersion},
                           {"n_samples", chain.n_samples},
                           {"burn_in", chain.burn_in},
                           {"n_recorded", chain.size()},
                           {"has_factors", chain.has_factors},
                           {"config", chain.config}};
    {
        const fs::path path = directory / "chain.json";
        auto out = open_for_write(path);
        out << meta.dump(2) << '\n';
        finish(out, path);
    }
    {
        const fs::path path = directory / "traces.csv";
        auto out = open_for_write(path);
        out << "sample_index,L,lambda\n";
        for (const ChainSample& s : chain.samples)
            out << s.iteration << ',' << s.latent_dim << ',' << format_double(s.lambda) << '\n';
        finish(out, path);
    }
    if (!chain.has_factors) return;
    fs::create_directories(directory / "factors");
    for (const ChainSample& s : chain.samples) {
        save_matrix(s.z, factor_path(directory, 'z', s.iteration), MatrixFormat::sparse_coo);
        save_matrix(s.u, factor_path(directory, 'u', s.iteration), MatrixFormat::sparse_coo);
    }
}

Chain load_chain(const fs::path& directory)
{
    if (!fs::is_directory(directory)) throw IoError("chain directory '" + directory.string() + "' does not exist");
    const fs::path meta_path = directory / "chain.json";
    std::ifstream meta_in(meta_path);
    if (!meta_in) throw IoError("cannot open '" + meta_path.string() + "'");

    Chain chain;
    std::size_t n_recorded = 0;
    try {
        const nlohmann::json meta = nlohmann::json::parse(meta_in);
        const int version = meta.at("format_version").get<int>();
        if (version != kChainFormatVersion)
            throw IoError("chain format version " + std::to_string(version) + " is not supported (expected " +
                          std::to_string(kChainFormatVersion) + ")");
        chain.n_samples = meta.at("n_samples").get<std::size_t>();
        chain.burn_in = meta.at("burn_in").get<std::size_t>();
        chain.has_factors = meta.at("has_factors").get<bool>();
        chain.config = meta.at("config");
        n_recorded = meta.at("n_recorded").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw IoError("corrupt '" + meta_path.string() + "': " + e.what());
    }

    const fs::path traces_path = directory / "traces.csv";
    const auto lines = read_lines(traces_path);
    if (trim(lines[0]) != "sample_index,L,lambda") throw ParseError(traces_path, 1, "unexpected header");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split(lines[i], ',');
        ChainSample s;
        if (fields.size() != 3 || !parse_number(fields[0], s.iteration) || !parse_number(fields[1], s.latent_dim) ||
            !parse_number(fields[2], s.lambda))
            throw ParseError(traces_path, i + 1, "expected 'sample_index,L,lambda'");
        if (chain.has_factors) {
            s.z = load({factor_path(directory, 'z', s.iteration), MatrixFormat::sparse_coo, std::nullopt});
            s.u = load({factor_path(directory, 'u', s.iteration), MatrixFormat::sparse_coo, std::nullopt});
            if (s.z.cols() != s.latent_dim || s.u.cols() != s.latent_dim)
                throw IoError("factor snapshot for sample " + std::to_string(s.iteration) +
                              " disagrees with the L trace");
        }
        chain.samples.push_back(std::move(s));
    }
    if (chain.size() != n_recorded)
        throw IoError("chain.json announces " + std::to_string(n_recorded) + " samples but traces.csv holds " +
                      std::to_string(chain.size()));
    if (chain.empty()) throw IoError("chain holds no samples");
    return chain;
}

void export_heatmap(const DenseMatrix& matrix, const fs::path& path)
{
    for (double v : matrix.values)
        if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("heatmap values must lie in [0, 1]");
    auto out = open_for_write(path);
    out << "P5\n" << matrix.cols << ' ' << matrix.rows << "\n255\n";
    std::string pixels(matrix.values.size(), '\0');
    for (std::size_t i = 0; i < matrix.values.size(); ++i)
        pixels[i] = static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * (1.0 - matrix.values[i]))));
    out.write(pixels.data(), static_cast<std::streamsize>(pixels.size()));
    finish(out, path);
}

}  // namespace bmf
