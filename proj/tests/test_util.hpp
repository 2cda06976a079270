#pragma once

#include "bmf/bitmat.hpp"

#include <filesystem>
#include <random>
#include <string>

namespace bmf::test {

inline BinaryMatrix random_matrix(std::size_t rows, std::size_t cols, double density, std::mt19937_64& gen)
{
    std::bernoulli_distribution coin(density);
    BinaryMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m.set(r, c, coin(gen));
    return m;
}

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag)
        : path_(std::filesystem::temp_directory_path() /
                ("bmf_test_" + tag + "_" + std::to_string(std::random_device{}())))
    {
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace bmf::test
