#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <random>
#include <string>

#include "commdist/error.hpp"
#include "commdist/linalg3.hpp"

namespace testing {

inline double max_abs(const commdist::Mat3& a) {
    double m = 0;
    for (double v : a.m) m = std::max(m, std::abs(v));
    return m;
}

inline double max_abs_diff(const commdist::Vec3& a, const commdist::Vec3& b) {
    return std::max({std::abs(a[0] - b[0]), std::abs(a[1] - b[1]), std::abs(a[2] - b[2])});
}

inline double orthogonality_defect(const commdist::Mat3& q) {
    return commdist::frobenius_norm(q.transposed() * q - commdist::Mat3::identity());
}

/// Kind of the commdist::Error thrown by f, or nullopt if nothing was thrown.
template <class F>
std::optional<commdist::ErrorKind> error_kind(F&& f) {
    try {
        f();
    } catch (const commdist::Error& e) {
        return e.kind();
    }
    return std::nullopt;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("commdist_" + tag + "_" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace testing
