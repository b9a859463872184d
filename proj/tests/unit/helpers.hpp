#pragma once

#include "thermoreg/common.hpp"
#include "thermoreg/feature_matrix.hpp"
#include "thermoreg/rng.hpp"

#include <unistd.h>

#include <filesystem>
#include <string>
#include <vector>

namespace testing {

inline thermo::Matrix random_matrix(thermo::Index rows, thermo::Index cols, thermo::Rng& rng, double sd = 1.0)
{
    thermo::Matrix m(rows, cols);
    for (thermo::Index i = 0; i < rows; ++i) {
        for (thermo::Index j = 0; j < cols; ++j) {
            m(i, j) = rng.normal(0.0, sd);
        }
    }
    return m;
}

inline thermo::Vector random_vector(thermo::Index n, thermo::Rng& rng, double sd = 1.0)
{
    thermo::Vector v(n);
    for (thermo::Index i = 0; i < n; ++i) {
        v(i) = rng.normal(0.0, sd);
    }
    return v;
}

inline std::vector<std::string> numbered(const std::string& prefix, thermo::Index n)
{
    std::vector<std::string> out;
    for (thermo::Index i = 0; i < n; ++i) {
        out.push_back(prefix + std::to_string(i));
    }
    return out;
}

// Collects warnings for the lifetime of the object.
class WarningCapture {
public:
    WarningCapture()
    {
        previous_ = thermo::set_warning_handler([this](const std::string& m) { messages.push_back(m); });
    }
    ~WarningCapture() { thermo::set_warning_handler(previous_); }
    bool contains(const std::string& needle) const
    {
        for (const auto& m : messages) {
            if (m.find(needle) != std::string::npos) {
                return true;
            }
        }
        return false;
    }
    std::vector<std::string> messages;

private:
    thermo::WarningHandler previous_;
};

// Fresh directory under the system temp path, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag)
    {
        path = std::filesystem::temp_directory_path() / ("thermoreg_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::filesystem::path path;

private:
    static int& counter()
    {
        static int c = 0;
        return c;
    }
};

} // namespace testing
