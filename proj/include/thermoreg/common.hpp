#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace thermo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Error taxonomy. The CLI maps each class onto its own exit code.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using WarningHandler = std::function<void(const std::string&)>;

// Installs a process-wide warning sink and returns the previous one.
// The default sink prints each distinct message once to stderr.
WarningHandler set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

std::string version_string();

} // namespace thermo
