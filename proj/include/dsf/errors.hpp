#ifndef DSF_ERRORS_HPP
#define DSF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dsf {

/// Bad configuration or command usage. CLI exit code 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data. CLI exit code 2.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite values, undefined results, failed numerical checks. CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace dsf

#endif // DSF_ERRORS_HPP
