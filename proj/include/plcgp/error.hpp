#pragma once

#include <stdexcept>

namespace plcgp {

/// Invalid parameters or configuration values.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// File system failures; the message carries the offending path.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace plcgp
