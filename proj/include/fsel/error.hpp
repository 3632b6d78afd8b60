#pragma once

#include <stdexcept>
#include <string>

namespace fsel {

/// Broad failure categories. The CLI maps them onto exit codes 1, 2 and 3.
enum class ErrorKind { config, data, numerical };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline Error config_error(const std::string& what) { return Error(ErrorKind::config, what); }
inline Error data_error(const std::string& what) { return Error(ErrorKind::data, what); }
inline Error numerical_error(const std::string& what) { return Error(ErrorKind::numerical, what); }

}  // namespace fsel
