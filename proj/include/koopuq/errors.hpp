#pragma once

#include <stdexcept>
#include <string>

namespace koopuq {

// Exit codes the CLI maps each error family to.
enum class errc : int {
    config = 2,   // invalid or inconsistent configuration
    data = 3,     // malformed, missing or insufficient data
    numeric = 4,  // divergence or loss of numerical validity
};

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const noexcept { return code_; }
    int exit_code() const noexcept { return static_cast<int>(code_); }

private:
    errc code_;
};

class config_error : public error {
public:
    explicit config_error(const std::string& what) : error(errc::config, what) {}
};

class data_error : public error {
public:
    explicit data_error(const std::string& what) : error(errc::data, what) {}
};

class numeric_error : public error {
public:
    explicit numeric_error(const std::string& what) : error(errc::numeric, what) {}
};

}  // namespace koopuq
