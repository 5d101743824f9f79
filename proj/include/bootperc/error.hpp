#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bootperc {

enum class ErrorKind {
    invalid_parameter,
    invalid_argument,
    instance_too_large,
    not_traversable,
    structure_violation,
    no_convergence,
    domain_error,
    non_integral_term,
    invalid_box,
    negative_growth,
    non_monotone_path,
    trajectory_too_large,
    bad_spec,
    io_error,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

}  // namespace bootperc
