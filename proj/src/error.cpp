#include "bootperc/error.hpp"

namespace bootperc {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_parameter: return "invalid-parameter";
        case ErrorKind::invalid_argument: return "invalid-argument";
        case ErrorKind::instance_too_large: return "instance-too-large";
        case ErrorKind::not_traversable: return "not-traversable";
        case ErrorKind::structure_violation: return "structure-violation";
        case ErrorKind::no_convergence: return "no-convergence";
        case ErrorKind::domain_error: return "domain-error";
        case ErrorKind::non_integral_term: return "non-integral-term";
        case ErrorKind::invalid_box: return "invalid-box";
        case ErrorKind::negative_growth: return "negative-growth";
        case ErrorKind::non_monotone_path: return "non-monotone-path";
        case ErrorKind::trajectory_too_large: return "trajectory-too-large";
        case ErrorKind::bad_spec: return "bad-spec";
        case ErrorKind::io_error: return "io-error";
    }
    return "unknown";
}

}  // namespace bootperc
