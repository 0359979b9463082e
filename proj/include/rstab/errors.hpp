#pragma once

#include <stdexcept>
#include <string>

namespace rstab {

// Error taxonomy shared with the CLI exit codes: parse = 2, ill-posed = 3,
// infeasible = 4, singular = 5.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

struct IllPosedError : Error {
    explicit IllPosedError(const std::string& msg) : Error(msg) {}
};

struct InfeasibleError : Error {
    explicit InfeasibleError(const std::string& msg) : Error(msg) {}
};

struct SingularError : Error {
    explicit SingularError(const std::string& msg) : Error(msg) {}
};

}  // namespace rstab
