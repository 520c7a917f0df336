#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nilmoduli {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t pos)
        : Error(msg + " at position " + std::to_string(pos)), position(pos) {}
    std::size_t position;
};

class SingularMatrix : public Error { using Error::Error; };
class NotNilpotent : public Error { using Error::Error; };
class NotSPD : public Error { using Error::Error; };
class Diverged : public Error { using Error::Error; };
class DegenerateParams : public Error { using Error::Error; };
class Unsupported : public Error { using Error::Error; };
class InvalidForm : public Error { using Error::Error; };
class InvalidTriple : public Error { using Error::Error; };
class InvalidParams : public Error { using Error::Error; };
class AlgebraMismatch : public Error { using Error::Error; };

class CanonicalizationFailed : public Error {
public:
    CanonicalizationFailed(const std::string& msg, double best)
        : Error(msg), best_residual(best) {}
    double best_residual;
};

}  // namespace nilmoduli
