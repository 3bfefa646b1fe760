#pragma once

#include <stdexcept>
#include <string>

namespace isonet {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the domain of an operation (zero quaternion, point off a quadric, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Matrix with vanishing Study determinant or otherwise singular linear system.
class SingularError : public Error {
public:
    using Error::Error;
};

// Repeated or collapsed vertices.
class DegenerateError : public Error {
public:
    using Error::Error;
};

// Data fails an isothermicity or compatibility condition.
class NotIsothermicError : public Error {
public:
    using Error::Error;
};

// lambda * a_pq == 1 on some edge.
class PoleError : public Error {
public:
    using Error::Error;
};

// Failure of an iterative or propagation step.
class StepError : public Error {
public:
    using Error::Error;
};

}  // namespace isonet
