#pragma once

#include <stdexcept>
#include <string>

namespace dyson {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parameter outside its documented range.
class DomainError : public Error {
public:
    using Error::Error;
};

// Density carries mass at the grid edge.
class TailContainmentError : public Error {
public:
    using Error::Error;
};

// The block integral does not decay inside the grid.
class NormalizerDivergence : public Error {
public:
    using Error::Error;
};

class ResolutionLoss : public Error {
public:
    using Error::Error;
};

class IllConditioned : public Error {
public:
    using Error::Error;
};

class NotAFixedPoint : public Error {
public:
    using Error::Error;
};

class BudgetExceeded : public Error {
public:
    using Error::Error;
};

class SameClassificationAtEndpoints : public Error {
public:
    using Error::Error;
};

class UndecidedProbe : public Error {
public:
    UndecidedProbe(const std::string& what, double t) : Error(what), t_(t) {}
    double t() const { return t_; }

private:
    double t_;
};

class NoSignChange : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

// Missing or unreadable input file.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace dyson
