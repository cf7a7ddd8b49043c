#pragma once

#include <stdexcept>
#include <string>

namespace az {

// Domain failures map to CLI exit code 1, usage/IO failures to 2.
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

class DimensionMismatch : public DomainError {
public:
    explicit DimensionMismatch(const std::string& what) : DomainError(what) {}
};

class NotCommuting : public DomainError {
public:
    explicit NotCommuting(const std::string& what) : DomainError(what) {}
};

class NonRealSpectrum : public DomainError {
public:
    explicit NonRealSpectrum(const std::string& what) : DomainError(what) {}
};

class SingularBasis : public DomainError {
public:
    explicit SingularBasis(const std::string& what) : DomainError(what) {}
};

class PoleAtPoint : public DomainError {
public:
    explicit PoleAtPoint(const std::string& what) : DomainError(what) {}
};

class OrderTooHigh : public DomainError {
public:
    explicit OrderTooHigh(const std::string& what) : DomainError(what) {}
};

class BasePointMismatch : public DomainError {
public:
    explicit BasePointMismatch(const std::string& what) : DomainError(what) {}
};

class DegreeMismatch : public DomainError {
public:
    explicit DegreeMismatch(const std::string& what) : DomainError(what) {}
};

class NotADerivation : public DomainError {
public:
    explicit NotADerivation(const std::string& what) : DomainError(what) {}
};

class FiberNotAdmissible : public DomainError {
public:
    FiberNotAdmissible(double x, const std::string& what)
        : DomainError(what), fiber_x(x) {}
    double fiber_x;
};

class MonodromyMismatch : public DomainError {
public:
    explicit MonodromyMismatch(const std::string& what) : DomainError(what) {}
};

class HypothesesNotMet : public DomainError {
public:
    HypothesesNotMet(int component, const std::string& what)
        : DomainError(what), component_id(component) {}
    int component_id;
};

class DimensionCondition : public DomainError {
public:
    explicit DimensionCondition(const std::string& what) : DomainError(what) {}
};

class OutOfRange : public DomainError {
public:
    explicit OutOfRange(const std::string& what) : DomainError(what) {}
};

class PoleAtSupport : public DomainError {
public:
    explicit PoleAtSupport(const std::string& what) : DomainError(what) {}
};

// Input-layer failures (exit code 2).
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public InputError {
public:
    explicit ParseError(const std::string& what) : InputError(what) {}
};

class SchemaError : public InputError {
public:
    SchemaError(const std::string& path, const std::string& what)
        : InputError(what + " at " + path), pointer(path) {}
    std::string pointer;
};

class VersionUnsupported : public InputError {
public:
    explicit VersionUnsupported(const std::string& what) : InputError(what) {}
};

class IOError : public InputError {
public:
    explicit IOError(const std::string& what) : InputError(what) {}
};

}  // namespace az
