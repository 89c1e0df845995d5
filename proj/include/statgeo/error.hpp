#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace statgeo {

/// Byte range [begin, end) into the source text of an expression.
struct SourceSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class UnknownIdentifier : public Error {
public:
    UnknownIdentifier(std::string name, std::size_t offset)
        : Error("unknown identifier '" + name + "' at offset " + std::to_string(offset)),
          name_(std::move(name)), offset_(offset) {}
    const std::string& name() const noexcept { return name_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    std::string name_;
    std::size_t offset_;
};

/// Evaluation outside a function's domain, or a point outside the chart domain.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what, SourceSpan span = {})
        : Error(what), span_(span) {}
    SourceSpan span() const noexcept { return span_; }

private:
    SourceSpan span_;
};

/// A spacetime or configuration violates a structural requirement.
class InvariantViolation : public Error {
public:
    using Error::Error;
};

/// A curve that cannot carry the requested construction (e.g. a constant
/// spatial path has no lightlike lift).
class DegenerateCurve : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    ConfigError(const std::string& path, const std::string& what)
        : Error(path + ": " + what), path_(path) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace statgeo
