#pragma once

#include <stdexcept>
#include <string>

namespace bbq {

// Error categories map one-to-one onto CLI exit codes.
enum class ErrorKind {
    Config = 2,
    Parse = 3,
    Fit = 4,
    Synthesis = 5,
    Quantization = 6,
    Simulation = 7,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error(ErrorKind::Parse, what) {}
};

struct FitError : Error {
    explicit FitError(const std::string& what) : Error(ErrorKind::Fit, what) {}
};

struct SynthesisError : Error {
    explicit SynthesisError(const std::string& what) : Error(ErrorKind::Synthesis, what) {}
};

struct QuantizationError : Error {
    explicit QuantizationError(const std::string& what) : Error(ErrorKind::Quantization, what) {}
};

struct SimulationError : Error {
    explicit SimulationError(const std::string& what) : Error(ErrorKind::Simulation, what) {}
};

} // namespace bbq
