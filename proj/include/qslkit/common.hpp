#pragma once

#include <stdexcept>
#include <string>

namespace qslkit {

// Shared tolerances for every iterative solver in the library.
struct SolverConfig {
    double abs_tol = 1e-12;
    int max_iter = 200;
};

inline const SolverConfig& solver_config() {
    static const SolverConfig cfg{};
    return cfg;
}

struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SaturabilityError : std::runtime_error {
    explicit SaturabilityError(const std::string& msg) : std::runtime_error(msg) {}
};

struct QuadratureError : std::runtime_error {
    explicit QuadratureError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace qslkit
