#pragma once

#include <stdexcept>
#include <string>

namespace eqobs {

// Caller passed incompatible or malformed arguments (descriptor mismatch,
// dimension mismatch, invalid configuration).
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& msg) : std::runtime_error("usage error: " + msg) {}
};

// log requested at or too close to the principal-branch boundary.
struct BranchCutError : std::runtime_error {
    explicit BranchCutError(const std::string& msg) : std::runtime_error("branch cut: " + msg) {}
};

// A computed matrix left the span it must lie in (wrong basis or corrupted input).
struct ConsistencyError : std::runtime_error {
    explicit ConsistencyError(const std::string& msg) : std::runtime_error("consistency error: " + msg) {}
};

// Group action is not transitive at the queried point (rank deficiency).
struct TransitivityError : std::runtime_error {
    explicit TransitivityError(const std::string& msg) : std::runtime_error("transitivity violation: " + msg) {}
};

// Requested capability has no registration for this group/manifold/system.
struct UnsupportedError : std::runtime_error {
    explicit UnsupportedError(const std::string& msg) : std::runtime_error("unsupported: " + msg) {}
};

// A construction precondition failed; message carries a concrete witness.
struct ConstructionError : std::runtime_error {
    explicit ConstructionError(const std::string& msg) : std::runtime_error("construction rejected: " + msg) {}
};

// Time stepping aborted; message carries the last good time.
struct SimulationError : std::runtime_error {
    explicit SimulationError(const std::string& msg) : std::runtime_error("simulation error: " + msg) {}
};

}  // namespace eqobs
