#pragma once

#include <stdexcept>
#include <string>

namespace wks {

/// Malformed input document (instance, pattern, transcript, CLI argument).
struct schema_error : std::runtime_error {
    explicit schema_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A table or enumeration would exceed the configured capacity limit.
struct capacity_error : std::runtime_error {
    explicit capacity_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Mismatched sizes between configurations, weight profiles or patterns.
struct dimension_error : std::runtime_error {
    explicit dimension_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// An online algorithm violated the request/serve protocol.
struct protocol_error : std::runtime_error {
    explicit protocol_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A runtime-checkable invariant failed during a monitored run.
struct invariant_error : std::runtime_error {
    explicit invariant_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace wks
