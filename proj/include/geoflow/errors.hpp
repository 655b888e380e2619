#pragma once

#include <stdexcept>
#include <string>

namespace geoflow {

struct DegenerateGradient : std::runtime_error {
    explicit DegenerateGradient(const std::string& what) : std::runtime_error(what) {}
};

struct InterfaceTooCloseToBoundary : std::runtime_error {
    explicit InterfaceTooCloseToBoundary(const std::string& what) : std::runtime_error(what) {}
};

struct NotDistanceFunction : std::runtime_error {
    explicit NotDistanceFunction(const std::string& what) : std::runtime_error(what) {}
};

struct CflViolation : std::runtime_error {
    explicit CflViolation(const std::string& what) : std::runtime_error(what) {}
};

struct NoInterface : std::runtime_error {
    explicit NoInterface(const std::string& what) : std::runtime_error(what) {}
};

struct ShapeTouchesBoundary : std::runtime_error {
    explicit ShapeTouchesBoundary(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace geoflow
