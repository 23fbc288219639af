#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace gridcert {

using Eigen::Matrix2d;
using Eigen::Matrix4d;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

// Thrown when a case file or parameter record fails validation.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a model is evaluated outside its domain (e.g. voltage collapse
// below the resolution floor of the power-to-current maps).
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when the network algebra is structurally singular for the chosen
// port-role split.
class StructuralError : public std::runtime_error {
public:
    explicit StructuralError(const std::string& what) : std::runtime_error(what) {}
};

// Minimum DQ voltage magnitude (p.u.) accepted by the current/power
// resolution maps of PLL, ZIP and VSG models.
inline constexpr double kVoltageFloor = 1e-3;

} // namespace gridcert
