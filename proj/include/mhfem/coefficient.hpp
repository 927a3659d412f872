#pragma once

#include <functional>
#include <stdexcept>
#include <utility>

#include "mhfem/mesh.hpp"

namespace mhfem {

/// A scalar coefficient on the domain, either constant or a pointwise
/// evaluator, together with positive lower/upper bounds used by the
/// majorant constants.
class CoefficientField {
public:
    static CoefficientField constant(double value) {
        if (value <= 0.0) throw std::invalid_argument("CoefficientField: value must be positive");
        CoefficientField c;
        c.lower_ = c.upper_ = value;
        c.constant_value_ = value;
        c.is_constant_ = true;
        return c;
    }

    static CoefficientField variable(std::function<double(Vec2)> eval, double lower, double upper) {
        if (lower <= 0.0 || upper < lower) {
            throw std::invalid_argument("CoefficientField: bounds must satisfy 0 < lower <= upper");
        }
        CoefficientField c;
        c.eval_ = std::move(eval);
        c.lower_ = lower;
        c.upper_ = upper;
        c.is_constant_ = false;
        return c;
    }

    bool is_constant() const { return is_constant_; }
    double lower_bound() const { return lower_; }
    double upper_bound() const { return upper_; }

    double operator()(Vec2 x) const { return is_constant_ ? constant_value_ : eval_(x); }
    double constant_value() const { return constant_value_; }

private:
    CoefficientField() = default;
    std::function<double(Vec2)> eval_;
    double constant_value_ = 1.0;
    double lower_ = 1.0;
    double upper_ = 1.0;
    bool is_constant_ = true;
};

}  // namespace mhfem
