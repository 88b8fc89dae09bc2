#pragma once

#include "clustersym/relations.hpp"

#include <vector>

namespace clustersym {

/// f(x) = a x^2 + b x + c on one piece.
struct Quadratic {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    [[nodiscard]] double value(double x) const { return (a * x + b) * x + c; }
    [[nodiscard]] double slope(double x) const { return 2.0 * a * x + b; }
};

/// Convex piecewise-quadratic function on an interval, +inf outside it.
///
/// Pieces are separated by strictly increasing interior breakpoints, so there
/// is always one more piece than breakpoints. A single-point domain is stored
/// as one constant piece. The anchor is the point used by integrate() to fix
/// the additive constant (f(anchor) = 0 there); conjugate() keeps the exact
/// Legendre values instead.
class PwqFunction {
public:
    PwqFunction(Interval domain, std::vector<double> breakpoints, std::vector<Quadratic> pieces,
                double anchor);

    static PwqFunction point_indicator(double at, double value);

    [[nodiscard]] const Interval& domain() const { return domain_; }
    [[nodiscard]] const std::vector<double>& breakpoints() const { return breakpoints_; }
    [[nodiscard]] const std::vector<Quadratic>& pieces() const { return pieces_; }
    [[nodiscard]] double anchor() const { return anchor_; }

    double operator()(double x) const;

    [[nodiscard]] Interval subgradient(double x) const;
    [[nodiscard]] MonotoneRelation subdifferential() const;
    [[nodiscard]] PwqFunction shifted(double constant) const;
    /// Recession function lim_{t->inf} f(x + t d) / t; +inf where f grows
    /// faster than linearly or the domain ends.
    [[nodiscard]] double recession(double d) const;

private:
    [[nodiscard]] std::size_t piece_index(double x) const;

    Interval domain_;
    std::vector<double> breakpoints_;
    std::vector<Quadratic> pieces_;
    double anchor_;
};

/// Convex potential whose subdifferential is r on its domain.
PwqFunction integrate(const MonotoneRelation& r);

/// Legendre transform sup_x { y x - f(x) }.
PwqFunction conjugate(const PwqFunction& f);

}  // namespace clustersym
