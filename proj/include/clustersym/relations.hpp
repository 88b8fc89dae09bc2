#pragma once

// Scalar maximal monotone relations represented as piecewise-linear curves in
// the (input, output) plane.
//
// A relation is an ordered list of vertices, both coordinates nondecreasing,
// joined by segments (vertical, horizontal or of positive slope) and closed
// off by a tail ray at each end. Because both ends always carry a ray going
// to infinity the curve is connected and unbounded in both directions, which
// is exactly maximality for a monotone subset of the plane.

#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace clustersym {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Weak-equivalence tolerance on breakpoint coordinates.
inline constexpr double kRelationTolerance = 1e-12;

struct Point {
    double u = 0.0;  // input
    double y = 0.0;  // output
};

/// Closed interval [lo, hi]; empty when lo > hi. Bounds may be infinite.
struct Interval {
    double lo = kInf;
    double hi = -kInf;

    static Interval empty() { return {}; }
    static Interval point(double x) { return {x, x}; }
    static Interval whole() { return {-kInf, kInf}; }

    [[nodiscard]] bool is_empty() const { return lo > hi; }
    [[nodiscard]] bool is_point() const { return lo == hi; }
    [[nodiscard]] bool contains(double x) const { return lo <= x && x <= hi; }
    /// Distance from x to the interval; +inf when empty.
    [[nodiscard]] double distance(double x) const;
    /// Nearest point of a nonempty interval.
    [[nodiscard]] double clamp(double x) const;
    /// x minus its projection (positive above, negative below).
    [[nodiscard]] double excess(double x) const;
};

struct Tail {
    enum class Kind { Vertical, Horizontal, Slope };

    Kind kind = Kind::Vertical;
    double slope = 0.0;  // only meaningful for Kind::Slope, always > 0

    static Tail vertical() { return {Kind::Vertical, 0.0}; }
    static Tail horizontal() { return {Kind::Horizontal, 0.0}; }
    /// Slope 0 collapses to horizontal; negative or non-finite slopes throw.
    static Tail with_slope(double s);

    /// Unit-free direction (du, dy) pointing away from the curve on the right.
    [[nodiscard]] Point direction() const;
    /// The same ray after swapping the coordinates.
    [[nodiscard]] Tail swapped() const;
};

class MonotoneRelation {
public:
    /// Builds the canonical curve: duplicates dropped, interior collinear
    /// vertices merged. Throws NonMonotoneInput if a coordinate decreases.
    static MonotoneRelation canonicalize(std::vector<Point> raw, Tail left, Tail right);

    static MonotoneRelation identity();
    /// Single integrator: {(0, y) : y real}.
    static MonotoneRelation integrator();
    /// Zero map: {(u, 0) : u real}.
    static MonotoneRelation zero();
    /// y = a u + b, a >= 0.
    static MonotoneRelation affine(double a, double b);

    [[nodiscard]] const std::vector<Point>& vertices() const { return vertices_; }
    [[nodiscard]] const Tail& left_tail() const { return left_; }
    [[nodiscard]] const Tail& right_tail() const { return right_; }

    /// {y : (u, y) in r} as a closed interval, possibly empty or unbounded.
    [[nodiscard]] Interval evaluate(double u) const;
    /// Projection of the curve on the input axis.
    [[nodiscard]] Interval domain() const;
    /// Projection of the curve on the output axis.
    [[nodiscard]] Interval range() const;

    [[nodiscard]] MonotoneRelation inverse() const;
    /// Point reflection through the origin.
    [[nodiscard]] MonotoneRelation reflected() const;

    /// (I + alpha r)^{-1}(v): the unique u with v in u + alpha r(u).
    [[nodiscard]] double resolvent(double alpha, double v) const;
    /// The curve point (u, y) with u + alpha y = v.
    [[nodiscard]] Point resolvent_point(double alpha, double v) const;

    /// Euclidean distance from (u, y) to the curve.
    [[nodiscard]] double graph_distance(double u, double y) const;

    /// No vertical or horizontal pieces anywhere, tails included.
    [[nodiscard]] bool strictly_monotone() const;
    /// Defined and single-valued on the whole input axis.
    [[nodiscard]] bool is_function() const;

    /// Normal form used for set comparison: endpoint vertices that merely
    /// continue a tail are removed and straight lines get a fixed anchor.
    [[nodiscard]] MonotoneRelation reduced(double tol = kRelationTolerance) const;

private:
    MonotoneRelation(std::vector<Point> v, Tail l, Tail r)
        : vertices_(std::move(v)), left_(l), right_(r) {}

    std::vector<Point> vertices_;
    Tail left_;
    Tail right_;
};

/// Set equality of two relations, coordinates compared with
/// |a - b| <= tol * max(1, |a|, |b|).
bool same_relation(const MonotoneRelation& a, const MonotoneRelation& b, double tol);

bool weakly_equivalent(const MonotoneRelation& a, const MonotoneRelation& b);

/// r(-x) = -r(x).
bool is_odd(const MonotoneRelation& r);

struct NamedRelation {
    std::string name;
    MonotoneRelation relation;
};

/// Library of named relations: identity, integrator, zero, saturation,
/// relay, dead_zone, box, shifted_identity, two_slope, stiff_affine.
const std::vector<NamedRelation>& builtin_relations();

/// Lookup in builtin_relations(); throws InvalidRelation on unknown names.
MonotoneRelation named_relation(std::string_view name);

}  // namespace clustersym
