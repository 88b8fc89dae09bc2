#include "clustersym/relations.hpp"

#include "clustersym/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace clustersym {

namespace {

bool close(double a, double b, double tol) {
    if (a == b) {
        return true;
    }
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    return std::abs(a - b) <= tol * scale;
}

double cross(Point a, Point b) { return a.u * b.y - a.y * b.u; }

double norm(Point a) { return std::hypot(a.u, a.y); }

bool parallel(Point a, Point b, double tol) {
    return std::abs(cross(a, b)) <= tol * norm(a) * norm(b);
}

Point diff(Point a, Point b) { return {a.u - b.u, a.y - b.y}; }

double distance_to_segment(Point p, Point a, Point b) {
    const Point d = diff(b, a);
    const double len2 = d.u * d.u + d.y * d.y;
    double t = 0.0;
    if (len2 > 0.0) {
        t = std::clamp(((p.u - a.u) * d.u + (p.y - a.y) * d.y) / len2, 0.0, 1.0);
    }
    return std::hypot(p.u - (a.u + t * d.u), p.y - (a.y + t * d.y));
}

double distance_to_ray(Point p, Point origin, Point dir) {
    const double len2 = dir.u * dir.u + dir.y * dir.y;
    const double t = std::max(0.0, ((p.u - origin.u) * dir.u + (p.y - origin.y) * dir.y) / len2);
    return std::hypot(p.u - (origin.u + t * dir.u), p.y - (origin.y + t * dir.y));
}

bool same_tail(const Tail& a, const Tail& b, double tol) {
    if (a.kind != b.kind) {
        return false;
    }
    return a.kind != Tail::Kind::Slope || close(a.slope, b.slope, tol);
}

// Output values of a tail ray starting at `origin` when crossed by the vertical
// line at u; `sign` is -1 for the left tail and +1 for the right one.
void tail_hits(const Tail& tail, Point origin, double sign, double u, Interval& acc) {
    auto add = [&acc](double lo, double hi) {
        acc.lo = std::min(acc.lo, lo);
        acc.hi = std::max(acc.hi, hi);
    };
    const double du = u - origin.u;
    switch (tail.kind) {
        case Tail::Kind::Vertical:
            if (u == origin.u) {
                sign < 0 ? add(-kInf, origin.y) : add(origin.y, kInf);
            }
            break;
        case Tail::Kind::Horizontal:
            if (sign * du >= 0.0) {
                add(origin.y, origin.y);
            }
            break;
        case Tail::Kind::Slope:
            if (sign * du >= 0.0) {
                const double y = origin.y + tail.slope * du;
                add(y, y);
            }
            break;
    }
}

}  // namespace

double Interval::distance(double x) const {
    if (is_empty()) {
        return kInf;
    }
    if (x < lo) {
        return lo - x;
    }
    if (x > hi) {
        return x - hi;
    }
    return 0.0;
}

double Interval::clamp(double x) const { return std::min(std::max(x, lo), hi); }

double Interval::excess(double x) const { return x - clamp(x); }

Tail Tail::with_slope(double s) {
    if (!std::isfinite(s) || s < 0.0) {
        throw InvalidRelation("tail slope must be finite and nonnegative, got " + std::to_string(s));
    }
    if (s == 0.0) {
        return horizontal();
    }
    return {Kind::Slope, s};
}

Point Tail::direction() const {
    switch (kind) {
        case Kind::Vertical: return {0.0, 1.0};
        case Kind::Horizontal: return {1.0, 0.0};
        case Kind::Slope: return {1.0, slope};
    }
    return {0.0, 1.0};
}

Tail Tail::swapped() const {
    switch (kind) {
        case Kind::Vertical: return horizontal();
        case Kind::Horizontal: return vertical();
        case Kind::Slope: return {Kind::Slope, 1.0 / slope};
    }
    return vertical();
}

MonotoneRelation MonotoneRelation::canonicalize(std::vector<Point> raw, Tail left, Tail right) {
    if (raw.empty()) {
        throw InvalidRelation("relation needs at least one vertex");
    }
    for (Tail* t : {&left, &right}) {
        if (t->kind == Tail::Kind::Slope) {
            *t = Tail::with_slope(t->slope);
        }
    }
    for (const Point& p : raw) {
        if (!std::isfinite(p.u) || !std::isfinite(p.y)) {
            throw InvalidRelation("relation vertices must be finite");
        }
    }
    for (std::size_t i = 1; i < raw.size(); ++i) {
        if (raw[i].u < raw[i - 1].u || raw[i].y < raw[i - 1].y) {
            throw NonMonotoneInput("vertex " + std::to_string(i) + " decreases a coordinate");
        }
    }

    std::vector<Point> out;
    out.reserve(raw.size());
    for (const Point& p : raw) {
        if (!out.empty() && out.back().u == p.u && out.back().y == p.y) {
            continue;
        }
        while (out.size() >= 2 &&
               parallel(diff(out.back(), out[out.size() - 2]), diff(p, out.back()),
                        kRelationTolerance)) {
            out.pop_back();
        }
        out.push_back(p);
    }
    return MonotoneRelation(std::move(out), left, right);
}

MonotoneRelation MonotoneRelation::identity() { return affine(1.0, 0.0); }

MonotoneRelation MonotoneRelation::integrator() {
    return canonicalize({{0.0, 0.0}}, Tail::vertical(), Tail::vertical());
}

MonotoneRelation MonotoneRelation::zero() { return affine(0.0, 0.0); }

MonotoneRelation MonotoneRelation::affine(double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b)) {
        throw InvalidRelation("affine coefficients must be finite");
    }
    if (a < 0.0) {
        throw NonMonotoneInput("affine relation needs a nonnegative slope");
    }
    const Tail t = Tail::with_slope(a);
    return canonicalize({{0.0, b}}, t, t);
}

Interval MonotoneRelation::evaluate(double u) const {
    Interval acc;
    tail_hits(left_, vertices_.front(), -1.0, u, acc);
    for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
        const Point a = vertices_[i];
        const Point b = vertices_[i + 1];
        if (u < a.u || u > b.u) {
            continue;
        }
        if (a.u == b.u) {
            acc.lo = std::min(acc.lo, a.y);
            acc.hi = std::max(acc.hi, b.y);
        } else {
            double y = a.y + (b.y - a.y) * (u - a.u) / (b.u - a.u);
            if (u == b.u) {
                y = b.y;
            }
            acc.lo = std::min(acc.lo, y);
            acc.hi = std::max(acc.hi, y);
        }
    }
    tail_hits(right_, vertices_.back(), 1.0, u, acc);
    return acc;
}

Interval MonotoneRelation::domain() const {
    return {left_.kind == Tail::Kind::Vertical ? vertices_.front().u : -kInf,
            right_.kind == Tail::Kind::Vertical ? vertices_.back().u : kInf};
}

Interval MonotoneRelation::range() const {
    return {left_.kind == Tail::Kind::Horizontal ? vertices_.front().y : -kInf,
            right_.kind == Tail::Kind::Horizontal ? vertices_.back().y : kInf};
}

MonotoneRelation MonotoneRelation::inverse() const {
    std::vector<Point> swapped;
    swapped.reserve(vertices_.size());
    for (const Point& p : vertices_) {
        swapped.push_back({p.y, p.u});
    }
    return MonotoneRelation(std::move(swapped), left_.swapped(), right_.swapped());
}

MonotoneRelation MonotoneRelation::reflected() const {
    std::vector<Point> out;
    out.reserve(vertices_.size());
    for (auto it = vertices_.rbegin(); it != vertices_.rend(); ++it) {
        out.push_back({-it->u, -it->y});
    }
    return MonotoneRelation(std::move(out), right_, left_);
}

Point MonotoneRelation::resolvent_point(double alpha, double v) const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw InvalidRelation("resolvent step must be positive and finite");
    }
    if (!std::isfinite(v)) {
        throw NoSolution("resolvent argument is not finite");
    }
    auto phi = [alpha](Point p) { return p.u + alpha * p.y; };

    const Point first = vertices_.front();
    if (v <= phi(first)) {
        const Point d = left_.direction();
        const double t = (phi(first) - v) / (d.u + alpha * d.y);
        return {first.u - t * d.u, first.y - t * d.y};
    }
    const Point last = vertices_.back();
    if (v >= phi(last)) {
        const Point d = right_.direction();
        const double t = (v - phi(last)) / (d.u + alpha * d.y);
        return {last.u + t * d.u, last.y + t * d.y};
    }
    // phi is strictly increasing along the vertex list
    auto it = std::upper_bound(vertices_.begin(), vertices_.end(), v,
                               [&](double value, const Point& p) { return value < phi(p); });
    const Point b = *it;
    const Point a = *(it - 1);
    const double t = (v - phi(a)) / (phi(b) - phi(a));
    Point p{a.u + t * (b.u - a.u), a.y + t * (b.y - a.y)};
    if (a.u == b.u) {
        p.u = a.u;
    }
    if (a.y == b.y) {
        p.y = a.y;
    }
    return p;
}

double MonotoneRelation::resolvent(double alpha, double v) const {
    return resolvent_point(alpha, v).u;
}

double MonotoneRelation::graph_distance(double u, double y) const {
    const Point p{u, y};
    const Point l = left_.direction();
    double best = distance_to_ray(p, vertices_.front(), {-l.u, -l.y});
    for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
        best = std::min(best, distance_to_segment(p, vertices_[i], vertices_[i + 1]));
    }
    best = std::min(best, distance_to_ray(p, vertices_.back(), right_.direction()));
    return best;
}

bool MonotoneRelation::strictly_monotone() const {
    if (left_.kind != Tail::Kind::Slope || right_.kind != Tail::Kind::Slope) {
        return false;
    }
    for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
        if (vertices_[i + 1].u == vertices_[i].u || vertices_[i + 1].y == vertices_[i].y) {
            return false;
        }
    }
    return true;
}

bool MonotoneRelation::is_function() const {
    if (left_.kind == Tail::Kind::Vertical || right_.kind == Tail::Kind::Vertical) {
        return false;
    }
    for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
        if (vertices_[i + 1].u == vertices_[i].u) {
            return false;
        }
    }
    return true;
}

MonotoneRelation MonotoneRelation::reduced(double tol) const {
    std::vector<Point> v = vertices_;
    const Point ld = left_.direction();
    const Point rd = right_.direction();
    while (v.size() >= 2 && parallel(diff(v[1], v[0]), ld, tol)) {
        v.erase(v.begin());
    }
    while (v.size() >= 2 && parallel(diff(v.back(), v[v.size() - 2]), rd, tol)) {
        v.pop_back();
    }
    if (v.size() == 1 && same_tail(left_, right_, tol)) {
        const Point p = v.front();
        switch (left_.kind) {
            case Tail::Kind::Vertical: v.front() = {p.u, 0.0}; break;
            case Tail::Kind::Horizontal: v.front() = {0.0, p.y}; break;
            case Tail::Kind::Slope: v.front() = {0.0, p.y - left_.slope * p.u}; break;
        }
    }
    return MonotoneRelation(std::move(v), left_, right_);
}

bool same_relation(const MonotoneRelation& a, const MonotoneRelation& b, double tol) {
    const MonotoneRelation ra = a.reduced(tol);
    const MonotoneRelation rb = b.reduced(tol);
    if (!same_tail(ra.left_tail(), rb.left_tail(), tol) ||
        !same_tail(ra.right_tail(), rb.right_tail(), tol)) {
        return false;
    }
    if (ra.vertices().size() != rb.vertices().size()) {
        return false;
    }
    for (std::size_t i = 0; i < ra.vertices().size(); ++i) {
        if (!close(ra.vertices()[i].u, rb.vertices()[i].u, tol) ||
            !close(ra.vertices()[i].y, rb.vertices()[i].y, tol)) {
            return false;
        }
    }
    return true;
}

bool weakly_equivalent(const MonotoneRelation& a, const MonotoneRelation& b) {
    return same_relation(a, b, kRelationTolerance);
}

bool is_odd(const MonotoneRelation& r) { return same_relation(r, r.reflected(), kRelationTolerance); }

const std::vector<NamedRelation>& builtin_relations() {
    static const std::vector<NamedRelation> library = [] {
        using R = MonotoneRelation;
        std::vector<NamedRelation> out;
        out.push_back({"identity", R::identity()});
        out.push_back({"integrator", R::integrator()});
        out.push_back({"zero", R::zero()});
        out.push_back({"saturation",
                       R::canonicalize({{-1.0, -1.0}, {1.0, 1.0}}, Tail::horizontal(), Tail::horizontal())});
        out.push_back({"relay",
                       R::canonicalize({{0.0, -1.0}, {0.0, 1.0}}, Tail::horizontal(), Tail::horizontal())});
        out.push_back({"dead_zone", R::canonicalize({{-1.0, 0.0}, {1.0, 0.0}}, Tail::with_slope(1.0),
                                                    Tail::with_slope(1.0))});
        out.push_back({"box", R::canonicalize({{-1.0, 0.0}, {1.0, 0.0}}, Tail::vertical(), Tail::vertical())});
        out.push_back({"shifted_identity", R::affine(1.0, -1.2)});
        out.push_back({"two_slope", R::canonicalize({{0.0, 0.0}}, Tail::with_slope(0.5), Tail::with_slope(3.0))});
        out.push_back({"stiff_affine", R::affine(10.0, -2.0)});
        return out;
    }();
    return library;
}

MonotoneRelation named_relation(std::string_view name) {
    for (const auto& entry : builtin_relations()) {
        if (entry.name == name) {
            return entry.relation;
        }
    }
    throw InvalidRelation("unknown named relation '" + std::string(name) + "'");
}

}  // namespace clustersym
