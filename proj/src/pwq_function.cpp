#include "clustersym/pwq_function.hpp"

#include "clustersym/errors.hpp"

#include <algorithm>
#include <cmath>

namespace clustersym {

namespace {

constexpr double kJoinTolerance = 1e-9;

// Derivative y(x) = y_origin + slope (x - origin) over [start, end].
struct LinearPiece {
    double start;
    double end;
    double origin;
    double y_origin;
    double slope;

    [[nodiscard]] double antiderivative(double x) const {
        const double d = x - origin;
        return y_origin * d + 0.5 * slope * d * d;
    }
};

}  // namespace

PwqFunction::PwqFunction(Interval domain, std::vector<double> breakpoints,
                         std::vector<Quadratic> pieces, double anchor)
    : domain_(domain), breakpoints_(std::move(breakpoints)), pieces_(std::move(pieces)), anchor_(anchor) {
    if (domain_.is_empty() || std::isnan(domain_.lo) || std::isnan(domain_.hi)) {
        throw InvalidFunction("empty domain");
    }
    if (pieces_.size() != breakpoints_.size() + 1) {
        throw InvalidFunction("need exactly one more piece than breakpoints");
    }
    if (domain_.is_point() && !breakpoints_.empty()) {
        throw InvalidFunction("point domain cannot have breakpoints");
    }
    for (const Quadratic& q : pieces_) {
        if (!(q.a >= 0.0) || !std::isfinite(q.a) || !std::isfinite(q.b) || !std::isfinite(q.c)) {
            throw InvalidFunction("piece coefficients must be finite with a >= 0");
        }
    }
    for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
        const double x = breakpoints_[i];
        if (!(x > domain_.lo && x < domain_.hi) || (i > 0 && !(x > breakpoints_[i - 1]))) {
            throw InvalidFunction("breakpoints must be increasing and interior to the domain");
        }
        const Quadratic& l = pieces_[i];
        const Quadratic& r = pieces_[i + 1];
        const double fl = l.value(x);
        const double fr = r.value(x);
        if (std::abs(fl - fr) > kJoinTolerance * (1.0 + std::abs(fl))) {
            throw InvalidFunction("pieces do not join continuously");
        }
        const double sl = l.slope(x);
        const double sr = r.slope(x);
        if (sl > sr + kJoinTolerance * (1.0 + std::abs(sl))) {
            throw InvalidFunction("one-sided derivatives decrease across a breakpoint");
        }
    }
    if (!domain_.contains(anchor_)) {
        throw InvalidFunction("anchor outside the domain");
    }
}

PwqFunction PwqFunction::point_indicator(double at, double value) {
    return PwqFunction(Interval::point(at), {}, {{0.0, 0.0, value}}, at);
}

std::size_t PwqFunction::piece_index(double x) const {
    return static_cast<std::size_t>(std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x) -
                                    breakpoints_.begin());
}

double PwqFunction::operator()(double x) const {
    if (!domain_.contains(x) || !std::isfinite(x)) {
        return kInf;
    }
    return pieces_[piece_index(x)].value(x);
}

Interval PwqFunction::subgradient(double x) const {
    if (!domain_.contains(x)) {
        return Interval::empty();
    }
    if (domain_.is_point()) {
        return Interval::whole();
    }
    const std::size_t k = piece_index(x);
    double lo = pieces_[k].slope(x);
    double hi = lo;
    if (k > 0 && breakpoints_[k - 1] == x) {
        lo = pieces_[k - 1].slope(x);
    }
    if (x == domain_.lo) {
        lo = -kInf;
    }
    if (x == domain_.hi) {
        hi = kInf;
    }
    return {lo, std::max(lo, hi)};
}

MonotoneRelation PwqFunction::subdifferential() const {
    if (domain_.is_point()) {
        return MonotoneRelation::canonicalize({{domain_.lo, 0.0}}, Tail::vertical(), Tail::vertical());
    }
    std::vector<Point> v;
    if (std::isfinite(domain_.lo)) {
        v.push_back({domain_.lo, pieces_.front().slope(domain_.lo)});
    }
    for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
        const double x = breakpoints_[i];
        v.push_back({x, pieces_[i].slope(x)});
        v.push_back({x, pieces_[i + 1].slope(x)});
    }
    if (std::isfinite(domain_.hi)) {
        v.push_back({domain_.hi, pieces_.back().slope(domain_.hi)});
    }
    if (v.empty()) {
        v.push_back({anchor_, pieces_.front().slope(anchor_)});
    }
    // Rounding can make a one-sided derivative dip below its predecessor by a
    // few ulps; anything larger is a genuine loss of convexity.
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i].y < v[i - 1].y) {
            if (v[i - 1].y - v[i].y > kJoinTolerance * (1.0 + std::abs(v[i].y))) {
                throw InvalidFunction("function is not convex");
            }
            v[i].y = v[i - 1].y;
        }
        // One-sided derivatives that agree up to rounding mean no kink. Keep the
        // right-hand value so that a following flat piece stays exactly flat.
        if (v[i].u == v[i - 1].u && v[i].y - v[i - 1].y <= 1e-13 * (1.0 + std::abs(v[i].y))) {
            v[i - 1].y = v[i].y;
        }
    }
    auto tail_for = [](bool bounded, const Quadratic& q) {
        return bounded ? Tail::vertical() : Tail::with_slope(2.0 * q.a);
    };
    return MonotoneRelation::canonicalize(std::move(v), tail_for(std::isfinite(domain_.lo), pieces_.front()),
                                          tail_for(std::isfinite(domain_.hi), pieces_.back()));
}

PwqFunction PwqFunction::shifted(double constant) const {
    std::vector<Quadratic> p = pieces_;
    for (Quadratic& q : p) {
        q.c += constant;
    }
    return PwqFunction(domain_, breakpoints_, std::move(p), anchor_);
}

double PwqFunction::recession(double d) const {
    if (d == 0.0) {
        return 0.0;
    }
    const bool up = d > 0.0;
    const Quadratic& end = up ? pieces_.back() : pieces_.front();
    if (std::isfinite(up ? domain_.hi : domain_.lo) || end.a > 0.0) {
        return kInf;
    }
    return end.b * d;
}

PwqFunction integrate(const MonotoneRelation& r) {
    const auto& v = r.vertices();
    std::vector<LinearPiece> pieces;
    const Tail& lt = r.left_tail();
    const Tail& rt = r.right_tail();

    if (lt.kind != Tail::Kind::Vertical) {
        const double s = lt.kind == Tail::Kind::Slope ? lt.slope : 0.0;
        pieces.push_back({-kInf, v.front().u, v.front().u, v.front().y, s});
    }
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        // A segment narrower than rounding noise is a vertical one; its slope
        // would swamp the quadratic coefficients.
        const double du = v[i + 1].u - v[i].u;
        if (du > 1e-12 * (1.0 + std::abs(v[i].u))) {
            pieces.push_back({v[i].u, v[i + 1].u, v[i].u, v[i].y, (v[i + 1].y - v[i].y) / du});
        }
    }
    if (rt.kind != Tail::Kind::Vertical) {
        const double s = rt.kind == Tail::Kind::Slope ? rt.slope : 0.0;
        pieces.push_back({v.back().u, kInf, v.back().u, v.back().y, s});
    }
    if (pieces.empty()) {
        return PwqFunction::point_indicator(v.front().u, 0.0);
    }

    const Interval dom = r.domain();
    double anchor = 0.0;
    if (std::isfinite(dom.lo)) {
        anchor = dom.lo;
    } else if (dom.hi < 0.0) {
        anchor = dom.hi;
    }

    std::size_t home = 0;
    while (home + 1 < pieces.size() && anchor > pieces[home].end) {
        ++home;
    }
    std::vector<double> constant(pieces.size(), 0.0);
    constant[home] = -pieces[home].antiderivative(anchor);
    for (std::size_t k = home + 1; k < pieces.size(); ++k) {
        const double x = pieces[k].start;
        constant[k] = constant[k - 1] + pieces[k - 1].antiderivative(x) - pieces[k].antiderivative(x);
    }
    for (std::size_t k = home; k-- > 0;) {
        const double x = pieces[k].end;
        constant[k] = constant[k + 1] + pieces[k + 1].antiderivative(x) - pieces[k].antiderivative(x);
    }

    std::vector<double> breakpoints;
    std::vector<Quadratic> quads;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        const LinearPiece& p = pieces[k];
        if (k > 0) {
            breakpoints.push_back(p.start);
        }
        quads.push_back({0.5 * p.slope, p.y_origin - p.slope * p.origin,
                         0.5 * p.slope * p.origin * p.origin - p.y_origin * p.origin + constant[k]});
    }
    return PwqFunction(dom, std::move(breakpoints), std::move(quads), anchor);
}

PwqFunction conjugate(const PwqFunction& f) {
    if (f.domain().is_point()) {
        // sup_x {y x - f(x)} over a single point is linear in y
        const double p = f.domain().lo;
        return PwqFunction(Interval::whole(), {}, {{0.0, p, -f(p)}}, 0.0);
    }
    const MonotoneRelation sub = f.subdifferential();
    const PwqFunction g = integrate(sub.inverse());
    // Fenchel-Young equality at any point (x0, y0) of the subdifferential
    const Point p = sub.vertices().front();
    const double exact = p.u * p.y - f(p.u);
    return g.shifted(exact - g(p.y));
}

}  // namespace clustersym
