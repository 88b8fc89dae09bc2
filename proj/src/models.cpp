#include "clustersym/models.hpp"

#include "clustersym/errors.hpp"

#include <cmath>

namespace clustersym {

namespace {

double param(const std::map<std::string, double>& params, const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

void check_params(std::string_view model, const std::map<std::string, double>& params,
                  std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, value] : params) {
        bool known = false;
        for (auto a : allowed) {
            known = known || key == a;
        }
        if (!known) {
            throw InvalidRelation("model '" + std::string(model) + "' has no parameter '" + key + "'");
        }
        if (!std::isfinite(value)) {
            throw InvalidRelation("model parameter '" + key + "' must be finite");
        }
    }
}

// dx = -pole x + gain_in v, y = c x + d v
DynamicModel linear_first_order(std::string tag, double pole, double gain_in, double c, double d,
                                MonotoneRelation relation) {
    DynamicModel m;
    m.tag = std::move(tag);
    m.state_dim = 1;
    m.drift = [pole, gain_in](std::span<const double> x, double v, std::span<double> dx) {
        dx[0] = -pole * x[0] + gain_in * v;
    };
    m.output = [c, d](std::span<const double> x, double v) { return c * x[0] + d * v; };
    m.feedthrough = d != 0.0;
    if (m.feedthrough) {
        m.feedthrough_gain = d;
    }
    m.relation = std::move(relation);
    return m;
}

DynamicModel static_affine(double a, double b) {
    DynamicModel m;
    m.tag = "static_affine";
    m.state_dim = 0;
    m.drift = [](std::span<const double>, double, std::span<double>) {};
    m.output = [a, b](std::span<const double>, double v) { return a * v + b; };
    m.feedthrough = true;
    m.feedthrough_gain = a;
    m.relation = MonotoneRelation::affine(a, b);
    return m;
}

}  // namespace

const std::vector<std::string>& builtin_model_names() {
    static const std::vector<std::string> names = {
        "upsilon1", "upsilon2", "upsilon3",   "upsilon4",   "upsilon5",
        "upsilon6", "first_order", "washout", "integrator", "static_affine"};
    return names;
}

DynamicModel make_builtin_model(std::string_view name, const std::map<std::string, double>& params) {
    const auto identity = MonotoneRelation::identity();
    DynamicModel m;
    if (name == "upsilon1") {
        check_params(name, params, {});
        m = static_affine(1.0, 0.0);
    } else if (name == "upsilon2") {
        check_params(name, params, {});
        m = linear_first_order("", 1.0, 1.0, 1.0, 0.0, identity);
    } else if (name == "upsilon3") {
        check_params(name, params, {});
        m = linear_first_order("", 10.0, 1.0, 10.0, 0.0, identity);
    } else if (name == "upsilon4") {
        check_params(name, params, {});
        m.state_dim = 1;
        m.drift = [](std::span<const double> x, double v, std::span<double> dx) { dx[0] = -std::tanh(x[0]) + v; };
        m.output = [](std::span<const double> x, double) { return std::tanh(x[0]); };
        m.relation = identity;
    } else if (name == "upsilon5") {
        check_params(name, params, {});
        m.state_dim = 1;
        m.drift = [](std::span<const double> x, double v, std::span<double> dx) { dx[0] = -x[0] + std::sinh(v); };
        m.output = [](std::span<const double> x, double) { return std::asinh(x[0]); };
        m.relation = identity;
    } else if (name == "upsilon6") {
        check_params(name, params, {});
        m = linear_first_order("", 1.0, 1.0, 0.5, 0.5, identity);
    } else if (name == "first_order") {
        check_params(name, params, {"a", "b"});
        const double a = param(params, "a", 1.0);
        const double b = param(params, "b", 1.0);
        if (!(a > 0.0) || b < 0.0) {
            throw InvalidRelation("first_order needs a > 0 and b >= 0");
        }
        m = linear_first_order("", a, 1.0, b, 0.0, MonotoneRelation::affine(b / a, 0.0));
        m.params = params;
    } else if (name == "washout") {
        check_params(name, params, {});
        m = linear_first_order("", 0.5, 0.5, -0.5, 0.5, MonotoneRelation::zero());
    } else if (name == "integrator") {
        check_params(name, params, {});
        m = linear_first_order("", 0.0, 1.0, 1.0, 0.0, MonotoneRelation::integrator());
    } else if (name == "static_affine") {
        check_params(name, params, {"a", "b"});
        m = static_affine(param(params, "a", 1.0), param(params, "b", 0.0));
        m.params = params;
    } else {
        throw InvalidRelation("unknown model '" + std::string(name) + "'");
    }
    m.tag = std::string(name);
    return m;
}

std::optional<DynamicModel> static_realization(const MonotoneRelation& r) {
    if (!r.is_function()) {
        return std::nullopt;
    }
    DynamicModel m;
    m.tag = "static";
    m.state_dim = 0;
    m.drift = [](std::span<const double>, double, std::span<double>) {};
    m.feedthrough = true;
    m.relation = r;
    const MonotoneRelation line = r.reduced();
    const bool straight = line.vertices().size() == 1 && line.left_tail().kind == line.right_tail().kind &&
                          line.left_tail().slope == line.right_tail().slope;
    if (straight) {
        const double a = line.left_tail().kind == Tail::Kind::Slope ? line.left_tail().slope : 0.0;
        const double b = line.vertices().front().y - a * line.vertices().front().u;
        m.output = [a, b](std::span<const double>, double v) { return a * v + b; };
        m.feedthrough_gain = a;
    } else {
        m.output = [r](std::span<const double>, double v) { return r.evaluate(v).lo; };
    }
    return m;
}

}  // namespace clustersym
