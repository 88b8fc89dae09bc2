#pragma once

#include "clustersym/relations.hpp"

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace clustersym {

/// SISO system  dx/dt = f(x, v),  out = h(x, v)  with its declared
/// steady-state relation. Used both for agents (v = input u_i + w_i) and for
/// edge controllers (v = relative output zeta_e).
struct DynamicModel {
    using Drift = std::function<void(std::span<const double> x, double v, std::span<double> dx)>;
    using Output = std::function<double(std::span<const double> x, double v)>;

    std::string tag;
    std::map<std::string, double> params;
    std::size_t state_dim = 0;
    Drift drift;
    Output output;
    /// h depends on v.
    bool feedthrough = false;
    /// Set when h(x, v) = h(x, 0) + gain * v exactly.
    std::optional<double> feedthrough_gain;
    MonotoneRelation relation = MonotoneRelation::identity();
};

/// Builtin models:
///   upsilon1   y = u
///   upsilon2   x' = -x + u,            y = x
///   upsilon3   x' = -10 x + u,         y = 10 x
///   upsilon4   x' = -tanh(x) + u,      y = tanh(x)
///   upsilon5   x' = -x + sinh(u),      y = asinh(x)
///   upsilon6   x' = -x + u,            y = 0.5 (x + u)
///   first_order {a, b}   b / (s + a)
///   washout    s / (2s + 1) as x' = -0.5 x + 0.5 u, y = -0.5 x + 0.5 u
///   integrator x' = u, y = x
///   static_affine {a, b}  y = a u + b
/// Unknown names or parameters throw InvalidRelation.
DynamicModel make_builtin_model(std::string_view name, const std::map<std::string, double>& params = {});

const std::vector<std::string>& builtin_model_names();

/// Memoryless realization y = r(v) of a relation that is a function on the
/// whole input axis; std::nullopt otherwise.
std::optional<DynamicModel> static_realization(const MonotoneRelation& r);

}  // namespace clustersym
