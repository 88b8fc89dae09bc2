#pragma once

// Steady states of a diffusively coupled network as minimizers of the
// potential objective
//
//     F_w(y) = sum_i K_i*(y_i) - w^T y + sum_e Gamma_e((E^T y)_e),
//
// with K_i the integral of the agent relation k_i and Gamma_e the integral
// of the controller relation gamma_e. A minimizer satisfies
// w in k^{-1}(y) + E gamma(E^T y), the network steady-state equation.

#include "clustersym/errors.hpp"
#include "clustersym/network.hpp"
#include "clustersym/pwq_function.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace clustersym {

struct SolveOptions {
    double tol = 1e-9;
    std::size_t max_iter = 1'000'000;
};

struct SteadyState {
    std::vector<double> y;     // per vertex
    std::vector<double> zeta;  // E^T y
    std::vector<double> mu;    // edge flows, in gamma(zeta) up to the residual
    std::vector<double> u;     // -E mu (exogenous input excluded)
    double objective = 0.0;
    /// Largest distance of (u + w, y) and (zeta, mu) from the agent and
    /// controller graphs.
    double residual = 0.0;
    std::size_t iterations = 0;
};

class NotConverged : public Error {
public:
    NotConverged(std::size_t max_iter, SteadyState best);
    [[nodiscard]] const SteadyState& best() const { return best_; }

private:
    SteadyState best_;
};

struct Potentials {
    std::vector<PwqFunction> agent;            // K_i
    std::vector<PwqFunction> agent_conjugate;  // K_i*
    std::vector<PwqFunction> controller;       // Gamma_e
};

Potentials assemble(const Network& net);

/// F(y) = K*(y) + Gamma(E^T y), without the exogenous term.
double potential(const Network& net, const Potentials& p, std::span<const double> y);

/// F_w(y) = F(y) - w^T y, the function the solver minimizes.
double objective(const Network& net, const Potentials& p, std::span<const double> y);

/// Primal-dual splitting on F_w with exact scalar prox steps.
/// Throws NotConverged, or Infeasible when the iterates run off to infinity
/// (F_w unbounded below, no steady state exists).
SteadyState solve(const Network& net, const SolveOptions& opts = {});

/// max_i dist(w_i - (E mu)_i, k_i^{-1}(y_i)) with mu_e in gamma_e((E^T y)_e).
/// Where gamma_e is set-valued the selection minimizing the squared
/// residual is used, so the result is 0 exactly at steady states.
double residual(const Network& net, std::span<const double> y);

struct Flow {
    std::vector<double> u;
    std::vector<double> mu;
};

/// Flow variables of a steady state; checks y_i in k_i(u_i + w_i) and
/// mu_e in gamma_e(zeta_e) as graph distances, throwing DualityGap above tol.
Flow recover_flow(const Network& net, const SteadyState& ss, double tol = 1e-8);

/// Largest graph distance in the optimality conditions
/// (u + w, y) in k, (zeta, mu) in gamma, plus |u + E mu|.
double optimality_gap(const Network& net, const SteadyState& ss);

}  // namespace clustersym
