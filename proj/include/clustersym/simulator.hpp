#pragma once

#include "clustersym/network.hpp"
#include "clustersym/symmetry.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace clustersym {

struct SimulationOptions {
    double duration = 50.0;
    double dt = 1e-3;
    /// Stacked initial state (agents in vertex order, then controllers in
    /// edge order); empty means all zeros.
    std::vector<double> x0;
    /// Record every k-th step (the final time is always recorded).
    std::size_t record_stride = 1;
};

/// Closed-loop signals at one instant.
struct Signals {
    std::vector<double> y;
    std::vector<double> zeta;
    std::vector<double> u;
    std::vector<double> mu;
};

struct Trace {
    std::vector<double> time;
    std::vector<std::vector<double>> y;
    std::vector<std::vector<double>> zeta;
    std::vector<std::vector<double>> u;
    std::vector<std::vector<double>> mu;
    std::vector<double> final_state;
};

/// The interconnected system as one ODE. Attachments without a dynamic model
/// use a memoryless realization of their relation; relations that are not
/// functions cannot be realized and raise MissingModel.
class ClosedLoop {
public:
    explicit ClosedLoop(const Network& net);

    [[nodiscard]] std::size_t state_dim() const { return dim_; }

    /// Solves the algebraic loop created by feedthrough terms at state x.
    /// Exact linear solve when every feedthrough map is affine, damped Newton
    /// otherwise. Throws AlgebraicLoopDiverged.
    [[nodiscard]] Signals resolve_feedthrough(std::span<const double> x) const;

    void derivative(std::span<const double> x, std::span<double> dx, Signals* signals = nullptr) const;

private:
    [[nodiscard]] Signals evaluate_at(std::span<const double> x, const Eigen::VectorXd& y) const;

    const Network& net_;
    std::vector<DynamicModel> agents_;
    std::vector<DynamicModel> controllers_;
    std::vector<std::size_t> offset_;
    std::size_t dim_ = 0;
    bool algebraic_loop_ = false;
    bool affine_ = true;
    std::optional<Eigen::PartialPivLU<Eigen::MatrixXd>> loop_lu_;
};

/// Classical fixed-step RK4; the last step is shortened to land on duration.
/// Throws NonFiniteState, MissingModel, AlgebraicLoopDiverged.
Trace simulate(const Network& net, const SimulationOptions& opts = {});

struct DetectedClusters {
    Partition partition;  // values are the block means
    /// Largest in-window oscillation max_t y_i - min_t y_i over vertices.
    double drift = 0.0;
    /// Per-vertex time average over the window.
    std::vector<double> means;
};

/// Groups vertices whose window-averaged outputs chain within tol.
/// Throws NotStationary when drift exceeds tol.
DetectedClusters detect_clusters(const Trace& trace, double window, double tol);

}  // namespace clustersym
