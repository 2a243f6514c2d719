#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "carnot/catalogue.hpp"
#include "carnot/metric.hpp"

namespace carnot {

struct QuadratureConfig {
    int order = 8;          // Gauss-Legendre points per coordinate (dimension <= 6)
    int mc_samples = 20000; // Monte Carlo fallback above 6 dimensions
    std::uint64_t seed = 42;
};

/// Group mollifier: eta_eps(z) = eps^{-Q} profile(N(delta_{1/eps} z)) / normalizer,
/// supported in the homogeneous unit ball of the chosen norm scaled by eps.
struct Mollifier {
    NormKind norm_kind = NormKind::Layerwise;
    double eps = 0.1;
    QuadratureConfig quad;
    std::function<double(double)> profile;  // bump on [0,1), zero outside
    double normalizer = 0.0;                // set by normalize()
    bool normalized = false;
};

/// Standard bump exp(-1/(1-r^2)) clipped to [0,1).
double bump_profile(double r);

/// Mollifier with the group's natural norm and the default bump.
Mollifier default_mollifier(const Group& G, double eps, QuadratureConfig quad = {});

/// Computes the normalizer so the quadrature integral of eta_eps is exactly 1
/// (the rule uses dilation-invariant unit nodes, so this holds for every eps).
/// Throws on a degenerate profile.
Mollifier normalize(Mollifier m, const Group& G);

/// Quadrature check of the mollifier mass; equals 1 up to roundoff once normalized.
double mollifier_mass(const Mollifier& m, const Group& G);

/// f_eps(p) = integral of f(p * z^{-1}) eta_eps(z) dz, averaged componentwise
/// in target coordinates.
Point mollify_map(const Group& G, const MapDescriptor& f, const Mollifier& m, const Point& p);

/// X_v applied to the omega-component of the mollified pullback: the coframe
/// row of the target at f_eps(p) contracted with the derivative of f_eps along
/// the v-th left-invariant field. omega is a 0-based global coordinate index
/// of the target (horizontal rows are the coordinate forms dx_j).
double pullback_component(const Group& G, const MapDescriptor& f, const Mollifier& m,
                          const Point& p, int v, int omega, const FDConfig& fd = {});

struct SweepComponent {
    int v = 0;          // differentiation direction (global basis index, source)
    int omega = 0;      // target coframe row (global coordinate index)
    bool hgrad_error = false;  // measure |D_H f_eps - D_H f|_F instead
};

struct ConvergenceReport {
    std::vector<double> eps;
    std::vector<double> norms;
    std::vector<double> slope_so_far;  // fit using rows up to this eps
    double slope = 0.0;                // norm ~ eps^slope
    double q_effective = 0.0;
    bool monotone_decreasing = false;
    bool degenerate = false;  // all norms at machine-noise level
    int grid_points = 0;
};

/// Discrete L^q sweep over a point grid for a pullback component (exponent
/// q / weight(omega)) or the horizontal-gradient error (exponent q).
ConvergenceReport convergence_sweep(const Group& G, const MapDescriptor& f,
                                    const std::vector<double>& eps_list,
                                    const std::vector<Point>& grid, double q,
                                    const SweepComponent& comp, QuadratureConfig quad = {},
                                    const FDConfig& fd = {}, double noise_floor = 1e-10);

}  // namespace carnot
