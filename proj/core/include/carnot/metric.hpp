#pragma once

#include <cstdint>
#include <vector>

#include "carnot/group.hpp"

namespace carnot {

/// Homogeneous-norm flavours. Koranyi is only defined on Heisenberg groups;
/// the layerwise norm d_K(p, e) works on any step <= 3 group.
enum class NormKind { Koranyi, Layerwise };

/// ((|z|^2)^2 + 16 t^2)^{1/4}. Throws unless the group is Heisenberg.
double koranyi_norm(const Group& G, const Point& p);

/// Layerwise homogeneous quasi-norm: sum_i sum_j |pi_i^j(p)|^{1/i}.
double layerwise_norm(const Group& G, const Point& p);

double homogeneous_norm(const Group& G, NormKind kind, const Point& p);

/// Koranyi on Heisenberg groups, layerwise otherwise.
NormKind natural_norm(const Group& G);

/// Quasi-metric d_K(p,q) = layerwise_norm(q^{-1} p). Left-invariant and
/// 1-homogeneous under dilations.
double quasi_metric(const Group& G, const Point& p, const Point& q);

/// A sampled horizontal curve: points gamma(t_i) plus the left-trivialized
/// velocity coefficients at each sample (full algebra vectors; anything
/// outside layer 1 beyond `tol` is an error).
struct SampledCurve {
    std::vector<double> t;
    std::vector<Point> points;
    std::vector<Vec> velocities;
};

/// Trapezoidal integral of the layer-1 norm of the supplied velocities.
double horizontal_length(const Group& G, const SampledCurve& curve, double tol = 1e-9);

struct BoxRegion {
    Vec lo, hi;
};

struct ComparabilityFit {
    double c_low = 1.0;   // smallest C with |p-q| <= C * d_K
    double c_high = 1.0;  // smallest C with d_K <= C * |p-q|^{1/step}
    int pairs = 0;
};

/// Empirical comparability constants between d_K and the Euclidean metric on
/// sampled pairs from a box; deterministic given the seed.
ComparabilityFit comparability_fit(const Group& G, const BoxRegion& box, int samples,
                                   std::uint64_t seed);

}  // namespace carnot
