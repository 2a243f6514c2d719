#include "carnot/metric.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace carnot {

double koranyi_norm(const Group& G, const Point& p) {
    if (!G.is_heisenberg()) throw std::domain_error("koranyi_norm needs a Heisenberg group");
    if (p.size() != G.dim()) throw std::invalid_argument("point dimension mismatch");
    const int r = G.rank();
    const double z2 = p.head(r).squaredNorm();
    const double t = p[r];
    return std::pow(z2 * z2 + 16.0 * t * t, 0.25);
}

double layerwise_norm(const Group& G, const Point& p) {
    if (p.size() != G.dim()) throw std::invalid_argument("point dimension mismatch");
    double sum = 0.0;
    for (int k = 1; k <= G.step(); ++k) {
        const int off = G.layer_offset(k);
        for (int j = 0; j < G.layer_dim(k); ++j)
            sum += std::pow(std::abs(p[off + j]), 1.0 / k);
    }
    return sum;
}

double homogeneous_norm(const Group& G, NormKind kind, const Point& p) {
    return kind == NormKind::Koranyi ? koranyi_norm(G, p) : layerwise_norm(G, p);
}

NormKind natural_norm(const Group& G) {
    return G.is_heisenberg() ? NormKind::Koranyi : NormKind::Layerwise;
}

double quasi_metric(const Group& G, const Point& p, const Point& q) {
    return layerwise_norm(G, G.left_quotient(q, p));
}

double horizontal_length(const Group& G, const SampledCurve& curve, double tol) {
    const size_t n = curve.t.size();
    if (curve.points.size() != n || curve.velocities.size() != n)
        throw std::invalid_argument("curve arrays must have equal length");
    if (n < 2) return 0.0;
    const int r = G.rank();
    std::vector<double> speed(n);
    for (size_t i = 0; i < n; ++i) {
        const Vec& v = curve.velocities[i];
        if (v.size() != G.dim()) throw std::invalid_argument("velocity dimension mismatch");
        if (G.dim() > r && v.tail(G.dim() - r).cwiseAbs().maxCoeff() > tol)
            throw std::invalid_argument("velocity has a non-horizontal component");
        speed[i] = v.head(r).norm();
    }
    double len = 0.0;
    for (size_t i = 0; i + 1 < n; ++i)
        len += 0.5 * (speed[i] + speed[i + 1]) * (curve.t[i + 1] - curve.t[i]);
    return len;
}

ComparabilityFit comparability_fit(const Group& G, const BoxRegion& box, int samples,
                                   std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("comparability_fit needs samples >= 1");
    if (box.lo.size() != G.dim() || box.hi.size() != G.dim())
        throw std::invalid_argument("box dimension mismatch");
    for (int i = 0; i < G.dim(); ++i)
        if (!(box.hi[i] > box.lo[i])) throw std::invalid_argument("degenerate box");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    auto draw = [&] {
        Point p(G.dim());
        for (int i = 0; i < G.dim(); ++i) p[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * uni(rng);
        return p;
    };

    ComparabilityFit fit;
    const double inv_n = 1.0 / G.step();
    for (int s = 0; s < samples; ++s) {
        const Point p = draw(), q = draw();
        const double d = quasi_metric(G, p, q);
        const double e = (p - q).norm();
        if (d <= 0.0 || e <= 0.0) continue;  // coincident draw: vacuous
        fit.c_low = std::max(fit.c_low, e / d);
        fit.c_high = std::max(fit.c_high, d / std::pow(e, inv_n));
        ++fit.pairs;
    }
    return fit;
}

}  // namespace carnot
