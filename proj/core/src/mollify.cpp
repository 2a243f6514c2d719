#include "carnot/mollify.hpp"

#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

namespace carnot {

double bump_profile(double r) {
    if (r >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - r * r));
}

namespace {

/// One quadrature node on the unit-norm ball's bounding box: abstract
/// coordinates u (to be dilated by eps) and the combined weight including
/// substitution Jacobians. Nodes are symmetric under u -> -u.
struct UnitRule {
    std::vector<Vec> nodes;
    std::vector<double> weights;
};

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
    // Newton on Legendre polynomials; standard [-1,1] rule.
    std::vector<double> x(n), w(n);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = n * (t * p1 - p0) / (t * t - 1.0);
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    return {x, w};
}

/// Coordinate ranges of the unit ball's bounding box and the per-coordinate
/// node transform. Layerwise balls use the graded substitution
/// u = sign(v)|v|^w (Jacobian w|v|^{w-1}) to tame the |u|^{1/w} cusp;
/// the Koranyi ball is smooth, so a linear map suffices.
UnitRule build_unit_rule(const Group& G, NormKind kind, const QuadratureConfig& quad) {
    const int n = G.dim();
    UnitRule rule;
    if (n <= 6) {
        const auto [gx, gw] = gauss_legendre(quad.order);
        std::vector<int> idx(n, 0);
        const long total = static_cast<long>(std::pow(static_cast<double>(quad.order), n));
        rule.nodes.reserve(total);
        rule.weights.reserve(total);
        while (true) {
            Vec u(n);
            double w = 1.0;
            for (int c = 0; c < n; ++c) {
                const double v = gx[idx[c]];
                double wc = gw[idx[c]];
                const int layer = G.layer_of(c);
                if (kind == NormKind::Layerwise && layer > 1) {
                    u[c] = std::copysign(std::pow(std::abs(v), layer), v);
                    wc *= layer * std::pow(std::abs(v), layer - 1);
                } else if (kind == NormKind::Koranyi && layer > 1) {
                    u[c] = 0.25 * v;  // |t| <= 1/4 inside the Koranyi unit ball
                    wc *= 0.25;
                } else {
                    u[c] = v;
                }
                w *= wc;
            }
            rule.nodes.push_back(std::move(u));
            rule.weights.push_back(w);
            int c = 0;
            for (; c < n; ++c) {
                if (++idx[c] < quad.order) break;
                idx[c] = 0;
            }
            if (c == n) break;
        }
    } else {
        std::mt19937_64 rng(quad.seed);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        double vol = 1.0;
        for (int c = 0; c < n; ++c)
            vol *= (kind == NormKind::Koranyi && G.layer_of(c) > 1) ? 0.5 : 2.0;
        const double w = vol / quad.mc_samples;
        for (int sidx = 0; sidx < quad.mc_samples; ++sidx) {
            Vec u(n);
            for (int c = 0; c < n; ++c) {
                const double v = uni(rng);
                u[c] = (kind == NormKind::Koranyi && G.layer_of(c) > 1) ? 0.25 * v : v;
            }
            rule.nodes.push_back(std::move(u));
            rule.weights.push_back(w);
        }
    }
    return rule;
}

/// Rules are pure functions of (group shape, norm, quadrature config); cache them.
const UnitRule& unit_rule(const Group& G, NormKind kind, const QuadratureConfig& quad) {
    struct Key {
        std::vector<int> dims;
        int kind, order, mc;
        std::uint64_t seed;
        bool operator<(const Key& o) const {
            return std::tie(dims, kind, order, mc, seed) <
                   std::tie(o.dims, o.kind, o.order, o.mc, o.seed);
        }
    };
    static std::map<Key, UnitRule> cache;
    Key key{G.algebra().layer_dims(), static_cast<int>(kind), quad.order, quad.mc_samples,
            quad.seed};
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, build_unit_rule(G, kind, quad)).first;
    return it->second;
}

}  // namespace

Mollifier default_mollifier(const Group& G, double eps, QuadratureConfig quad) {
    Mollifier m;
    m.norm_kind = natural_norm(G);
    m.eps = eps;
    m.quad = quad;
    m.profile = bump_profile;
    return normalize(std::move(m), G);
}

Mollifier normalize(Mollifier m, const Group& G) {
    if (!(m.eps > 0.0)) throw std::invalid_argument("mollifier eps must be positive");
    if (!m.profile) m.profile = bump_profile;
    const UnitRule& rule = unit_rule(G, m.norm_kind, m.quad);
    double z = 0.0;
    for (size_t a = 0; a < rule.nodes.size(); ++a) {
        const double r = homogeneous_norm(G, m.norm_kind, rule.nodes[a]);
        z += rule.weights[a] * m.profile(r);
    }
    if (!(z > 1e-300)) throw std::invalid_argument("degenerate mollifier profile (zero integral)");
    m.normalizer = z;
    m.normalized = true;
    return m;
}

double mollifier_mass(const Mollifier& m, const Group& G) {
    const UnitRule& rule = unit_rule(G, m.norm_kind, m.quad);
    double sum = 0.0;
    for (size_t a = 0; a < rule.nodes.size(); ++a) {
        const double r = homogeneous_norm(G, m.norm_kind, rule.nodes[a]);
        sum += rule.weights[a] * m.profile(r) / m.normalizer;
    }
    return sum;
}

Point mollify_map(const Group& G, const MapDescriptor& f, const Mollifier& m, const Point& p) {
    if (!m.normalized) throw std::invalid_argument("mollifier must be normalized first");
    const UnitRule& rule = unit_rule(G, m.norm_kind, m.quad);
    Point acc = Point::Zero(f.target().dim());
    for (size_t a = 0; a < rule.nodes.size(); ++a) {
        const double r = homogeneous_norm(G, m.norm_kind, rule.nodes[a]);
        const double w = rule.weights[a] * m.profile(r) / m.normalizer;
        if (w == 0.0) continue;
        const Point z = G.dilate(m.eps, rule.nodes[a]);
        acc += w * f.evaluate(G.multiply(p, G.inverse(z)));
    }
    return acc;
}

double pullback_component(const Group& G, const MapDescriptor& f, const Mollifier& m,
                          const Point& p, int v, int omega, const FDConfig& fd) {
    const Group& H = f.target();
    if (omega < 0 || omega >= H.dim()) throw std::invalid_argument("coframe index out of range");
    MapFn feps = [&](const Point& x) { return mollify_map(G, f, m, x); };
    const Vec df = derive_along(G, feps, p, v, fd);
    const Point base = mollify_map(G, f, m, p);
    return coframe_at(H, base).row(omega).dot(df);
}

ConvergenceReport convergence_sweep(const Group& G, const MapDescriptor& f,
                                    const std::vector<double>& eps_list,
                                    const std::vector<Point>& grid, double q,
                                    const SweepComponent& comp, QuadratureConfig quad,
                                    const FDConfig& fd, double noise_floor) {
    if (grid.empty()) throw std::invalid_argument("convergence_sweep: empty grid");
    for (size_t i = 1; i < eps_list.size(); ++i)
        if (!(eps_list[i] < eps_list[i - 1]))
            throw std::invalid_argument("eps list must be strictly decreasing");
    if (!(q > 0.0)) throw std::invalid_argument("exponent q must be positive");

    const Group& H = f.target();
    ConvergenceReport rep;
    rep.grid_points = static_cast<int>(grid.size());
    const double qe = comp.hgrad_error ? q : q / H.layer_of(comp.omega);
    rep.q_effective = qe;

    // Direct horizontal gradients of the unmollified map, for the error mode.
    std::vector<Mat> direct;
    if (comp.hgrad_error) {
        direct.reserve(grid.size());
        for (const auto& p : grid) direct.push_back(horizontal_gradient(G, H, f.fn(), p, fd));
    }

    for (double eps : eps_list) {
        Mollifier m;
        m.norm_kind = natural_norm(G);
        m.eps = eps;
        m.quad = quad;
        m.profile = bump_profile;
        m = normalize(std::move(m), G);

        double acc = 0.0;
        for (size_t gi = 0; gi < grid.size(); ++gi) {
            double val;
            if (comp.hgrad_error) {
                MapFn feps = [&](const Point& x) { return mollify_map(G, f, m, x); };
                const Mat De = horizontal_gradient(G, H, feps, grid[gi], fd);
                val = (De - direct[gi]).norm();
            } else {
                val = std::abs(pullback_component(G, f, m, grid[gi], comp.v, comp.omega, fd));
            }
            acc += std::pow(val, qe);
        }
        const double norm = std::pow(acc / grid.size(), 1.0 / qe);
        rep.eps.push_back(eps);
        rep.norms.push_back(norm);

        // log-log fit over the rows so far
        const size_t k = rep.norms.size();
        if (k >= 2) {
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (size_t i = 0; i < k; ++i) {
                const double x = std::log(rep.eps[i]);
                const double y = std::log(std::max(rep.norms[i], 1e-300));
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += x * y;
            }
            rep.slope_so_far.push_back((k * sxy - sx * sy) / (k * sxx - sx * sx));
        } else {
            rep.slope_so_far.push_back(0.0);
        }
    }
    rep.slope = rep.slope_so_far.back();
    rep.monotone_decreasing = true;
    for (size_t i = 1; i < rep.norms.size(); ++i)
        rep.monotone_decreasing = rep.monotone_decreasing && rep.norms[i] < rep.norms[i - 1];
    rep.degenerate = true;
    for (double n : rep.norms) rep.degenerate = rep.degenerate && n < noise_floor;
    return rep;
}

}  // namespace carnot
