#pragma once

#include <memory>

#include "carnot/algebra.hpp"

namespace carnot {

/// A point in exponential coordinates of the first kind: a coordinate vector
/// of length dim(g), partitioned by layer.
using Point = Vec;

/// A Carnot group of step <= 3 with exact closed-form arithmetic, plus a
/// truncated-series cross-check that only uses the algebra bracket.
///
/// Immutable after construction; all operations are pure. Haar measure is
/// Lebesgue measure in these coordinates.
class Group {
  public:
    explicit Group(AlgebraSpec algebra);

    const AlgebraSpec& algebra() const { return *algebra_; }
    const std::string& name() const { return algebra_->name(); }
    int dim() const { return algebra_->dim(); }
    int step() const { return algebra_->step(); }
    int Q() const { return Q_; }
    /// Horizontal rank dim g^[1].
    int rank() const { return algebra_->layer_dim(1); }
    int layer_of(int index) const { return algebra_->layer_of(index); }
    int layer_offset(int layer) const { return algebra_->layer_offset(layer); }
    int layer_dim(int layer) const { return algebra_->layer_dim(layer); }

    Point identity() const { return Point::Zero(dim()); }

    /// Closed-form product; step 2 is the same formula with the third layer absent.
    Point multiply(const Point& p, const Point& q) const;
    /// Coordinate negation: (A,B,C)^{-1} = (-A,-B,-C).
    Point inverse(const Point& p) const;
    /// q^{-1} * p; coordinates are the layer projections used by the quasi-metric.
    Point left_quotient(const Point& q, const Point& p) const;
    /// delta_lambda: layer-k block scaled by lambda^k. Requires lambda > 0.
    Point dilate(double lambda, const Point& p) const;

    /// Truncated series x + y + [x,y]/2 + ([x,[x,y]] + [y,[y,x]])/12, evaluated
    /// through the algebra bracket only. Independent oracle for multiply.
    Point bch_reference(const Point& x, const Point& y) const;

    /// True when the algebra is a standard Heisenberg presentation (step 2,
    /// one-dimensional centre, perfect +/-1 symplectic pairing), which is what
    /// the Koranyi norm formula assumes.
    bool is_heisenberg() const { return heisenberg_pairs_ >= 1; }
    /// Number of symplectic pairs when is_heisenberg(), else 0.
    int heisenberg_n() const { return heisenberg_pairs_; }

    struct AlphaEntry { int i, j, k; double c; };       // [d_i, d_j] = sum c e_k (layer-1 locals i<j, layer-2 local k)
    struct BetaEntry { int i, k, m; double c; };        // [d_i, e_k] = sum c f_m
    const std::vector<AlphaEntry>& alpha() const { return alpha_; }
    const std::vector<BetaEntry>& beta() const { return beta_; }

  private:
    void check_point(const Point& p) const;
    void require_arithmetic() const;

    std::shared_ptr<const AlgebraSpec> algebra_;
    int Q_ = 0;
    int heisenberg_pairs_ = 0;
    std::vector<AlphaEntry> alpha_;
    std::vector<BetaEntry> beta_;
};

/// Builds the group for a builtin name: "h<n>", "f<step>", or "prod(a,b,...)"
/// of builtin names. Also accepts a parsed algebra via the Group constructor.
Group builtin_group(const std::string& name);

}  // namespace carnot
