#pragma once

#include <memory>
#include <string>
#include <vector>

#include "carnot/calculus.hpp"
#include "carnot/group.hpp"

namespace carnot {

/// Thrown when a map is evaluated outside its domain (inversion at the
/// identity, patched map below its truncation annulus, ...).
struct EvaluationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A named, composable, pointwise-evaluable map between Carnot groups.
/// Descriptors are immutable; evaluation is pure.
class MapDescriptor {
  public:
    static MapDescriptor identity(const Group& G);
    static MapDescriptor left_translation(const Group& G, Point g);
    static MapDescriptor dilation(const Group& G, double lambda);
    /// Graded automorphism determined by its horizontal block; throws if the
    /// block does not extend to the higher layers.
    static MapDescriptor graded_automorphism(const Group& G, const Mat& horizontal_block);
    /// Conformal inversion on a Heisenberg group:
    ///   (z, t) -> ( -z / (|z|^2 + 4 i t),  -t / ||p||^4 ),
    /// an exact involution with ||J(p)|| = 1 / ||p||.
    static MapDescriptor koranyi_inversion(const Group& G);
    /// Annulus-patched inversion: on { 2^-n <= ||p|| < 2^-(n-1) } returns
    /// delta_{(2-eps)^{-n}} (J(p)); truncated at n_max.
    static MapDescriptor patched_inversion(const Group& G, double eps_param, int n_max = 20);
    /// Arbitrary coordinate-linear map (not required to respect the group
    /// structure); used for constructed counterexamples.
    static MapDescriptor linear(const Group& G, const Group& H, Mat m);
    static MapDescriptor product(std::vector<MapDescriptor> fs);
    /// out[sigma(i)] = f_i(in[i]); sigma is a 0-based permutation.
    static MapDescriptor permuted_product(std::vector<MapDescriptor> fs, std::vector<int> sigma);
    /// comp(f1, f2, ..., fk) applies fk first: f1 o f2 o ... o fk.
    static MapDescriptor composition(std::vector<MapDescriptor> fs);

    Point evaluate(const Point& p) const;
    Point operator()(const Point& p) const { return evaluate(p); }

    const Group& source() const;
    const Group& target() const;
    const std::string& describe() const;

    /// Adapter for the calculus/mollify layer.
    MapFn fn() const;

  private:
    struct Impl;
    explicit MapDescriptor(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

/// Parses the map-expression grammar against a source group:
///   id | inv | dil(l) | lt(c1,c2,...) | auto([[..],[..]]) |
///   patched(eps=0.05,nmax=20) | lin([[..],...]) |
///   prod(e1,e2,...) | perm(s1 s2 ...; e1,e2,...) | comp(e1,e2,...)
MapDescriptor parse_map_expr(const std::string& expr, const Group& G);

/// Splits a product-group point into factor points / reassembles it.
std::vector<Point> split_factors(const Group& G, const Point& p);
Point join_factors(const Group& G, const std::vector<Point>& parts);

}  // namespace carnot
