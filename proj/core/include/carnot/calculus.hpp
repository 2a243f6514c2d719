#pragma once

#include <functional>
#include <vector>

#include "carnot/group.hpp"

namespace carnot {

/// Pointwise-evaluable map between groups (catalogue descriptors adapt to this).
using MapFn = std::function<Point(const Point&)>;
using ScalarFn = std::function<double(const Point&)>;

struct FDConfig {
    double h = 1e-4;
    bool richardson = true;
};

/// Columns are the left-invariant frame fields X^i, Y^k, Z^m evaluated at p in
/// coordinates. At the identity this is the identity matrix; in general it is
/// unit lower block-triangular.
Mat frame_at(const Group& G, const Point& p);

/// Rows are the dual left-invariant coframe at p, the exact block inverse of
/// frame_at. Horizontal rows are the coordinate forms dx_j; higher rows are
/// the contact forms, which annihilate the horizontal frame.
Mat coframe_at(const Group& G, const Point& p);

/// Central difference of f along the flow p * exp(h e_v) of the v-th
/// left-invariant field (v is a 0-based global basis index), with optional
/// two-level Richardson extrapolation.
Vec derive_along(const Group& G, const MapFn& f, const Point& p, int v, const FDConfig& fd = {});
double derive_along(const Group& G, const ScalarFn& f, const Point& p, int v, const FDConfig& fd = {});

/// D_H f: entry (i,j) is the derivative of the j-th horizontal target
/// coordinate along the i-th horizontal frame field.
Mat horizontal_gradient(const Group& G, const Group& H, const MapFn& f, const Point& p,
                        const FDConfig& fd = {});

/// delta_{1/t}( f(p)^{-1} * f(p * delta_t(exp v)) ), the Pansu difference
/// quotient in the direction of the algebra vector v.
Point pansu_quotient(const Group& G, const Group& H, const MapFn& f, const Point& p, const Vec& v,
                     double t);

struct PansuResult {
    Mat matrix;                 // H.dim() x G.dim(), column j = basis direction e_j
    double homomorphism_defect = 0.0;
    bool stable = true;         // quotients at the two smallest t agree within tol
    double disagreement = 0.0;  // max column sup-difference between those t values
};

/// Columns extrapolated across the decreasing t_sequence (Richardson on the
/// last two values); defect = max over basis pairs of
/// |[M e_i, M e_j] - M [e_i, e_j]| in the target algebra.
PansuResult pansu_differential(const Group& G, const Group& H, const MapFn& f, const Point& p,
                               const std::vector<double>& t_sequence, double stability_tol = 1e-3);

struct GradedDet {
    double value = 1.0;               // product of layer determinants
    std::vector<double> layer_dets;
    Mat full_matrix;                  // assembled block-diagonal graded matrix
    double direct_det = 1.0;          // det(full_matrix), the second route
};

/// Pushes a horizontal block through the brackets layer by layer, building the
/// induced map on each layer; throws std::domain_error when the block does not
/// extend consistently to a graded morphism.
GradedDet graded_automorphism_det(const AlgebraSpec& a, const Mat& horizontal_block,
                                  double tol = 1e-9);

}  // namespace carnot
