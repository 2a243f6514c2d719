#pragma once

#include <Eigen/Core>
#include <boost/rational.hpp>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace carnot {

using Rational = boost::rational<long long>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Sparse exact coefficient vector over the algebra basis: (global index, coefficient).
using SparseVec = std::vector<std::pair<int, Rational>>;

struct Violation {
    std::string identity;  // "antisymmetry" | "grading" | "jacobi" | "generation"
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

/// Per-factor bookkeeping for product algebras: where each factor's basis
/// lands inside the product's global indexing.
struct FactorInfo {
    std::string name;
    std::vector<int> layer_dims;
    std::vector<int> global_indices;  // factor basis order -> product global index
};

/// A stratified Lie algebra given by layer dimensions and a structure-constant
/// table. Basis indices are global (0-based across layers); layer boundaries
/// derive from layer_dims. Structure constants are exact rationals.
///
/// Immutable once validated; all operations are const and pure.
class AlgebraSpec {
  public:
    AlgebraSpec(std::string name, std::vector<int> layer_dims);

    /// Stores the pair (i,j) together with its antisymmetric mirror (j,i) = -v.
    void set_bracket(int i, int j, SparseVec v);
    /// Stores exactly one orientation, no mirror. Lets tests build tables that
    /// violate antisymmetry so validate() has something to catch.
    void set_bracket_raw(int i, int j, SparseVec v);

    const std::string& name() const { return name_; }
    int dim() const { return dim_; }
    int step() const { return static_cast<int>(layer_dims_.size()); }
    const std::vector<int>& layer_dims() const { return layer_dims_; }
    int layer_dim(int layer) const { return layer_dims_.at(layer - 1); }
    /// 0-based global index of the first basis vector of a (1-based) layer.
    int layer_offset(int layer) const { return offsets_.at(layer - 1); }
    /// 1-based weight of a 0-based global basis index.
    int layer_of(int index) const;

    int homogeneous_dimension() const;

    /// Table lookup with antisymmetry; empty vector when the bracket is zero.
    SparseVec bracket_exact(int i, int j) const;
    const SparseVec* table_entry(int i, int j) const;
    const std::map<std::pair<int, int>, SparseVec>& table() const { return table_; }

    /// Bilinear antisymmetric extension of the table to dense coefficient vectors.
    Vec bracket(const Vec& x, const Vec& y) const;

    /// Checks antisymmetry, grading, Jacobi and generation-by-first-layer,
    /// exactly over the rationals. Violations are data, not errors.
    ValidationReport validate() const;

    const std::vector<FactorInfo>& factors() const { return factors_; }
    void set_factors(std::vector<FactorInfo> f) { factors_ = std::move(f); }

  private:
    std::string name_;
    std::vector<int> layer_dims_;
    std::vector<int> offsets_;
    int dim_ = 0;
    std::map<std::pair<int, int>, SparseVec> table_;
    std::vector<FactorInfo> factors_;
};

/// Parses the line-oriented spec-file grammar:
///   layers d1 d2 ... ds
///   [i,j] = c1*k1 + c2*k2 ...     (i<j, 1-based indices, coefficients decimal or p/q)
/// '#' starts a comment; ';' also separates statements. Throws std::runtime_error
/// with a line number on syntax errors, undeclared indices, duplicate pairs, and
/// bracket targets outside the graded layer.
AlgebraSpec parse_algebra_spec(const std::string& text);

/// Heisenberg algebra h^n: layers (2n, 1), symplectic pairing [x_i, y_i] = Z
/// with basis ordered x_1..x_n, y_1..y_n, Z.
AlgebraSpec heisenberg_algebra(int n);

/// Step-n filiform algebra: layers (2, 1, ..., 1), [X1, Xk] = X_{k+1} for 2 <= k <= n.
/// Requires n >= 3.
AlgebraSpec filiform_algebra(int n);

/// Direct sum with block-diagonal bracket table; factors recorded for later
/// block addressing.
AlgebraSpec product_algebra(const std::vector<AlgebraSpec>& parts);

/// Dispatch by name: "heisenberg" (param n), "filiform" (param step).
AlgebraSpec builtin_algebra(const std::string& name, int param);

}  // namespace carnot
