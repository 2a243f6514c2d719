#include "carnot/calculus.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace carnot {

Mat frame_at(const Group& G, const Point& p) {
    if (p.size() != G.dim()) throw std::invalid_argument("point dimension mismatch");
    if (G.step() > 3) throw std::domain_error("frame_at: step <= 3 required");
    const int n = G.dim();
    Mat F = Mat::Identity(n, n);
    if (G.step() < 2) return F;

    const int off1 = G.layer_offset(1), off2 = G.layer_offset(2);
    const int r = G.rank(), s2 = G.layer_dim(2);

    // s_k(i) = sum_j alphaf_k^{ji} A_j; the dB_k coefficient of X^i is s_k(i)/2.
    Mat s = Mat::Zero(s2, r);
    for (const auto& e : G.alpha()) {
        s(e.k, e.j) += e.c * p[off1 + e.i];
        s(e.k, e.i) -= e.c * p[off1 + e.j];
    }
    F.block(off2, off1, s2, r) = 0.5 * s;

    if (G.step() == 3) {
        const int off3 = G.layer_offset(3), s3 = G.layer_dim(3);
        Mat C = Mat::Zero(s3, r);   // dC_m coefficients of X^i
        Mat Y = Mat::Zero(s3, s2);  // dC_m coefficients of Y^k
        for (const auto& e : G.beta()) {
            for (int i = 0; i < r; ++i)
                C(e.m, i) += (1.0 / 12.0) * e.c * p[off1 + e.i] * s(e.k, i);
            C(e.m, e.i) -= 0.5 * e.c * p[off2 + e.k];
            Y(e.m, e.k) += 0.5 * e.c * p[off1 + e.i];
        }
        F.block(off3, off1, s3, r) = C;
        F.block(off3, off2, s3, s2) = Y;
    }
    return F;
}

Mat coframe_at(const Group& G, const Point& p) {
    const Mat F = frame_at(G, p);
    const int n = G.dim();
    Mat W = Mat::Identity(n, n);
    if (G.step() < 2) return W;
    const int off1 = G.layer_offset(1), off2 = G.layer_offset(2);
    const int r = G.rank(), s2 = G.layer_dim(2);
    const Mat P = F.block(off2, off1, s2, r);
    W.block(off2, off1, s2, r) = -P;
    if (G.step() == 3) {
        const int off3 = G.layer_offset(3), s3 = G.layer_dim(3);
        const Mat Q = F.block(off3, off1, s3, r);
        const Mat R = F.block(off3, off2, s3, s2);
        W.block(off3, off1, s3, r) = R * P - Q;
        W.block(off3, off2, s3, s2) = -R;
    }
    return W;
}

namespace {

Point flow_point(const Group& G, const Point& p, int v, double h) {
    Point dir = Point::Zero(G.dim());
    dir[v] = h;
    return G.multiply(p, dir);
}

}  // namespace

Vec derive_along(const Group& G, const MapFn& f, const Point& p, int v, const FDConfig& fd) {
    if (v < 0 || v >= G.dim()) throw std::invalid_argument("basis index out of range");
    if (!(fd.h > 0.0)) throw std::invalid_argument("derive_along requires h > 0");
    auto central = [&](double h) -> Vec {
        return (f(flow_point(G, p, v, h)) - f(flow_point(G, p, v, -h))) / (2.0 * h);
    };
    const Vec d1 = central(fd.h);
    if (!fd.richardson) return d1;
    const Vec d2 = central(fd.h / 2.0);
    return (4.0 * d2 - d1) / 3.0;
}

double derive_along(const Group& G, const ScalarFn& f, const Point& p, int v, const FDConfig& fd) {
    MapFn wrapped = [&](const Point& x) {
        Vec out(1);
        out[0] = f(x);
        return out;
    };
    return derive_along(G, wrapped, p, v, fd)[0];
}

Mat horizontal_gradient(const Group& G, const Group& H, const MapFn& f, const Point& p,
                        const FDConfig& fd) {
    const int r = G.rank(), rh = H.rank();
    Mat D(r, rh);
    const int off1 = G.layer_offset(1);
    const int hoff1 = H.layer_offset(1);
    for (int i = 0; i < r; ++i) {
        const Vec d = derive_along(G, f, p, off1 + i, fd);
        if (d.size() != H.dim()) throw std::invalid_argument("map target dimension mismatch");
        D.row(i) = d.segment(hoff1, rh).transpose();
    }
    return D;
}

Point pansu_quotient(const Group& G, const Group& H, const MapFn& f, const Point& p, const Vec& v,
                     double t) {
    if (!(t > 0.0)) throw std::invalid_argument("pansu_quotient requires t > 0");
    if (v.size() != G.dim()) throw std::invalid_argument("direction dimension mismatch");
    const Point fp = f(p);
    const Point moved = f(G.multiply(p, G.dilate(t, v)));
    return H.dilate(1.0 / t, H.left_quotient(fp, moved));
}

PansuResult pansu_differential(const Group& G, const Group& H, const MapFn& f, const Point& p,
                               const std::vector<double>& t_sequence, double stability_tol) {
    if (t_sequence.empty()) throw std::invalid_argument("t_sequence must be nonempty");
    for (size_t i = 1; i < t_sequence.size(); ++i)
        if (!(t_sequence[i] < t_sequence[i - 1]) || !(t_sequence[i] > 0.0))
            throw std::invalid_argument("t_sequence must be decreasing and positive");

    const int n = G.dim(), m = H.dim();
    PansuResult res;
    res.matrix = Mat::Zero(m, n);
    Mat last = Mat::Zero(m, n), prev = Mat::Zero(m, n);
    for (size_t ti = 0; ti < t_sequence.size(); ++ti) {
        prev = last;
        for (int j = 0; j < n; ++j) {
            Vec v = Vec::Zero(n);
            v[j] = 1.0;
            last.col(j) = pansu_quotient(G, H, f, p, v, t_sequence[ti]);
        }
        if (ti + 1 == t_sequence.size() && t_sequence.size() >= 2) {
            const double rr = t_sequence[ti - 1] / t_sequence[ti];
            res.matrix = (rr * last - prev) / (rr - 1.0);
            res.disagreement = (last - prev).cwiseAbs().maxCoeff();
            res.stable = res.disagreement <= stability_tol;
        } else {
            res.matrix = last;
        }
    }

    const auto& ga = G.algebra();
    const auto& ha = H.algebra();
    double defect = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            Vec ei = Vec::Zero(n), ej = Vec::Zero(n);
            ei[i] = 1.0;
            ej[j] = 1.0;
            const Vec lhs = ha.bracket(res.matrix.col(i), res.matrix.col(j));
            const Vec rhs = res.matrix * ga.bracket(ei, ej);
            defect = std::max(defect, (lhs - rhs).cwiseAbs().maxCoeff());
        }
    }
    res.homomorphism_defect = defect;
    return res;
}

GradedDet graded_automorphism_det(const AlgebraSpec& a, const Mat& horizontal_block, double tol) {
    const int r = a.layer_dim(1);
    if (horizontal_block.rows() != r || horizontal_block.cols() != r)
        throw std::invalid_argument("horizontal block must be square of the first-layer dimension");

    GradedDet out;
    out.full_matrix = Mat::Zero(a.dim(), a.dim());
    out.full_matrix.block(0, 0, r, r) = horizontal_block;

    // layer_maps[k-1]: induced matrix on layer k (columns act on layer-k locals).
    std::vector<Mat> layer_maps{horizontal_block};
    out.layer_dets.push_back(horizontal_block.determinant());

    auto embed = [&](const Vec& local, int layer) {
        Vec full = Vec::Zero(a.dim());
        full.segment(a.layer_offset(layer), a.layer_dim(layer)) = local;
        return full;
    };

    for (int layer = 2; layer <= a.step(); ++layer) {
        const int dl = a.layer_dim(layer);
        const int dprev = a.layer_dim(layer - 1);
        std::vector<Vec> pre, post;
        for (int i = 0; i < r; ++i) {
            Vec ei = Vec::Zero(r);
            ei[i] = 1.0;
            const Vec Li = embed(layer_maps[0] * ei, 1);
            const Vec ei_full = embed(ei, 1);
            for (int w = 0; w < dprev; ++w) {
                Vec ew = Vec::Zero(dprev);
                ew[w] = 1.0;
                const Vec b = a.bracket(ei_full, embed(ew, layer - 1));
                const Vec Lb = a.bracket(Li, embed(layer_maps[layer - 2] * ew, layer - 1));
                pre.push_back(b.segment(a.layer_offset(layer), dl));
                post.push_back(Lb.segment(a.layer_offset(layer), dl));
            }
        }
        const int K = static_cast<int>(pre.size());
        Mat B(dl, K), C(dl, K);
        for (int c = 0; c < K; ++c) {
            B.col(c) = pre[c];
            C.col(c) = post[c];
        }
        // Solve M B = C in the least-squares sense, then verify exact consistency.
        Mat M = (B.transpose().colPivHouseholderQr().solve(C.transpose())).transpose();
        const double scale = std::max(1.0, C.cwiseAbs().maxCoeff());
        if (((M * B - C).cwiseAbs().maxCoeff()) > tol * scale)
            throw std::domain_error("horizontal block does not extend to a graded morphism");
        layer_maps.push_back(M);
        out.layer_dets.push_back(M.determinant());
        out.full_matrix.block(a.layer_offset(layer), a.layer_offset(layer), dl, dl) = M;
    }

    out.value = 1.0;
    for (double d : out.layer_dets) out.value *= d;
    out.direct_det = out.full_matrix.determinant();
    return out;
}

}  // namespace carnot
