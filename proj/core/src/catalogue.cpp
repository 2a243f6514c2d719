#include "carnot/catalogue.hpp"

#include <cmath>
#include <complex>
#include <sstream>

#include "carnot/metric.hpp"

namespace carnot {

struct MapDescriptor::Impl {
    enum class Kind {
        Identity,
        LeftTranslation,
        Dilation,
        GradedAutomorphism,
        KoranyiInversion,
        PatchedInversion,
        Linear,
        Product,
        PermutedProduct,
        Composition,
    };

    Kind kind;
    Group source;
    Group target;
    std::string description;

    Point translate_by;       // LeftTranslation
    double lambda = 1.0;      // Dilation
    Mat matrix;               // GradedAutomorphism (full graded) / Linear
    double eps_param = 0.0;   // PatchedInversion
    int n_max = 20;           // PatchedInversion
    std::vector<MapDescriptor> parts;
    std::vector<int> sigma;   // PermutedProduct

    Impl(Kind k, Group src, Group tgt, std::string desc)
        : kind(k), source(std::move(src)), target(std::move(tgt)), description(std::move(desc)) {}
};

namespace {

using Impl = MapDescriptor::Impl;

Point invert_koranyi(const Group& G, const Point& p) {
    const int n = G.heisenberg_n();
    const int r = G.rank();
    const double z2 = p.head(r).squaredNorm();
    const double t = p[r];
    const double norm4 = z2 * z2 + 16.0 * t * t;
    if (norm4 == 0.0) throw EvaluationError("inversion has a pole at the identity");
    const std::complex<double> w(z2, 4.0 * t);
    Point out(G.dim());
    for (int j = 0; j < n; ++j) {
        const std::complex<double> zj(p[j], p[n + j]);
        const std::complex<double> img = -zj / w;
        out[j] = img.real();
        out[n + j] = img.imag();
    }
    out[r] = -t / norm4;
    return out;
}

}  // namespace

MapDescriptor MapDescriptor::identity(const Group& G) {
    return MapDescriptor(std::make_shared<Impl>(Impl::Kind::Identity, G, G, "id"));
}

MapDescriptor MapDescriptor::left_translation(const Group& G, Point g) {
    if (g.size() != G.dim()) throw std::invalid_argument("left_translation: dimension mismatch");
    std::ostringstream os;
    os << "lt(";
    for (int i = 0; i < g.size(); ++i) os << (i ? "," : "") << g[i];
    os << ")";
    auto impl = std::make_shared<Impl>(Impl::Kind::LeftTranslation, G, G, os.str());
    impl->translate_by = std::move(g);
    return MapDescriptor(std::move(impl));
}

MapDescriptor MapDescriptor::dilation(const Group& G, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("dilation: lambda > 0 required");
    std::ostringstream os;
    os << "dil(" << lambda << ")";
    auto impl = std::make_shared<Impl>(Impl::Kind::Dilation, G, G, os.str());
    impl->lambda = lambda;
    return MapDescriptor(std::move(impl));
}

MapDescriptor MapDescriptor::graded_automorphism(const Group& G, const Mat& horizontal_block) {
    const GradedDet gd = graded_automorphism_det(G.algebra(), horizontal_block);
    auto impl = std::make_shared<Impl>(Impl::Kind::GradedAutomorphism, G, G, "auto");
    impl->matrix = gd.full_matrix;
    return MapDescriptor(std::move(impl));
}

MapDescriptor MapDescriptor::koranyi_inversion(const Group& G) {
    if (!G.is_heisenberg())
        throw std::invalid_argument("koranyi_inversion needs a Heisenberg group");
    return MapDescriptor(std::make_shared<Impl>(Impl::Kind::KoranyiInversion, G, G, "inv"));
}

MapDescriptor MapDescriptor::patched_inversion(const Group& G, double eps_param, int n_max) {
    if (!G.is_heisenberg())
        throw std::invalid_argument("patched_inversion needs a Heisenberg group");
    if (!(eps_param > 0.0 && eps_param < 1.0))
        throw std::invalid_argument("patched_inversion: 0 < eps < 1 required");
    if (n_max < 1) throw std::invalid_argument("patched_inversion: n_max >= 1 required");
    std::ostringstream os;
    os << "patched(eps=" << eps_param << ",nmax=" << n_max << ")";
    auto impl = std::make_shared<Impl>(Impl::Kind::PatchedInversion, G, G, os.str());
    impl->eps_param = eps_param;
    impl->n_max = n_max;
    return MapDescriptor(std::move(impl));
}

MapDescriptor MapDescriptor::linear(const Group& G, const Group& H, Mat m) {
    if (m.rows() != H.dim() || m.cols() != G.dim())
        throw std::invalid_argument("linear: matrix shape mismatch");
    auto impl = std::make_shared<Impl>(Impl::Kind::Linear, G, H, "lin");
    impl->matrix = std::move(m);
    return MapDescriptor(std::move(impl));
}

MapDescriptor MapDescriptor::product(std::vector<MapDescriptor> fs) {
    std::vector<int> sigma(fs.size());
    for (size_t i = 0; i < fs.size(); ++i) sigma[i] = static_cast<int>(i);
    return permuted_product(std::move(fs), std::move(sigma));
}

MapDescriptor MapDescriptor::permuted_product(std::vector<MapDescriptor> fs,
                                              std::vector<int> sigma) {
    if (fs.empty()) throw std::invalid_argument("product: needs at least one factor");
    if (sigma.size() != fs.size()) throw std::invalid_argument("product: sigma size mismatch");
    std::vector<bool> seen(fs.size(), false);
    for (int s : sigma) {
        if (s < 0 || s >= static_cast<int>(fs.size()) || seen[s])
            throw std::invalid_argument("product: sigma is not a permutation");
        seen[s] = true;
    }
    std::vector<AlgebraSpec> src, tgt(fs.size(), fs[0].target().algebra());
    for (size_t i = 0; i < fs.size(); ++i) {
        src.push_back(fs[i].source().algebra());
        tgt[sigma[i]] = fs[i].target().algebra();
    }
    Group source{product_algebra(src)}, target{product_algebra(tgt)};
    std::ostringstream os;
    os << "perm(";
    for (size_t i = 0; i < sigma.size(); ++i) os << (i ? " " : "") << sigma[i] + 1;
    os << ";";
    for (size_t i = 0; i < fs.size(); ++i) os << (i ? "," : "") << fs[i].describe();
    os << ")";
    auto impl = std::make_shared<Impl>(Impl::Kind::PermutedProduct, source, target, os.str());
    impl->parts = std::move(fs);
    impl->sigma = std::move(sigma);
    return MapDescriptor(std::move(impl));
}

MapDescriptor MapDescriptor::composition(std::vector<MapDescriptor> fs) {
    if (fs.empty()) throw std::invalid_argument("composition: needs at least one map");
    for (size_t i = 0; i + 1 < fs.size(); ++i) {
        if (fs[i].source().dim() != fs[i + 1].target().dim())
            throw std::invalid_argument("composition: factor dimensions do not chain");
    }
    std::ostringstream os;
    os << "comp(";
    for (size_t i = 0; i < fs.size(); ++i) os << (i ? "," : "") << fs[i].describe();
    os << ")";
    Group src = fs.back().source(), tgt = fs.front().target();
    auto impl = std::make_shared<Impl>(Impl::Kind::Composition, src, tgt, os.str());
    impl->parts = std::move(fs);
    return MapDescriptor(std::move(impl));
}

std::vector<Point> split_factors(const Group& G, const Point& p) {
    const auto& factors = G.algebra().factors();
    if (factors.empty()) throw std::invalid_argument("split_factors: not a product group");
    std::vector<Point> out;
    for (const auto& f : factors) {
        Point x(static_cast<int>(f.global_indices.size()));
        for (size_t b = 0; b < f.global_indices.size(); ++b) x[b] = p[f.global_indices[b]];
        out.push_back(std::move(x));
    }
    return out;
}

Point join_factors(const Group& G, const std::vector<Point>& parts) {
    const auto& factors = G.algebra().factors();
    if (factors.size() != parts.size()) throw std::invalid_argument("join_factors: arity mismatch");
    Point p = Point::Zero(G.dim());
    for (size_t i = 0; i < factors.size(); ++i) {
        for (size_t b = 0; b < factors[i].global_indices.size(); ++b)
            p[factors[i].global_indices[b]] = parts[i][b];
    }
    return p;
}

Point MapDescriptor::evaluate(const Point& p) const {
    const Impl& im = *impl_;
    if (p.size() != im.source.dim()) throw std::invalid_argument("evaluate: dimension mismatch");
    switch (im.kind) {
        case Impl::Kind::Identity:
            return p;
        case Impl::Kind::LeftTranslation:
            return im.source.multiply(im.translate_by, p);
        case Impl::Kind::Dilation:
            return im.source.dilate(im.lambda, p);
        case Impl::Kind::GradedAutomorphism:
        case Impl::Kind::Linear:
            return im.matrix * p;
        case Impl::Kind::KoranyiInversion:
            return invert_koranyi(im.source, p);
        case Impl::Kind::PatchedInversion: {
            const double nrm = koranyi_norm(im.source, p);
            if (nrm == 0.0) throw EvaluationError("patched inversion undefined at the identity");
            if (nrm >= 1.0) throw EvaluationError("patched inversion defined on the unit ball only");
            const int n = static_cast<int>(std::ceil(-std::log2(nrm)));
            if (n > im.n_max) throw EvaluationError("point below the truncation annulus");
            const double scale = std::pow(2.0 - im.eps_param, -static_cast<double>(n));
            return im.source.dilate(scale, invert_koranyi(im.source, p));
        }
        case Impl::Kind::PermutedProduct: {
            const auto xs = split_factors(im.source, p);
            std::vector<Point> ys(xs.size());
            for (size_t i = 0; i < xs.size(); ++i) ys[im.sigma[i]] = im.parts[i].evaluate(xs[i]);
            return join_factors(im.target, ys);
        }
        case Impl::Kind::Composition: {
            Point x = p;
            for (auto it = im.parts.rbegin(); it != im.parts.rend(); ++it) x = it->evaluate(x);
            return x;
        }
    }
    throw std::logic_error("unreachable map kind");
}

const Group& MapDescriptor::source() const { return impl_->source; }
const Group& MapDescriptor::target() const { return impl_->target; }
const std::string& MapDescriptor::describe() const { return impl_->description; }

MapFn MapDescriptor::fn() const {
    MapDescriptor copy = *this;
    return [copy](const Point& p) { return copy.evaluate(p); };
}

// ---------------------------------------------------------------------------
// Expression parser

namespace {

struct ExprParser {
    const std::string& s;
    size_t pos = 0;

    explicit ExprParser(const std::string& text) : s(text) {}

    [[noreturn]] void fail(const std::string& msg) const {
        throw std::invalid_argument("map expression at position " + std::to_string(pos) + ": " + msg);
    }
    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!eat(c)) fail(std::string("expected '") + c + "'");
    }
    std::string ident() {
        skip_ws();
        size_t start = pos;
        while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
            ++pos;
        if (pos == start) fail("expected a name");
        return s.substr(start, pos - start);
    }
    double number() {
        skip_ws();
        size_t next = pos;
        try {
            const double v = std::stod(s.substr(pos), &next);
            pos += next;
            return v;
        } catch (...) {
            fail("expected a number");
        }
    }
    std::vector<double> number_list(char close) {
        std::vector<double> out;
        out.push_back(number());
        while (eat(',')) out.push_back(number());
        expect(close);
        return out;
    }
    Mat matrix() {
        expect('[');
        std::vector<std::vector<double>> rows;
        do {
            expect('[');
            rows.push_back(number_list(']'));
        } while (eat(','));
        expect(']');
        const size_t cols = rows.front().size();
        for (const auto& r : rows)
            if (r.size() != cols) fail("ragged matrix rows");
        Mat m(rows.size(), cols);
        for (size_t i = 0; i < rows.size(); ++i)
            for (size_t j = 0; j < cols; ++j) m(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
        return m;
    }

    MapDescriptor parse(const Group& G) {
        const std::string name = ident();
        if (name == "id") return MapDescriptor::identity(G);
        if (name == "inv") return MapDescriptor::koranyi_inversion(G);
        if (name == "dil") {
            expect('(');
            const double l = number();
            expect(')');
            return MapDescriptor::dilation(G, l);
        }
        if (name == "lt") {
            expect('(');
            const auto cs = number_list(')');
            if (static_cast<int>(cs.size()) != G.dim()) fail("lt: coordinate count mismatch");
            Point g(G.dim());
            for (int i = 0; i < G.dim(); ++i) g[i] = cs[i];
            return MapDescriptor::left_translation(G, g);
        }
        if (name == "auto") {
            expect('(');
            const Mat m = matrix();
            expect(')');
            return MapDescriptor::graded_automorphism(G, m);
        }
        if (name == "lin") {
            expect('(');
            const Mat m = matrix();
            expect(')');
            return MapDescriptor::linear(G, G, m);
        }
        if (name == "patched") {
            expect('(');
            double eps = 0.05;
            int nmax = 20;
            do {
                const std::string key = ident();
                expect('=');
                const double v = number();
                if (key == "eps")
                    eps = v;
                else if (key == "nmax")
                    nmax = static_cast<int>(v);
                else
                    fail("unknown patched parameter '" + key + "'");
            } while (eat(','));
            expect(')');
            return MapDescriptor::patched_inversion(G, eps, nmax);
        }
        if (name == "comp") {
            expect('(');
            std::vector<MapDescriptor> fs;
            do {
                fs.push_back(parse(G));
            } while (eat(','));
            expect(')');
            return MapDescriptor::composition(std::move(fs));
        }
        if (name == "prod" || name == "perm") {
            const auto& factors = G.algebra().factors();
            if (factors.empty()) fail(name + " needs a product group");
            std::vector<int> sigma;
            expect('(');
            if (name == "perm") {
                // 1-based permutation images, space-separated, closed by ';'
                while (true) {
                    skip_ws();
                    if (pos < s.size() && s[pos] == ';') break;
                    if (pos >= s.size()) fail("perm: expected ';' after the permutation");
                    sigma.push_back(static_cast<int>(number()) - 1);
                }
                expect(';');
            }
            std::vector<MapDescriptor> fs;
            size_t idx = 0;
            do {
                if (idx >= factors.size()) fail("more factor maps than group factors");
                Group Gi = [&] {
                    AlgebraSpec ai(factors[idx].name, factors[idx].layer_dims);
                    // rebuild the factor algebra from the embedded table
                    const auto& map = factors[idx].global_indices;
                    std::map<int, int> inv;
                    for (size_t b = 0; b < map.size(); ++b) inv[map[b]] = static_cast<int>(b);
                    for (const auto& [pair, v] : G.algebra().table()) {
                        auto it1 = inv.find(pair.first);
                        auto it2 = inv.find(pair.second);
                        if (it1 == inv.end() || it2 == inv.end() || pair.first > pair.second) continue;
                        SparseVec w;
                        for (const auto& [t, c] : v) {
                            auto it3 = inv.find(t);
                            if (it3 == inv.end()) fail("product table crosses factors");
                            w.emplace_back(it3->second, c);
                        }
                        ai.set_bracket(it1->second, it2->second, w);
                    }
                    return Group(ai);
                }();
                fs.push_back(parse(Gi));
                ++idx;
            } while (eat(','));
            expect(')');
            if (fs.size() != factors.size()) fail("factor map count mismatch");
            if (name == "prod") return MapDescriptor::product(std::move(fs));
            if (sigma.size() != fs.size()) fail("sigma size mismatch");
            return MapDescriptor::permuted_product(std::move(fs), std::move(sigma));
        }
        fail("unknown map '" + name + "'");
    }
};

}  // namespace

MapDescriptor parse_map_expr(const std::string& expr, const Group& G) {
    ExprParser p(expr);
    MapDescriptor m = p.parse(G);
    p.skip_ws();
    if (p.pos != expr.size()) p.fail("trailing input");
    if (m.source().dim() != G.dim())
        throw std::invalid_argument("map expression does not act on the given group");
    return m;
}

}  // namespace carnot
