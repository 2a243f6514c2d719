#include "carnot/group.hpp"

#include <cmath>
#include <stdexcept>

namespace carnot {

Group::Group(AlgebraSpec algebra)
    : algebra_(std::make_shared<const AlgebraSpec>(std::move(algebra))) {
    Q_ = algebra_->homogeneous_dimension();

    const auto& a = *algebra_;
    const int s = a.step();
    if (s >= 2) {
        const int off1 = a.layer_offset(1), off2 = a.layer_offset(2);
        const int r = a.layer_dim(1);
        for (const auto& [pair, v] : a.table()) {
            const auto [i, j] = pair;
            if (i > j) continue;
            if (a.layer_of(i) == 1 && a.layer_of(j) == 1) {
                for (const auto& [idx, c] : v)
                    alpha_.push_back({i - off1, j - off1, idx - off2, boost::rational_cast<double>(c)});
            } else if (s >= 3 && a.layer_of(i) == 1 && a.layer_of(j) == 2) {
                const int off3 = a.layer_offset(3);
                for (const auto& [idx, c] : v)
                    beta_.push_back({i - off1, j - off2, idx - off3, boost::rational_cast<double>(c)});
            }
        }
        // Heisenberg shape: step 2, 1-dim centre, each horizontal index in
        // exactly one alpha entry with coefficient +-1, r = 2n.
        if (s == 2 && a.layer_dim(2) == 1 && r % 2 == 0) {
            std::vector<int> uses(r, 0);
            bool unit = true;
            for (const auto& e : alpha_) {
                ++uses[e.i];
                ++uses[e.j];
                if (std::abs(std::abs(e.c) - 1.0) > 0) unit = false;
            }
            bool paired = unit && static_cast<int>(alpha_.size()) == r / 2;
            for (int u : uses) paired = paired && (u == 1);
            if (paired) heisenberg_pairs_ = r / 2;
        }
    }
}

void Group::check_point(const Point& p) const {
    if (p.size() != dim()) throw std::invalid_argument("point dimension mismatch");
}

void Group::require_arithmetic() const {
    if (step() > 3)
        throw std::domain_error("group arithmetic is only available for step <= 3");
}

Point Group::multiply(const Point& p, const Point& q) const {
    check_point(p);
    check_point(q);
    require_arithmetic();
    const int s = step();
    Point out = p + q;
    if (s == 1) return out;

    const int off1 = layer_offset(1), off2 = layer_offset(2);
    // w_k = sum_{i<j} alpha_k^{ij} (A_i a_j - a_i A_j), reused by both layers.
    Vec w = Vec::Zero(layer_dim(2));
    for (const auto& e : alpha_) {
        w[e.k] += e.c * (p[off1 + e.i] * q[off1 + e.j] - q[off1 + e.i] * p[off1 + e.j]);
    }
    out.segment(off2, layer_dim(2)) += 0.5 * w;
    if (s == 2) return out;

    const int off3 = layer_offset(3);
    for (const auto& e : beta_) {
        // 1/2 beta_m^{ik} (A_i b_k - B_k a_i)
        out[off3 + e.m] += 0.5 * e.c * (p[off1 + e.i] * q[off2 + e.k] - p[off2 + e.k] * q[off1 + e.i]);
        // 1/12 (A_l - a_l) w_k beta_m^{lk}
        out[off3 + e.m] += (1.0 / 12.0) * e.c * (p[off1 + e.i] - q[off1 + e.i]) * w[e.k];
    }
    return out;
}

Point Group::inverse(const Point& p) const {
    check_point(p);
    return -p;
}

Point Group::left_quotient(const Point& q, const Point& p) const {
    return multiply(inverse(q), p);
}

Point Group::dilate(double lambda, const Point& p) const {
    check_point(p);
    if (!(lambda > 0.0)) throw std::invalid_argument("dilation requires lambda > 0");
    Point out = p;
    for (int k = 1; k <= step(); ++k)
        out.segment(layer_offset(k), layer_dim(k)) *= std::pow(lambda, k);
    return out;
}

Point Group::bch_reference(const Point& x, const Point& y) const {
    check_point(x);
    check_point(y);
    require_arithmetic();
    const auto& a = algebra();
    Point out = x + y;
    Point xy = a.bracket(x, y);
    out += 0.5 * xy;
    if (step() >= 3) {
        out += (a.bracket(x, xy) + a.bracket(y, a.bracket(y, x))) / 12.0;
    }
    return out;
}

Group builtin_group(const std::string& name) {
    if (name.starts_with("prod(") && name.ends_with(")")) {
        std::vector<AlgebraSpec> parts;
        std::string inner = name.substr(5, name.size() - 6);
        size_t pos = 0;
        int depth = 0;
        std::string cur;
        auto flush = [&] {
            if (cur.empty()) throw std::invalid_argument("empty product factor in '" + name + "'");
            parts.push_back(builtin_group(cur).algebra());
            cur.clear();
        };
        for (; pos < inner.size(); ++pos) {
            const char c = inner[pos];
            if (c == '(') ++depth;
            if (c == ')') --depth;
            if (c == ',' && depth == 0) {
                flush();
            } else if (!std::isspace(static_cast<unsigned char>(c))) {
                cur.push_back(c);
            }
        }
        flush();
        return Group(product_algebra(parts));
    }
    if (name.size() >= 2 && (name[0] == 'h' || name[0] == 'f')) {
        try {
            const int param = std::stoi(name.substr(1));
            return Group(name[0] == 'h' ? heisenberg_algebra(param) : filiform_algebra(param));
        } catch (const std::invalid_argument&) {
            // fall through
        }
    }
    throw std::invalid_argument("unknown group '" + name + "' (expected h<n>, f<step>, or prod(...))");
}

}  // namespace carnot
