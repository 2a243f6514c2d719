#include "carnot/algebra.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace carnot {

namespace {

void normalize_sparse(SparseVec& v) {
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    SparseVec out;
    for (const auto& [idx, c] : v) {
        if (!out.empty() && out.back().first == idx) {
            out.back().second += c;
        } else {
            out.emplace_back(idx, c);
        }
    }
    out.erase(std::remove_if(out.begin(), out.end(),
                             [](const auto& e) { return e.second == Rational(0); }),
              out.end());
    v = std::move(out);
}

SparseVec negate(const SparseVec& v) {
    SparseVec out = v;
    for (auto& [idx, c] : out) c = -c;
    return out;
}

SparseVec add(const SparseVec& a, const SparseVec& b) {
    SparseVec out = a;
    out.insert(out.end(), b.begin(), b.end());
    normalize_sparse(out);
    return out;
}

SparseVec scale(const Rational& s, const SparseVec& v) {
    if (s == Rational(0)) return {};
    SparseVec out = v;
    for (auto& [idx, c] : out) c *= s;
    return out;
}

std::string sparse_to_string(const SparseVec& v) {
    if (v.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [idx, c] : v) {
        if (!first) os << " + ";
        os << c << "*e" << (idx + 1);
        first = false;
    }
    return os.str();
}

}  // namespace

AlgebraSpec::AlgebraSpec(std::string name, std::vector<int> layer_dims)
    : name_(std::move(name)), layer_dims_(std::move(layer_dims)) {
    if (layer_dims_.empty()) throw std::invalid_argument("algebra needs at least one layer");
    offsets_.resize(layer_dims_.size());
    int off = 0;
    for (size_t k = 0; k < layer_dims_.size(); ++k) {
        if (layer_dims_[k] <= 0) throw std::invalid_argument("layer dimensions must be positive");
        offsets_[k] = off;
        off += layer_dims_[k];
    }
    dim_ = off;
}

int AlgebraSpec::layer_of(int index) const {
    if (index < 0 || index >= dim_) throw std::out_of_range("basis index out of range");
    for (int k = static_cast<int>(layer_dims_.size()); k >= 1; --k) {
        if (index >= offsets_[k - 1]) return k;
    }
    return 1;
}

void AlgebraSpec::set_bracket(int i, int j, SparseVec v) {
    if (i == j) throw std::invalid_argument("bracket pair needs distinct indices");
    normalize_sparse(v);
    table_[{i, j}] = v;
    table_[{j, i}] = negate(v);
}

void AlgebraSpec::set_bracket_raw(int i, int j, SparseVec v) {
    normalize_sparse(v);
    table_[{i, j}] = std::move(v);
}

const SparseVec* AlgebraSpec::table_entry(int i, int j) const {
    auto it = table_.find({i, j});
    return it == table_.end() ? nullptr : &it->second;
}

SparseVec AlgebraSpec::bracket_exact(int i, int j) const {
    if (i == j) return {};
    if (const SparseVec* v = table_entry(i, j)) return *v;
    return {};
}

Vec AlgebraSpec::bracket(const Vec& x, const Vec& y) const {
    if (x.size() != dim_ || y.size() != dim_)
        throw std::invalid_argument("bracket: dimension mismatch");
    Vec out = Vec::Zero(dim_);
    for (const auto& [pair, v] : table_) {
        const auto [i, j] = pair;
        if (i > j) continue;  // antisymmetric mirror handled below
        const double w = x[i] * y[j] - x[j] * y[i];
        if (w == 0.0) continue;
        for (const auto& [idx, c] : v) out[idx] += w * boost::rational_cast<double>(c);
    }
    return out;
}

int AlgebraSpec::homogeneous_dimension() const {
    int q = 0;
    for (size_t k = 0; k < layer_dims_.size(); ++k) q += static_cast<int>(k + 1) * layer_dims_[k];
    return q;
}

namespace {

/// Exact sparse bracket of sparse vectors against a spec's table.
SparseVec bracket_sparse(const AlgebraSpec& a, const SparseVec& x, const SparseVec& y) {
    SparseVec out;
    for (const auto& [i, ci] : x) {
        for (const auto& [j, cj] : y) {
            if (i == j) continue;
            const SparseVec b = a.bracket_exact(i, j);
            for (const auto& [idx, c] : b) out.emplace_back(idx, ci * cj * c);
        }
    }
    normalize_sparse(out);
    return out;
}

/// Rank of the span of sparse vectors restricted to a layer block, by exact
/// Gaussian elimination over the rationals.
int layer_rank(const std::vector<SparseVec>& vs, int offset, int dim) {
    std::vector<std::vector<Rational>> rows;
    for (const auto& v : vs) {
        std::vector<Rational> row(dim, Rational(0));
        bool nonzero = false;
        for (const auto& [idx, c] : v) {
            if (idx >= offset && idx < offset + dim) {
                row[idx - offset] = c;
                nonzero = true;
            }
        }
        if (nonzero) rows.push_back(std::move(row));
    }
    int rank = 0;
    for (int col = 0; col < dim && rank < static_cast<int>(rows.size()); ++col) {
        int pivot = -1;
        for (int r = rank; r < static_cast<int>(rows.size()); ++r) {
            if (rows[r][col] != Rational(0)) { pivot = r; break; }
        }
        if (pivot < 0) continue;
        std::swap(rows[rank], rows[pivot]);
        for (int r = rank + 1; r < static_cast<int>(rows.size()); ++r) {
            if (rows[r][col] == Rational(0)) continue;
            const Rational f = rows[r][col] / rows[rank][col];
            for (int c = col; c < dim; ++c) rows[r][c] -= f * rows[rank][c];
        }
        ++rank;
    }
    return rank;
}

}  // namespace

ValidationReport AlgebraSpec::validate() const {
    ValidationReport rep;
    const int s = step();

    // Antisymmetry: every stored orientation must have the exact mirror.
    for (const auto& [pair, v] : table_) {
        const auto [i, j] = pair;
        if (i > j) continue;
        const SparseVec* mirror = table_entry(j, i);
        SparseVec expect = negate(v);
        if (!mirror ? !expect.empty() : *mirror != expect) {
            rep.violations.push_back({"antisymmetry",
                                      "[" + std::to_string(j + 1) + "," + std::to_string(i + 1) +
                                          "] != -[" + std::to_string(i + 1) + "," +
                                          std::to_string(j + 1) + "]"});
        }
    }

    // Grading: support of [e_i, e_j] confined to layer w(i)+w(j).
    for (const auto& [pair, v] : table_) {
        const auto [i, j] = pair;
        if (i > j) continue;
        const int target = layer_of(i) + layer_of(j);
        for (const auto& [idx, c] : v) {
            (void)c;
            if (target > s || layer_of(idx) != target) {
                rep.violations.push_back({"grading",
                                          "[" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                              "] hits e" + std::to_string(idx + 1) +
                                              " outside layer " + std::to_string(target)});
                break;
            }
        }
    }

    // Jacobi on all basis triples, exact.
    for (int i = 0; i < dim_; ++i) {
        for (int j = i + 1; j < dim_; ++j) {
            for (int k = j + 1; k < dim_; ++k) {
                SparseVec sum = add(bracket_sparse(*this, {{i, 1}}, bracket_exact(j, k)),
                                    add(bracket_sparse(*this, {{j, 1}}, bracket_exact(k, i)),
                                        bracket_sparse(*this, {{k, 1}}, bracket_exact(i, j))));
                if (!sum.empty()) {
                    rep.violations.push_back({"jacobi",
                                              "triple (" + std::to_string(i + 1) + "," +
                                                  std::to_string(j + 1) + "," + std::to_string(k + 1) +
                                                  ") -> " + sparse_to_string(sum)});
                }
            }
        }
    }

    // Stratification: [g1, g^[k]] must span g^[k+1].
    for (int k = 1; k < s; ++k) {
        std::vector<SparseVec> images;
        for (int i = 0; i < layer_dims_[0]; ++i) {
            for (int w = 0; w < layer_dims_[k - 1]; ++w) {
                images.push_back(bracket_exact(i, offsets_[k - 1] + w));
            }
        }
        const int rank = layer_rank(images, offsets_[k], layer_dims_[k]);
        if (rank < layer_dims_[k]) {
            rep.violations.push_back({"generation",
                                      "[g1, g" + std::to_string(k) + "] spans only rank " +
                                          std::to_string(rank) + " of layer " + std::to_string(k + 1)});
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Spec-file parser

namespace {

struct Line {
    int number;  // 1-based physical line
    std::string text;
};

[[noreturn]] void parse_fail(int line, const std::string& msg) {
    throw std::runtime_error("algebra spec line " + std::to_string(line) + ": " + msg);
}

std::vector<Line> split_statements(const std::string& text) {
    std::vector<Line> out;
    int lineno = 1;
    std::string cur;
    auto flush = [&](int no) {
        const auto b = cur.find_first_not_of(" \t\r");
        if (b != std::string::npos) {
            const auto e = cur.find_last_not_of(" \t\r");
            out.push_back({no, cur.substr(b, e - b + 1)});
        }
        cur.clear();
    };
    for (char ch : text) {
        if (ch == '\n') {
            flush(lineno);
            ++lineno;
        } else if (ch == ';') {
            flush(lineno);
        } else if (ch == '#') {
            flush(lineno);
            cur = "\x01";  // swallow rest of physical line
        } else if (!cur.starts_with('\x01')) {
            cur.push_back(ch);
        }
    }
    flush(lineno);
    std::erase_if(out, [](const Line& l) { return l.text.starts_with('\x01'); });
    return out;
}

Rational parse_coefficient(const std::string& tok, int line) {
    const auto slash = tok.find('/');
    try {
        if (slash != std::string::npos) {
            const long long p = std::stoll(tok.substr(0, slash));
            const long long q = std::stoll(tok.substr(slash + 1));
            if (q == 0) parse_fail(line, "zero denominator in '" + tok + "'");
            return {p, q};
        }
        const auto dot = tok.find('.');
        if (dot == std::string::npos) return {std::stoll(tok), 1};
        // Finite decimal -> exact rational.
        std::string digits = tok.substr(0, dot) + tok.substr(dot + 1);
        const int frac = static_cast<int>(tok.size() - dot - 1);
        long long den = 1;
        for (int k = 0; k < frac; ++k) den *= 10;
        return {std::stoll(digits), den};
    } catch (const std::invalid_argument&) {
        parse_fail(line, "bad coefficient '" + tok + "'");
    } catch (const std::out_of_range&) {
        parse_fail(line, "coefficient out of range '" + tok + "'");
    }
}

}  // namespace

AlgebraSpec parse_algebra_spec(const std::string& text) {
    const auto lines = split_statements(text);
    if (lines.empty()) throw std::runtime_error("algebra spec: empty input");

    // layers line
    const Line& head = lines.front();
    std::istringstream hs(head.text);
    std::string kw;
    hs >> kw;
    if (kw != "layers") parse_fail(head.number, "expected 'layers d1 d2 ...'");
    std::vector<int> dims;
    int d;
    while (hs >> d) dims.push_back(d);
    if (!hs.eof()) parse_fail(head.number, "bad layer dimension");
    if (dims.empty()) parse_fail(head.number, "no layer dimensions given");
    for (int x : dims)
        if (x <= 0) parse_fail(head.number, "layer dimensions must be positive");

    AlgebraSpec spec("file", dims);
    const int n = spec.dim();
    std::map<std::pair<int, int>, int> declared;

    for (size_t li = 1; li < lines.size(); ++li) {
        const Line& line = lines[li];
        const std::string& t = line.text;
        // [i,j] = expr
        size_t pos = 0;
        auto skip_ws = [&] { while (pos < t.size() && std::isspace(static_cast<unsigned char>(t[pos]))) ++pos; };
        auto expect = [&](char c) {
            skip_ws();
            if (pos >= t.size() || t[pos] != c) parse_fail(line.number, std::string("expected '") + c + "'");
            ++pos;
        };
        auto read_int = [&]() -> int {
            skip_ws();
            size_t start = pos;
            if (pos < t.size() && (t[pos] == '-' || t[pos] == '+')) ++pos;
            while (pos < t.size() && std::isdigit(static_cast<unsigned char>(t[pos]))) ++pos;
            if (pos == start) parse_fail(line.number, "expected integer");
            return std::stoi(t.substr(start, pos - start));
        };

        expect('[');
        const int i = read_int();
        expect(',');
        const int j = read_int();
        expect(']');
        expect('=');

        if (i <= 0 || i > n) parse_fail(line.number, "undeclared basis index " + std::to_string(i));
        if (j <= 0 || j > n) parse_fail(line.number, "undeclared basis index " + std::to_string(j));
        if (i >= j) parse_fail(line.number, "bracket pair needs i < j");
        if (declared.count({i, j})) parse_fail(line.number, "duplicate bracket declaration [" +
                                                                std::to_string(i) + "," + std::to_string(j) + "]");
        declared[{i, j}] = line.number;

        // signed term list: [coef '*'] index
        SparseVec v;
        bool first_term = true;
        while (true) {
            skip_ws();
            if (pos >= t.size()) {
                if (first_term) parse_fail(line.number, "empty bracket expression");
                break;
            }
            Rational sign(1);
            if (t[pos] == '+' || t[pos] == '-') {
                if (t[pos] == '-') sign = Rational(-1);
                ++pos;
            } else if (!first_term) {
                parse_fail(line.number, "expected '+' or '-' between terms");
            }
            skip_ws();
            size_t start = pos;
            while (pos < t.size() && (std::isdigit(static_cast<unsigned char>(t[pos])) ||
                                      t[pos] == '.' || t[pos] == '/')) ++pos;
            if (pos == start) parse_fail(line.number, "expected term");
            std::string tok = t.substr(start, pos - start);
            Rational coef(1);
            int target;
            skip_ws();
            if (pos < t.size() && t[pos] == '*') {
                ++pos;
                coef = parse_coefficient(tok, line.number);
                target = read_int();
            } else {
                if (tok.find('.') != std::string::npos || tok.find('/') != std::string::npos)
                    parse_fail(line.number, "expected basis index, got '" + tok + "'");
                target = std::stoi(tok);
            }
            if (target <= 0 || target > n)
                parse_fail(line.number, "undeclared basis index " + std::to_string(target));
            const int want = spec.layer_of(i - 1) + spec.layer_of(j - 1);
            if (want > spec.step() || spec.layer_of(target - 1) != want)
                parse_fail(line.number, "bracket target e" + std::to_string(target) +
                                            " in wrong layer (grading needs layer " +
                                            std::to_string(want) + ")");
            v.emplace_back(target - 1, sign * coef);
            first_term = false;
        }
        spec.set_bracket(i - 1, j - 1, v);
    }
    return spec;
}

// ---------------------------------------------------------------------------
// Builtins

AlgebraSpec heisenberg_algebra(int n) {
    if (n < 1) throw std::invalid_argument("heisenberg: n >= 1 required");
    AlgebraSpec a("h" + std::to_string(n), {2 * n, 1});
    for (int i = 0; i < n; ++i) a.set_bracket(i, n + i, {{2 * n, Rational(1)}});
    return a;
}

AlgebraSpec filiform_algebra(int n) {
    if (n < 3) throw std::invalid_argument("filiform: step >= 3 required");
    std::vector<int> dims(n, 1);
    dims[0] = 2;
    AlgebraSpec a("f" + std::to_string(n), dims);
    // [X1, Xk] = X_{k+1}, 0-based: [0, k] = k+1 for k = 1..n-1... dim = n+1
    for (int k = 1; k <= n - 1; ++k) a.set_bracket(0, k, {{k + 1, Rational(1)}});
    return a;
}

AlgebraSpec product_algebra(const std::vector<AlgebraSpec>& parts) {
    if (parts.empty()) throw std::invalid_argument("product: needs at least one factor");
    int s = 0;
    for (const auto& p : parts) s = std::max(s, p.step());
    std::vector<int> dims(s, 0);
    for (const auto& p : parts)
        for (int k = 1; k <= p.step(); ++k) dims[k - 1] += p.layer_dim(k);

    std::string name = "prod(";
    for (size_t i = 0; i < parts.size(); ++i) name += (i ? "," : "") + parts[i].name();
    name += ")";
    AlgebraSpec a(name, dims);

    // Global index maps: per layer, factor blocks in declaration order.
    std::vector<FactorInfo> infos;
    std::vector<int> used(s, 0);
    for (const auto& p : parts) {
        FactorInfo fi;
        fi.name = p.name();
        fi.layer_dims = p.layer_dims();
        fi.global_indices.resize(p.dim());
        for (int b = 0; b < p.dim(); ++b) {
            const int layer = p.layer_of(b);
            const int local = b - p.layer_offset(layer);
            fi.global_indices[b] = a.layer_offset(layer) + used[layer - 1] + local;
        }
        for (int k = 1; k <= p.step(); ++k) used[k - 1] += p.layer_dim(k);
        infos.push_back(std::move(fi));
    }

    for (size_t f = 0; f < parts.size(); ++f) {
        const auto& map = infos[f].global_indices;
        for (const auto& [pair, v] : parts[f].table()) {
            const auto [i, j] = pair;
            if (i > j) continue;
            SparseVec w;
            for (const auto& [idx, c] : v) w.emplace_back(map[idx], c);
            a.set_bracket(map[i], map[j], w);
        }
    }
    a.set_factors(std::move(infos));
    return a;
}

AlgebraSpec builtin_algebra(const std::string& name, int param) {
    if (name == "heisenberg") return heisenberg_algebra(param);
    if (name == "filiform") return filiform_algebra(param);
    throw std::invalid_argument("unknown builtin algebra '" + name + "'");
}

}  // namespace carnot
