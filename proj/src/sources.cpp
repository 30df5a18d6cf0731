#include "tslp/sources.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "tslp/random.hpp"

namespace tslp {

namespace {

using u64 = std::uint64_t;

// per-arena-slot attribute: a-leaf count (leaf-centric) or depth with the
// hole treated as the tree a (depth-centric)
std::vector<u64> node_attrs(TreeSource::Kind kind, const Term& t) {
    std::vector<u64> attr(t.node_count(), 0);
    for (std::size_t i = 0; i < t.node_count(); ++i) {
        const Term::Node& n = t.node(static_cast<std::int32_t>(i));
        switch (n.kind) {
            case Term::NodeKind::Leaf:
                attr[i] = kind == TreeSource::Kind::LeafCentric ? 1 : 0;
                break;
            case Term::NodeKind::Hole:
                attr[i] = 0;
                break;
            case Term::NodeKind::Internal: {
                u64 l = attr[static_cast<std::size_t>(n.left)];
                u64 r = attr[static_cast<std::size_t>(n.right)];
                attr[i] = kind == TreeSource::Kind::LeafCentric ? l + r
                                                                : 1 + std::max(l, r);
                break;
            }
        }
    }
    return attr;
}

// split factor at one internal node; a size-0 argument marks the hole side
// of a context, which contributes no leaf-centric factor
BigRational split_factor(const TreeSource& src, u64 l, u64 r) {
    if (src.kind == TreeSource::Kind::LeafCentric && (l == 0 || r == 0))
        return BigRational(1);
    return src.sigma(l, r);
}

template <typename Acc>
void fold_factors(const TreeSource& src, const Term& t, Acc&& acc) {
    std::vector<u64> attr = node_attrs(src.kind, t);
    std::vector<std::int32_t> stack{t.root()};
    while (!stack.empty()) {
        std::int32_t v = stack.back();
        stack.pop_back();
        const Term::Node& n = t.node(v);
        if (n.kind != Term::NodeKind::Internal) continue;
        acc(split_factor(src, attr[static_cast<std::size_t>(n.left)],
                         attr[static_cast<std::size_t>(n.right)]));
        stack.push_back(n.left);
        stack.push_back(n.right);
    }
}

BigRational prob_term(const TreeSource& src, const Term& t) {
    BigRational p(1);
    fold_factors(src, t, [&](const BigRational& f) { p *= f; });
    return p;
}

double prob_term_log2(const TreeSource& src, const Term& t) {
    double s = 0.0;
    bool zero = false;
    fold_factors(src, t, [&](const BigRational& f) {
        if (f == 0)
            zero = true;
        else
            s += std::log2(f.convert_to<double>());
    });
    return zero ? -std::numeric_limits<double>::infinity() : s;
}

// admissible split pairs at one node: sizes summing to n, or depths with
// max equal to d-1
std::vector<std::pair<u64, u64>> split_pairs(TreeSource::Kind kind, u64 param) {
    std::vector<std::pair<u64, u64>> out;
    if (kind == TreeSource::Kind::LeafCentric) {
        for (u64 i = 1; i < param; ++i) out.push_back({i, param - i});
    } else {
        u64 m = param - 1;
        for (u64 i = 0; i <= m; ++i) out.push_back({i, m});
        for (u64 j = 0; j < m; ++j) out.push_back({m, j});
    }
    return out;
}

std::pair<u64, u64> draw_split(const TreeSource& src, u64 param, std::mt19937_64& rng) {
    double u = uniform_unit(rng);
    if (src.pick_split) return src.pick_split(param, u);
    std::pair<u64, u64> last{0, 0};
    bool any = false;
    double cum = 0.0;
    for (auto [i, j] : split_pairs(src.kind, param)) {
        BigRational w = src.sigma(i, j);
        if (w == 0) continue;
        any = true;
        last = {i, j};
        cum += w.convert_to<double>();
        if (u < cum) return {i, j};
    }
    if (!any) throw std::runtime_error("tree source: empty split support");
    return last;  // rounding slack at the top of the CDF
}

Term sample_class(const TreeSource& src, u64 param, std::mt19937_64& rng) {
    const bool leaf_kind = src.kind == TreeSource::Kind::LeafCentric;
    struct Frame {
        u64 param;
        int stage;
        u64 left, right;
    };
    std::vector<Frame> stack{{param, 0, 0, 0}};
    std::vector<Term> results;
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.stage == 0) {
            if (f.param == (leaf_kind ? 1u : 0u)) {
                results.push_back(Term::leaf());
                stack.pop_back();
                continue;
            }
            auto [i, j] = draw_split(src, f.param, rng);
            f.left = i;
            f.right = j;
            f.stage = 1;
            stack.push_back({i, 0, 0, 0});
        } else if (f.stage == 1) {
            f.stage = 2;
            stack.push_back({f.right, 0, 0, 0});
        } else {
            Term r = std::move(results.back());
            results.pop_back();
            Term l = std::move(results.back());
            results.pop_back();
            results.push_back(Term::internal(l, r));
            stack.pop_back();
        }
    }
    return results.back();
}

u64 balanced_low(u64 n, double c) {
    u64 lo = static_cast<u64>(std::ceil(static_cast<double>(n) / c - 1e-12));
    if (lo < 1) lo = 1;
    while (c * static_cast<double>(lo) < static_cast<double>(n) - 1e-9) ++lo;
    return lo;
}

u64 clamped_index(double u, u64 count) {
    u64 idx = static_cast<u64>(u * static_cast<double>(count));
    return idx >= count ? count - 1 : idx;
}

}  // namespace

TreeSource bst_source() {
    TreeSource s;
    s.kind = TreeSource::Kind::LeafCentric;
    s.name = "bst";
    s.sigma = [](u64 i, u64 j) { return BigRational(1, i + j - 1); };
    s.pick_split = [](u64 n, double u) {
        u64 k = 1 + clamped_index(u, n - 1);
        return std::pair<u64, u64>{k, n - k};
    };
    return s;
}

TreeSource depth_uniform_source() {
    TreeSource s;
    s.kind = TreeSource::Kind::DepthCentric;
    s.name = "depth-uniform";
    s.sigma = [](u64 i, u64 j) { return BigRational(1, 2 * std::max(i, j) + 1); };
    s.pick_split = [](u64 d, double u) {
        u64 m = d - 1;
        u64 idx = clamped_index(u, 2 * d - 1);
        return idx <= m ? std::pair<u64, u64>{idx, m}
                        : std::pair<u64, u64>{m, idx - d};
    };
    return s;
}

TreeSource leaf_balanced_source(double c) {
    if (c < 2.0) throw std::invalid_argument("leaf-balanced: c must be >= 2");
    TreeSource s;
    s.kind = TreeSource::Kind::LeafCentric;
    s.name = "leaf-balanced";
    s.sigma = [c](u64 i, u64 j) {
        u64 n = i + j;
        u64 lo = balanced_low(n, c);
        if (i < lo || j < lo) return BigRational(0);
        return BigRational(1, n + 1 - 2 * lo);
    };
    s.pick_split = [c](u64 n, double u) {
        u64 lo = balanced_low(n, c);
        u64 k = lo + clamped_index(u, n + 1 - 2 * lo);
        return std::pair<u64, u64>{k, n - k};
    };
    return s;
}

TreeSource depth_balanced_source(u64 c) {
    TreeSource s;
    s.kind = TreeSource::Kind::DepthCentric;
    s.name = "depth-balanced";
    s.sigma = [c](u64 i, u64 j) {
        u64 m = std::max(i, j);
        u64 d = std::min(i, j);
        if (m - d > c) return BigRational(0);
        return BigRational(1, 2 * std::min(c, m) + 1);
    };
    s.pick_split = [c](u64 d, double u) {
        u64 m = d - 1;
        u64 b = std::min(c, m);
        u64 idx = clamped_index(u, 2 * b + 1);
        return idx <= b ? std::pair<u64, u64>{m - b + idx, m}
                        : std::pair<u64, u64>{m, m - b + (idx - b - 1)};
    };
    return s;
}

TreeSource table_source(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("table source: cannot open " + path);
    std::string header_kind;
    u64 bound = 0;
    std::string line;
    auto table = std::make_shared<std::map<std::pair<u64, u64>, BigRational>>();
    bool have_header = false;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first) || first[0] == '#') continue;
        if (!have_header) {
            header_kind = first;
            if (!(ls >> bound) || (header_kind != "leaf" && header_kind != "depth"))
                throw std::runtime_error("table source: bad header, expected "
                                         "'leaf <bound>' or 'depth <bound>'");
            have_header = true;
            continue;
        }
        u64 i = std::stoull(first), j;
        std::string frac;
        if (!(ls >> j >> frac))
            throw std::runtime_error("table source: bad entry line: " + line);
        (*table)[{i, j}] = BigRational(frac);
    }
    if (!have_header) throw std::runtime_error("table source: missing header");
    TreeSource s;
    s.kind = header_kind == "leaf" ? TreeSource::Kind::LeafCentric
                                   : TreeSource::Kind::DepthCentric;
    s.name = "table:" + path;
    s.sigma = [table](u64 i, u64 j) {
        auto it = table->find({i, j});
        return it == table->end() ? BigRational(0) : it->second;
    };
    return s;
}

TreeSource parse_source(const std::string& spec) {
    if (spec == "bst") return bst_source();
    if (spec == "depth-uniform") return depth_uniform_source();
    auto arg = [&](const std::string& prefix) {
        return spec.substr(prefix.size());
    };
    if (spec.rfind("leaf-balanced:", 0) == 0)
        return leaf_balanced_source(std::stod(arg("leaf-balanced:")));
    if (spec.rfind("depth-balanced:", 0) == 0)
        return depth_balanced_source(std::stoull(arg("depth-balanced:")));
    if (spec.rfind("table:", 0) == 0) return table_source(arg("table:"));
    throw std::invalid_argument("unknown source: " + spec);
}

BigRational prob_tree(const TreeSource& src, const Term& t) {
    if (!t.is_tree()) throw std::invalid_argument("prob_tree: input must be a tree");
    return prob_term(src, t);
}

double prob_tree_log2(const TreeSource& src, const Term& t) {
    if (!t.is_tree()) throw std::invalid_argument("prob_tree: input must be a tree");
    return prob_term_log2(src, t);
}

BigRational prob_context(const TreeSource& src, const Term& c) {
    if (!c.is_context())
        throw std::invalid_argument("prob_context: input must be a context");
    return prob_term(src, c);
}

double prob_context_log2(const TreeSource& src, const Term& c) {
    if (!c.is_context())
        throw std::invalid_argument("prob_context: input must be a context");
    return prob_term_log2(src, c);
}

BigRational lambda_value(const TreeSource& src, const Term& u) {
    BigRational inv_count = BigRational(1) / BigRational(catalan(u.size()));
    BigRational p = prob_term(src, u);
    return std::max(inv_count, p);
}

Term sample(const TreeSource& src, u64 class_index, u64 seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(class_index),
                      static_cast<std::uint32_t>(class_index >> 32)};
    std::mt19937_64 rng(seq);
    u64 param = src.kind == TreeSource::Kind::LeafCentric ? class_index + 1
                                                          : class_index;
    return sample_class(src, param, rng);
}

bool check_monotone(const TreeSource& src, u64 bound) {
    u64 lo = src.kind == TreeSource::Kind::LeafCentric ? 1 : 0;
    for (u64 i = lo; i <= bound; ++i)
        for (u64 j = lo; j <= bound; ++j) {
            BigRational w = src.sigma(i, j);
            if (w < src.sigma(i, j + 1) || w < src.sigma(i + 1, j)) return false;
        }
    return true;
}

bool is_leaf_balanced(const TreeSource& src, double c, u64 bound) {
    for (u64 i = 1; i <= bound; ++i)
        for (u64 j = 1; j <= bound; ++j)
            if (src.sigma(i, j) != 0 &&
                static_cast<double>(i + j) >
                    c * static_cast<double>(std::min(i, j)) + 1e-9)
                return false;
    return true;
}

bool is_depth_balanced(const TreeSource& src, u64 c, u64 bound) {
    for (u64 i = 0; i <= bound; ++i)
        for (u64 j = 0; j <= bound; ++j)
            if (src.sigma(i, j) != 0 &&
                std::max(i, j) - std::min(i, j) > c)
                return false;
    return true;
}

}  // namespace tslp
