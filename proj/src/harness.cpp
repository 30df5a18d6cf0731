#include "tslp/harness.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "tslp/coder.hpp"
#include "tslp/grammar.hpp"

namespace tslp {

namespace {

using u64 = std::uint64_t;

CompressorId compressor_of(EncoderId enc) {
    return enc == EncoderId::Tslp ? CompressorId::Bisection : CompressorId::DagRoute;
}

// (|E(t)| + log2 P(t)) / |t|; -inf when P(t) = 0
double pointwise_redundancy(EncoderId enc, const TreeSource& src, const Term& t) {
    double lp = prob_tree_log2(src, t);
    if (std::isinf(lp)) return -std::numeric_limits<double>::infinity();
    double len = static_cast<double>(encode_tree(enc, t).size());
    return (len + lp) / static_cast<double>(t.size());
}

u64 min_class_size(const TreeSource& src, u64 class_index) {
    // leaf-centric class i is the trees with i+1 leaves; a depth-i tree
    // has at least i+1 leaves
    (void)src;
    return class_index + 1;
}

u64 per_sample_seed(u64 seed, u64 rep) {
    return seed ^ (0x9E3779B97F4A7C15ULL * (rep + 1));
}

}  // namespace

BitString encode_tree(EncoderId enc, const Term& t) {
    return encode(compress(t, compressor_of(enc)));
}

Term decode_tree(const BitString& bits) { return eval(decode(bits).first); }

RedundancyReport redundancy_exact(EncoderId enc, const TreeSource& src,
                                  u64 class_index, u64 budget) {
    RedundancyReport rep;
    rep.class_index = class_index;
    rep.min_size = min_class_size(src, class_index);
    rep.exact = true;
    rep.value = -std::numeric_limits<double>::infinity();

    auto consider = [&](const Term& t) {
        ++rep.count;
        double lp = prob_tree_log2(src, t);
        if (std::isinf(lp)) return;
        double r = (static_cast<double>(encode_tree(enc, t).size()) + lp) /
                   static_cast<double>(t.size());
        rep.average += std::exp2(lp) * r;
        if (r > rep.value) {
            rep.value = r;
            rep.witness = serialize_term(t);
        }
    };

    if (src.kind == TreeSource::Kind::LeafCentric) {
        u64 n = class_index + 1;
        BigInt total = catalan(n - 1);
        if (total > budget)
            throw std::length_error("redundancy: class exceeds the tree budget");
        for (BigInt i = 0; i < total; ++i) consider(nth_tree(static_cast<std::uint32_t>(n), i));
    } else {
        if (count_trees_by_depth(static_cast<std::uint32_t>(class_index)) > budget)
            throw std::length_error("redundancy: class exceeds the tree budget");
        for (const Term& t : enumerate_trees_by_depth(static_cast<std::uint32_t>(class_index)))
            consider(t);
    }
    if (std::isinf(rep.value))
        throw std::runtime_error("redundancy: the class has empty support");
    return rep;
}

RedundancyReport redundancy_sampled(EncoderId enc, const TreeSource& src,
                                    u64 class_index, u64 samples, u64 seed) {
    RedundancyReport rep;
    rep.class_index = class_index;
    rep.min_size = min_class_size(src, class_index);
    rep.exact = false;
    rep.value = -std::numeric_limits<double>::infinity();
    for (u64 i = 0; i < samples; ++i) {
        Term t = sample(src, class_index, per_sample_seed(seed, i));
        ++rep.count;
        double r = pointwise_redundancy(enc, src, t);
        if (r > rep.value) {
            rep.value = r;
            rep.witness = serialize_term(t);
        }
    }
    if (std::isinf(rep.value))
        throw std::runtime_error("redundancy: no positive-probability sample");
    return rep;
}

CheckReport verify_domination(const TreeSource& src, std::uint32_t n_max) {
    CheckReport rep;
    auto finding = [&](const std::string& cond, const std::string& what) {
        rep.findings.push_back(cond + ": " + what);
    };

    // (i) the weight dominates the probability
    for (std::uint32_t n = 1; n <= n_max; ++n) {
        for (const Term& t : enumerate_trees(n))
            if (lambda_value(src, t) < prob_tree(src, t))
                finding("weight-below-probability", serialize_term(t));
        for (const Term& c : enumerate_contexts(n))
            if (lambda_value(src, c) < prob_context(src, c))
                finding("weight-below-probability", serialize_term(c));
    }

    // (ii)/(iii) submultiplicativity under pairing and substitution
    std::uint32_t cap = std::min<std::uint32_t>(n_max, 8);
    std::vector<Term> trees, contexts{Term::hole()};
    for (std::uint32_t n = 1; n + 1 <= cap; ++n) {
        for (const Term& t : enumerate_trees(n)) trees.push_back(t);
        for (const Term& c : enumerate_contexts(n)) contexts.push_back(c);
    }
    auto pair_name = [](const Term& s, const Term& t) {
        return serialize_term(s) + " , " + serialize_term(t);
    };
    for (const Term& s : trees)
        for (const Term& t : trees) {
            if (s.size() + t.size() > cap) continue;
            if (lambda_value(src, Term::internal(s, t)) >
                lambda_value(src, s) * lambda_value(src, t))
                finding("pairing-not-submultiplicative", pair_name(s, t));
        }
    for (const Term& s : contexts) {
        for (const Term& t : trees) {
            if (s.size() + t.size() > cap) continue;
            if (lambda_value(src, substitute(s, t)) >
                lambda_value(src, s) * lambda_value(src, t))
                finding("substitution-not-submultiplicative", pair_name(s, t));
        }
        for (const Term& t : contexts) {
            if (s.size() + t.size() > cap) continue;
            if (lambda_value(src, substitute(s, t)) >
                lambda_value(src, s) * lambda_value(src, t))
                finding("substitution-not-submultiplicative", pair_name(s, t));
        }
    }

    // (iv) the per-size weight sums against their envelopes
    for (std::uint32_t n = 1; n <= n_max; ++n) {
        BigRational sum(0);
        for (const Term& t : enumerate_trees(n)) sum += lambda_value(src, t);
        for (const Term& c : enumerate_contexts(n)) sum += lambda_value(src, c);
        BigRational envelope =
            src.kind == TreeSource::Kind::LeafCentric
                ? BigRational(8 * static_cast<u64>(n) - 2)
                : BigRational(4 * static_cast<u64>(n) * n + 3 * static_cast<u64>(n) - 1);
        if (sum > envelope) {
            std::ostringstream os;
            os << "weight-sum-over-envelope: n=" << n << " sum=" << sum;
            rep.findings.push_back(os.str());
        }
    }
    return rep;
}

CheckReport verify_entropy_bound(const TreeSource& src, EncoderId enc,
                                 const std::vector<u64>& class_indices,
                                 u64 samples, u64 seed) {
    CheckReport rep;
    const double c1 = 8.0;
    const double c2 = src.kind == TreeSource::Kind::LeafCentric ? 1.0 : 2.0;
    const double eps = 1e-6;
    for (u64 i : class_indices) {
        for (u64 r = 0; r < samples; ++r) {
            Term t = sample(src, i, per_sample_seed(seed, r));
            NormalFormTslp g = compress(t, compressor_of(enc));
            double n = static_cast<double>(t.size());
            double m = static_cast<double>(g.size());
            std::ostringstream tag;
            tag << "class=" << i << " rep=" << r << " n=" << n << " m=" << m;
            if (m > n) {
                rep.skipped.push_back(tag.str());
                continue;
            }
            double h = entropy(g);
            double lp = prob_tree_log2(src, t);
            double bound = -lp + (1.0 + std::log2(c1)) * m +
                           (2.0 + c2) * m * std::log2(n / m);
            if (h > bound + eps)
                rep.findings.push_back("entropy-over-bound: " + tag.str());
            double bits = static_cast<double>(encode(g).size());
            if (bits > h + 5.0 * m + 3.0 + eps)
                rep.findings.push_back("codeword-over-entropy-bound: " + tag.str());
        }
    }
    return rep;
}

}  // namespace tslp
