#include "tslp/coder.hpp"

#include <algorithm>
#include <cmath>

namespace tslp {

namespace {

// Fenwick tree over dense symbol ids, tracking remaining symbol counts
class Fenwick {
public:
    explicit Fenwick(const std::vector<std::int64_t>& counts)
        : tree_(counts.size() + 1, 0), size_(counts.size()) {
        for (std::size_t i = 0; i < counts.size(); ++i) add(i, counts[i]);
    }

    void add(std::size_t i, std::int64_t delta) {
        for (std::size_t p = i + 1; p <= size_; p += p & (~p + 1)) tree_[p] += delta;
    }

    std::int64_t prefix(std::size_t count) const {  // sum of ids < count
        std::int64_t s = 0;
        for (std::size_t p = count; p > 0; p -= p & (~p + 1)) s += tree_[p];
        return s;
    }

    /// Largest id s such that R * (count of ids < s) <= bound; the
    /// cumulative count for that s is returned through `cum`.
    std::size_t find(const BigInt& r, const BigInt& bound, std::int64_t& cum) const {
        std::size_t pos = 0;
        std::int64_t acc = 0;
        std::size_t step = 1;
        while (step * 2 <= size_) step *= 2;
        for (; step > 0; step /= 2) {
            if (pos + step <= size_ && r * (acc + tree_[pos + step]) <= bound) {
                pos += step;
                acc += tree_[pos];
            }
        }
        cum = acc;
        return pos;  // ids < pos have cumulative count acc <= bound/R
    }

private:
    std::vector<std::int64_t> tree_;
    std::size_t size_;
};

BigInt multinomial(const std::vector<std::int64_t>& counts) {
    BigInt r = 1;
    std::int64_t seen = 0;
    for (std::int64_t c : counts)
        for (std::int64_t j = 1; j <= c; ++j) {
            r *= ++seen;
            r /= j;
        }
    return r;
}

std::size_t ceil_log2(const BigInt& s) {
    if (s <= 1) return 0;
    return boost::multiprecision::msb(s - 1) + 1;
}

struct BitReader {
    const BitString& bits;
    std::size_t pos = 0;

    bool read() {
        if (pos >= bits.size())
            throw DecodeError(DecodeError::Kind::Truncated, "bit stream ended inside code word");
        return bits.bit(pos++);
    }
};

}  // namespace

OccurrenceProfile OccurrenceProfile::from_grammar(const NormalFormTslp& g) {
    OccurrenceProfile p;
    p.n = g.nonterminal_count();
    std::vector<Symbol> rho = rho_word(g);
    p.m = rho.size();
    p.k.assign(p.n == 0 ? 0 : p.n - 1, 0);
    std::uint64_t total_k = 0;
    for (Symbol s : rho) {
        if (s == kSymbolA) continue;
        ++p.k[static_cast<std::size_t>(s) - 1];
        ++total_k;
    }
    p.eta_a = p.m - total_k;
    p.eta.resize(p.k.size());
    for (std::size_t i = 0; i < p.k.size(); ++i) p.eta[i] = p.k[i] - 1;
    return p;
}

BigInt OccurrenceProfile::class_size() const {
    std::vector<std::int64_t> counts{static_cast<std::int64_t>(eta_a)};
    for (std::uint64_t e : eta) counts.push_back(static_cast<std::int64_t>(e));
    return multinomial(counts);
}

std::map<Symbol, std::uint64_t> OccurrenceProfile::omega_counts() const {
    std::map<Symbol, std::uint64_t> c;
    if (eta_a > 0) c[kSymbolA] = eta_a;
    for (std::size_t i = 0; i < eta.size(); ++i)
        if (eta[i] > 0) c[static_cast<Symbol>(i + 1)] = eta[i];
    return c;
}

BigInt rank_multiset_word(const std::vector<Symbol>& w) {
    // dense ids in symbol order
    std::vector<Symbol> alphabet(w);
    std::sort(alphabet.begin(), alphabet.end());
    alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());
    auto id_of = [&](Symbol s) {
        return static_cast<std::size_t>(
            std::lower_bound(alphabet.begin(), alphabet.end(), s) - alphabet.begin());
    };
    std::vector<std::int64_t> counts(alphabet.size(), 0);
    for (Symbol s : w) ++counts[id_of(s)];

    BigInt remaining = multinomial(counts);  // permutations of the suffix multiset
    Fenwick fen(counts);
    BigInt rank = 0;
    std::int64_t n = static_cast<std::int64_t>(w.size());
    for (Symbol s : w) {
        std::size_t id = id_of(s);
        std::int64_t smaller = fen.prefix(id);
        if (smaller > 0) rank += remaining * smaller / n;
        remaining = remaining * counts[id] / n;
        fen.add(id, -1);
        --counts[id];
        --n;
    }
    return rank;
}

std::vector<Symbol> unrank_multiset_word(const std::map<Symbol, std::uint64_t>& count_map,
                                         const BigInt& index) {
    std::vector<Symbol> alphabet;
    std::vector<std::int64_t> counts;
    std::int64_t n = 0;
    for (const auto& [sym, c] : count_map) {
        if (c == 0) continue;
        alphabet.push_back(sym);
        counts.push_back(static_cast<std::int64_t>(c));
        n += static_cast<std::int64_t>(c);
    }
    BigInt remaining = multinomial(counts);
    if (index < 0 || index >= remaining)
        throw std::out_of_range("unrank_multiset_word: index out of range");
    Fenwick fen(counts);
    BigInt idx = index;
    std::vector<Symbol> out;
    out.reserve(static_cast<std::size_t>(n));
    while (n > 0) {
        // choose the symbol whose block of the enumeration contains idx
        std::int64_t cum = 0;
        std::size_t id = fen.find(remaining, idx * n, cum);
        // ids < id account for remaining*cum/n words before idx's block;
        // id itself must have symbols left (guaranteed: blocks of empty
        // symbols contribute zero width and find() returns the largest)
        idx -= remaining * cum / n;  // idx now indexes within the chosen block
        remaining = remaining * counts[id] / n;
        out.push_back(alphabet[id]);
        fen.add(id, -1);
        --counts[id];
        --n;
    }
    return out;
}

BitString encode(const NormalFormTslp& g) {
    if (g.is_leaf_grammar()) return BitString::from_string("1");
    auto rep = validate_normal_form(g);
    if (!rep.ok())
        throw std::invalid_argument("encode: grammar is not in normal form (" +
                                    rep.violations.front().code + ")");

    const std::size_t n = g.nonterminal_count();
    std::vector<Symbol> rho = rho_word(g);
    std::vector<Symbol> omega = omega_word(g);
    const std::uint64_t m = rho.size();

    BitString out;
    // w0 = 0^{n-1} 1
    out.append_zeros(n - 1);
    out.push_back(true);
    // w1 = big-endian 2-bit type codes
    for (std::size_t i = 0; i < n; ++i) {
        auto t = static_cast<unsigned>(g.rule(i).type);
        out.push_back((t >> 1) & 1);
        out.push_back(t & 1);
    }
    // w2 = 1 0^{|u_1|} ... 1 0^{|u_{n-1}|}, where u_i separates the first
    // occurrences of A_i and A_{i+1} in rho
    std::vector<std::size_t> first_pos(n, 0);
    {
        std::vector<bool> seen(n, false);
        for (std::size_t p = 0; p < rho.size(); ++p) {
            Symbol s = rho[p];
            if (s != kSymbolA && !seen[static_cast<std::size_t>(s)]) {
                seen[static_cast<std::size_t>(s)] = true;
                first_pos[static_cast<std::size_t>(s)] = p;
            }
        }
    }
    for (std::size_t i = 1; i < n; ++i) {
        std::size_t next = i + 1 < n ? first_pos[i + 1] : rho.size();
        out.push_back(true);
        out.append_zeros(next - first_pos[i] - 1);
    }
    // w3 = 0^{k_1-1} 1 ... 0^{k_{n-1}-1} 1
    OccurrenceProfile prof = OccurrenceProfile::from_grammar(g);
    for (std::uint64_t ki : prof.k) {
        out.append_zeros(ki - 1);
        out.push_back(true);
    }
    // w4 = enumerative index of omega, big-endian in ceil(log2 |S|) bits
    BigInt class_size = prof.class_size();
    BigInt index = rank_multiset_word(omega);
    std::size_t w4_len = ceil_log2(class_size);
    out.append_uint(index, w4_len);

    // length decomposition and entropy bounds hold for every code word
    std::uint64_t sum_k = 0;
    for (std::uint64_t ki : prof.k) sum_k += ki;
    if (out.size() != n + 2 * n + m + sum_k + w4_len)
        throw std::logic_error("encode: length decomposition violated");
    const double h = entropy(g);
    if (class_size > 1 && log2_bigint(class_size) > h + 1e-6)
        throw std::logic_error("encode: enumerative class exceeds entropy bound");
    if (static_cast<double>(out.size()) > h + 5.0 * static_cast<double>(m) + 3.0 + 1e-6)
        throw std::logic_error("encode: code length exceeds entropy + 5|G| + 3");
    return out;
}

std::pair<NormalFormTslp, std::size_t> decode(const BitString& bits) {
    BitReader in{bits};
    // w0
    std::size_t n = 1;
    while (!in.read()) ++n;
    if (n == 1) return {NormalFormTslp::leaf_grammar(), in.pos};
    // w1
    std::vector<RuleType> types(n);
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < n; ++i) {
        unsigned hi = in.read() ? 1 : 0;
        unsigned lo = in.read() ? 1 : 0;
        types[i] = static_cast<RuleType>(hi * 2 + lo);
        m += (types[i] == RuleType::Apply || types[i] == RuleType::Compose) ? 2 : 1;
    }
    // w2: exactly m bits, n-1 blocks of 1 0^{l_i}
    std::vector<std::uint64_t> u_len;
    {
        if (!in.read())
            throw DecodeError(DecodeError::Kind::Inconsistent, "w2 does not start with 1");
        std::uint64_t consumed = 1;
        std::uint64_t zeros = 0;
        while (consumed < m) {
            if (in.read()) {
                u_len.push_back(zeros);
                zeros = 0;
            } else {
                ++zeros;
            }
            ++consumed;
        }
        u_len.push_back(zeros);
        if (u_len.size() != n - 1)
            throw DecodeError(DecodeError::Kind::Inconsistent,
                              "w2 block count does not match n");
    }
    // w3
    std::vector<std::uint64_t> k(n - 1);
    std::uint64_t sum_k = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        std::uint64_t ki = 1;
        while (!in.read()) ++ki;
        k[i] = ki;
        sum_k += ki;
    }
    if (sum_k > m)
        throw DecodeError(DecodeError::Kind::Inconsistent, "occurrence counts exceed |G|");
    // w4
    OccurrenceProfile prof;
    prof.n = n;
    prof.m = m;
    prof.k = k;
    prof.eta_a = m - sum_k;
    prof.eta.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) prof.eta[i] = k[i] - 1;
    BigInt class_size = prof.class_size();
    std::size_t w4_len = ceil_log2(class_size);
    BigInt index = 0;
    for (std::size_t i = 0; i < w4_len; ++i) {
        index <<= 1;
        if (in.read()) index |= 1;
    }
    if (index >= class_size)
        throw DecodeError(DecodeError::Kind::IndexRange,
                          "enumerative index exceeds the class size");
    std::vector<Symbol> omega = unrank_multiset_word(prof.omega_counts(), index);
    // interleave first occurrences back into rho
    std::vector<Symbol> rho;
    rho.reserve(m);
    std::size_t next_omega = 0;
    for (std::size_t i = 1; i < n; ++i) {
        rho.push_back(static_cast<Symbol>(i));
        for (std::uint64_t j = 0; j < u_len[i - 1]; ++j) rho.push_back(omega[next_omega++]);
    }
    if (next_omega != omega.size() || rho.size() != m)
        throw DecodeError(DecodeError::Kind::Inconsistent, "rho reconstruction mismatch");
    // slice rho into rules by type arity
    std::vector<NormalRule> rules(n);
    std::size_t p = 0;
    for (std::size_t i = 0; i < n; ++i) {
        rules[i].type = types[i];
        rules[i].first = rho[p++];
        if (types[i] == RuleType::Apply || types[i] == RuleType::Compose)
            rules[i].second = rho[p++];
        else
            rules[i].second = kSymbolA;
    }
    NormalFormTslp g(std::move(rules));
    if (!validate_normal_form(g).ok())
        throw DecodeError(DecodeError::Kind::Inconsistent,
                          "decoded words do not form a normal-form grammar");
    return {g, in.pos};
}

std::vector<std::uint8_t> write_container(const NormalFormTslp& g) {
    std::vector<std::uint8_t> out{0x54, 0x53, 0x4C, 0x50, 0x01};
    const std::vector<std::uint8_t> payload = encode(g).to_bytes_msb();
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

NormalFormTslp read_container(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 5)
        throw DecodeError(DecodeError::Kind::Truncated, "container shorter than its header");
    if (bytes[0] != 0x54 || bytes[1] != 0x53 || bytes[2] != 0x4C || bytes[3] != 0x50)
        throw DecodeError(DecodeError::Kind::BadMagic, "bad magic");
    if (bytes[4] != 0x01)
        throw DecodeError(DecodeError::Kind::BadVersion,
                          "unsupported version " + std::to_string(bytes[4]));
    std::vector<std::uint8_t> payload(bytes.begin() + 5, bytes.end());
    BitString bits = BitString::from_bytes_msb(payload, payload.size() * 8);
    auto [g, consumed] = decode(bits);
    if ((consumed + 7) / 8 != payload.size())
        throw DecodeError(DecodeError::Kind::TrailingData,
                          "container holds bytes beyond the code word");
    for (std::size_t i = consumed; i < bits.size(); ++i)
        if (bits.bit(i))
            throw DecodeError(DecodeError::Kind::BadPadding, "nonzero padding bits");
    return g;
}

}  // namespace tslp
