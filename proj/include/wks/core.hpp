#pragma once

#include <algorithm>
#include <compare>
#include <optional>
#include <vector>

#include "wks/exact.hpp"

// Problem primitives: points of a uniform metric, server weights,
// configurations and the two exact distance functions.

namespace wks {

using Point = int;  // points are 1..n

/// Default cap on dense table / enumeration sizes; overridable per call.
inline constexpr std::size_t kDefaultTableLimit = 2'000'000;

struct Universe {
    int n = 1;

    bool contains(Point p) const { return p >= 1 && p <= n; }
};

/// k servers with nondecreasing weights w_1 <= ... <= w_k. Optionally the
/// servers are grouped into d classes of k_i indistinguishable servers each.
struct WeightProfile {
    std::vector<Rat> weights;  // flat, size k, nondecreasing

    struct ClassStructure {
        std::vector<int> counts;         // k_1..k_d
        std::vector<Rat> class_weights;  // w_1 < ... < w_d
    };
    std::optional<ClassStructure> classes;

    int k() const { return static_cast<int>(weights.size()); }
    int d() const { return classes ? static_cast<int>(classes->counts.size()) : 0; }

    const Rat& weight(int i) const { return weights.at(i - 1); }  // 1-based

    /// W_i = w_1 + ... + w_i (flat). W_0 = 0.
    Rat prefix(int i) const {
        Rat s = 0;
        for (int j = 1; j <= i; ++j) s += weight(j);
        return s;
    }

    /// Class-mode prefix: sum_{j<=i} k_j w_j.
    Rat class_prefix(int i) const {
        if (!classes) throw dimension_error("class_prefix on flat profile");
        Rat s = 0;
        for (int j = 0; j < i; ++j) s += Rat(classes->counts[j]) * classes->class_weights[j];
        return s;
    }

    static WeightProfile flat(std::vector<Rat> w) {
        WeightProfile p;
        p.weights = std::move(w);
        p.validate();
        return p;
    }

    static WeightProfile classed(std::vector<int> counts, std::vector<Rat> class_weights) {
        if (counts.size() != class_weights.size() || counts.empty())
            throw dimension_error("class counts/weights size mismatch");
        WeightProfile p;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            if (counts[i] < 1) throw dimension_error("class count must be positive");
            if (i > 0 && !(class_weights[i - 1] < class_weights[i]))
                throw dimension_error("class weights must be strictly increasing");
            for (int j = 0; j < counts[i]; ++j) p.weights.push_back(class_weights[i]);
        }
        p.classes = ClassStructure{std::move(counts), std::move(class_weights)};
        p.validate();
        return p;
    }

    void validate() const {
        if (weights.empty()) throw dimension_error("weight profile needs k >= 1");
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] < 0) throw dimension_error("weights must be nonnegative");
            if (i > 0 && weights[i] < weights[i - 1])
                throw dimension_error("weights must be nondecreasing");
        }
    }
};

/// Placement of k distinguishable servers; entry i-1 is the point of s_i.
struct Configuration {
    std::vector<Point> at;

    int k() const { return static_cast<int>(at.size()); }
    Point pos(int i) const { return at.at(i - 1); }  // 1-based server index

    bool operator==(const Configuration&) const = default;
    auto operator<=>(const Configuration&) const = default;
};

/// Placement of d classes; entry i is the sorted set of the k_i points
/// occupied by class-i servers.
struct ClassConfiguration {
    std::vector<std::vector<Point>> sets;  // each sorted ascending, distinct

    int d() const { return static_cast<int>(sets.size()); }

    bool operator==(const ClassConfiguration&) const = default;
    auto operator<=>(const ClassConfiguration&) const = default;
};

using RequestSequence = std::vector<Point>;  // sigma_1..sigma_T

inline Rat distance(const Configuration& a, const Configuration& b, const WeightProfile& w) {
    if (a.k() != b.k() || a.k() != w.k())
        throw dimension_error("configuration/profile size mismatch in distance");
    Rat c = 0;
    for (int i = 1; i <= w.k(); ++i)
        if (a.pos(i) != b.pos(i)) c += w.weight(i);
    return c;
}

/// Deformed d-class distance: class i is charged k_i * w_i as a lump whenever
/// its point set changed at all.
inline Rat class_distance(const ClassConfiguration& a, const ClassConfiguration& b,
                          const WeightProfile& w) {
    if (!w.classes) throw dimension_error("class_distance needs a class structure");
    const auto& cs = *w.classes;
    if (a.d() != b.d() || a.d() != static_cast<int>(cs.counts.size()))
        throw dimension_error("class configuration size mismatch in class_distance");
    Rat c = 0;
    for (int i = 0; i < a.d(); ++i) {
        if (static_cast<int>(a.sets[i].size()) != cs.counts[i] ||
            static_cast<int>(b.sets[i].size()) != cs.counts[i])
            throw dimension_error("class set size does not match k_i");
        if (a.sets[i] != b.sets[i]) c += Rat(cs.counts[i]) * cs.class_weights[i];
    }
    return c;
}

inline bool serves(const Configuration& c, Point p) {
    return std::find(c.at.begin(), c.at.end(), p) != c.at.end();
}

inline bool serves(const ClassConfiguration& c, Point p) {
    for (const auto& s : c.sets)
        if (std::binary_search(s.begin(), s.end(), p)) return true;
    return false;
}

/// Adversary weight regime: w_1 = 1, w_{i+1} = n_k * (w_1 + ... + w_i).
inline WeightProfile separated_weights(int k, const Int& n_k) {
    if (k < 1 || n_k < 1) throw dimension_error("separated_weights needs k, n_k >= 1");
    std::vector<Rat> w;
    Int sum = 0;
    Int cur = 1;
    for (int i = 1; i <= k; ++i) {
        w.emplace_back(cur);
        sum += cur;
        cur = n_k * sum;
    }
    return WeightProfile::flat(std::move(w));
}

/// Separation condition of the WFA analysis: W_{i-1} <= w_i / (20 i n_i) for
/// i = 2..k, with n_i given as exact log2 exponents (entry [i] of
/// log2_dichotomy_ns; entries 0 and 1 are ignored).
inline bool wfa_weight_check(const WeightProfile& w, const std::vector<Int>& log2_dichotomy_ns) {
    int k = w.k();
    if (k == 1) return true;
    if (static_cast<int>(log2_dichotomy_ns.size()) < k + 1)
        throw dimension_error("need log2 n_i for each level i = 2..k");
    for (int i = 2; i <= k; ++i) {
        const Int& e = log2_dichotomy_ns[i];
        if (e < 0) throw dimension_error("negative log2 exponent");
        // W_{i-1} * 20 * i * 2^e <= w_i, exactly.
        Rat base = w.prefix(i - 1) * Rat(20 * Int(i));
        if (base == 0) continue;
        // 2^e <= w_i / base; when e exceeds the numerator's bit length the
        // comparison is false without materializing 2^e.
        Rat q = w.weight(i) / base;
        if (q <= 0) return false;
        if (e >= Int(bit_length(num(q)))) return false;  // 2^e > numerator >= q
        Int pow2 = Int(1) << e.convert_to<unsigned>();
        if (Rat(pow2) > q) return false;
    }
    return true;
}

}  // namespace wks
