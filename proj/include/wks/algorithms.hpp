#pragma once

#include <memory>
#include <string>
#include <vector>

#include "wks/rng.hpp"
#include "wks/workfn.hpp"

// Online algorithms: the generalized work-function algorithm WFA_lambda
// (flat and d-class), a greedy baseline and a memoryless sampler. All run
// under a common stepwise contract so the adversary can attack any of them.

namespace wks {

class OnlineAlgorithm {
public:
    virtual ~OnlineAlgorithm() = default;

    virtual const std::string& name() const = 0;
    virtual const Configuration& config() const = 0;

    /// Serve sigma_t: move to (and return) a configuration containing p.
    virtual const Configuration& serve(Point p) = 0;

    const Rat& cost() const { return cost_; }
    const std::vector<Rat>& server_costs() const { return server_costs_; }
    Rat server_cost(int i) const { return server_costs_.at(static_cast<std::size_t>(i - 1)); }

protected:
    /// Accounts the move old -> now and enforces the serving contract.
    void account(const Configuration& before, const Configuration& now, Point p,
                 const WeightProfile& w) {
        if (!serves(now, p))
            throw protocol_error(name() + " returned a configuration not serving " +
                                 std::to_string(p));
        if (server_costs_.empty()) server_costs_.assign(static_cast<std::size_t>(w.k()), Rat(0));
        for (int i = 1; i <= w.k(); ++i) {
            if (before.pos(i) != now.pos(i)) {
                cost_ += w.weight(i);
                server_costs_[static_cast<std::size_t>(i - 1)] += w.weight(i);
            }
        }
    }

    Rat cost_ = 0;
    std::vector<Rat> server_costs_;
};

/// Generalized work-function algorithm: after updating the work function
/// with p, move to argmin over configurations serving p of
/// WF_t(C) + lambda * d(C, C_{t-1}).
/// Ties: prefer the current configuration, then the least moved weight,
/// then the lexicographically smallest placement.
class Wfa final : public OnlineAlgorithm {
public:
    Wfa(Universe u, WeightProfile w, Configuration c0, Rat lambda,
        std::size_t limit = kDefaultTableLimit)
        : w_(w), cur_(c0), tbl_(u, std::move(w), std::move(c0), limit), lambda_(std::move(lambda)) {
        if (!(lambda_ > 0 && lambda_ <= 1)) throw schema_error("wfa lambda must be in (0,1]");
        name_ = "wfa:lambda=" + to_string(lambda_);
    }

    const std::string& name() const override { return name_; }
    const Configuration& config() const override { return cur_; }
    const WorkFunctionTable& table() const { return tbl_; }
    const Rat& lambda() const { return lambda_; }

    const Configuration& serve(Point p) override {
        tbl_.update(p);
        const ConfigSpace& sp = tbl_.space();
        bool have = false;
        Rat best_score, best_move;
        bool best_is_cur = false;
        Configuration best;
        for (std::size_t i = 0; i < sp.size(); ++i) {
            Configuration c = sp.config(i);
            if (!serves(c, p)) continue;
            Rat mv = distance(c, cur_, w_);
            Rat score = tbl_.value(c) + lambda_ * mv;
            bool is_cur = (c == cur_);
            bool better;
            if (!have) {
                better = true;
            } else if (score != best_score) {
                better = score < best_score;
            } else if (is_cur != best_is_cur) {
                better = is_cur;
            } else if (mv != best_move) {
                better = mv < best_move;
            } else {
                better = c.at < best.at;
            }
            if (better) {
                have = true;
                best_score = std::move(score);
                best_move = std::move(mv);
                best_is_cur = is_cur;
                best = std::move(c);
            }
        }
        account(cur_, best, p, w_);
        cur_ = std::move(best);
        return cur_;
    }

private:
    WeightProfile w_;
    Configuration cur_;
    WorkFunctionTable tbl_;
    Rat lambda_;
    std::string name_;
};

/// If p is uncovered, move the lightest server there; otherwise stay.
class Greedy final : public OnlineAlgorithm {
public:
    Greedy(Universe u, WeightProfile w, Configuration c0) : u_(u), w_(std::move(w)), cur_(std::move(c0)) {}

    const std::string& name() const override { return name_; }
    const Configuration& config() const override { return cur_; }

    const Configuration& serve(Point p) override {
        if (!u_.contains(p)) throw dimension_error("request outside universe");
        Configuration next = cur_;
        if (!serves(next, p)) next.at[0] = p;
        account(cur_, next, p, w_);
        cur_ = std::move(next);
        return cur_;
    }

private:
    Universe u_;
    WeightProfile w_;
    Configuration cur_;
    std::string name_ = "greedy";
};

/// If p is uncovered, move server i there with probability q_i.
/// Sampling is exact over the common denominator of the q_i and driven by
/// the seeded in-house generator, so transcripts replay byte-identically.
class Memoryless final : public OnlineAlgorithm {
public:
    Memoryless(Universe u, WeightProfile w, Configuration c0, std::vector<Rat> q,
               std::uint64_t seed)
        : u_(u), w_(std::move(w)), cur_(std::move(c0)), rng_(seed) {
        if (static_cast<int>(q.size()) != w_.k())
            throw schema_error("memoryless needs one probability per server");
        Rat sum = 0;
        Int d = 1;
        for (const Rat& x : q) {
            if (x < 0) throw schema_error("memoryless probabilities must be nonnegative");
            sum += x;
            d = boost::multiprecision::lcm(d, den(x));
        }
        if (sum != 1) throw schema_error("memoryless probabilities must sum to 1");
        if (d > Int(std::uint64_t(1) << 62))
            throw schema_error("memoryless probability denominators too large");
        denom_ = d.convert_to<std::uint64_t>();
        std::uint64_t acc = 0;
        for (const Rat& x : q) {
            acc += (num(x) * (d / den(x))).convert_to<std::uint64_t>();
            cum_.push_back(acc);
        }
        name_ = "memoryless:seed=" + std::to_string(seed);
    }

    const std::string& name() const override { return name_; }
    const Configuration& config() const override { return cur_; }

    const Configuration& serve(Point p) override {
        if (!u_.contains(p)) throw dimension_error("request outside universe");
        Configuration next = cur_;
        if (!serves(next, p)) {
            std::uint64_t roll = rng_.below(denom_);
            std::size_t i = 0;
            while (roll >= cum_[i]) ++i;
            next.at[i] = p;
        }
        account(cur_, next, p, w_);
        cur_ = std::move(next);
        return cur_;
    }

private:
    Universe u_;
    WeightProfile w_;
    Configuration cur_;
    Rng rng_;
    std::uint64_t denom_ = 1;
    std::vector<std::uint64_t> cum_;
    std::string name_;
};

/// d-class WFA_lambda over the deformed distance (lump k_i * w_i per class).
class ClassWfa {
public:
    ClassWfa(Universe u, WeightProfile w, ClassConfiguration c0, Rat lambda,
             std::size_t limit = kDefaultTableLimit)
        : w_(w), cur_(c0), tbl_(u, std::move(w), std::move(c0), limit), lambda_(std::move(lambda)) {
        if (!(lambda_ > 0 && lambda_ <= 1)) throw schema_error("wfa lambda must be in (0,1]");
        name_ = "wfa-class:lambda=" + to_string(lambda_);
    }

    const std::string& name() const { return name_; }
    const ClassConfiguration& config() const { return cur_; }
    const Rat& cost() const { return cost_; }
    const ClassWorkFunctionTable& table() const { return tbl_; }

    const ClassConfiguration& serve(Point p) {
        tbl_.update(p);
        bool have = false;
        Rat best_score, best_move;
        bool best_is_cur = false;
        ClassConfiguration best;
        for (std::size_t i = 0; i < tbl_.size(); ++i) {
            ClassConfiguration c = tbl_.config(i);
            if (!serves(c, p)) continue;
            Rat mv = class_distance(c, cur_, w_);
            Rat score = tbl_.value(c) + lambda_ * mv;
            bool is_cur = (c == cur_);
            bool better;
            if (!have) {
                better = true;
            } else if (score != best_score) {
                better = score < best_score;
            } else if (is_cur != best_is_cur) {
                better = is_cur;
            } else if (mv != best_move) {
                better = mv < best_move;
            } else {
                better = c.sets < best.sets;
            }
            if (better) {
                have = true;
                best_score = std::move(score);
                best_move = std::move(mv);
                best_is_cur = is_cur;
                best = std::move(c);
            }
        }
        if (!serves(best, p)) throw protocol_error("wfa-class produced a non-serving configuration");
        cost_ += class_distance(cur_, best, w_);
        cur_ = std::move(best);
        return cur_;
    }

private:
    WeightProfile w_;
    ClassConfiguration cur_;
    ClassWorkFunctionTable tbl_;
    Rat lambda_;
    Rat cost_ = 0;
    std::string name_;
};

/// Parses an algorithm spec: "wfa:lambda=1/2", "greedy",
/// "memoryless:q=1/2|1/2,seed=7". Class specs ("wfa-class:...") are
/// instantiated by the harness against class instances.
inline std::unique_ptr<OnlineAlgorithm> make_algorithm(const std::string& spec, const Universe& u,
                                                       const WeightProfile& w,
                                                       const Configuration& c0,
                                                       std::size_t limit = kDefaultTableLimit) {
    auto colon = spec.find(':');
    std::string head = spec.substr(0, colon);
    std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
    auto get = [&](const std::string& key) -> std::string {
        std::size_t pos = 0;
        while (pos < args.size()) {
            auto eq = args.find('=', pos);
            auto comma = args.find(',', pos);
            if (eq == std::string::npos || (comma != std::string::npos && comma < eq))
                throw schema_error("malformed algorithm spec: '" + spec + "'");
            std::string k = args.substr(pos, eq - pos);
            std::string v = args.substr(eq + 1, (comma == std::string::npos ? args.size() : comma) -
                                                    eq - 1);
            if (k == key) return v;
            pos = comma == std::string::npos ? args.size() : comma + 1;
        }
        throw schema_error("algorithm spec '" + spec + "' missing parameter '" + key + "'");
    };
    if (head == "wfa") {
        Rat lambda = args.empty() ? Rat(1, 2) : parse_rational(get("lambda"));
        return std::make_unique<Wfa>(u, w, c0, lambda, limit);
    }
    if (head == "greedy") return std::make_unique<Greedy>(u, w, c0);
    if (head == "memoryless") {
        std::vector<Rat> q;
        std::string qs = get("q");
        std::size_t pos = 0;
        while (pos <= qs.size()) {
            auto bar = qs.find('|', pos);
            q.push_back(parse_rational(qs.substr(pos, bar == std::string::npos ? std::string::npos
                                                                               : bar - pos)));
            if (bar == std::string::npos) break;
            pos = bar + 1;
        }
        std::uint64_t seed = std::stoull(get("seed"));
        return std::make_unique<Memoryless>(u, w, c0, std::move(q), seed);
    }
    throw schema_error("unknown algorithm: '" + spec + "'");
}

}  // namespace wks
