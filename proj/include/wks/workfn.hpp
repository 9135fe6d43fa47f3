#pragma once

#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include "wks/core.hpp"

// Exact work-function engine: dense tables over all configurations, the
// pinned/static work functions and per-phase diagnostics of the heaviest
// server's behavior.

namespace wks {

/// Dense enumeration of U^k in mixed radix; coordinate i (1-based) has
/// stride n^(i-1), so configurations pinned on server k form one block.
class ConfigSpace {
public:
    ConfigSpace(int n, int k, std::size_t limit = kDefaultTableLimit) : n_(n), k_(k) {
        if (n < 1 || k < 1) throw dimension_error("ConfigSpace needs n, k >= 1");
        std::size_t s = 1;
        for (int i = 0; i < k; ++i) {
            if (s > limit / static_cast<std::size_t>(n))
                throw capacity_error("configuration table of n^k = " + std::to_string(n) + "^" +
                                     std::to_string(k) + " entries exceeds limit " +
                                     std::to_string(limit));
            s *= static_cast<std::size_t>(n);
        }
        size_ = s;
    }

    int n() const { return n_; }
    int k() const { return k_; }
    std::size_t size() const { return size_; }

    std::size_t index(const Configuration& c) const {
        std::size_t idx = 0, s = 1;
        for (int i = 1; i <= k_; ++i) {
            idx += static_cast<std::size_t>(c.pos(i) - 1) * s;
            s *= static_cast<std::size_t>(n_);
        }
        return idx;
    }

    Configuration config(std::size_t idx) const {
        Configuration c;
        c.at.resize(k_);
        for (int i = 0; i < k_; ++i) {
            c.at[i] = static_cast<Point>(idx % n_) + 1;
            idx /= static_cast<std::size_t>(n_);
        }
        return c;
    }

private:
    int n_, k_;
    std::size_t size_;
};

class WorkFunctionTable {
public:
    WorkFunctionTable(Universe u, WeightProfile w, Configuration c0,
                      std::size_t limit = kDefaultTableLimit)
        : u_(u), w_(std::move(w)), c0_(std::move(c0)), space_(u.n, c0_.k(), limit) {
        if (c0_.k() != w_.k()) throw dimension_error("initial configuration size != k");
        for (Point p : c0_.at)
            if (!u_.contains(p)) throw dimension_error("initial configuration outside universe");
        val_.resize(space_.size());
        for (std::size_t i = 0; i < space_.size(); ++i)
            val_[i] = distance(c0_, space_.config(i), w_);
    }

    int time() const { return t_; }
    const Universe& universe() const { return u_; }
    const WeightProfile& profile() const { return w_; }
    const Configuration& initial() const { return c0_; }
    const ConfigSpace& space() const { return space_; }

    Rat value(const Configuration& c) const { return val_[space_.index(c)]; }

    /// One step of the recurrence WF_t(C) = min_{C' serves p} WF_{t-1}(C') + d(C',C).
    void update(Point p) {
        if (!u_.contains(p)) throw dimension_error("request outside universe");
        const std::size_t size = space_.size();
        const int n = space_.n();
        std::vector<char> fin(size, 0);
        std::vector<Rat> g(size);
        for (std::size_t i = 0; i < size; ++i) {
            if (serves(space_.config(i), p)) {
                g[i] = val_[i];
                fin[i] = 1;
            }
        }
        // The distance is a weighted Hamming sum, so the min-convolution
        // factorizes into one relaxation pass per server coordinate.
        std::size_t stride = 1;
        for (int i = 1; i <= space_.k(); ++i) {
            const Rat& wi = w_.weight(i);
            const std::size_t block = stride * static_cast<std::size_t>(n);
            for (std::size_t base = 0; base < size; base += block) {
                for (std::size_t off = 0; off < stride; ++off) {
                    // line of n entries along coordinate i
                    bool any = false;
                    Rat m;
                    for (int x = 0; x < n; ++x) {
                        std::size_t idx = base + off + static_cast<std::size_t>(x) * stride;
                        if (fin[idx] && (!any || g[idx] < m)) {
                            m = g[idx];
                            any = true;
                        }
                    }
                    if (!any) continue;
                    Rat moved = m + wi;
                    for (int x = 0; x < n; ++x) {
                        std::size_t idx = base + off + static_cast<std::size_t>(x) * stride;
                        if (!fin[idx] || moved < g[idx]) {
                            g[idx] = moved;
                            fin[idx] = 1;
                        }
                    }
                }
            }
            stride = block;
        }
        val_ = std::move(g);
        ++t_;
    }

    WorkFunctionTable updated(Point p) const {
        WorkFunctionTable copy(*this);
        copy.update(p);
        return copy;
    }

    /// M_t: minimum over all configurations.
    Rat min_wf() const {
        Rat m = val_[0];
        for (const Rat& v : val_)
            if (v < m) m = v;
        return m;
    }

    /// WF_t(p) = min { WF_t(C) | C(k) = p }.
    Rat pinned_wf(Point p) const {
        if (!u_.contains(p)) throw dimension_error("pinned point outside universe");
        std::size_t stride = space_.size() / static_cast<std::size_t>(space_.n());
        std::size_t base = static_cast<std::size_t>(p - 1) * stride;
        Rat m = val_[base];
        for (std::size_t i = base + 1; i < base + stride; ++i)
            if (val_[i] < m) m = val_[i];
        return m;
    }

    /// Cheapest configuration pinned at p (lexicographically smallest minimizer).
    Configuration pinned_argmin(Point p) const {
        std::size_t stride = space_.size() / static_cast<std::size_t>(space_.n());
        std::size_t base = static_cast<std::size_t>(p - 1) * stride;
        std::size_t best = base;
        Configuration bc = space_.config(base);
        for (std::size_t i = base + 1; i < base + stride; ++i) {
            if (val_[i] < val_[best]) {
                best = i;
                bc = space_.config(i);
            } else if (val_[i] == val_[best]) {
                Configuration c = space_.config(i);
                if (c.at < bc.at) {
                    best = i;
                    bc = std::move(c);
                }
            }
        }
        return bc;
    }

    /// Sorted text dump: one "p1 p2 ... pk -> cost" line per configuration.
    std::string dump() const {
        std::string out;
        for (std::size_t i = 0; i < space_.size(); ++i) {
            Configuration c = space_.config(i);
            std::string line;
            for (int j = 1; j <= space_.k(); ++j)
                line += (j > 1 ? " " : "") + std::to_string(c.pos(j));
            out += line + " -> " + to_string(val_[i]) + "\n";
        }
        return out;
    }

private:
    Universe u_;
    WeightProfile w_;
    Configuration c0_;
    ConfigSpace space_;
    std::vector<Rat> val_;
    int t_ = 0;
};

inline Rat opt_cost(const Universe& u, const WeightProfile& w, const Configuration& c0,
                    const RequestSequence& reqs, std::size_t limit = kDefaultTableLimit) {
    WorkFunctionTable tbl(u, w, c0, limit);
    for (Point p : reqs) tbl.update(p);
    return tbl.min_wf();
}

/// Optimal cost of serving `reqs` with server k fixed at `pin` and the k-1
/// lighter servers starting at `lights`. Requests at `pin` are free.
inline Rat static_wf_cost(const Universe& u, const WeightProfile& w,
                          const std::vector<Point>& lights, Point pin,
                          const RequestSequence& reqs, std::size_t limit = kDefaultTableLimit) {
    int k = w.k();
    if (static_cast<int>(lights.size()) != k - 1) throw dimension_error("need k-1 light servers");
    if (k == 1) {
        for (Point r : reqs)
            if (r != pin) throw dimension_error("k=1 static work function cannot serve " +
                                                std::to_string(r));
        return Rat(0);
    }
    WeightProfile lw = WeightProfile::flat(
        std::vector<Rat>(w.weights.begin(), w.weights.end() - 1));
    WorkFunctionTable tbl(u, lw, Configuration{lights}, limit);
    for (Point r : reqs)
        if (r != pin) tbl.update(r);
    return tbl.min_wf();
}

/// Per-phase static work function (the engine-tracked variant): lighter
/// servers start from the cheapest configuration consistent with WF_{t1}
/// pinned at p.
inline Rat static_wf(const Universe& u, const WeightProfile& w, const Configuration& c0,
                     const RequestSequence& reqs, Point pin, int t1, int t2,
                     std::size_t limit = kDefaultTableLimit) {
    if (t1 < 0 || t2 < t1 || t2 > static_cast<int>(reqs.size()))
        throw dimension_error("static_wf: bad time window");
    WorkFunctionTable tbl(u, w, c0, limit);
    for (int t = 0; t < t1; ++t) tbl.update(reqs[t]);
    Configuration start = tbl.pinned_argmin(pin);
    std::vector<Point> lights(start.at.begin(), start.at.end() - 1);
    RequestSequence window(reqs.begin() + t1, reqs.begin() + t2);
    return static_wf_cost(u, w, lights, pin, window, limit);
}

/// From-origin static work functions SWF_t(p) for every point p, maintained
/// incrementally: one (k-1)-server table per pin point, fed with the
/// requests different from the pin.
class StaticWfFamily {
public:
    StaticWfFamily(const Universe& u, const WeightProfile& w, const Configuration& c0,
                   std::size_t limit = kDefaultTableLimit) {
        int k = w.k();
        std::vector<Point> lights(c0.at.begin(), c0.at.end() - 1);
        if (k == 1) {
            single_server_ = true;
            n_ = u.n;
            return;
        }
        WeightProfile lw = WeightProfile::flat(
            std::vector<Rat>(w.weights.begin(), w.weights.end() - 1));
        for (Point p = 1; p <= u.n; ++p)
            tables_.emplace_back(u, lw, Configuration{lights}, limit);
        n_ = u.n;
    }

    void push(Point request) {
        if (single_server_) return;
        for (Point p = 1; p <= n_; ++p)
            if (p != request) tables_[static_cast<std::size_t>(p - 1)].update(request);
    }

    Rat swf(Point p) const {
        if (single_server_) return Rat(0);
        return tables_[static_cast<std::size_t>(p - 1)].min_wf();
    }

private:
    std::vector<WorkFunctionTable> tables_;
    int n_ = 0;
    bool single_server_ = false;
};

/// All k-subsets of {1..n} in colexicographic rank order (combinadic).
class SubsetSpace {
public:
    SubsetSpace(int n, int k) : n_(n), k_(k) {
        if (k < 1 || k > n) throw dimension_error("SubsetSpace needs 1 <= k <= n");
        choose_.assign(n + 1, std::vector<std::size_t>(k + 1, 0));
        for (int a = 0; a <= n; ++a) {
            choose_[a][0] = 1;
            for (int b = 1; b <= k && b <= a; ++b)
                choose_[a][b] = choose_[a - 1][b - 1] + (a - 1 >= b ? choose_[a - 1][b] : 0);
        }
        size_ = choose_[n][k];
    }

    int n() const { return n_; }
    int k() const { return k_; }
    std::size_t size() const { return size_; }

    std::size_t rank(const std::vector<Point>& s) const {
        if (static_cast<int>(s.size()) != k_) throw dimension_error("subset size != k_i");
        std::size_t r = 0;
        for (int i = 0; i < k_; ++i) {
            int v = s[static_cast<std::size_t>(i)] - 1;  // 0-based element
            if (v >= i) r += choose_[v][i + 1];
        }
        return r;
    }

    std::vector<Point> unrank(std::size_t r) const {
        std::vector<Point> s(static_cast<std::size_t>(k_));
        for (int i = k_; i >= 1; --i) {
            int v = i - 1;
            while (v + 1 <= n_ - 1 && choose_[v + 1][i] <= r) ++v;
            r -= choose_[v][i];
            s[static_cast<std::size_t>(i - 1)] = v + 1;
        }
        return s;
    }

private:
    int n_, k_;
    std::size_t size_;
    std::vector<std::vector<std::size_t>> choose_;
};

/// Work function over class configurations with the deformed distance:
/// class i pays the lump k_i * w_i whenever its point set changed at all.
class ClassWorkFunctionTable {
public:
    ClassWorkFunctionTable(Universe u, WeightProfile w, ClassConfiguration c0,
                           std::size_t limit = kDefaultTableLimit)
        : u_(u), w_(std::move(w)), c0_(std::move(c0)) {
        if (!w_.classes) throw dimension_error("class table needs a class structure");
        const auto& cs = *w_.classes;
        if (c0_.d() != static_cast<int>(cs.counts.size()))
            throw dimension_error("initial class configuration has wrong class count");
        std::size_t s = 1;
        for (int i = 0; i < c0_.d(); ++i) {
            spaces_.emplace_back(u.n, cs.counts[static_cast<std::size_t>(i)]);
            std::size_t card = spaces_.back().size();
            if (s > limit / card)
                throw capacity_error("class configuration table exceeds limit " +
                                     std::to_string(limit));
            s *= card;
        }
        size_ = s;
        val_.resize(size_);
        for (std::size_t i = 0; i < size_; ++i)
            val_[i] = class_distance(c0_, config(i), w_);
    }

    int time() const { return t_; }
    int d() const { return c0_.d(); }
    std::size_t size() const { return size_; }
    const WeightProfile& profile() const { return w_; }

    std::size_t index(const ClassConfiguration& c) const {
        if (c.d() != d()) throw dimension_error("class configuration size mismatch");
        std::size_t idx = 0, stride = 1;
        for (int i = 0; i < d(); ++i) {
            idx += spaces_[static_cast<std::size_t>(i)].rank(c.sets[static_cast<std::size_t>(i)]) *
                   stride;
            stride *= spaces_[static_cast<std::size_t>(i)].size();
        }
        return idx;
    }

    ClassConfiguration config(std::size_t idx) const {
        ClassConfiguration c;
        for (int i = 0; i < d(); ++i) {
            std::size_t card = spaces_[static_cast<std::size_t>(i)].size();
            c.sets.push_back(spaces_[static_cast<std::size_t>(i)].unrank(idx % card));
            idx /= card;
        }
        return c;
    }

    Rat value(const ClassConfiguration& c) const { return val_[index(c)]; }

    void update(Point p) {
        if (!u_.contains(p)) throw dimension_error("request outside universe");
        const auto& cs = *w_.classes;
        std::vector<char> fin(size_, 0);
        std::vector<Rat> g(size_);
        for (std::size_t i = 0; i < size_; ++i) {
            if (serves(config(i), p)) {
                g[i] = val_[i];
                fin[i] = 1;
            }
        }
        std::size_t stride = 1;
        for (int i = 0; i < d(); ++i) {
            const std::size_t card = spaces_[static_cast<std::size_t>(i)].size();
            Rat lump = Rat(cs.counts[static_cast<std::size_t>(i)]) *
                       cs.class_weights[static_cast<std::size_t>(i)];
            const std::size_t block = stride * card;
            for (std::size_t base = 0; base < size_; base += block) {
                for (std::size_t off = 0; off < stride; ++off) {
                    bool any = false;
                    Rat m;
                    for (std::size_t x = 0; x < card; ++x) {
                        std::size_t idx = base + off + x * stride;
                        if (fin[idx] && (!any || g[idx] < m)) {
                            m = g[idx];
                            any = true;
                        }
                    }
                    if (!any) continue;
                    Rat moved = m + lump;
                    for (std::size_t x = 0; x < card; ++x) {
                        std::size_t idx = base + off + x * stride;
                        if (!fin[idx] || moved < g[idx]) {
                            g[idx] = moved;
                            fin[idx] = 1;
                        }
                    }
                }
            }
            stride = block;
        }
        val_ = std::move(g);
        ++t_;
    }

    ClassWorkFunctionTable updated(Point p) const {
        ClassWorkFunctionTable copy(*this);
        copy.update(p);
        return copy;
    }

    Rat min_wf() const {
        Rat m = val_[0];
        for (const Rat& v : val_)
            if (v < m) m = v;
        return m;
    }

    /// WF_t(A_d) = min over configurations whose heaviest-class set is A_d.
    Rat pinned_wf(const std::vector<Point>& heavy_set) const {
        std::size_t card = spaces_.back().size();
        std::size_t stride = size_ / card;
        std::size_t base = spaces_.back().rank(heavy_set) * stride;
        Rat m = val_[base];
        for (std::size_t i = base + 1; i < base + stride; ++i)
            if (val_[i] < m) m = val_[i];
        return m;
    }

private:
    Universe u_;
    WeightProfile w_;
    ClassConfiguration c0_;
    std::vector<SubsetSpace> spaces_;
    std::size_t size_ = 0;
    std::vector<Rat> val_;
    int t_ = 0;
};

/// Optimal cost of serving `reqs` with the whole heaviest class pinned at
/// `heavy_set`; the d-1 lighter classes start from `c0` minus its last set.
inline Rat class_static_wf_cost(const Universe& u, const WeightProfile& w,
                                const ClassConfiguration& c0, const std::vector<Point>& heavy_set,
                                const RequestSequence& reqs,
                                std::size_t limit = kDefaultTableLimit) {
    if (!w.classes) throw dimension_error("class static work function needs classes");
    const auto& cs = *w.classes;
    int d = static_cast<int>(cs.counts.size());
    if (static_cast<int>(heavy_set.size()) != cs.counts.back())
        throw dimension_error("pinned set size != k_d");
    auto pinned_serves = [&](Point r) {
        return std::binary_search(heavy_set.begin(), heavy_set.end(), r);
    };
    if (d == 1) {
        for (Point r : reqs)
            if (!pinned_serves(r))
                throw dimension_error("d=1 class static work function cannot serve " +
                                      std::to_string(r));
        return Rat(0);
    }
    WeightProfile lw = WeightProfile::classed(
        std::vector<int>(cs.counts.begin(), cs.counts.end() - 1),
        std::vector<Rat>(cs.class_weights.begin(), cs.class_weights.end() - 1));
    ClassConfiguration lights;
    lights.sets.assign(c0.sets.begin(), c0.sets.end() - 1);
    ClassWorkFunctionTable tbl(u, lw, lights, limit);
    for (Point r : reqs)
        if (!pinned_serves(r)) tbl.update(r);
    return tbl.min_wf();
}

struct PhaseRecord {
    int t1 = 0;              // step index at which the phase started (s_k arrived)
    int t2 = 0;              // step at which s_k left (or horizon for the open phase)
    bool completed = false;  // false for the trailing open phase
    Point heavy = 0;         // location of s_k during the phase
    Rat m_start, m_end;      // M_{t1}, M_{t2}
    Rat wf_start, wf_end;    // WF_{t1}(heavy), WF_{t2}(heavy)
    std::map<Point, Rat> dswf;  // ΔSWF(q) over [t1,t2] for every q
    std::vector<Point> lucky;   // q with ΔSWF(q) < w_k / (4 k n_k)
    std::vector<std::string> violations;

    Rat delta_m() const { return m_end - m_start; }
    Rat delta_wf() const { return wf_end - wf_start; }
};

/// Snapshot stream for a whole run: M_t, WF_t(p) and SWF_t(p) at each time.
struct WfTrace {
    std::vector<Rat> m;                    // [0..T]
    std::vector<std::vector<Rat>> wf;      // [0..T][p-1]
    std::vector<std::vector<Rat>> swf;     // [0..T][p-1]
};

inline WfTrace trace_run(const Universe& u, const WeightProfile& w, const Configuration& c0,
                         const RequestSequence& reqs, std::size_t limit = kDefaultTableLimit) {
    WfTrace tr;
    WorkFunctionTable tbl(u, w, c0, limit);
    StaticWfFamily fam(u, w, c0, limit);
    auto snap = [&] {
        tr.m.push_back(tbl.min_wf());
        std::vector<Rat> wrow, srow;
        for (Point p = 1; p <= u.n; ++p) {
            wrow.push_back(tbl.pinned_wf(p));
            srow.push_back(fam.swf(p));
        }
        tr.wf.push_back(std::move(wrow));
        tr.swf.push_back(std::move(srow));
    };
    snap();
    for (Point r : reqs) {
        tbl.update(r);
        fam.push(r);
        snap();
    }
    return tr;
}

/// Segments a transcript of algorithm configurations into phases (maximal
/// intervals during which the heaviest server stays put) and evaluates the
/// per-phase window checks on the pinned work function.
/// `log2_nk` is the dichotomy constant n_k in log2 form (lucky threshold).
inline std::vector<PhaseRecord> phase_diagnostics(const Universe& u, const WeightProfile& w,
                                                  const Configuration& c0,
                                                  const RequestSequence& reqs,
                                                  const std::vector<Configuration>& transcript,
                                                  const Int& log2_nk,
                                                  std::size_t limit = kDefaultTableLimit) {
    const int T = static_cast<int>(reqs.size());
    if (static_cast<int>(transcript.size()) != T)
        throw dimension_error("transcript length != request sequence length");
    const int k = w.k();
    WfTrace tr = trace_run(u, w, c0, reqs, limit);

    // lucky threshold w_k / (4 k n_k); comparison done as dswf * 4k * 2^e < w_k
    Rat four_k = Rat(4 * Int(k));
    auto is_lucky = [&](const Rat& dswf) {
        if (dswf == 0) return true;
        Rat q = w.weight(k) / (dswf * four_k);  // need 2^e > ... i.e. dswf < w_k/(4k*2^e)
        if (q <= 0) return false;
        if (log2_nk >= Int(bit_length(num(q)))) return false;
        return Rat(Int(1) << log2_nk.convert_to<unsigned>()) < q;
    };

    std::vector<int> boundaries;  // times t where s_k moved while serving sigma_t
    Point prev = c0.pos(k);
    for (int t = 1; t <= T; ++t) {
        if (transcript[t - 1].pos(k) != prev) {
            boundaries.push_back(t);
            prev = transcript[t - 1].pos(k);
        }
    }

    Rat w_k = w.weight(k);
    Rat W_km1 = w.prefix(k - 1);
    std::vector<PhaseRecord> phases;
    int start = 0;
    auto close_phase = [&](int end, bool completed) {
        PhaseRecord rec;
        rec.t1 = start;
        rec.t2 = end;
        rec.completed = completed;
        rec.heavy = (start == 0) ? c0.pos(k) : transcript[start - 1].pos(k);
        rec.m_start = tr.m[start];
        rec.m_end = tr.m[end];
        rec.wf_start = tr.wf[start][rec.heavy - 1];
        rec.wf_end = tr.wf[end][rec.heavy - 1];
        for (Point q = 1; q <= u.n; ++q) {
            Rat d = tr.swf[end][q - 1] - tr.swf[start][q - 1];
            rec.dswf[q] = d;
            if (is_lucky(d)) rec.lucky.push_back(q);
        }
        // at a phase start: M_{t1} <= WF_{t1}(p) <= M_{t1} + W_{k-1}
        if (rec.wf_start < rec.m_start || rec.wf_start > rec.m_start + W_km1)
            rec.violations.push_back("phase-start-window");
        // over a completed phase the pinned value grows by about w_k/2
        if (completed) {
            Rat dwf = rec.delta_wf();
            if (dwf < w_k / 2 - 2 * W_km1 || dwf > rec.delta_m() + w_k / 2 + 2 * W_km1)
                rec.violations.push_back("phase-delta-window");
        }
        phases.push_back(std::move(rec));
    };
    for (int b : boundaries) {
        close_phase(b, true);
        start = b;
    }
    if (start < T || phases.empty()) close_phase(T, false);
    return phases;
}

}  // namespace wks
