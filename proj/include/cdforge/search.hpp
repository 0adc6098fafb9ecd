#pragma once

// Backtracking search for cyclic relative difference families and cyclic
// difference matrices.
//
// CDF search places base blocks in canonical position: the block realizing
// the chosen uncovered difference d is translated so that it contains 0 and d
// (as the pair with d = b - a). Since every difference occurs exactly once,
// this translate is unique, so the enumeration visits each partial family
// once. Only reduced differences min(r, v - r) are tracked: r and v - r are
// always covered together. No multiplier symmetry is used, so an exhausted
// tree is a nonexistence proof.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "cdforge/error.hpp"
#include "cdforge/group.hpp"
#include "cdforge/matrix.hpp"
#include "cdforge/verify.hpp"

namespace cdforge {

struct SearchBudget {
    std::optional<std::uint64_t> max_nodes;   // unlimited when empty
    std::optional<double> time_limit_seconds; // unlimited when empty
    unsigned workers = 1;
};

enum class SearchStatus { found, exhausted_unsat, budget_exceeded };

inline const char* to_string(SearchStatus s) {
    switch (s) {
        case SearchStatus::found: return "found";
        case SearchStatus::exhausted_unsat: return "exhausted-unsat";
        case SearchStatus::budget_exceeded: return "budget-exceeded";
    }
    return "?";
}

enum class Branching {
    smallest_difference,  // always branch on the smallest uncovered difference
    hybrid,               // as above, then fewest candidate blocks near the leaves
};

struct SearchStrategy {
    Branching branching = Branching::smallest_difference;
    std::size_t mrv_threshold = 80;  // hybrid: switch when this few reduced differences remain
    bool restarts = false;           // randomized candidate order with growing node caps
    std::uint64_t seed = 0;
    std::uint64_t first_restart_nodes = 100;
    double restart_growth = 1.1;
    bool check_invariants = false;   // audit the coverage state at every node

    bool operator==(const SearchStrategy&) const = default;
};

/// Search state sufficient to continue an interrupted CDF search.
///
/// In exhaustive mode the root node's candidates split the tree into tasks.
/// `frontier` holds interrupted tasks as candidate-index paths (the first
/// entry is the root candidate); each resumes at its path and continues with
/// everything after it inside the same root subtree. `pending_roots` are
/// untouched root subtrees. In restart mode only `next_restart` matters.
struct SearchCheckpoint {
    std::string instance_hash;
    Residue v = 1;
    Residue h = 1;
    std::size_t k = 4;
    std::vector<Block> frame;
    SearchStrategy strategy;
    std::vector<std::vector<std::uint32_t>> frontier;
    std::vector<std::uint32_t> pending_roots;
    std::uint64_t next_restart = 0;
    std::uint64_t nodes = 0;

    bool operator==(const SearchCheckpoint&) const = default;
};

struct SearchProgress {
    std::uint64_t nodes = 0;
    double seconds = 0;
    std::size_t depth = 0;
    std::uint64_t restart = 0;
};

using ProgressFn = std::function<void(const SearchProgress&)>;

struct SearchOptions {
    SearchBudget budget;
    SearchStrategy strategy;
    ProgressFn progress;
};

struct SearchOutcome {
    SearchStatus status = SearchStatus::budget_exceeded;
    std::optional<Family> family;
    std::optional<DiffMatrix> matrix;
    std::uint64_t nodes = 0;
    std::optional<SearchCheckpoint> checkpoint;  // CDF searches that ran out of budget
};

namespace detail {

inline std::string fnv1a64(std::string_view text) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out = "fnv1a64:";
    for (int shift = 60; shift >= 0; shift -= 4) out += kHex[(hash >> shift) & 0xf];
    return out;
}

inline std::string instance_hash(Residue v, Residue h, std::size_t k, const std::vector<Block>& frame,
                                 const SearchStrategy& s) {
    std::string key = "cdf:" + std::to_string(v) + ":" + std::to_string(h) + ":" + std::to_string(k) + ":";
    for (const Block& b : frame) key += to_string(b);
    key += ":" + std::to_string(static_cast<int>(s.branching)) + ":" + std::to_string(s.mrv_threshold) +
           ":" + std::to_string(s.restarts) + ":" + std::to_string(s.seed) + ":" +
           std::to_string(s.first_restart_nodes) + ":" + std::to_string(s.restart_growth);
    return fnv1a64(key);
}

/// Node accounting, limits and cancellation shared by all workers.
class SearchControl {
public:
    SearchControl(const SearchBudget& budget, ProgressFn progress, std::uint64_t start_nodes)
        : budget_(budget), progress_(std::move(progress)), start_nodes_(start_nodes), nodes_(start_nodes),
          start_(std::chrono::steady_clock::now()) {}

    /// Counts one node. False once any limit is hit or another worker stopped.
    bool tick(std::size_t depth = 0, std::uint64_t restart = 0) {
        if (stop_.load(std::memory_order_relaxed)) return false;
        const std::uint64_t n = nodes_.fetch_add(1, std::memory_order_relaxed) + 1;
        if (budget_.max_nodes && n - start_nodes_ > *budget_.max_nodes) {
            nodes_.fetch_sub(1, std::memory_order_relaxed);
            exhausted_.store(true);
            stop_.store(true);
            return false;
        }
        if ((n & 0xff) == 0 && budget_.time_limit_seconds && elapsed() > *budget_.time_limit_seconds) {
            exhausted_.store(true);
            stop_.store(true);
            return false;
        }
        if (progress_ && (n & 0x3fff) == 0) {
            std::lock_guard lock(progress_mutex_);
            progress_(SearchProgress{n, elapsed(), depth, restart});
        }
        return true;
    }

    void stop() { stop_.store(true); }
    bool budget_exhausted() const { return exhausted_.load(); }
    std::uint64_t nodes() const { return nodes_.load(); }
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    SearchBudget budget_;
    ProgressFn progress_;
    std::mutex progress_mutex_;
    std::uint64_t start_nodes_;  // carried over from a checkpoint; the node limit applies to this run
    std::atomic<std::uint64_t> nodes_;
    std::atomic<bool> stop_{false};
    std::atomic<bool> exhausted_{false};
    std::chrono::steady_clock::time_point start_;
};

/// Immutable description of a CDF search instance, shared by workers.
struct CdfInstance {
    Residue v = 1;
    Residue h = 1;
    std::size_t k = 4;
    std::vector<Block> frame;
    std::int32_t half = 0;                     // reduced differences live in [1, half]
    std::vector<std::uint8_t> allowed;         // by reduced difference
    std::vector<std::uint8_t> frame_covered;   // by reduced difference
    std::size_t frame_uncovered = 0;           // allowed reduced differences left after the frame
};

inline CdfInstance make_cdf_instance(Residue v, Residue h, std::size_t k, std::vector<Block> frame) {
    if (v < 1 || h < 1 || v % h != 0)
        throw StructuralError("subgroup order " + std::to_string(h) + " does not divide " +
                              std::to_string(v));
    if (k < 2) throw InvalidArgument("block size must be at least 2");
    if (k > 64) throw InvalidArgument("block size above 64 is not supported by search");
    if (v > (Residue{1} << 30)) throw InvalidArgument("group order too large for search");
    CdfInstance in;
    in.v = v;
    in.h = h;
    in.k = k;
    in.half = static_cast<std::int32_t>(v / 2);
    const Residue g = v / h;
    in.allowed.assign(static_cast<std::size_t>(in.half) + 1, 0);
    for (Residue r = 1; r <= in.half; ++r)
        in.allowed[static_cast<std::size_t>(r)] = (r % g != 0) && (2 * r != v);
    in.frame_covered.assign(in.allowed.size(), 0);
    for (const Block& b : frame) {
        if (b.size() != k)
            throw StructuralError("frame block " + to_string(b) + " does not have size " + std::to_string(k));
        b.check_in(v);
        for (std::size_t i = 0; i < b.size(); ++i)
            for (std::size_t j = i + 1; j < b.size(); ++j) {
                const Residue d = mod(b[j] - b[i], v);
                const auto r = static_cast<std::size_t>(std::min(d, v - d));
                if (!in.allowed[r])
                    throw StructuralError("frame block " + to_string(b) + " has forbidden difference " +
                                          std::to_string(r));
                if (in.frame_covered[r])
                    throw StructuralError("frame repeats difference " + std::to_string(r));
                in.frame_covered[r] = 1;
            }
    }
    for (std::size_t r = 1; r < in.allowed.size(); ++r)
        in.frame_uncovered += in.allowed[r] && !in.frame_covered[r];
    in.frame = std::move(frame);
    return in;
}

/// One worker's mutable search state.
class CdfEngine {
public:
    enum class Result { found, unsat, stopped, capped };

    CdfEngine(const CdfInstance& in, const SearchStrategy& strategy, SearchControl& control)
        : in_(in), strategy_(strategy), control_(control), v_(static_cast<std::int32_t>(in.v)),
          pairs_per_block_(in.k * (in.k - 1) / 2) {
        cands_.resize(in.frame_uncovered / pairs_per_block_ + 2);
        reset();
    }

    void reset() {
        covered_ = in_.frame_covered;
        uncovered_ = in_.frame_uncovered;
        placed_.clear();
        diff_stack_.clear();
        path_.clear();
    }

    std::size_t uncovered() const noexcept { return uncovered_; }

    /// Candidate blocks at the current node (flat, stride k); empty vector and
    /// false when some uncovered difference has no candidate at all.
    bool branch(std::vector<std::int32_t>& out) {
        out.clear();
        const std::int32_t d = choose_difference();
        if (d < 0) return false;
        enumerate(d, [&](const std::int32_t* blk) {
            out.insert(out.end(), blk, blk + in_.k);
            return true;
        });
        return true;
    }

    /// Exhaustive subtree under root candidate `root`; `resume` (may be empty)
    /// continues from a stored path whose first entry equals `root`.
    Result run_task(const std::vector<std::int32_t>& root_cands, std::uint32_t root,
                    const std::vector<std::uint32_t>& resume) {
        reset();
        rng_active_ = false;
        local_cap_ = UINT64_MAX;
        resume_ = resume;
        resuming_ = resume.size() > 1;
        apply(&root_cands[static_cast<std::size_t>(root) * in_.k]);
        path_.push_back(root);
        const Result r = dfs(1);
        if (r == Result::unsat) {
            undo();
            path_.pop_back();
        }
        return r;
    }

    /// Whole tree from the root with a shuffled candidate order and a node cap.
    Result run_restart(std::uint64_t seed, std::uint64_t cap, std::uint64_t restart_index) {
        reset();
        rng_.seed(seed);
        rng_active_ = true;
        local_cap_ = cap;
        local_nodes_ = 0;
        restart_index_ = restart_index;
        resume_.clear();
        resuming_ = false;
        return dfs(0);
    }

    /// Whole tree from the root in deterministic order, no cap.
    Result run_plain() {
        reset();
        rng_active_ = false;
        local_cap_ = UINT64_MAX;
        resume_.clear();
        resuming_ = false;
        return dfs(0);
    }

    std::vector<Block> solution() const {
        std::vector<Block> out = in_.frame;
        for (const auto& b : placed_) out.emplace_back(std::vector<Residue>(b.begin(), b.end()));
        return out;
    }

    const std::vector<std::uint32_t>& path() const noexcept { return path_; }

private:
    std::int32_t reduce(std::int32_t x) const noexcept {
        x %= v_;
        if (x < 0) x += v_;
        return std::min(x, v_ - x);
    }
    bool usable(std::int32_t r) const noexcept {
        return in_.allowed[static_cast<std::size_t>(r)] && !covered_[static_cast<std::size_t>(r)];
    }

    std::int32_t smallest_uncovered() const {
        for (std::int32_t r = 1; r <= in_.half; ++r)
            if (usable(r)) return r;
        return -1;
    }

    /// Difference to branch on, or -1 at a dead end.
    std::int32_t choose_difference() {
        if (strategy_.branching == Branching::smallest_difference || uncovered_ > strategy_.mrv_threshold)
            return smallest_uncovered();
        std::int32_t best = -1;
        std::size_t best_count = SIZE_MAX;
        for (std::int32_t r = 1; r <= in_.half; ++r) {
            if (!usable(r)) continue;
            std::size_t count = 0;
            enumerate(r, [&](const std::int32_t*) { return ++count < best_count; });
            if (count < best_count) {
                best_count = count;
                best = r;
                if (count == 0) return -1;
            }
        }
        return best;
    }

    /// Calls sink(block) for every admissible block {0, d, y_1 < ... < y_{k-2}};
    /// stops early when sink returns false.
    template <class Sink>
    void enumerate(std::int32_t d, Sink&& sink) {
        ys_.clear();
        for (std::int32_t y = 1; y < v_; ++y) {
            if (y == d) continue;
            const std::int32_t r1 = reduce(y), r2 = reduce(y - d);
            if (usable(r1) && usable(r2) && r1 != r2 && r1 != d && r2 != d) ys_.push_back(y);
        }
        block_.assign(in_.k, 0);
        block_[0] = 0;
        block_[1] = d;
        block_diffs_.assign(1, d);
        if (in_.k == 2) {
            sink(block_.data());
            return;
        }
        extend(2, 0, sink);
    }

    template <class Sink>
    bool extend(std::size_t filled, std::size_t start, Sink& sink) {
        if (filled == in_.k) return sink(block_.data());
        std::int32_t fresh[64];
        for (std::size_t idx = start; idx < ys_.size(); ++idx) {
            const std::int32_t y = ys_[idx];
            bool ok = true;
            for (std::size_t j = 0; j < filled && ok; ++j) {
                const std::int32_t r = reduce(y - block_[j]);
                if (!usable(r)) {
                    ok = false;
                    break;
                }
                for (std::int32_t seen : block_diffs_)
                    if (seen == r) ok = false;
                for (std::size_t q = 0; q < j && ok; ++q)
                    if (fresh[q] == r) ok = false;
                fresh[j] = r;
            }
            if (!ok) continue;
            block_[filled] = y;
            const std::size_t mark = block_diffs_.size();
            block_diffs_.insert(block_diffs_.end(), fresh, fresh + filled);
            const bool more = extend(filled + 1, idx + 1, sink);
            block_diffs_.resize(mark);
            if (!more) return false;
        }
        return true;
    }

    void apply(const std::int32_t* blk) {
        const std::size_t base = diff_stack_.size();
        for (std::size_t i = 0; i < in_.k; ++i)
            for (std::size_t j = i + 1; j < in_.k; ++j) {
                const std::int32_t r = reduce(blk[j] - blk[i]);
                covered_[static_cast<std::size_t>(r)] = 1;
                diff_stack_.push_back(r);
            }
        uncovered_ -= diff_stack_.size() - base;
        std::vector<std::int32_t> b(blk, blk + in_.k);
        std::sort(b.begin(), b.end());
        placed_.push_back(std::move(b));
    }

    void undo() {
        for (std::size_t i = 0; i < pairs_per_block_; ++i) {
            covered_[static_cast<std::size_t>(diff_stack_.back())] = 0;
            diff_stack_.pop_back();
        }
        uncovered_ += pairs_per_block_;
        placed_.pop_back();
    }

    void audit() const {
        std::size_t covered = 0;
        for (std::size_t r = 1; r < covered_.size(); ++r)
            if (covered_[r]) {
                if (!in_.allowed[r]) throw std::logic_error("search covered a subgroup difference");
                ++covered;
            }
        const std::size_t blocks = in_.frame.size() + placed_.size();
        if (2 * covered != in_.k * (in_.k - 1) * blocks)
            throw std::logic_error("search coverage count out of step with placed blocks");
    }

    Result dfs(std::size_t depth) {
        if (strategy_.check_invariants) audit();
        if (uncovered_ == 0) return Result::found;
        if (!control_.tick(depth, restart_index_)) return Result::stopped;
        if (rng_active_ && ++local_nodes_ > local_cap_) return Result::capped;

        std::vector<std::int32_t>& cands = cands_.at(depth);
        if (!branch(cands)) return Result::unsat;
        const std::size_t count = cands.size() / in_.k;
        if (rng_active_) shuffle_blocks(cands, count);

        std::size_t start = 0;
        if (resuming_ && depth < resume_.size()) {
            start = resume_[depth];
            if (start >= count && count > 0) throw Error("checkpoint path does not match this instance");
        } else {
            resuming_ = false;
        }
        for (std::size_t i = start; i < count; ++i) {
            if (i != start) resuming_ = false;
            apply(&cands[i * in_.k]);
            path_.push_back(static_cast<std::uint32_t>(i));
            const Result r = dfs(depth + 1);
            if (r != Result::unsat) return r;
            path_.pop_back();
            undo();
        }
        resuming_ = false;
        return Result::unsat;
    }

    void shuffle_blocks(std::vector<std::int32_t>& cands, std::size_t count) {
        for (std::size_t i = count; i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(rng_() % i);
            if (j != i - 1)
                std::swap_ranges(cands.begin() + static_cast<std::ptrdiff_t>((i - 1) * in_.k),
                                 cands.begin() + static_cast<std::ptrdiff_t>(i * in_.k),
                                 cands.begin() + static_cast<std::ptrdiff_t>(j * in_.k));
        }
    }

    const CdfInstance& in_;
    SearchStrategy strategy_;
    SearchControl& control_;
    std::int32_t v_;
    std::size_t pairs_per_block_;

    std::vector<std::uint8_t> covered_;
    std::size_t uncovered_ = 0;
    std::vector<std::vector<std::int32_t>> placed_;
    std::vector<std::int32_t> diff_stack_;
    std::vector<std::uint32_t> path_;
    std::vector<std::vector<std::int32_t>> cands_;

    std::vector<std::int32_t> ys_;
    std::vector<std::int32_t> block_;
    std::vector<std::int32_t> block_diffs_;

    std::vector<std::uint32_t> resume_;
    bool resuming_ = false;

    std::mt19937_64 rng_;
    bool rng_active_ = false;
    std::uint64_t local_cap_ = UINT64_MAX;
    std::uint64_t local_nodes_ = 0;
    std::uint64_t restart_index_ = 0;
};

inline std::uint64_t restart_cap(const SearchStrategy& s, std::uint64_t index) {
    const double cap = static_cast<double>(s.first_restart_nodes) * std::pow(s.restart_growth, static_cast<double>(index));
    return cap > 1e18 ? UINT64_MAX : static_cast<std::uint64_t>(cap);
}

inline std::uint64_t restart_seed(std::uint64_t seed, std::uint64_t index) {
    return seed * 0x9e3779b97f4a7c15ull + index;
}

inline Family make_family(const CdfInstance& in, std::vector<Block> blocks) {
    return Family{in.v, in.h, in.k, std::move(blocks)};
}

inline SearchOutcome finish_found(const CdfInstance& in, std::vector<Block> blocks, std::uint64_t nodes) {
    Family f = make_family(in, std::move(blocks));
    const Certificate cert = verify_cdf(f);
    if (!cert.valid) throw std::logic_error("search produced an invalid family: " + cert.witness->condition);
    return SearchOutcome{SearchStatus::found, std::move(f), std::nullopt, nodes, std::nullopt};
}

inline SearchOutcome run_exhaustive(const CdfInstance& in, const SearchOptions& opt,
                                    const SearchCheckpoint* resume) {
    SearchControl control(opt.budget, opt.progress, resume ? resume->nodes : 0);
    const std::string hash = instance_hash(in.v, in.h, in.k, in.frame, opt.strategy);

    SearchCheckpoint cp;
    cp.instance_hash = hash;
    cp.v = in.v;
    cp.h = in.h;
    cp.k = in.k;
    cp.frame = in.frame;
    cp.strategy = opt.strategy;

    CdfEngine root(in, opt.strategy, control);
    if (root.uncovered() == 0) return finish_found(in, in.frame, control.nodes());

    std::vector<std::int32_t> root_cands;
    std::deque<std::vector<std::uint32_t>> tasks;  // resume paths; a single entry means a fresh root
    if (resume) {
        if (!root.branch(root_cands)) root_cands.clear();
        for (const auto& p : resume->frontier) tasks.push_back(p);
        for (std::uint32_t r : resume->pending_roots) tasks.push_back({r});
    } else {
        if (!control.tick()) {
            cp.nodes = control.nodes();
            return SearchOutcome{SearchStatus::budget_exceeded, std::nullopt, std::nullopt, control.nodes(), cp};
        }
        if (!root.branch(root_cands))
            return SearchOutcome{SearchStatus::exhausted_unsat, std::nullopt, std::nullopt, control.nodes(), std::nullopt};
        for (std::uint32_t r = 0; r < root_cands.size() / in.k; ++r) tasks.push_back({r});
    }
    const std::size_t root_count = root_cands.size() / in.k;
    for (const auto& t : tasks)
        if (t.empty() || t[0] >= root_count) throw Error("checkpoint does not match this instance");

    std::mutex mu;
    std::optional<std::vector<Block>> found;
    std::vector<std::vector<std::uint32_t>> interrupted;

    auto worker = [&] {
        CdfEngine engine(in, opt.strategy, control);
        for (;;) {
            std::vector<std::uint32_t> task;
            {
                std::lock_guard lock(mu);
                if (found || tasks.empty()) return;
                task = std::move(tasks.front());
                tasks.pop_front();
            }
            const auto r = engine.run_task(root_cands, task[0], task);
            std::lock_guard lock(mu);
            if (r == CdfEngine::Result::found) {
                if (!found) found = engine.solution();
                control.stop();
                return;
            }
            if (r == CdfEngine::Result::stopped) {
                interrupted.push_back(engine.path());
                return;
            }
        }
    };

    const unsigned workers = std::max(1u, opt.budget.workers);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    if (found) return finish_found(in, std::move(*found), control.nodes());
    if (interrupted.empty() && tasks.empty())
        return SearchOutcome{SearchStatus::exhausted_unsat, std::nullopt, std::nullopt, control.nodes(), std::nullopt};

    std::sort(interrupted.begin(), interrupted.end());
    cp.frontier = std::move(interrupted);
    for (auto& t : tasks) {
        if (t.size() == 1) cp.pending_roots.push_back(t[0]);
        else cp.frontier.push_back(std::move(t));
    }
    cp.nodes = control.nodes();
    return SearchOutcome{SearchStatus::budget_exceeded, std::nullopt, std::nullopt, control.nodes(), std::move(cp)};
}

inline SearchOutcome run_restarts(const CdfInstance& in, const SearchOptions& opt, const SearchCheckpoint* resume) {
    SearchControl control(opt.budget, opt.progress, resume ? resume->nodes : 0);
    SearchCheckpoint cp;
    cp.instance_hash = instance_hash(in.v, in.h, in.k, in.frame, opt.strategy);
    cp.v = in.v;
    cp.h = in.h;
    cp.k = in.k;
    cp.frame = in.frame;
    cp.strategy = opt.strategy;
    if (in.frame_uncovered == 0) return finish_found(in, in.frame, control.nodes());

    std::atomic<std::uint64_t> next{resume ? resume->next_restart : 0};
    std::mutex mu;
    std::optional<std::vector<Block>> found;
    bool unsat = false;
    std::vector<std::uint64_t> unfinished;

    auto worker = [&] {
        CdfEngine engine(in, opt.strategy, control);
        for (;;) {
            const std::uint64_t index = next.fetch_add(1);
            const auto r = engine.run_restart(restart_seed(opt.strategy.seed, index),
                                              restart_cap(opt.strategy, index), index);
            std::lock_guard lock(mu);
            switch (r) {
                case CdfEngine::Result::found:
                    if (!found) found = engine.solution();
                    control.stop();
                    return;
                case CdfEngine::Result::unsat:  // a restart that finishes under its cap is complete
                    unsat = true;
                    control.stop();
                    return;
                case CdfEngine::Result::stopped:
                    unfinished.push_back(index);
                    return;
                case CdfEngine::Result::capped:
                    break;
            }
        }
    };

    const unsigned workers = std::max(1u, opt.budget.workers);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    if (found) return finish_found(in, std::move(*found), control.nodes());
    if (unsat)
        return SearchOutcome{SearchStatus::exhausted_unsat, std::nullopt, std::nullopt, control.nodes(), std::nullopt};
    cp.next_restart = unfinished.empty() ? next.load() : *std::min_element(unfinished.begin(), unfinished.end());
    cp.nodes = control.nodes();
    return SearchOutcome{SearchStatus::budget_exceeded, std::nullopt, std::nullopt, control.nodes(), std::move(cp)};
}

}  // namespace detail

/// Extends `frame` to a (v, h, k, 1)-CDF. Throws StructuralError if the frame
/// repeats a difference or touches the subgroup.
inline SearchOutcome complete_family(Residue v, Residue h, std::size_t k, std::vector<Block> frame,
                                     const SearchOptions& options = {}) {
    const detail::CdfInstance in = detail::make_cdf_instance(v, h, k, std::move(frame));
    return options.strategy.restarts ? detail::run_restarts(in, options, nullptr)
                                     : detail::run_exhaustive(in, options, nullptr);
}

inline SearchOutcome find_cdf(Residue v, Residue h, std::size_t k, const SearchOptions& options = {}) {
    return complete_family(v, h, k, {}, options);
}

/// Continues an interrupted CDF search with a fresh budget.
inline SearchOutcome resume_search(const SearchCheckpoint& cp, const SearchBudget& budget,
                                   ProgressFn progress = {}) {
    const detail::CdfInstance in = detail::make_cdf_instance(cp.v, cp.h, cp.k, cp.frame);
    if (detail::instance_hash(cp.v, cp.h, cp.k, cp.frame, cp.strategy) != cp.instance_hash)
        throw Error("checkpoint instance hash does not match its contents");
    const SearchOptions opt{budget, cp.strategy, std::move(progress)};
    return cp.strategy.restarts ? detail::run_restarts(in, opt, &cp) : detail::run_exhaustive(in, opt, &cp);
}

inline constexpr std::size_t kMaxExhaustiveBlocks = 4;

/// Complete enumeration for small instances, as a nonexistence certificate.
/// Refuses instances needing more than kMaxExhaustiveBlocks base blocks.
inline SearchOutcome exhaustive_nonexistence(Residue v, Residue h, std::size_t k) {
    if (v < 1 || h < 1 || v % h != 0)
        throw StructuralError("subgroup order " + std::to_string(h) + " does not divide " + std::to_string(v));
    if (k < 2) throw InvalidArgument("block size must be at least 2");
    const auto per_block = static_cast<Residue>(k * (k - 1));
    if ((v - h) / per_block > static_cast<Residue>(kMaxExhaustiveBlocks))
        throw InvalidArgument("instance needs more than " + std::to_string(kMaxExhaustiveBlocks) +
                              " base blocks; too large for an exhaustive certificate");
    SearchOptions opt;
    opt.strategy.branching = Branching::smallest_difference;
    return find_cdf(v, h, k, opt);
}

// ---------------------------------------------------------------------------
// Cyclic difference matrices

/// d_ij = i * j mod v. Needs 1..k-1 to be units modulo v.
inline DiffMatrix multiplicative_cdm(Residue v, std::size_t k) {
    if (v < 1) throw InvalidArgument("matrix order must be positive");
    for (Residue i = 1; i < static_cast<Residue>(k); ++i)
        if (std::gcd(i, v) != 1)
            throw InvalidArgument("multiplicative CDM needs gcd(v, i) = 1 for i < k; fails for v=" +
                                  std::to_string(v) + ", i=" + std::to_string(i));
    DiffMatrix m{v, std::vector<std::vector<Residue>>(k, std::vector<Residue>(static_cast<std::size_t>(v)))};
    for (std::size_t i = 0; i < k; ++i)
        for (Residue j = 0; j < v; ++j) m.rows[i][static_cast<std::size_t>(j)] = mod(static_cast<Residue>(i) * j, v);
    return m;
}

namespace detail {

/// Column-by-column search with row 0 all zeros, row 1 the identity and
/// column 0 all zeros; all three normalizations preserve existence.
class CdmEngine {
public:
    CdmEngine(Residue v, std::size_t k, SearchControl& control)
        : v_(v), k_(k), control_(control), rows_(k, std::vector<Residue>(static_cast<std::size_t>(v), 0)),
          used_(k * k, std::vector<std::uint8_t>(static_cast<std::size_t>(v), 0)) {
        for (Residue j = 0; j < v && k > 1; ++j) rows_[1][static_cast<std::size_t>(j)] = j;
        for (std::size_t x = 0; x < k; ++x)
            for (std::size_t y = x + 1; y < k; ++y) {
                used(x, y)[0] = 1;
                if (x == 0 && y == 1)
                    for (Residue j = 1; j < v; ++j) used(0, 1)[static_cast<std::size_t>(mod(-j, v))] = 1;
            }
    }

    bool run() { return k_ < 3 || v_ == 1 || dfs(0); }

    DiffMatrix matrix() const { return DiffMatrix{v_, rows_}; }

private:
    std::vector<std::uint8_t>& used(std::size_t x, std::size_t y) { return used_[x * k_ + y]; }

    bool dfs(std::size_t cell) {
        const std::size_t free_rows = k_ - 2;
        const std::size_t col = 1 + cell / free_rows;
        if (col >= static_cast<std::size_t>(v_)) return true;
        if (!control_.tick(cell)) return false;
        const std::size_t row = 2 + cell % free_rows;
        for (Residue val = 0; val < v_; ++val) {
            bool ok = true;
            std::size_t x = 0;
            for (; x < row; ++x)
                if (used(x, row)[static_cast<std::size_t>(mod(rows_[x][col] - val, v_))]) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            for (x = 0; x < row; ++x) used(x, row)[static_cast<std::size_t>(mod(rows_[x][col] - val, v_))] = 1;
            rows_[row][col] = val;
            if (dfs(cell + 1)) return true;
            for (x = 0; x < row; ++x) used(x, row)[static_cast<std::size_t>(mod(rows_[x][col] - val, v_))] = 0;
            if (control_.budget_exhausted()) return false;
        }
        rows_[row][col] = 0;
        return false;
    }

    Residue v_;
    std::size_t k_;
    SearchControl& control_;
    std::vector<std::vector<Residue>> rows_;
    std::vector<std::vector<std::uint8_t>> used_;
};

/// Randomized search for a CDM with d(-j) = -d(j), v odd, under the same
/// normalization: cells (r, j) and (r, v - j) are filled together, always at
/// the open cell with the fewest admissible values. The symmetry is a
/// restriction, so a run that exhausts its tree proves nothing in general.
class CdmRestartEngine {
public:
    CdmRestartEngine(Residue v, std::size_t k, SearchControl& control)
        : v_(static_cast<std::int32_t>(v)), k_(k), control_(control) {}

    enum class Result { found, exhausted, stopped, capped };

    Result run(std::uint64_t seed, std::uint64_t cap) {
        rng_.seed(seed);
        cap_ = cap;
        local_ = 0;
        const auto n = static_cast<std::size_t>(v_);
        rows_.assign(k_, std::vector<std::int32_t>(n, 0));
        set_.assign(k_, std::vector<std::uint8_t>(n, 0));
        used_.assign(k_ * k_, std::vector<std::uint8_t>(n, 0));
        for (std::size_t j = 0; j < n; ++j) {
            rows_[1][j] = static_cast<std::int32_t>(j);
            set_[0][j] = set_[1][j] = 1;
        }
        for (std::size_t r = 2; r < k_; ++r) set_[r][0] = 1;
        for (std::size_t x = 0; x < k_; ++x)
            for (std::size_t y = x + 1; y < k_; ++y) used_[x * k_ + y][0] = 1;
        return dfs((k_ - 2) * (n / 2));
    }

    DiffMatrix matrix() const {
        DiffMatrix m{v_, {}};
        for (const auto& r : rows_) m.rows.emplace_back(r.begin(), r.end());
        return m;
    }

private:
    std::int32_t md(std::int32_t x) const noexcept {
        x %= v_;
        return x < 0 ? x + v_ : x;
    }

    /// Difference (lower row minus upper row) that x at (r, j) creates with row o.
    std::int32_t diff(std::size_t r, std::size_t o, std::size_t j, std::int32_t x) const {
        return o < r ? md(rows_[o][j] - x) : md(x - rows_[o][j]);
    }
    std::vector<std::uint8_t>& used(std::size_t r, std::size_t o) {
        return used_[std::min(r, o) * k_ + std::max(r, o)];
    }
    const std::vector<std::uint8_t>& used(std::size_t r, std::size_t o) const {
        return used_[std::min(r, o) * k_ + std::max(r, o)];
    }

    bool fits(std::size_t r, std::size_t j, std::int32_t x) const {
        for (std::size_t o = 0; o < k_; ++o) {
            if (o == r || !set_[o][j]) continue;
            const std::int32_t d = diff(r, o, j, x);
            const auto& u = used(r, o);
            if (u[static_cast<std::size_t>(d)] || u[static_cast<std::size_t>(md(-d))]) return false;
        }
        return true;
    }

    void mark(std::size_t r, std::size_t j, std::int32_t x, std::uint8_t on) {
        for (std::size_t o = 0; o < k_; ++o) {
            if (o == r || !set_[o][j]) continue;
            const std::int32_t d = diff(r, o, j, x);
            auto& u = used(r, o);
            u[static_cast<std::size_t>(d)] = on;
            u[static_cast<std::size_t>(md(-d))] = on;
        }
    }

    Result dfs(std::size_t left) {
        if (left == 0) return Result::found;
        if (!control_.tick(left)) return Result::stopped;
        if (++local_ > cap_) return Result::capped;
        std::size_t br = 0, bj = 0, best = SIZE_MAX;
        for (std::size_t r = 2; r < k_; ++r)
            for (std::size_t j = 1; j <= static_cast<std::size_t>(v_ / 2); ++j) {
                if (set_[r][j]) continue;
                std::size_t c = 0;
                for (std::int32_t x = 0; x < v_ && c < best; ++x) c += fits(r, j, x);
                if (c < best) {
                    best = c;
                    br = r;
                    bj = j;
                    if (c == 0) return Result::exhausted;
                }
            }
        std::vector<std::int32_t> vals;
        for (std::int32_t x = 0; x < v_; ++x)
            if (fits(br, bj, x)) vals.push_back(x);
        std::shuffle(vals.begin(), vals.end(), rng_);
        const std::size_t mirror = static_cast<std::size_t>(v_) - bj;
        for (std::int32_t x : vals) {
            mark(br, bj, x, 1);
            rows_[br][bj] = x;
            rows_[br][mirror] = md(-x);
            set_[br][bj] = set_[br][mirror] = 1;
            const Result res = dfs(left - 1);
            if (res != Result::exhausted) return res;
            set_[br][bj] = set_[br][mirror] = 0;
            mark(br, bj, x, 0);
        }
        return Result::exhausted;
    }

    std::int32_t v_;
    std::size_t k_;
    SearchControl& control_;
    std::vector<std::vector<std::int32_t>> rows_;
    std::vector<std::vector<std::uint8_t>> set_;
    std::vector<std::vector<std::uint8_t>> used_;
    std::mt19937_64 rng_;
    std::uint64_t cap_ = 0, local_ = 0;
};

}  // namespace detail

/// (v, k, 1)-CDM search. The default strategy is the complete column-by-column
/// enumeration. With strategy.restarts, odd orders first try the randomized
/// negation-symmetric engine, which finds large matrices much sooner, and
/// fall back to the complete enumeration if that restricted space runs dry.
inline SearchOutcome find_cdm(Residue v, std::size_t k, const SearchOptions& options = {}) {
    if (v < 1) throw InvalidArgument("matrix order must be positive");
    if (k > 2 && v > (Residue{1} << 20)) throw InvalidArgument("matrix order too large for search");
    detail::SearchControl control(options.budget, options.progress, 0);
    auto found = [&](DiffMatrix m) {
        if (!verify_dm(m).valid) throw std::logic_error("CDM search produced an invalid matrix");
        return SearchOutcome{SearchStatus::found, std::nullopt, std::move(m), control.nodes(), std::nullopt};
    };
    auto failed = [&](bool exhausted) {
        const auto status = exhausted ? SearchStatus::exhausted_unsat : SearchStatus::budget_exceeded;
        return SearchOutcome{status, std::nullopt, std::nullopt, control.nodes(), std::nullopt};
    };
    if (options.strategy.restarts && k >= 3 && v % 2 == 1 && v > 1) {
        detail::CdmRestartEngine engine(v, k, control);
        for (std::uint64_t i = 0;; ++i) {
            const auto r = engine.run(detail::restart_seed(options.strategy.seed, i),
                                      detail::restart_cap(options.strategy, i));
            if (r == detail::CdmRestartEngine::Result::found) return found(engine.matrix());
            if (r == detail::CdmRestartEngine::Result::stopped) return failed(false);
            if (r == detail::CdmRestartEngine::Result::exhausted) break;
        }
    }
    detail::CdmEngine engine(v, k, control);
    if (engine.run()) return found(engine.matrix());
    return failed(!control.budget_exhausted());
}

}  // namespace cdforge
