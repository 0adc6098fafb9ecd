// Acceptance run: one PASS/FAIL line per criterion. Criteria to run are given
// as arguments (default 1-8); 9 is the non-gating stretch search.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.hpp"

using namespace cdforge;

namespace {

// Pinned limits, in seconds.
constexpr double kCatalogSeconds = 1.0;
constexpr double kFieldSeconds = 5.0;
constexpr double kFrameSeconds = 30.0;
constexpr double kInstanceSeconds = 600.0;
constexpr double kSteinerSeconds = 60.0;
constexpr double kStretchSeconds = 3.0 * 3600.0;
constexpr Residue kMaxSearchedCdm = 63;  // largest searched CDM order produced within a minute

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct Outcome {
    bool pass = true;
    std::string detail;
    std::vector<std::string> problems;

    void fail(const std::string& what) {
        pass = false;
        if (problems.size() < 8) problems.push_back(what);
    }
};

std::string fmt(double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f s", s);
    return buf;
}

std::string pair_text(Residue a, Residue b) {
    return "(" + std::to_string(a) + "," + std::to_string(b) + ")";
}

struct SweepEntry {
    Residue g, h;
    Rule rule;
    double seconds;
    Family family;
};

std::optional<std::vector<SweepEntry>> g_sweep;
Outcome g_sweep_outcome;

const std::vector<SweepEntry>& sweep() {
    if (g_sweep) return *g_sweep;
    g_sweep.emplace();
    Outcome& o = g_sweep_outcome;
    double worst = 0;
    std::string worst_at;
    for (Residue h : {1, 2, 3, 4, 6})
        for (Residue g = 1; g * h <= 300; ++g) {
            if (admissible(g, h).verdict != Existence::exists) continue;
            const PlanNode p = plan(g, h);
            ExecuteOptions opt;
            opt.budget.time_limit_seconds = kInstanceSeconds;
            const Stopwatch w;
            try {
                Family f = execute(p, opt);
                const double s = w.seconds();
                if (s > worst) worst = s, worst_at = pair_text(g, h);
                if (!verify_cdf(f).valid || !oracle::is_cdf(f) || f.v != g * h || f.h != h)
                    o.fail(pair_text(g, h) + " produced an invalid family");
                else if (s > kInstanceSeconds)
                    o.fail(pair_text(g, h) + " took " + fmt(s));
                else
                    g_sweep->push_back({g, h, p.rule, s, std::move(f)});
            } catch (const std::exception& e) {
                o.fail(pair_text(g, h) + " " + to_string(p.rule) + ": " + e.what());
            }
        }
    o.detail = std::to_string(g_sweep->size()) + " instances, slowest " + worst_at + " " + fmt(worst);
    return *g_sweep;
}

Outcome catalog_fidelity() {
    Outcome o;
    const std::vector<std::pair<Residue, Residue>> expected{
        {25, 2}, {55, 2}, {85, 2}, {21, 3}, {33, 3}, {45, 3}, {49, 3},
        {57, 3}, {69, 3}, {21, 6}, {33, 6}, {7, 12}};
    const Stopwatch w;
    for (auto [g, h] : expected) {
        const auto f = catalog_lookup(g, h);
        if (!f) o.fail(pair_text(g, h) + " missing");
        else if (!verify_cdf(*f).valid) o.fail(pair_text(g, h) + " does not verify");
    }
    const double s = w.seconds();
    if (s >= kCatalogSeconds) o.fail("took " + fmt(s));
    o.detail = std::to_string(expected.size()) + " families in " + fmt(s);
    return o;
}

Outcome field_constructions() {
    Outcome o;
    int n2 = 0, n3 = 0;
    const Stopwatch w;
    for (Residue p = 5; p < 500; ++p) {
        if (!is_prime(p)) continue;
        if (p % 6 == 1) {
            ++n2;
            if (!verify_cdf(field_cdf_2p(p)).valid) o.fail("2p family for p=" + std::to_string(p));
        }
        if (p % 4 == 1) {
            ++n3;
            if (!verify_cdf(field_cdf_3p(p)).valid) o.fail("3p family for p=" + std::to_string(p));
        }
    }
    const double s = w.seconds();
    if (s >= kFieldSeconds) o.fail("took " + fmt(s));
    o.detail = std::to_string(n2) + " (2p) + " + std::to_string(n3) + " (3p) families in " + fmt(s);
    return o;
}

Outcome frame_integrity() {
    Outcome o;
    int rows = 0;
    const Stopwatch w;
    for (int h : {2, 3, 6})
        for (int x = 0; x <= 5; ++x) {
            ++rows;
            for (Residue t = 3; t <= 40; ++t) {
                const FrameResult r = frame_blocks(h, x, t);
                const Residue v = 72 * t + 12 * x + h;
                const std::string at = "h=" + std::to_string(h) + " x=" + std::to_string(x) +
                                       " t=" + std::to_string(t);
                if (r.blocks.size() != static_cast<std::size_t>(6 * t - 18)) o.fail(at + " block count");
                const auto c = oracle::difference_counts(r.blocks, v);
                std::uint64_t residual = 0;
                for (Residue d = 0; d < v; ++d) {
                    const int n = c[static_cast<std::size_t>(d)];
                    if (n > 1) o.fail(at + " repeats difference " + std::to_string(d));
                    if (d % (v / h) == 0 && n != 0) o.fail(at + " hits the subgroup");
                    if (d % (v / h) != 0 && n == 0) ++residual;
                }
                if (residual != static_cast<std::uint64_t>(12 * (18 + x)) || r.residual.total() != residual)
                    o.fail(at + " residual size " + std::to_string(r.residual.total()));
            }
        }
    const double s = w.seconds();
    if (s >= kFrameSeconds) o.fail("took " + fmt(s));
    o.detail = std::to_string(rows) + " rows x 38 values of t in " + fmt(s);
    return o;
}

Outcome nonexistence() {
    Outcome o;
    std::ostringstream times;
    for (auto [v, h] : {std::pair<Residue, Residue>{25, 1}, {16, 4}, {28, 4}, {27, 3}, {30, 6}}) {
        const Stopwatch w;
        const SearchOutcome r = exhaustive_nonexistence(v, h, 4);
        const double s = w.seconds();
        if (r.status != SearchStatus::exhausted_unsat) o.fail(pair_text(v, h) + " " + to_string(r.status));
        if (s >= kInstanceSeconds) o.fail(pair_text(v, h) + " took " + fmt(s));
        times << pair_text(v, h) << " " << fmt(s) << ", ";
    }
    const Stopwatch w;
    SearchOptions opt;
    opt.budget.time_limit_seconds = kInstanceSeconds;
    const SearchOutcome r = find_cdm(9, 4, opt);
    const double s = w.seconds();
    if (r.status != SearchStatus::exhausted_unsat) o.fail(std::string("CDM 9: ") + to_string(r.status));
    if (s >= kInstanceSeconds) o.fail("CDM 9 took " + fmt(s));
    times << "CDM 9 " << fmt(s);
    o.detail = times.str();
    return o;
}

Outcome existence_sweep() {
    sweep();
    return g_sweep_outcome;
}

Outcome steiner() {
    Outcome o;
    const Stopwatch w;
    for (Residue v : {16, 40, 52, 76, 88, 100}) {
        try {
            const PointDesign d = steiner_1rotational(v);
            const std::string at = "v=" + std::to_string(v);
            if (static_cast<Residue>(d.blocks.size()) != v * (v - 1) / 12) o.fail(at + " block count");
            if (!verify_steiner(d).valid || !oracle::is_steiner(d)) o.fail(at + " does not verify");
            if (!detail::shift_invariant(d) || !oracle::shift_invariant(d)) o.fail(at + " not invariant under the shift");
        } catch (const std::exception& e) {
            o.fail("v=" + std::to_string(v) + ": " + e.what());
        }
    }
    try {
        steiner_1rotational(28);
        o.fail("v=28 accepted");
    } catch (const InvalidArgument&) {
    }
    const double s = w.seconds();
    if (s >= kSteinerSeconds) o.fail("took " + fmt(s));
    o.detail = "6 systems and the v=28 rejection in " + fmt(s);
    return o;
}

Outcome ooc_optimality() {
    Outcome o;
    std::size_t n = 0;
    for (const SweepEntry& e : sweep()) {
        const OocReport r = ooc_from_cdf(e.family);
        ++n;
        if (!r.certificate.valid || !r.j_optimal) o.fail(pair_text(e.g, e.h) + " not J-optimal");
    }
    if (johnson_bound(25, 4) != 2) o.fail("johnson_bound(25,4) = " + std::to_string(johnson_bound(25, 4)));
    const SearchOutcome r = find_cdf(25, 1, 4);
    if (r.status != SearchStatus::exhausted_unsat) o.fail(std::string("find_cdf(25,1,4) ") + to_string(r.status));
    o.detail = std::to_string(n) + " codes J-optimal, J(25,4)=2, (25,1) " + to_string(r.status);
    return o;
}

Outcome oracle_equivalence() {
    Outcome o;
    std::mt19937_64 rng(20261016);
    auto uniform = [&](Residue lo, Residue hi) { return std::uniform_int_distribution<Residue>(lo, hi)(rng); };

    // (a) random codes: half unconstrained, half drawn from small valid families
    std::vector<Family> small;
    for (Residue p : {7, 13, 19, 31, 37, 43}) small.push_back(field_cdf_2p(p));
    for (Residue p : {5, 13, 17}) small.push_back(field_cdf_3p(p));
    for (const auto& [key, entry] : catalog())
        if (entry.family.v <= 60) small.push_back(entry.family);
    int valid_codes = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<Block> words;
        Residue v;
        std::size_t k;
        if (trial % 2 == 0) {
            v = uniform(7, 60);
            k = static_cast<std::size_t>(uniform(3, 4));
            const int count = static_cast<int>(uniform(1, 3));
            for (int c = 0; c < count; ++c) {
                std::set<Residue> s{0};
                while (s.size() < k) s.insert(uniform(1, v - 1));
                words.push_back(Block(std::vector<Residue>(s.begin(), s.end())));
            }
        } else {
            const Family& f = small[static_cast<std::size_t>(uniform(0, static_cast<Residue>(small.size()) - 1))];
            v = f.v;
            k = f.k;
            for (const Block& b : f.blocks)
                if (uniform(0, 2) != 0) words.push_back(b);
            if (words.empty()) words.push_back(f.blocks.front());
            if (uniform(0, 3) == 0) {  // perturb one element
                std::vector<Residue> e = words.back().elements();
                e[static_cast<std::size_t>(uniform(0, static_cast<Residue>(k) - 1))] = uniform(0, v - 1);
                std::sort(e.begin(), e.end());
                if (std::adjacent_find(e.begin(), e.end()) == e.end()) words.back() = Block(e);
            }
        }
        const bool by_verifier = verify_ooc(words, v, k).valid;
        const bool by_correlation = !detail::correlation_violation(words, v).has_value();
        const bool by_oracle = oracle::is_ooc(words, v);
        valid_codes += by_oracle;
        if (by_verifier != by_correlation || by_verifier != by_oracle)
            o.fail("(a) disagreement at trial " + std::to_string(trial));
    }

    // (b) random ternary constant-weight-4 pairs
    for (int trial = 0; trial < 1000; ++trial) {
        const Residue n = uniform(4, 40);
        auto word = [&] {
            std::set<Residue> pos;
            while (pos.size() < 4) pos.insert(uniform(0, n - 1));
            SetCodeword c;
            for (Residue p : pos) c.push_back({p, static_cast<int>(uniform(1, 2))});
            std::shuffle(c.begin(), c.end(), rng);
            return c;
        };
        const SetCodeword a = word(), b = word();
        if (code_distance(a, b, 4) != oracle::hamming(oracle::to_vector(a, n), oracle::to_vector(b, n)))
            o.fail("(b) distance mismatch at trial " + std::to_string(trial));
    }

    // (c) every sweep family times every producible CDM order, output order <= 2000
    std::map<Residue, DiffMatrix> cdms;
    std::vector<Residue> skipped;
    for (Residue m = 5; m <= 2000 / 13; m += 2) {
        if (!cdm_exists(m)) continue;
        if (cdm_source_for(m) == CdmSource::search && m > kMaxSearchedCdm) {
            skipped.push_back(m);
            continue;
        }
        cdms.emplace(m, cdm_of_order(m));
        if (!oracle::is_dm(cdms.at(m))) o.fail("(c) CDM of order " + std::to_string(m) + " invalid");
    }
    std::size_t products = 0;
    for (const SweepEntry& e : sweep())
        for (const auto& [m, matrix] : cdms) {
            if (e.family.v * m > 2000) break;
            const Family p = product(e.family, matrix);
            ++products;
            if (!verify_cdf(p).valid || !oracle::is_cdf(p))
                o.fail("(c) " + pair_text(e.g, e.h) + " x CDM " + std::to_string(m) + " invalid");
        }
    std::string skipped_text;
    for (Residue m : skipped) skipped_text += " " + std::to_string(m);
    o.detail = "(a) 1000 codes, " + std::to_string(valid_codes) + " valid; (b) 1000 pairs; (c) " +
               std::to_string(products) + " products over " + std::to_string(cdms.size()) +
               " CDM orders" + (skipped.empty() ? "" : "; searched orders not produced:" + skipped_text);
    return o;
}

Outcome stretch() {
    Outcome o;
    const FrameResult frame = frame_blocks(2, 0, 5);
    SearchOptions opt;
    opt.strategy = recommended_strategy(1);
    opt.budget.time_limit_seconds = kStretchSeconds;
    const Stopwatch w;
    const SearchOutcome r = complete_family(362, 2, 4, frame.blocks, opt);
    const double s = w.seconds();
    if (r.status != SearchStatus::found) {
        o.fail(std::string("v=362 completion ") + to_string(r.status) + " after " + fmt(s));
    } else {
        const Family& f = *r.family;
        if (!verify_cdf(f).valid || !oracle::is_cdf(f) || f.blocks.size() != 30)
            o.fail("v=362 completion does not verify");
        for (const Block& b : frame.blocks)
            if (std::find(f.blocks.begin(), f.blocks.end(), b) == f.blocks.end()) o.fail("frame block dropped");
    }
    o.detail = "v=362 h=2 x=0 t=5, 18 blocks placed in " + fmt(s) + ", " + std::to_string(r.nodes) + " nodes";
    return o;
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
    bool gating;
};

}  // namespace

int main(int argc, char** argv) {
    std::setvbuf(stdout, nullptr, _IONBF, 0);
    const std::vector<Criterion> all{
        {1, "catalog fidelity", catalog_fidelity, true},
        {2, "finite-field constructions", field_constructions, true},
        {3, "frame integrity", frame_integrity, true},
        {4, "nonexistence certificates", nonexistence, true},
        {5, "existence sweep gh <= 300", existence_sweep, true},
        {6, "1-rotational Steiner systems", steiner, true},
        {7, "OOC optimality", ooc_optimality, true},
        {8, "oracle equivalence", oracle_equivalence, true},
        {9, "stretch: frame completion at v=362", stretch, false},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::stoi(argv[i]));
    if (wanted.empty()) wanted = {1, 2, 3, 4, 5, 6, 7, 8};

    int failures = 0;
    for (const Criterion& c : all) {
        if (!wanted.contains(c.id)) continue;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        std::printf("%s %d %s: %s%s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                    c.gating ? "" : " (not gating)");
        for (const std::string& p : o.problems) std::printf("     %s\n", p.c_str());
        if (!o.pass && c.gating) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
