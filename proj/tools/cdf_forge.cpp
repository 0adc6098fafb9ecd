// cdf_forge: construct, search, verify and export cyclic difference families.
//
// Exit status: 0 success/valid, 1 invalid/unsat/nonexistent/unresolved,
// 2 usage or parse error, 3 budget exceeded. Results go to stdout, progress
// and diagnostics to stderr.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "cdforge/cdforge.hpp"

namespace {

using namespace cdforge;

enum Exit { kOk = 0, kInvalid = 1, kUsage = 2, kBudget = 3 };

struct RunOptions {
    std::optional<std::uint64_t> max_nodes;
    std::optional<double> seconds;
    unsigned workers = 0;
    std::uint64_t seed = 0;
    bool quiet = false;
    std::string output;
};

void add_run_options(CLI::App* cmd, RunOptions& r) {
    cmd->add_option("--budget", r.max_nodes, "Search node limit per search leaf");
    cmd->add_option("--time", r.seconds, "Wall-clock limit in seconds per search leaf");
    cmd->add_option("--workers", r.workers, "Search threads (default: hardware concurrency)");
    cmd->add_option("--seed", r.seed, "Seed for randomized restarts");
    cmd->add_flag("--quiet", r.quiet, "No progress on stderr");
    cmd->add_option("-o,--output", r.output, "Write the result to FILE instead of stdout");
}

SearchBudget budget_of(const RunOptions& r) {
    SearchBudget b;
    b.max_nodes = r.max_nodes;
    b.time_limit_seconds = r.seconds;
    b.workers = r.workers ? r.workers : std::max(1u, std::thread::hardware_concurrency());
    return b;
}

ProgressFn progress_of(const RunOptions& r) {
    if (r.quiet) return {};
    auto last = std::make_shared<double>(-1.0);
    return [last](const SearchProgress& p) {
        if (p.seconds - *last < 1.0) return;
        *last = p.seconds;
        const double rate = p.seconds > 0 ? static_cast<double>(p.nodes) / p.seconds : 0.0;
        std::fprintf(stderr, "[search] %llu nodes, %.0f nodes/s, depth %zu, restart %llu, %.1fs\n",
                     static_cast<unsigned long long>(p.nodes), rate, p.depth,
                     static_cast<unsigned long long>(p.restart), p.seconds);
    };
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

void emit(const FamilyDocument& d, const std::string& path) { emit(serialize(d), path); }

std::string pair_text(Residue g, Residue h) { return "(" + std::to_string(g) + "," + std::to_string(h) + ")"; }

// Families leave the tool only after a passing verification.
int emit_family(const Family& f, nlohmann::json provenance, const std::string& path) {
    const Certificate cert = verify_cdf(f);
    if (!cert.valid) {
        std::cerr << "internal error: constructed family failed verification ("
                  << cert.witness->condition << ")\n";
        return kInvalid;
    }
    emit(to_document(f, std::move(provenance)), path);
    return kOk;
}

int report_search(const SearchOutcome& out, nlohmann::json provenance, const std::string& output,
                  const std::string& checkpoint_path) {
    std::cerr << "[search] " << to_string(out.status) << " after " << out.nodes << " nodes\n";
    switch (out.status) {
        case SearchStatus::found:
            provenance["nodes"] = out.nodes;
            if (out.family) return emit_family(*out.family, std::move(provenance), output);
            if (!verify_dm(*out.matrix).valid) {
                std::cerr << "internal error: matrix failed verification\n";
                return kInvalid;
            }
            emit(to_document(*out.matrix, std::move(provenance)), output);
            return kOk;
        case SearchStatus::exhausted_unsat:
            std::cout << "exhausted-unsat\n";
            return kInvalid;
        case SearchStatus::budget_exceeded:
            if (out.checkpoint && !checkpoint_path.empty()) {
                write_document(to_document(*out.checkpoint), checkpoint_path);
                std::cerr << "[search] checkpoint written to " << checkpoint_path << "\n";
            }
            std::cout << "budget-exceeded\n";
            return kBudget;
    }
    return kInvalid;
}

// ---------------------------------------------------------------------------

int cmd_admissible(Residue g, Residue h) {
    const Admissibility a = admissible(g, h);
    std::cout << to_string(a.verdict) << " (" << a.reason << ")\n";
    return a.verdict == Existence::exists ? kOk : kInvalid;
}

struct ConstructArgs {
    Residue g = 0, h = 0;
    std::string method = "auto";
    bool explain = false;
    RunOptions run;
};

int cmd_construct(const ConstructArgs& a) {
    const SearchOptions sopt{budget_of(a.run), recommended_strategy(a.run.seed), progress_of(a.run)};
    const std::string at = pair_text(a.g, a.h);
    const Residue v = a.g * a.h;

    if (a.method == "auto") {
        const PlanNode p = plan(a.g, a.h);
        if (a.explain) std::cerr << plan_text(p);
        if (!p.constructive()) {
            std::cerr << at << " " << to_string(p.rule) << ": " << p.reason << "\n";
            return kInvalid;
        }
        const Family f = execute(p, ExecuteOptions{sopt.budget, sopt.strategy, sopt.progress});
        return emit_family(f, {{"rule", to_string(p.rule)}, {"plan", detail::plan_json(p)}}, a.run.output);
    }
    if (a.method == "catalog") {
        const auto f = catalog_lookup(a.g, a.h);
        if (!f) {
            std::cerr << "no catalog entry for " << at << "\n";
            return kInvalid;
        }
        if (a.explain) std::cerr << "catalog entry: " << catalog().at({a.g, a.h}).source << "\n";
        return emit_family(*f, {{"rule", "catalog"}, {"source", catalog().at({a.g, a.h}).source}}, a.run.output);
    }
    if (a.method == "field") {
        if (a.h == 2 && is_prime(a.g) && a.g % 6 == 1) return emit_family(field_cdf_2p(a.g), {{"rule", "field-2p"}}, a.run.output);
        if (a.h == 3 && is_prime(a.g) && a.g % 4 == 1) return emit_family(field_cdf_3p(a.g), {{"rule", "field-3p"}}, a.run.output);
        std::cerr << "field constructions need h=2 with g prime = 1 (mod 6), or h=3 with g prime = 1 (mod 4)\n";
        return kInvalid;
    }
    if (a.method == "frame") {
        const auto fp = frame_params_for(v, static_cast<int>(a.h));
        if (!fp) {
            std::cerr << "no frame for v=" << v << ", h=" << a.h << " (needs h in {2,3,6} and v = 72t+12x+h, t >= 3)\n";
            return kInvalid;
        }
        if (a.explain)
            std::cerr << "frame x=" << fp->x << ", t=" << fp->t << ": " << fp->frame_block_count()
                      << " frame blocks, " << fp->completion_block_count() << " to search\n";
        const FrameResult fr = frame_blocks(*fp);
        const SearchOutcome out = complete_family(v, a.h, 4, fr.blocks, sopt);
        return report_search(out, {{"rule", "frame+complete"}, {"frame_x", fp->x}, {"frame_t", fp->t}}, a.run.output, "");
    }
    if (a.method == "search") {
        if (a.explain) std::cerr << "search from scratch over Z_" << v << "\n";
        return report_search(find_cdf(v, a.h, 4, sopt), {{"rule", "search"}}, a.run.output, "");
    }
    throw CLI::ValidationError("--method", "unknown method " + a.method);
}

int cmd_verify(const std::string& path) {
    const FamilyDocument d = read_document(path);
    const Certificate c = verify_document(d);
    if (c.valid) {
        std::cout << "valid " << to_string(d.kind);
        if (c.size) std::cout << " size=" << *c.size;
        if (c.bound) std::cout << " bound=" << *c.bound;
        if (c.optimal) std::cout << " optimal=" << (*c.optimal ? "yes" : "no");
        std::cout << "\n";
        return kOk;
    }
    std::cout << "invalid " << to_string(d.kind) << ": " << c.witness->condition;
    for (auto x : c.witness->values) std::cout << " " << x;
    std::cout << "\n";
    return kInvalid;
}

struct SearchArgs {
    std::string kind;
    std::vector<Residue> params;
    std::size_t k = 4;
    bool frame = false;
    std::string branching = "hybrid";
    bool restarts = false;
    std::string resume;
    std::string checkpoint;
    RunOptions run;
};

int cmd_search(const SearchArgs& a) {
    SearchOptions opt{budget_of(a.run), {}, progress_of(a.run)};
    opt.strategy.branching = a.branching == "hybrid" ? Branching::hybrid : Branching::smallest_difference;
    opt.strategy.restarts = a.restarts;
    opt.strategy.seed = a.run.seed;

    if (!a.resume.empty()) {
        const SearchCheckpoint cp = checkpoint_from(read_document(a.resume));
        const std::string checkpoint_path = a.checkpoint.empty() ? a.resume : a.checkpoint;
        return report_search(resume_search(cp, opt.budget, opt.progress), {{"rule", "search"}, {"resumed", true}},
                             a.run.output, checkpoint_path);
    }
    if (a.kind == "cdm") {
        if (a.params.size() != 1) throw CLI::ValidationError("search cdm", "expects one parameter V");
        return report_search(find_cdm(a.params[0], a.k, opt), {{"rule", "search"}}, a.run.output, "");
    }
    if (a.params.size() != 2) throw CLI::ValidationError("search cdf", "expects parameters V H");
    const Residue v = a.params[0], h = a.params[1];
    std::vector<Block> frame;
    nlohmann::json provenance{{"rule", "search"}};
    if (a.frame) {
        const auto fp = frame_params_for(v, static_cast<int>(h));
        if (!fp) throw CLI::ValidationError("--frame", "no frame for v=" + std::to_string(v) + ", h=" + std::to_string(h));
        frame = frame_blocks(*fp).blocks;
        provenance = {{"rule", "frame+complete"}, {"frame_x", fp->x}, {"frame_t", fp->t}};
        std::cerr << "[search] frame x=" << fp->x << ", t=" << fp->t << ", " << frame.size() << " blocks fixed, "
                  << fp->completion_block_count() << " to place\n";
    }
    return report_search(complete_family(v, h, a.k, std::move(frame), opt), provenance, a.run.output, a.checkpoint);
}

int cmd_develop(const std::string& kind, const std::string& arg, bool text, const RunOptions& run) {
    if (kind == "steiner") {
        Residue v = 0;
        try {
            v = std::stoll(arg);
        } catch (const std::exception&) {
            throw CLI::ValidationError("develop steiner", "expects an integer v");
        }
        if (v % 12 != 4 || v == 28) {
            std::cerr << "no 1-rotational S(2,4," << v << ") exists (needs v = 4 (mod 12), v != 28)\n";
            return kInvalid;
        }
        const PointDesign d = steiner_1rotational(
            v, ExecuteOptions{budget_of(run), recommended_strategy(run.seed), progress_of(run)});
        const FamilyDocument doc = to_document(d, DocumentKind::steiner, {{"construction", "1-rotational"}});
        if (!doc.valid) {
            std::cerr << "internal error: Steiner system failed verification\n";
            return kInvalid;
        }
        emit(text ? blocks_text(d) : serialize(doc), run.output);
        return kOk;
    }
    const Family f = family_from(read_document(arg));
    if (const Certificate c = verify_cdf(f); !c.valid) {
        std::cerr << "input family is invalid: " << c.witness->condition << "\n";
        return kInvalid;
    }
    if (kind == "gdd") {
        const PointDesign d = gdd_from_cdf(f);
        emit(text ? blocks_text(d) : serialize(to_document(d, DocumentKind::gdd)), run.output);
        return kOk;
    }
    const OocReport r = ooc_from_cdf(f);
    std::cerr << "J-optimal: " << (r.j_optimal ? "yes" : "no") << " (" << r.code.codewords.size() << " of "
              << r.certificate.bound.value_or(0) << ")\n";
    emit(to_document(r.code), run.output);
    return kOk;
}

int cmd_bounds(const std::string& kind, std::uint64_t n, std::uint64_t k) {
    std::cout << (kind == "johnson" ? johnson_bound(n, k) : cn_bound(n)) << "\n";
    return kOk;
}

int cmd_export(const std::string& path, const std::string& format, const std::string& output) {
    const FamilyDocument d = read_document(path);
    emit(format == "gap" ? export_gap(d) : serialize(d), output);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Construct, search, verify and export cyclic (gh, h, 4, 1) difference families"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "cdf_forge 1.0");

    Residue g = 0, h = 0;
    auto* adm = app.add_subcommand("admissible", "Existence status of a (gh,h,4,1)-CDF");
    adm->add_option("G", g, "Index g = v/h")->required()->check(CLI::PositiveNumber);
    adm->add_option("H", h, "Subgroup order h")->required()->check(CLI::PositiveNumber);

    ConstructArgs ca;
    auto* con = app.add_subcommand("construct", "Build and verify a (gh,h,4,1)-CDF");
    con->add_option("G", ca.g, "Index g = v/h")->required()->check(CLI::PositiveNumber);
    con->add_option("H", ca.h, "Subgroup order h")->required()->check(CLI::PositiveNumber);
    con->add_option("--method", ca.method, "auto, catalog, field, frame or search")
        ->check(CLI::IsMember({"auto", "catalog", "field", "frame", "search"}));
    con->add_flag("--explain", ca.explain, "Describe the construction on stderr");
    add_run_options(con, ca.run);

    std::string file;
    auto* ver = app.add_subcommand("verify", "Re-verify a family document");
    ver->add_option("file", file)->required()->check(CLI::ExistingFile);

    SearchArgs sa;
    auto* sea = app.add_subcommand("search", "Backtracking search for a CDF (V H) or CDM (V)");
    sea->add_option("kind", sa.kind)->required()->check(CLI::IsMember({"cdf", "cdm"}));
    sea->add_option("params", sa.params, "V H for cdf, V for cdm");
    sea->add_option("-k", sa.k, "Block size or matrix rows")->check(CLI::Range(3, 64));
    sea->add_flag("--frame", sa.frame, "Fix the frame blocks for v = 72t+12x+h and search the rest");
    sea->add_option("--branching", sa.branching, "hybrid or smallest")->check(CLI::IsMember({"hybrid", "smallest"}));
    sea->add_flag("--restarts", sa.restarts, "Randomized restarts instead of an exhaustive sweep");
    sea->add_option("--resume", sa.resume, "Continue from a checkpoint file")->check(CLI::ExistingFile);
    sea->add_option("--checkpoint", sa.checkpoint, "Write a checkpoint here if the budget runs out");
    add_run_options(sea, sa.run);

    std::string dkind, darg;
    bool dtext = false;
    RunOptions drun;
    auto* dev = app.add_subcommand("develop", "Develop a CDF file into a GDD or OOC, or build S(2,4,v)");
    dev->add_option("kind", dkind)->required()->check(CLI::IsMember({"gdd", "steiner", "ooc"}));
    dev->add_option("input", darg, "CDF document (gdd, ooc) or v (steiner)")->required();
    dev->add_flag("--text", dtext, "One block per line instead of JSON (gdd, steiner)");
    add_run_options(dev, drun);

    std::string bkind;
    std::uint64_t bn = 0, bk = 4;
    auto* bnd = app.add_subcommand("bounds", "Johnson bound J(v,k) or ternary code bound C(n)");
    bnd->add_option("kind", bkind)->required()->check(CLI::IsMember({"johnson", "cn"}));
    bnd->add_option("N", bn)->required()->check(CLI::PositiveNumber);
    bnd->add_option("-k", bk, "Codeword weight for the Johnson bound")->check(CLI::Range(2, 64));

    std::string format = "json", eout;
    auto* exp = app.add_subcommand("export", "Re-serialize a document as canonical JSON or GAP");
    exp->add_option("file", file)->required()->check(CLI::ExistingFile);
    exp->add_option("--format", format)->check(CLI::IsMember({"json", "gap"}));
    exp->add_option("-o,--output", eout);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        catalog();
        frame_table();
    } catch (const Error& e) {
        std::cerr << "data validation failed: " << e.what() << "\n";
        return kUsage;
    }

    try {
        if (*adm) return cmd_admissible(g, h);
        if (*con) return cmd_construct(ca);
        if (*ver) return cmd_verify(file);
        if (*sea) return cmd_search(sa);
        if (*dev) return cmd_develop(dkind, darg, dtext, drun);
        if (*bnd) return cmd_bounds(bkind, bn, bk);
        if (*exp) return cmd_export(file, format, eout);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kUsage;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kUsage;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded at " << e.context() << ": " << e.what() << "\n";
        std::cout << "budget-exceeded\n";
        return kBudget;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    }
    return kUsage;
}
