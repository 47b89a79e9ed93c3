#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "skyinv/io.hpp"

using namespace skyinv;

namespace {

constexpr int kParseError = 2;
constexpr int kEngineFailure = 3;
constexpr int kInvariantViolation = 4;

vec<std::string> split_commas(const std::string& s) {
    vec<std::string> out;
    std::stringstream ss(s);
    for (std::string t; std::getline(ss, t, ',');) out.push_back(t);
    return out;
}

vec<Rational> rationals(const std::string& s, std::size_t expect, const char* what) {
    vec<Rational> out;
    try {
        for (auto& t : split_commas(s)) out.push_back(Rational::parse(t));
    } catch (const std::exception&) {
        throw ParseError(0, std::string("bad ") + what + " '" + s + "'");
    }
    if (expect && out.size() != expect) throw ParseError(0, std::string("bad ") + what + " '" + s + "'");
    return out;
}

Degree point(const std::string& s, const char* what) {
    auto v = rationals(s, 2, what);
    return {v[0], v[1]};
}

struct Globals {
    std::optional<elem> field;
    std::string box;
    std::string out_dir;
};

std::optional<Box> user_box(const Globals& g) {
    if (g.box.empty()) return {};
    auto v = rationals(g.box, 4, "box");
    if (!(v[0] < v[2] && v[1] < v[3])) throw ParseError(0, "box must have x0 < x1 and y0 < y1");
    return Box{v[0], v[1], v[2], v[3]};
}

/// The input is either a presentation or a store CSV.
struct Input {
    std::optional<GradedMatrix> module;
    std::optional<SkyscraperStore> store;
};

Input read_input(const std::string& path, const Globals& g) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot open " + path);
    Input r;
    if (looks_like_store_csv(in))
        r.store = parse_store_csv(in);
    else
        r.module = parse_presentation(in, g.field);
    return r;
}

GradedMatrix need_module(const Input& in) {
    if (!in.module) throw ParseError(0, "this command needs a presentation, not a store CSV");
    return *in.module;
}

/// bounding box of a store's keys, one grid step past the largest key
Box store_box(const SkyscraperStore& s) {
    if (s.entries.empty()) return {0, 0, 1, 1};
    Rational step = s.epsilon ? *s.epsilon : Rational(1);
    Box b{s.entries.begin()->first.x, s.entries.begin()->first.y, 0, 0};
    b.x1 = b.x0;
    b.y1 = b.y0;
    for (auto& [a, l] : s.entries) {
        b.x0 = rmin(b.x0, a.x);
        b.y0 = rmin(b.y0, a.y);
        b.x1 = rmax(b.x1, a.x);
        b.y1 = rmax(b.y1, a.y);
    }
    b.x1 += step;
    b.y1 += step;
    return b;
}

template <class F>
void emit(const Globals& g, const std::string& name, F&& write) {
    if (g.out_dir.empty()) {
        write(std::cout);
        return;
    }
    std::filesystem::create_directories(g.out_dir);
    std::string path = (std::filesystem::path(g.out_dir) / name).string();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    write(out);
    std::cerr << "wrote " << path << "\n";
}

Engine engine_of(const std::string& s) {
    if (s == "brute") return Engine::brute;
    if (s == "cheng") return Engine::cheng;
    if (s == "exact") return Engine::exact;
    throw ParseError(0, "unknown engine '" + s + "'");
}

void print_work(const char* label, const PipelineStats& st) {
    std::cerr << label << " work per summand:";
    for (long w : st.work) std::cerr << " " << w;
    std::cerr << "\n";
}

/// self-tests on one module; returns the number of violated invariants
int self_check(const GradedMatrix& m, const std::optional<Box>& box, const Rational& eps, std::ostream& log) {
    int bad = 0;
    auto report = [&](bool ok, const std::string& what) {
        log << (ok ? "ok   " : "FAIL ") << what << "\n";
        if (!ok) ++bad;
    };
    ScanConfig cfg;
    cfg.epsilon = eps;
    cfg.box = box ? *box : auto_box(m, cfg.margin);
    PipelineStats sa, ss;
    SkyscraperStore approx = approx_skyscraper(m, cfg, &sa);
    SkyscraperStore scan = parallel_grid_scan(m, cfg, &ss);
    bool work_ok = sa.work.size() == ss.work.size();
    for (std::size_t i = 0; work_ok && i < sa.work.size(); ++i) work_ok = ss.work[i] <= sa.work[i];
    report(stores_equivalent(approx, scan), "grid scan equals the approximation");
    report(work_ok, "grid scan does no more work than the approximation");

    ExactSkyscraper ex = exact_skyscraper(m, cfg.box);
    report(stores_equivalent(ex.snapshot(eps), approx), "exact subdivision agrees at the lattice points");

    GradedMatrix clipped = clip_to_box(m, *cfg.box);
    bool rank_ok = true, mono_ok = true;
    for (auto& [a, l] : approx.entries)
        for (auto& [b, l2] : approx.entries) {
            if (!leq(a, b)) continue;
            int r = rank(structure_map(clipped, a, b));
            rank_ok = rank_ok && approx.query(0, a, b) == r && ex.query(0, a, b) == r;
            int prev = r;
            for (auto& f : l.factors) {
                int c = approx.query(f.slope, a, b);
                mono_ok = mono_ok && c <= prev;
                prev = c;
            }
        }
    report(rank_ok, "queries at theta 0 equal ranks of structure maps");
    report(mono_ok, "queries are non-increasing in theta");

    bool slopes_ok = true;
    for (auto& [a, l] : approx.entries)
        for (std::size_t i = 1; i < l.factors.size(); ++i) slopes_ok = slopes_ok && l.factors[i].slope <= l.factors[i - 1].slope;
    report(slopes_ok, "factor slopes are sorted in every entry");
    return bad;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Skyscraper invariant of two-parameter persistence modules over prime fields"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    long field = 0;
    app.add_option("--field", field, "prime field size (must match the file; sets the field of scc2020 inputs)");
    app.add_option("--box", g.box, "bounding box X0,Y0,X1,Y1 (default: degrees plus a margin of 1)");
    app.add_option("--out", g.out_dir, "write CSV output into this directory instead of stdout");

    std::string input;
    auto add_input = [&](CLI::App* sub) { sub->add_option("input", input, "presentation (skypres v1) or store CSV")->required(); };

    auto* hn = app.add_subcommand("hn", "HN filtration of the submodule generated at one degree");
    std::string at, engine = "brute", grid;
    std::uint64_t seed = 1;
    hn->add_option("--at", at, "degree X,Y")->required();
    hn->add_option("--engine", engine, "brute|cheng");
    hn->add_option("--grid", grid, "NX,NY points per axis for the cheng engine");
    hn->add_option("--seed", seed, "random seed");
    add_input(hn);

    auto* approx = app.add_subcommand("approx", "epsilon-approximate skyscraper store");
    std::string eps = "1";
    approx->add_option("--epsilon", eps, "lattice spacing");
    approx->add_option("--engine", engine, "brute|cheng|exact");
    approx->add_option("--seed", seed, "random seed");
    add_input(approx);

    auto* exact = app.add_subcommand("exact", "exact subdivisions per summand and grid cell");
    add_input(exact);

    auto* scan = app.add_subcommand("scan", "grid scan producing the epsilon store");
    scan->add_option("--epsilon", eps, "lattice spacing");
    add_input(scan);

    auto* query = app.add_subcommand("query", "count factors of slope >= theta alive from FROM to TO");
    std::string theta = "0", from, to;
    query->add_option("--theta", theta, "slope threshold");
    query->add_option("--from", from, "X,Y")->required();
    query->add_option("--to", to, "X,Y")->required();
    add_input(query);

    auto* land = app.add_subcommand("landscape", "filtered landscapes as CSV");
    std::string ks = "1", thetas = "0", anchor = "center";
    int resolution = 16;
    land->add_option("--k", ks, "levels K[,K2,...]");
    land->add_option("--theta", thetas, "thresholds T[,T2,...]");
    land->add_option("--resolution", resolution, "evaluation points per axis")->check(CLI::Range(2, 4096));
    land->add_option("--anchor", anchor, "center|source")->check(CLI::IsMember({"center", "source"}));
    add_input(land);

    auto* check = app.add_subcommand("check", "interval check of the factors and invariant self-tests");
    check->add_option("--epsilon", eps, "lattice spacing");
    add_input(check);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kParseError;
    }

    try {
        if (field) g.field = (elem)field;
        const std::optional<Box> box = user_box(g);
        Input in = read_input(input, g);
        const Rational epsilon = rationals(eps, 1, "epsilon")[0];
        if (epsilon <= 0) throw ParseError(0, "epsilon must be positive");

        if (*hn) {
            GradedMatrix m = need_module(in);
            Degree a = point(at, "degree");
            HNFactorList l;
            Engine e = engine_of(engine);
            if (e == Engine::brute) {
                l = hn_filtration_at(m, a);
            } else if (e == Engine::cheng) {
                Box b = box ? *box : auto_box(m);
                GradedMatrix c = clip_to_box(m, b);
                auto n = grid.empty() ? vec<Rational>{} : rationals(grid, 2, "grid");
                Grid gr;
                if (n.empty()) {
                    gr = induced_grid(c);
                } else {
                    for (int axis = 0; axis < 2; ++axis) {
                        std::int64_t cnt = n[axis].floor();
                        if (cnt < 2) throw ParseError(0, "grid needs at least two points per axis");
                        vec<Rational>& cs = axis ? gr.ys : gr.xs;
                        Rational lo = axis ? b.y0 : b.x0, hi = axis ? b.y1 : b.x1;
                        for (std::int64_t i = 0; i < cnt; ++i) cs.push_back(lo + (hi - lo) * Rational(i, cnt - 1));
                    }
                }
                gr.xs.push_back(a.x);
                gr.ys.push_back(a.y);
                gr = Grid(gr.xs, gr.ys);
                ChengConfig cc;
                cc.seed = seed;
                cc.box_upper = Degree{b.x1, b.y1};
                l = hn_cheng(c, gr, a, cc);
            } else {
                throw ParseError(0, "hn supports the brute and cheng engines");
            }
            SkyscraperStore s;
            if (!l.factors.empty()) s.insert(l);
            emit(g, "hn.csv", [&](std::ostream& o) { write_store_csv(o, s); });
        } else if (*approx) {
            ScanConfig cfg;
            cfg.epsilon = epsilon;
            cfg.engine = engine_of(engine);
            cfg.box = box;
            cfg.seed = seed;
            cfg.threads = (int)std::max(1u, std::thread::hardware_concurrency());
            PipelineStats st;
            SkyscraperStore s = approx_skyscraper(need_module(in), cfg, &st);
            print_work("approx", st);
            emit(g, "store.csv", [&](std::ostream& o) { write_store_csv(o, s); });
        } else if (*exact) {
            ExactSkyscraper ex = exact_skyscraper(need_module(in), box, 1,
                                                  (int)std::max(1u, std::thread::hardware_concurrency()));
            emit(g, "subdivision.csv", [&](std::ostream& o) { write_subdivision_csv(o, ex); });
        } else if (*scan) {
            ScanConfig cfg;
            cfg.epsilon = epsilon;
            cfg.box = box;
            cfg.threads = (int)std::max(1u, std::thread::hardware_concurrency());
            PipelineStats st;
            SkyscraperStore s = parallel_grid_scan(need_module(in), cfg, &st);
            print_work("scan", st);
            emit(g, "store.csv", [&](std::ostream& o) { write_store_csv(o, s); });
        } else if (*query) {
            Rational th = rationals(theta, 1, "theta")[0];
            Degree a = point(from, "from"), b = point(to, "to");
            if (!leq(a, b)) throw ParseError(0, "query needs FROM <= TO");
            int n = in.store ? in.store->query(th, a, b) : exact_skyscraper(*in.module, box).query(th, a, b);
            std::cout << n << "\n";
        } else if (*land) {
            vec<int> kv;
            for (auto& t : split_commas(ks)) {
                auto r = rationals(t, 1, "k")[0];
                if (r.den() != 1 || r < 1) throw ParseError(0, "k must be a positive integer");
                kv.push_back((int)r.num());
            }
            vec<Rational> tv = rationals(thetas, 0, "theta");
            Anchor an = anchor == "source" ? Anchor::source : Anchor::center;
            vec<LandscapeRow> rows;
            if (in.store) {
                Box b = box ? *box : store_box(*in.store);
                Rational tol = (in.store->epsilon ? *in.store->epsilon : Rational(1)) / Rational(64);
                rows = filtered_landscape(*in.store, b, kv, tv, resolution, tol, an);
            } else {
                ExactSkyscraper ex = exact_skyscraper(*in.module, box);
                rows = filtered_landscape(ex, ex.box, kv, tv, resolution, Rational(1, 256), an);
            }
            emit(g, "landscape.csv", [&](std::ostream& o) { write_landscape_csv(o, rows); });
        } else if (*check) {
            GradedMatrix m = need_module(in);
            ScanConfig cfg;
            cfg.epsilon = epsilon;
            cfg.box = box;
            auto flags = factor_interval_check(approx_skyscraper(m, cfg));
            std::cout << "factors that are not intervals: " << flags.size() << "\n";
            for (auto& f : flags)
                std::cout << "  at " << f.alpha.x << "," << f.alpha.y << " factor " << f.factor << " thickness "
                          << f.thickness << "\n";
            int bad = self_check(m, box, epsilon, std::cout);
            if (bad) {
                std::cerr << bad << " invariant(s) violated\n";
                return kInvariantViolation;
            }
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kParseError;
    } catch (const ChengFailure& e) {
        std::cerr << "engine failure: " << e.what() << "\n";
        return kEngineFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kEngineFailure;
    }
    return 0;
}
