// Command line front end: verify meshes, build selected-basis languages,
// evaluate and refine splines on exact rationals, export plot data, and
// generate the bundled fixtures.  Exit codes: 0 property holds / work done,
// 1 property fails (a witness is printed), 2 usage or input error.

#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "regspline/examples.hpp"
#include "regspline/io.hpp"
#include "regspline/oracle.hpp"
#include "regspline/refine.hpp"

namespace {

using namespace regspline;
namespace ex = regspline::examples;
namespace fs = std::filesystem;

const char* kUsage =
    "usage: regspline <command> [arguments] [flags]\n"
    "\n"
    "commands:\n"
    "  check-nested <mesh-spec>             verify each subdomain lies inside the previous one\n"
    "  check-assumption-b <mesh-spec>       verify clipped spline supports stay connected\n"
    "  kraft <mesh-spec> <out-dir>          build the selected anchor language of every level\n"
    "  eval <manifest> [points...]          evaluate a spline at dyadic points\n"
    "       [--points <file>]               read points from a file, one per line\n"
    "       [--matches]                     also print the contributing basis functions\n"
    "       [--oracle]                      cross-check each value against a direct evaluator\n"
    "  refine <manifest> <next.aut> <out-dir>\n"
    "                                       append a subdomain and rewrite the spline on it\n"
    "  examples <name> <out-dir>            write a bundled fixture: fig1-mesh, fig5-left,\n"
    "                                       fig5-right, spline-g, spline-h, linear-m1/m2/m3\n"
    "  plotdata <manifest> <lo>..<hi> <step>\n"
    "                                       print x and f(x) columns over an interval\n"
    "\n"
    "flags:\n"
    "  --base <b>                           base for examples (default per fixture)\n"
    "  --degree <m>                         degree override for mesh checks and examples\n"
    "  --state-budget <n>                   cap on states per automaton construction\n"
    "\n"
    "points are exact: `p/q`, an integer, or `digits:` followed by the two-row\n"
    "digit form; multi-coordinate points are comma separated, e.g. (1/2,3/4).\n";

struct Options {
    std::vector<std::string> positional;
    std::optional<long> base, degree, budget;
    std::string points_file;
    bool matches = false;
    bool oracle = false;
};

Options parse_options(int argc, char** argv) {
    Options opt;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        auto value = [&](const std::string& name) -> std::string {
            std::size_t eq = arg.find('=');
            if (eq != std::string::npos) return arg.substr(eq + 1);
            if (i + 1 >= argc) throw usage_error(name + " needs a value");
            return argv[++i];
        };
        auto is_flag = [&](const std::string& name) {
            return arg == name || arg.rfind(name + "=", 0) == 0;
        };
        if (is_flag("--base"))
            opt.base = io_detail::parse_long(value("--base"), "--base");
        else if (is_flag("--degree"))
            opt.degree = io_detail::parse_long(value("--degree"), "--degree");
        else if (is_flag("--state-budget"))
            opt.budget = io_detail::parse_long(value("--state-budget"), "--state-budget");
        else if (is_flag("--points"))
            opt.points_file = value("--points");
        else if (arg == "--matches")
            opt.matches = true;
        else if (arg == "--oracle")
            opt.oracle = true;
        else if (arg == "--help" || arg == "-h")
            opt.positional.insert(opt.positional.begin(), "help");
        else if (!arg.empty() && arg[0] == '-' && arg != "-" &&
                 !(arg.size() > 1 && (std::isdigit(arg[1]) || arg[1] == '(')))
            throw usage_error("unknown flag: " + arg);
        else
            opt.positional.push_back(arg);
    }
    return opt;
}

const std::string& positional(const Options& opt, std::size_t i, const std::string& what) {
    if (i >= opt.positional.size()) throw usage_error("missing argument: " + what);
    return opt.positional[i];
}

std::string tuple_text(const std::vector<long>& v) {
    std::string out = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(v[i]);
    }
    return out + ")";
}

std::string paren_point(const Point& p) {
    std::string out = "(";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) out += ",";
        out += p[i].get_str();
    }
    return out + ")";
}

HierarchicalMesh load_mesh_for_check(const Options& opt) {
    HierarchicalMesh M = load_mesh_spec(positional(opt, 1, "mesh spec"));
    if (opt.degree) {
        if (*opt.degree < 0) throw usage_error("--degree must be nonnegative");
        M.degree = static_cast<int>(*opt.degree);
    }
    return M;
}

int cmd_check_nested(const Options& opt) {
    HierarchicalMesh M = load_mesh_for_check(opt);
    MeshCheckResult r = check_nested(M);
    if (r.ok) {
        std::cout << "nested: yes\n";
        return 0;
    }
    std::cout << "nested: no\n";
    std::cout << "subdomain " << r.level << " holds a cell outside subdomain " << (r.level - 1)
              << "\n";
    if (r.witness) std::cout << "witness cell barycentre: " << paren_point(*r.witness) << "\n";
    return 1;
}

int cmd_check_assumption_b(const Options& opt) {
    HierarchicalMesh M = load_mesh_for_check(opt);
    MeshCheckResult r = check_assumption_b(M);
    if (r.ok) {
        std::cout << "assumption B: holds (degree " << M.degree << ")\n";
        return 0;
    }
    std::cout << "assumption B: fails (degree " << M.degree << ")\n";
    if (r.witness)
        std::cout << "witness anchor barycentre (cell level " << r.level
                  << "): " << paren_point(*r.witness) << "\n";
    std::cout << "clipped support splits into disconnected cells at offsets:";
    for (const auto& off : r.uncovered) std::cout << " " << tuple_text(off);
    std::cout << "\n";
    return 1;
}

int cmd_kraft(const Options& opt) {
    fs::path spec = positional(opt, 1, "mesh spec");
    fs::path out_dir = positional(opt, 2, "output directory");
    HierarchicalMesh M = load_mesh_for_check(opt);
    MeshCheckResult nested = check_nested(M);
    if (!nested.ok) {
        std::cout << "kraft: mesh is not nested at subdomain " << nested.level << "\n";
        return 1;
    }
    MeshCheckResult connected = check_assumption_b(M);
    if (!connected.ok) {
        std::cout << "kraft: clipped supports disconnect at cell level " << connected.level;
        if (connected.witness) std::cout << ", anchor " << paren_point(*connected.witness);
        std::cout << "\n";
        return 1;
    }
    KraftBasis B = build_kraft_languages(M, /*force=*/true); // both checks just ran
    fs::create_directories(out_dir);
    fs::path manifest = out_dir / (spec.stem().string() + ".kraft");
    save_kraft_manifest(B, manifest, spec.string());
    std::cout << "wrote " << manifest.string() << " and " << B.levels << " level languages\n";
    return 0;
}

std::vector<Point> gather_points(const Options& opt, std::size_t from, Base b) {
    std::vector<Point> points;
    for (std::size_t i = from; i < opt.positional.size(); ++i)
        points.push_back(parse_point_text(opt.positional[i], b));
    if (!opt.points_file.empty())
        for (const std::string& line : io_detail::file_lines(opt.points_file))
            points.push_back(parse_point_text(line, b));
    if (points.empty()) throw usage_error("no points given (inline or via --points)");
    return points;
}

/// Coefficient lookup for the direct evaluator: queries the relation
/// automaton for one anchor at a time, so the cross-check shares no code with
/// the band construction inside evaluate().
std::optional<Rational> relation_coefficient(const RegularSpline& f, int lev,
                                             const std::vector<long>& cell) {
    const SyncAutomaton& rel = f.relations[static_cast<std::size_t>(lev)];
    Point bary = barycentre_point(lev, cell);
    SyncAutomaton q = restrict_anchors(rel, constant_point_automaton(bary, f.base));
    q = minimize(project(q, {f.dimension}));
    Enumeration en = enumerate_words(q, 2, 100000);
    if (en.words.empty()) return std::nullopt;
    if (en.words.size() > 1)
        throw usage_error("relation stores several coefficients for one anchor");
    return decode(encodings_from_word(en.words[0]).at(0));
}

int cmd_eval(const Options& opt) {
    SplineBundle bundle = load_spline_manifest(positional(opt, 1, "spline manifest"));
    const RegularSpline& f = bundle.spline;
    std::vector<Point> points = gather_points(opt, 2, f.base);
    oracle::CoefficientFn coeff = [&](int lev, const oracle::CellIndex& cell) {
        return relation_coefficient(f, lev, cell);
    };
    int mismatches = 0;
    for (const Point& x : points) {
        if (static_cast<int>(x.size()) != f.dimension)
            throw usage_error("point " + paren_point(x) + " has wrong dimension");
        encode_point(x, f.base); // reject out-of-system points by name
        EvalResult r = evaluate(f, x);
        std::cout << "f" << paren_point(x) << " = " << r.value.get_str() << "\n";
        if (opt.matches)
            for (const EvalMatch& m : r.matches) {
                Point offset(m.local.size());
                for (std::size_t k = 0; k < m.local.size(); ++k)
                    offset[k] = m.local[k] * pow2(-m.cell_level);
                std::cout << "  match level " << m.cell_level << " anchor "
                          << tuple_text(m.anchor) << " lambda " << m.coefficient.get_str()
                          << " x-q " << paren_point(offset) << "\n";
            }
        if (opt.oracle) {
            Rational want = oracle::eval_spline(f.dimension, f.degree, f.levels, coeff, x);
            if (want != r.value) {
                std::cout << "oracle mismatch at " << paren_point(x) << ": direct evaluator says "
                          << want.get_str() << "\n";
                ++mismatches;
            }
        }
    }
    if (opt.oracle && mismatches == 0)
        std::cout << "oracle: agreed on " << points.size() << " point"
                  << (points.size() == 1 ? "" : "s") << "\n";
    return mismatches == 0 ? 0 : 1;
}

int cmd_refine(const Options& opt) {
    fs::path manifest = positional(opt, 1, "spline manifest");
    fs::path next_path = positional(opt, 2, "next-level automaton");
    fs::path out_dir = positional(opt, 3, "output directory");
    SplineBundle bundle = load_spline_manifest(manifest);
    SyncAutomaton next = load_automaton(next_path);
    RefinedSpline refined = refine_spline(bundle.spline, bundle.mesh, next);
    fs::create_directories(out_dir);
    fs::path out = out_dir / (manifest.stem().string() + "-refined.spline");
    save_spline_manifest(refined.spline, refined.mesh, out);
    std::cout << "wrote " << out.string() << " with " << refined.mesh.levels << " levels\n";
    return 0;
}

int cmd_plotdata(const Options& opt) {
    SplineBundle bundle = load_spline_manifest(positional(opt, 1, "spline manifest"));
    const RegularSpline& f = bundle.spline;
    if (f.dimension != 1) throw usage_error("plotdata works on one-dimensional splines");
    const std::string& range = positional(opt, 2, "interval lo..hi");
    std::size_t dots = range.find("..");
    if (dots == std::string::npos) throw usage_error("interval wants lo..hi, got " + range);
    Rational lo = parse_rational_text(range.substr(0, dots), f.base);
    Rational hi = parse_rational_text(range.substr(dots + 2), f.base);
    Rational step = parse_rational_text(positional(opt, 3, "step"), f.base);
    if (step <= 0) throw usage_error("step must be positive");
    if (lo > hi) throw usage_error("empty interval: " + range);
    for (Rational x = lo; x <= hi; x += step)
        std::cout << x.get_str() << "\t" << evaluate(f, {x}).value.get_str() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// Fixture generation.  Mesh fixtures are written as pattern specs and read
// back to confirm the text reproduces the built-in automata; spline fixtures
// are saved with their mesh plus a ready next-level automaton for refine.

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    if (!out) throw parse_error("cannot write " + p.string());
    out << text;
    if (!out.good()) throw parse_error("write failed: " + p.string());
}

std::string cells_pattern_line(int ell, const std::vector<std::vector<long>>& cells) {
    std::string line = "level " + std::to_string(ell) + " pattern = cells @" +
                       std::to_string(ell - 1);
    for (const auto& c : cells) {
        line += " (";
        for (std::size_t k = 0; k < c.size(); ++k)
            line += (k ? "," : "") + std::to_string(c[k]);
        line += ")";
    }
    return line + "\n";
}

void write_mesh_fixture(const fs::path& path, const std::string& body,
                        const HierarchicalMesh& want) {
    std::string text = "mesh\ndimension = " + std::to_string(want.dimension) +
                       "\ndegree = " + std::to_string(want.degree) +
                       "\nbase = " + std::to_string(want.base.value) +
                       "\nlevels = " + std::to_string(want.levels) + "\n" + body;
    write_text(path, text);
    HierarchicalMesh back = load_mesh_spec(path);
    for (int ell = 1; ell <= want.levels - 1; ++ell)
        if (!are_equivalent(back.language(ell), want.language(ell)))
            throw usage_error("fixture spec does not reproduce the builtin mesh");
}

void write_spline_fixture(const fs::path& dir, const std::string& name, const RegularSpline& f,
                          const HierarchicalMesh& M, const SyncAutomaton& next) {
    save_spline_manifest(f, M, dir / (name + ".spline"));
    save_automaton(next, dir / (name + ".next.aut"));
}

int cmd_examples(const Options& opt) {
    std::string name = positional(opt, 1, "fixture name");
    fs::path dir = positional(opt, 2, "output directory");
    fs::create_directories(dir);
    int degree = static_cast<int>(opt.degree.value_or(-1));
    auto base_or = [&](int dflt) { return Base(static_cast<int>(opt.base.value_or(dflt))); };

    if (name == "fig1-mesh") {
        HierarchicalMesh M = ex::fig1_mesh(degree < 0 ? 2 : degree, base_or(2));
        write_mesh_fixture(dir / (name + ".mesh"),
                           cells_pattern_line(1, ex::fig1_domain1()) +
                               cells_pattern_line(2, ex::fig1_domain2()),
                           M);
    } else if (name == "fig5-left") {
        HierarchicalMesh M = ex::fig5_left_mesh(degree < 0 ? 2 : degree, base_or(2));
        write_mesh_fixture(dir / (name + ".mesh"),
                           "level 1 pattern = periodic (1/2,1/2) span (1,1) (1,-1)\n"
                           "level 2 pattern = periodic (1/4,1/4) (1/4,3/4) (3/4,1/4) (3/4,3/4)"
                           " span (1,1) (1,-1)\n",
                           M);
    } else if (name == "fig5-right") {
        HierarchicalMesh M = ex::fig5_right_mesh(degree < 0 ? 2 : degree, base_or(2));
        write_mesh_fixture(dir / (name + ".mesh"),
                           "level 1 pattern = periodic (1/2,1/2) span (1,0) (0,2)\n"
                           "level 2 pattern = periodic (1/4,3/4) span (1/2,0) (0,2)\n",
                           M);
    } else if (name == "spline-g") {
        Base b = base_or(6);
        write_spline_fixture(dir, name, ex::spline_g(b), ex::uniform_mesh(1, 3, b),
                             ex::cells_language({{-2}, {-1}, {0}, {1}}, 0, b));
    } else if (name == "spline-h") {
        Base b = base_or(2);
        write_spline_fixture(dir, name, ex::spline_h(b), ex::alternating_mesh(3, b),
                             ex::cells_language({{0}, {1}}, 2, b));
    } else if (name.rfind("linear-m", 0) == 0 && name.size() == 9 && name[8] >= '1' &&
               name[8] <= '3') {
        int m = name[8] - '0';
        Base b = base_or(2);
        write_spline_fixture(dir, name, linear_spline({Rational(1)}, Rational(0), m, b),
                             ex::uniform_mesh(1, m, b),
                             ex::cells_language({{-3}, {-2}, {-1}, {0}, {1}, {2}}, 0, b));
    } else {
        throw usage_error("unknown fixture: " + name);
    }
    std::cout << "wrote fixture " << name << " into " << dir.string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        Options opt = parse_options(argc, argv);
        if (opt.budget) {
            if (*opt.budget < 1) throw usage_error("--state-budget must be positive");
            state_budget().store(static_cast<std::size_t>(*opt.budget));
        }
        if (opt.positional.empty()) {
            std::cerr << kUsage;
            return 2;
        }
        const std::string& cmd = opt.positional[0];
        if (cmd == "help") {
            std::cout << kUsage;
            return 0;
        }
        if (cmd == "check-nested") return cmd_check_nested(opt);
        if (cmd == "check-assumption-b") return cmd_check_assumption_b(opt);
        if (cmd == "kraft") return cmd_kraft(opt);
        if (cmd == "eval") return cmd_eval(opt);
        if (cmd == "refine") return cmd_refine(opt);
        if (cmd == "examples") return cmd_examples(opt);
        if (cmd == "plotdata") return cmd_plotdata(opt);
        std::cerr << "unknown command: " << cmd << "\n" << kUsage;
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
