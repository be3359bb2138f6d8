#include <vwslab/config.hpp>
#include <vwslab/io.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace vwslab;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name)
{
    const auto d = fs::temp_directory_path() / ("vwslab_io_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

GridFunction read_text(const std::string& text)
{
    std::istringstream in(text);
    return read_field_csv(in);
}

} // namespace

TEST(Csv, NumberFormat)
{
    EXPECT_EQ(format_number(0.5), "0.5");
    EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
    EXPECT_EQ(format_number(2097152.0), "2097152");
    EXPECT_EQ(format_number(1e-20), "1e-20");
}

TEST(Csv, TextHasHeaderAndRows)
{
    EXPECT_EQ(csv_text({"a", "b"}, {{1, 2.5}, {3, 0.125}}), "a,b\n1,2.5\n3,0.125\n");
}

TEST(Csv, FieldRoundTrip)
{
    const auto dir = scratch_dir("roundtrip");
    const auto m = build_mesh(8);
    const auto u = GridFunction::sample(m, [](double x, double y) { return x * 3 - y * y + 0.25; });
    write_field_csv(dir / "u.csv", u);
    const auto text = slurp(dir / "u.csv");
    EXPECT_EQ(text.substr(0, 12), "x,y,value\n0.");
    EXPECT_FALSE(fs::exists(dir / "u.csv.tmp"));
    const auto back = read_field_csv(dir / "u.csv");
    EXPECT_EQ(back.mesh().n(), 8);
    EXPECT_LE((back - GridFunction(back.mesh_ptr(), std::vector<double>(u.values().begin(), u.values().end())))
                  .max_abs(),
              1e-11);
}

TEST(Csv, ProfileFile)
{
    const auto dir = scratch_dir("profile");
    const std::vector<double> v{4, 1, 3, 2};
    write_profile_csv(dir / "p.csv", decreasing_rearrangement(v, 0.25));
    EXPECT_EQ(slurp(dir / "p.csv"), "cum_measure,value\n0.25,4\n0.5,3\n0.75,2\n1,1\n");
}

TEST(Csv, ReaderAcceptsAnyRowOrderWithoutHeader)
{
    std::string text;
    for (int j = 3; j >= 0; --j)
        for (int i = 0; i < 4; ++i)
            text += format_number((i + 0.5) / 4) + "," + format_number((j + 0.5) / 4) + "," + std::to_string(i + 10 * j) +
                    "\n";
    const auto u = read_text(text);
    EXPECT_EQ(u[u.mesh().index(2, 3)], 32.0);
    EXPECT_EQ(u[u.mesh().index(0, 0)], 0.0);
}

TEST(Csv, ReaderErrorsCarryLineNumbers)
{
    std::string good = "x,y,value\n";
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i)
            good += format_number((i + 0.5) / 4) + "," + format_number((j + 0.5) / 4) + ",1\n";
    EXPECT_NO_THROW((void)read_text(good));

    auto expect_row = [](const std::string& text, std::size_t row) {
        try {
            (void)read_text(text);
            ADD_FAILURE() << "expected CsvError";
        }
        catch (const CsvError& e) {
            EXPECT_EQ(e.row(), row) << e.what();
        }
    };
    expect_row("", 0);
    expect_row("x,y,value\n", 0);

    auto bad = good;
    bad.replace(bad.find("0.375,0.125,1"), 13, "0.375,0.125,z");
    expect_row(bad, 3);

    auto off = good;
    off.replace(off.find("0.375,0.125,1"), 13, "0.3,0.125,1");
    expect_row(off, 3);

    auto dup = good;
    dup.replace(dup.find("0.375,0.125,1"), 13, "0.125,0.125,1");
    expect_row(dup, 3);

    // 15 rows: not a square
    auto shortened = good.substr(0, good.rfind("0.875,0.875"));
    expect_row(shortened, 0);

    // a 3x3 grid is too coarse
    std::string small;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i)
            small += format_number((i + 0.5) / 3) + "," + format_number((j + 0.5) / 3) + ",1\n";
    expect_row(small, 0);
}

TEST(Svg, PlotAndHeatmapAreWellFormed)
{
    PlotSeries s{"S", {1, 10, 100}, {1, 0.1, 0.01}};
    const auto svg = plot_svg({"title <a&b>", "lambda", "S", true, true}, {s});
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
    EXPECT_NE(svg.find("&lt;a&amp;b&gt;"), std::string::npos);
    EXPECT_NE(svg.find("polyline"), std::string::npos);

    const auto m = build_mesh(256);
    const auto u = GridFunction::sample(m, [](double x, double y) { return x - y; });
    const auto heat = heatmap_svg(u, "u");
    EXPECT_EQ(heat.rfind("<svg", 0), 0u);
    // block averaging caps the number of rectangles at 128²
    std::size_t rects = 0;
    for (auto pos = heat.find("<rect"); pos != std::string::npos; pos = heat.find("<rect", pos + 1))
        ++rects;
    EXPECT_LE(rects, 128u * 128u + 64u);
    EXPECT_GE(rects, 128u * 128u);
}

TEST(Manifest, HashAndAppend)
{
    EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
    EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
    const auto dir = scratch_dir("manifest");
    append_manifest(dir, {{"abc", "solve", "ok", 1.25, "solution.csv"}});
    append_manifest(dir, {{"abc", "kato", "holds", 0.5, "kato.csv"}});
    EXPECT_EQ(slurp(dir / "manifest.csv"), "config_hash,experiment,verdict,wall_seconds,artifact\n"
                                           "abc,solve,ok,1.250,solution.csv\n"
                                           "abc,kato,holds,0.500,kato.csv\n");
}

TEST(Config, DefaultsAndFullDocument)
{
    const auto def = parse_config(nlohmann::json::object());
    EXPECT_EQ(def.mode, Mode::primal);
    EXPECT_EQ(def.params.meshes, (std::vector<int>{64, 128, 256}));
    EXPECT_EQ(def.solve_mesh(), 256);
    EXPECT_EQ(def.params.setup.potential.kind, PotentialSpec::Kind::zero);

    const auto doc = nlohmann::json::parse(R"({
        "mode": "dual", "n": 32, "meshes": [16, 32, 64],
        "potential": {"kind": "power", "c": 2, "r": 3},
        "stream": {"kind": "poly", "amplitude": 3, "scale": 2},
        "rhs": {"kind": "boundary_bump", "distance": 0.0625, "normalize": "delta_log"},
        "bc": 1,
        "solver": {"tol": 1e-8, "method": "iterative"},
        "params": {"c": 1, "r": 1, "alpha": 0.5, "g_list": [0, 1, 2], "k_list": [1, 2]},
        "output_dir": "runs/a"
    })");
    const auto cfg = parse_config(doc);
    EXPECT_EQ(cfg.mode, Mode::dual);
    EXPECT_EQ(cfg.solve_mesh(), 32);
    EXPECT_EQ(cfg.params.setup.potential.r, 3.0);
    EXPECT_EQ(cfg.params.setup.stream.kind, StreamSpec::Kind::poly);
    EXPECT_EQ(cfg.params.setup.velocity_scale, 2.0);
    EXPECT_EQ(cfg.params.setup.rhs.kind, RhsSpec::Kind::boundary_bump);
    EXPECT_EQ(cfg.params.setup.rhs.normalize, RhsSpec::Normalization::delta_log);
    EXPECT_EQ(cfg.params.setup.boundary_value, 1.0);
    EXPECT_EQ(cfg.params.solve.method, SolverMethod::iterative);
    EXPECT_EQ(cfg.params.g_list.size(), 3u);
    EXPECT_EQ(cfg.output_dir, fs::path("runs/a"));
}

TEST(Config, ErrorsNameTheField)
{
    auto field_of = [](const char* text) {
        try {
            (void)parse_config(nlohmann::json::parse(text));
        }
        catch (const ConfigError& e) {
            return e.field();
        }
        return std::string("(no error)");
    };
    EXPECT_EQ(field_of(R"({"potential": {"kind": "power", "c": -1, "r": 2}})"), "potential.c");
    EXPECT_EQ(field_of(R"({"potential": {"kind": "wild"}})"), "potential.kind");
    EXPECT_EQ(field_of(R"({"meshes": [64, 32]})"), "meshes");
    EXPECT_EQ(field_of(R"({"meshes": [64, 12.5]})"), "meshes[1]");
    EXPECT_EQ(field_of(R"({"n": 2})"), "n");
    EXPECT_EQ(field_of(R"({"mode": "sideways"})"), "mode");
    EXPECT_EQ(field_of(R"({"solver": {"tol": 0}})"), "solver.tol");
    EXPECT_EQ(field_of(R"({"solver": {"method": "magic"}})"), "solver.method");
    EXPECT_EQ(field_of(R"({"rhs": {"kind": "bump", "radius": -1}})"), "rhs.radius");
    EXPECT_EQ(field_of(R"({"rhs": {"amplitude": "big"}})"), "rhs.amplitude");
    EXPECT_EQ(field_of(R"({"stream": {"kind": "poly_power", "exponent": 0.3}})"), "stream.exponent");
    EXPECT_EQ(field_of(R"({"params": {"alpha": 1}})"), "params.alpha");
    EXPECT_EQ(field_of(R"({"params": {"d_list": [0.5]}})"), "params.d_list[0]");
    EXPECT_EQ(field_of(R"({"potential": 3})"), "potential");
    EXPECT_EQ(field_of("[]"), "(root)");
}

TEST(Config, LoadFromFile)
{
    const auto dir = scratch_dir("config");
    {
        std::ofstream(dir / "ok.json") << R"({"n": 16, // comments are allowed
                                              "rhs": {"kind": "sine"}})";
        std::ofstream(dir / "bad.json") << "{ not json";
    }
    EXPECT_EQ(load_config(dir / "ok.json").solve_mesh(), 16);
    EXPECT_THROW((void)load_config(dir / "bad.json"), ConfigError);
    EXPECT_THROW((void)load_config(dir / "missing.json"), ConfigError);
}
