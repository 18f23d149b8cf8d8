#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "oracles/generators.hpp"
#include "oracles/geometry.hpp"
#include "vecdraw/error.hpp"
#include "vecdraw/raster.hpp"

using namespace vecdraw;

namespace {

SvgDocument filled(std::vector<PathCommand> cmds, Color fill = {0, 0, 0, 1.0}) {
    SvgDocument d;
    PathStyle s;
    s.fill = fill;
    d.paths.push_back(SvgPath{std::move(cmds), s});
    return d;
}

std::vector<PathCommand> polygon_commands(const std::vector<Point>& pts) {
    std::vector<PathCommand> c{cmd::Move{pts[0]}};
    for (std::size_t i = 1; i < pts.size(); ++i) c.push_back(cmd::Line{pts[i]});
    c.push_back(cmd::Close{});
    return c;
}

// Mean darkness in [0,1] of a black-on-white render.
double darkness(const RasterImage& img) {
    double s = 0;
    for (auto v : img.pixels()) s += 255 - v;
    return s / (255.0 * img.pixels().size());
}

double black_fraction(const RasterImage& img) {
    std::size_t n = 0;
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) n += img.at(x, y)[0] < 128;
    return double(n) / (img.width() * img.height());
}

std::size_t non_white(const RasterImage& img) {
    std::size_t n = 0;
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) n += !img.is_white(x, y);
    return n;
}

std::vector<Point> convex_polygon(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> c(60, 140), r(15, 60), jitter(0, 1);
    const Point center{c(rng), c(rng)};
    const double radius = r(rng);
    const int n = 3 + int(jitter(rng) * 8);
    std::vector<double> angles;
    for (int i = 0; i < n; ++i) angles.push_back(jitter(rng) * 2 * std::numbers::pi);
    std::sort(angles.begin(), angles.end());
    std::vector<Point> pts;
    for (double a : angles) pts.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
    return pts;
}

const cmd::Arc kQuarter{100, 100, 0, false, true, {100, 200}};  // from (200,100) around (100,100)

}  // namespace

TEST_CASE("flatten_path: lines pass through and Z closes") {
    const auto pl = flatten_path({cmd::Move{{0, 0}}, cmd::Line{{10, 0}}, cmd::Close{}});
    REQUIRE(pl.size() == 1);
    CHECK(pl[0].closed);
    CHECK(pl[0].points == std::vector<Point>{{0, 0}, {10, 0}});

    const auto two = flatten_path({cmd::Move{{0, 0}}, cmd::Line{{1, 1}}, cmd::Move{{5, 5}}, cmd::Line{{6, 5}}});
    REQUIRE(two.size() == 2);
    CHECK_FALSE(two[0].closed);
}

TEST_CASE("flatten_path: quarter arc stays on the circle") {
    const auto pl = flatten_path({cmd::Move{{200, 100}}, kQuarter});
    REQUIRE(pl.size() == 1);
    const auto& pts = pl[0].points;
    CHECK(pts.front() == Point{200, 100});
    CHECK(pts.back() == Point{100, 200});
    double vertex_dev = 0;
    for (const auto& p : pts) vertex_dev = std::max(vertex_dev, std::fabs(testing::dist(p, {100, 100}) - 100));
    CHECK(vertex_dev <= 0.1);

    // Samples along the polyline itself, chords included.
    const auto fine = flatten_path({cmd::Move{{200, 100}}, kQuarter}, 0.1);
    double sample_dev = 0;
    for (const auto& p : testing::resample(fine[0].points, 1000)) {
        sample_dev = std::max(sample_dev, std::fabs(testing::dist(p, {100, 100}) - 100));
    }
    CHECK(sample_dev <= 0.1);
}

TEST_CASE("flatten_path: cubic chord length matches the arc-length integral") {
    const double oracle = testing::cubic_length({0, 0}, {0, 10}, {10, 10}, {10, 0});
    CHECK(oracle == doctest::Approx(20.0).epsilon(1e-9));
    const auto pl = flatten_path({cmd::Move{{0, 0}}, cmd::Cubic{{0, 10}, {10, 10}, {10, 0}}});
    CHECK(testing::polyline_length(pl[0].points) == doctest::Approx(oracle).epsilon(0.01));
}

TEST_CASE("arc_to_cubics: degenerate and out-of-range radii") {
    CHECK(arc_to_cubics({5, 5}, cmd::Arc{10, 10, 0, false, true, {5, 5}}).empty());
    const auto straight = arc_to_cubics({0, 0}, cmd::Arc{0, 10, 0, false, true, {10, 0}});
    REQUIRE(straight.size() == 1);
    CHECK(evaluate(straight[0], 0.5).y == doctest::Approx(0));

    // Radius 1 between points 20 apart is scaled to a half circle of radius 10.
    const auto half = arc_to_cubics({0, 0}, cmd::Arc{1, 1, 0, false, true, {20, 0}});
    REQUIRE(half.size() == 2);
    for (const auto& c : half) {
        for (int k = 0; k <= 20; ++k) CHECK(testing::dist(evaluate(c, k / 20.0), {10, 0}) == doctest::Approx(10).epsilon(1e-3));
    }
}

TEST_CASE("property: arc to cubic radial deviation within 1e-3 r") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> r(1, 150), ang(0, 2 * std::numbers::pi), sweep(0.05, 2 * std::numbers::pi - 0.05);
    for (int i = 0; i < 200; ++i) {
        const double radius = r(rng), a0 = ang(rng), s = sweep(rng);
        const Point c{100, 100};
        const Point from{c.x + radius * std::cos(a0), c.y + radius * std::sin(a0)};
        const Point to{c.x + radius * std::cos(a0 + s), c.y + radius * std::sin(a0 + s)};
        const auto cubics = arc_to_cubics(from, cmd::Arc{radius, radius, 0, s > std::numbers::pi, true, to});
        CHECK(cubics.size() == std::size_t(std::ceil(s / (std::numbers::pi / 2) - 1e-9)));
        double dev = 0;
        for (const auto& cb : cubics)
            for (int k = 0; k <= 100; ++k) dev = std::max(dev, std::fabs(testing::dist(evaluate(cb, k / 100.0), c) - radius));
        CHECK(dev <= 1e-3 * radius);
    }
}

TEST_CASE("render: full square is black, empty document is white") {
    const auto full = render(filled(polygon_commands({{0, 0}, {200, 0}, {200, 200}, {0, 200}})), 200);
    CHECK(full.width() == 200);
    CHECK(std::all_of(full.pixels().begin(), full.pixels().end(), [](auto v) { return v == 0; }));
    CHECK(render(SvgDocument{}, 224).all_white());
    CHECK(render(SvgDocument{}, 224).width() == 224);
}

TEST_CASE("render: right triangle covers half the canvas") {
    const auto img = render(filled(polygon_commands({{0, 0}, {200, 0}, {0, 200}})), 224);
    CHECK(black_fraction(img) == doctest::Approx(0.5).epsilon(0.02));
    CHECK(std::fabs(black_fraction(img) - 0.5) <= 0.01);
}

TEST_CASE("render: fill rules") {
    // Two nested squares with the same orientation: a hole only under evenodd.
    std::vector<PathCommand> c = polygon_commands({{20, 20}, {180, 20}, {180, 180}, {20, 180}});
    const auto inner = polygon_commands({{80, 80}, {120, 80}, {120, 120}, {80, 120}});
    c.insert(c.end(), inner.begin(), inner.end());
    auto doc = filled(c);
    CHECK(render(doc, 200).at(100, 100)[0] == 0);
    doc.paths[0].style.fill_rule = FillRule::EvenOdd;
    CHECK(render(doc, 200).at(100, 100)[0] == 255);
    CHECK(render(doc, 200).at(50, 50)[0] == 0);
}

TEST_CASE("render: alpha compositing and paint order") {
    auto doc = filled(polygon_commands({{0, 0}, {200, 0}, {200, 200}, {0, 200}}), {255, 0, 0, 1.0});
    doc.paths.push_back(doc.paths[0]);
    doc.paths[1].style.fill = Color{0, 0, 255, 0.5};
    const auto img = render(doc, 32);
    const auto* p = img.at(10, 10);
    CHECK(int(p[0]) == 128);
    CHECK(int(p[1]) == 0);
    CHECK(int(p[2]) == 128);
}

TEST_CASE("render: strokes") {
    SvgDocument doc;
    PathStyle s;
    s.fill.reset();
    s.stroke = Color{0, 0, 0, 1.0};
    s.stroke_width = 20;
    doc.paths.push_back(SvgPath{{cmd::Move{{20, 100}}, cmd::Line{{180, 100}}}, s});
    const auto img = render(doc, 200);
    CHECK(img.at(100, 100)[0] == 0);
    CHECK(img.at(100, 92)[0] == 0);
    CHECK(img.is_white(100, 80));
    // Area of a 160 x 20 band.
    CHECK(darkness(img) == doctest::Approx(160.0 * 20 / 40000).epsilon(0.02));

    // An L-shaped polyline gets a filled join with no double darkening.
    doc.paths[0].commands = {cmd::Move{{20, 100}}, cmd::Line{{100, 100}}, cmd::Line{{100, 20}}};
    doc.paths[0].style.stroke->alpha = 0.5;
    const auto joint = render(doc, 200);
    CHECK(int(joint.at(100, 100)[0]) == 128);
    CHECK(int(joint.at(60, 100)[0]) == 128);
}

TEST_CASE("render: viewbox letterboxing") {
    SvgDocument doc = filled(polygon_commands({{0, 0}, {100, 0}, {100, 50}, {0, 50}}));
    doc.viewbox = ViewBox{0, 0, 100, 50};
    const auto img = render(doc, 100);
    CHECK(img.is_white(50, 10));
    CHECK(img.at(50, 50)[0] == 0);
    CHECK(img.is_white(50, 90));
    CHECK(black_fraction(img) == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("property: render is deterministic") {
    testing::DocGen gen(31);
    for (int i = 0; i < 10; ++i) {
        const auto d = gen.document();
        CHECK(render(d, 64) == render(d, 64));
    }
}

TEST_CASE("property: filled area matches shoelace area for convex polygons") {
    std::mt19937_64 rng(4242);
    for (int i = 0; i < 20; ++i) {
        const auto poly = convex_polygon(rng);
        const double expected = testing::shoelace(poly) / (200.0 * 200.0);
        const double got = darkness(render(filled(polygon_commands(poly)), 224));
        CHECK(got == doctest::Approx(expected).epsilon(0.01));
    }
}

TEST_CASE("property: adding an opaque path never shrinks coverage") {
    testing::DocGen gen(55);
    std::mt19937_64 rng(56);
    for (int i = 0; i < 30; ++i) {
        SvgDocument d = gen.document(3);
        d.viewbox = ViewBox{};
        const std::size_t before = non_white(render(d, 96));
        PathStyle opaque;
        opaque.fill = Color{std::uint8_t(i * 7), 10, 10, 1.0};
        d.paths.push_back(SvgPath{polygon_commands(convex_polygon(rng)), opaque});
        CHECK(non_white(render(d, 96)) >= before);
    }
}

TEST_CASE("property: 2x box downscale of a 448 render matches a 224 render") {
    testing::DocGen gen(12);
    for (int i = 0; i < 10; ++i) {
        SvgDocument d = gen.document(4);
        d.viewbox = ViewBox{};
        const auto big = resample_letterbox(render(d, 448), 224);
        const auto direct = render(d, 224);
        double s = 0;
        for (std::size_t k = 0; k < big.pixels().size(); ++k) s += std::abs(int(big.pixels()[k]) - int(direct.pixels()[k]));
        CHECK(s / big.pixels().size() <= 4.0);
    }
}

TEST_CASE("path_to_trajectory") {
    SUBCASE("linear interpolation") {
        const auto t = path_to_trajectory(filled({cmd::Move{{0, 0}}, cmd::Line{{10, 0}}}), 5);
        REQUIRE(t.segments.size() == 1);
        CHECK(t.segments[0].pen == PenState::Down);
        CHECK(t.segments[0].points == std::vector<Point>{{0, 0}, {5, 0}, {10, 0}});
        CHECK(format_trajectory(t) == "D 0 0\nD 5 0\nD 10 0\n");
    }
    SUBCASE("two subpaths give one pen-up move") {
        const auto t = path_to_trajectory(
            filled({cmd::Move{{0, 0}}, cmd::Line{{10, 0}}, cmd::Move{{20, 20}}, cmd::Line{{30, 20}}}), 5);
        REQUIRE(t.segments.size() == 3);
        CHECK(t.segments[0].pen == PenState::Down);
        CHECK(t.segments[1].pen == PenState::Up);
        CHECK(t.segments[1].points == std::vector<Point>{{10, 0}, {20, 20}});
        CHECK(t.segments[2].pen == PenState::Down);
    }
    SUBCASE("quarter arc length") {
        const auto t = path_to_trajectory(filled({cmd::Move{{200, 100}}, kQuarter}), 1);
        REQUIRE(t.segments.size() == 1);
        const auto& pts = t.segments[0].points;
        CHECK(testing::polyline_length(pts) == doctest::Approx(50 * std::numbers::pi).epsilon(0.5 / 157.08));
        for (std::size_t i = 1; i < pts.size(); ++i) {
            CHECK(testing::dist(pts[i - 1], pts[i]) <= 1.0 + 1e-9);
            CHECK_FALSE(pts[i - 1] == pts[i]);
        }
    }
    SUBCASE("closed subpath returns to its start") {
        const auto t = path_to_trajectory(filled({cmd::Move{{0, 0}}, cmd::Line{{4, 0}}, cmd::Line{{4, 4}}, cmd::Close{}}), 10);
        CHECK(t.segments[0].points.back() == Point{0, 0});
    }
    CHECK_THROWS_AS(path_to_trajectory(SvgDocument{}, 0), Error);
}

TEST_CASE("image encoders") {
    RasterImage img(3, 2, 10, 20, 30);
    img.at(2, 1)[0] = 200;
    const auto back = decode_png(encode_png(img));
    CHECK(back == img);
    const auto ppm = encode_ppm(img);
    const std::string header(ppm.begin(), ppm.begin() + 11);
    CHECK(header == "P6\n3 2\n255\n");
    CHECK(ppm.size() == 11 + 18);
    CHECK_THROWS_AS(decode_png({1, 2, 3}), Error);
    CHECK_THROWS_AS(RasterImage(0, 5), Error);

    const auto dir = std::filesystem::temp_directory_path() / "vecdraw_image_test";
    std::filesystem::create_directories(dir);
    write_image((dir / "a.png").string(), img);
    CHECK(read_png_file((dir / "a.png").string()) == img);
    write_image((dir / "a.ppm").string(), img);
    CHECK(std::filesystem::file_size(dir / "a.ppm") == ppm.size());
    std::filesystem::remove_all(dir);
}

TEST_CASE("resample_letterbox") {
    const auto out = resample_letterbox(RasterImage(4, 2, 0, 0, 0), 4);
    CHECK(out.width() == 4);
    CHECK(out.at(0, 0)[0] == 255);
    CHECK(out.at(0, 1)[0] == 0);
    CHECK(out.at(3, 2)[0] == 0);
    CHECK(out.at(0, 3)[0] == 255);
    CHECK(resample_letterbox(out, 4) == out);

    RasterImage checker(2, 2, 0, 0, 0);
    checker.at(0, 0)[0] = checker.at(0, 0)[1] = checker.at(0, 0)[2] = 255;
    checker.at(1, 1)[0] = checker.at(1, 1)[1] = checker.at(1, 1)[2] = 255;
    CHECK(int(resample_letterbox(checker, 1).at(0, 0)[0]) == 128);
}
