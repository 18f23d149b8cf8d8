#include <doctest.h>

#include <cctype>
#include <cmath>
#include <random>

#include "oracles/generators.hpp"
#include "oracles/geometry.hpp"
#include "oracles/reference_flatten.hpp"
#include "vecdraw/error.hpp"
#include "vecdraw/normalize.hpp"
#include "vecdraw/raster.hpp"

using namespace vecdraw;

namespace {

SvgDocument one_path(std::vector<PathCommand> cmds, ViewBox vb = {}) {
    SvgDocument d;
    d.viewbox = vb;
    d.paths.push_back(SvgPath{std::move(cmds), {}});
    return d;
}

void for_each_point(const SvgDocument& d, auto&& fn) {
    for (const auto& p : d.paths) {
        for (const auto& c : p.commands) {
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, cmd::Cubic>) {
                        fn(v.c1), fn(v.c2), fn(v.to);
                    } else if constexpr (std::is_same_v<T, cmd::Quad>) {
                        fn(v.c), fn(v.to);
                    } else if constexpr (!std::is_same_v<T, cmd::Close>) {
                        fn(v.to);
                    }
                },
                c);
        }
    }
}

// Random raw path data mixing relative letters and shorthands (no arcs).
std::vector<RawCommand> random_raw(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> abs_coord(30, 170), rel(-25, 25);
    std::uniform_int_distribution<int> pick(0, 16), reps(1, 3);
    static const char letters[] = "LlHhVvCcSsQqTtMmZ";
    std::vector<RawCommand> out{{'M', {abs_coord(rng), abs_coord(rng)}}};
    const int n = 6 + pick(rng) % 8;
    for (int i = 0; i < n; ++i) {
        const char L = letters[pick(rng)];
        RawCommand c{L, {}};
        if (L != 'Z') {
            const int arity = command_arity(L);
            const int k = reps(rng);
            const bool relative = std::islower(static_cast<unsigned char>(L)) != 0;
            for (int j = 0; j < arity * k; ++j) c.args.push_back(relative ? rel(rng) : abs_coord(rng));
        }
        out.push_back(std::move(c));
    }
    return out;
}

double mean_abs_diff(const RasterImage& a, const RasterImage& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.pixels().size(); ++i) s += std::abs(int(a.pixels()[i]) - int(b.pixels()[i]));
    return s / a.pixels().size();
}

std::vector<std::vector<Point>> dense(const std::vector<PathCommand>& cmds) {
    std::vector<std::vector<Point>> out;
    for (auto& pl : flatten_path(cmds, 0.005)) {
        if (pl.closed && !pl.points.empty()) pl.points.push_back(pl.points.front());
        out.push_back(std::move(pl.points));
    }
    return out;
}

}  // namespace

TEST_CASE("lower_commands: relative offsets, axis lines and reflections") {
    using V = std::vector<PathCommand>;
    CHECK(lower_commands({{'m', {10, 10}}, {'l', {5, 0}}}) == V{cmd::Move{{10, 10}}, cmd::Line{{15, 10}}});
    CHECK(lower_commands({{'M', {0, 0}}, {'H', {50}}, {'V', {20}}}) ==
          V{cmd::Move{{0, 0}}, cmd::Line{{50, 0}}, cmd::Line{{50, 20}}});
    const auto s = lower_commands({{'M', {0, 0}}, {'C', {0, 10, 10, 10, 10, 0}}, {'S', {20, -10, 20, 0}}});
    REQUIRE(s.size() == 3);
    CHECK(s[2] == PathCommand{cmd::Cubic{{10, -10}, {20, -10}, {20, 0}}});
}

TEST_CASE("lower_commands: shorthand without a predecessor uses the current point") {
    const auto s = lower_commands({{'M', {5, 5}}, {'L', {10, 5}}, {'S', {20, 0, 30, 5}}, {'T', {40, 5}}});
    REQUIRE(s.size() == 4);
    CHECK(s[2] == PathCommand{cmd::Cubic{{10, 5}, {20, 0}, {30, 5}}});
    CHECK(s[3] == PathCommand{cmd::Quad{{30, 5}, {40, 5}}});

    const auto t = lower_commands({{'M', {0, 0}}, {'Q', {5, 10, 10, 0}}, {'t', {10, 0}}});
    CHECK(t[2] == PathCommand{cmd::Quad{{15, -10}, {20, 0}}});
}

TEST_CASE("lower_commands: implicit repetition, Z and restart") {
    const auto c = lower_commands({{'m', {1, 1, 2, 0, 0, 2}}, {'z', {}}, {'l', {3, 3}}});
    using V = std::vector<PathCommand>;
    CHECK(c == V{cmd::Move{{1, 1}}, cmd::Line{{3, 1}}, cmd::Line{{3, 3}}, cmd::Close{}, cmd::Move{{1, 1}},
                 cmd::Line{{4, 4}}});
}

TEST_CASE("lower_commands: errors") {
    CHECK_THROWS_AS(lower_commands({{'L', {1, 1}}}), Error);
    try {
        lower_commands({{'L', {1, 1}}});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::StartsWithoutMove);
    }
}

TEST_CASE("rescale_viewbox examples") {
    auto first = [](const SvgDocument& d) { return std::get<cmd::Move>(d.paths[0].commands[0]).to; };
    CHECK(first(rescale_viewbox(one_path({cmd::Move{{50, 50}}}, {0, 0, 100, 100}))) == Point{100, 100});
    CHECK(first(rescale_viewbox(one_path({cmd::Move{{0, 0}}}, {0, 0, 100, 50}))) == Point{0, 50});
    const auto same = one_path({cmd::Move{{13.25, 7}}, cmd::Arc{3, 4, 30, true, false, {20, 20}}});
    CHECK(rescale_viewbox(same) == same);

    const auto arc = rescale_viewbox(one_path({cmd::Move{{0, 0}}, cmd::Arc{3, 4, 30, true, false, {5, 5}}},
                                              {-10, -10, 50, 20}));
    const auto a = std::get<cmd::Arc>(arc.paths[0].commands[1]);
    CHECK(a.rx == doctest::Approx(12));
    CHECK(a.ry == doctest::Approx(16));
    CHECK(a.x_rotation_deg == 30);
    CHECK(a.large_arc);
    CHECK_FALSE(a.sweep);
    CHECK(a.to.x == doctest::Approx(60));
    CHECK(a.to.y == doctest::Approx(60 + 60));
    CHECK(arc.viewbox == ViewBox{0, 0, 200, 200});
}

TEST_CASE("quantize_coords examples") {
    const auto q = quantize_coords(one_path({cmd::Move{{99.997, 12.4}}, cmd::Line{{-0.4, 150.5}}}));
    using V = std::vector<PathCommand>;
    CHECK(q.paths[0].commands == V{cmd::Move{{100, 12}}, cmd::Line{{0, 151}}});
    CHECK_FALSE(std::signbit(std::get<cmd::Line>(q.paths[0].commands[1]).to.x));

    SUBCASE("collapse reverts to two decimals") {
        const auto d = quantize_coords(one_path({cmd::Move{{0.1, 0}}, cmd::Line{{0.4, 0}}, cmd::Close{}}));
        CHECK(d.paths[0].commands == V{cmd::Move{{0.1, 0}}, cmd::Line{{0.4, 0}}, cmd::Close{}});
    }
    SUBCASE("distinct rounded points are kept as integers") {
        const auto d = quantize_coords(one_path({cmd::Move{{0.4, 0}}, cmd::Line{{0.6, 0}}, cmd::Close{}}));
        CHECK(d.paths[0].commands == V{cmd::Move{{0, 0}}, cmd::Line{{1, 0}}, cmd::Close{}});
    }
    SUBCASE("already zero-length commands do not trigger a revert") {
        const auto d = quantize_coords(one_path({cmd::Move{{5.2, 5}}, cmd::Line{{5.2, 5}}, cmd::Line{{9.7, 9}}}));
        CHECK(d.paths[0].commands == V{cmd::Move{{5, 5}}, cmd::Line{{5, 5}}, cmd::Line{{10, 9}}});
    }
    SUBCASE("only the degenerate path reverts") {
        SvgDocument d = one_path({cmd::Move{{0.1, 0}}, cmd::Line{{0.3, 0}}});
        d.paths.push_back(SvgPath{{cmd::Move{{1.2, 3.7}}, cmd::Line{{10.5, 3}}}, {}});
        const auto r = quantize_coords(d);
        CHECK(r.paths[0].commands == V{cmd::Move{{0.1, 0}}, cmd::Line{{0.3, 0}}});
        CHECK(r.paths[1].commands == V{cmd::Move{{1, 4}}, cmd::Line{{11, 3}}});
    }
    SUBCASE("arc radii clamp") {
        // Both radii are scaled up to a half circle either way.
        const auto d = quantize_coords(
            one_path({cmd::Move{{0, 0}}, cmd::Arc{0.6, 0.6, 12.345, false, true, {10, 0}}}));
        const auto a = std::get<cmd::Arc>(d.paths[0].commands[1]);
        CHECK(a.rx == 1);
        CHECK(a.ry == 1);
        CHECK(a.x_rotation_deg == doctest::Approx(12.35));
        const auto r = quantize_coords(one_path({cmd::Move{{0, 0}}, cmd::Arc{30.2, 30.2, 0, true, true, {10, 0}}}));
        CHECK(std::get<cmd::Arc>(r.paths[0].commands[1]).rx == 30);
    }
    SUBCASE("a rounding that would bend an arc keeps two decimals") {
        const auto d = quantize_coords(
            one_path({cmd::Move{{0, 0}}, cmd::Arc{1.47, 44.5, 30.96, false, true, {40, 3.2}}}));
        CHECK(std::get<cmd::Arc>(d.paths[0].commands[1]).rx == 1.47);
    }
    SUBCASE("an ill-conditioned arc becomes cubics") {
        const std::vector<PathCommand> src{cmd::Move{{0, 0}}, cmd::Arc{1.47503, 86.2574, -3.11, false, true, {121.5, 6.7}}};
        const auto d = quantize_coords(one_path(src));
        for (std::size_t i = 1; i < d.paths[0].commands.size(); ++i) {
            CHECK(std::holds_alternative<cmd::Cubic>(d.paths[0].commands[i]));
        }
        CHECK(std::get<cmd::Cubic>(d.paths[0].commands.back()).to == Point{122, 7});
    }
    SUBCASE("style snapping") {
        SvgDocument d = one_path({cmd::Move{{0, 0}}, cmd::Line{{5, 5}}});
        d.paths[0].style.fill->alpha = 0.3333;
        d.paths[0].style.stroke = Color{0, 0, 0, 1.0};
        d.paths[0].style.stroke_width = 0.001;
        const auto r = quantize_coords(d);
        CHECK(r.paths[0].style.fill->alpha == 0.33);
        CHECK(r.paths[0].style.stroke_width == 0.01);
    }
}

TEST_CASE("normalize: already-normalized input is unchanged") {
    const auto doc = parse_svg(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 200 200\">"
        "<path d=\"M 10 10 L 190 10 C 190 100 100 190 10 190 Q 50 50 10 10 Z\" fill=\"#336699\"/>"
        "<path d=\"M 100 100 A 40 20 15 1 0 150 120 Z\" fill=\"none\" stroke=\"#000000\" stroke-width=\"3\"/>"
        "</svg>");
    CHECK(normalize(doc) == doc);
}

TEST_CASE("normalize: 24x24 icon lands on integer coordinates in range") {
    const auto doc = parse_svg(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 24 24\">"
        "<path d=\"M12 2C6.48 2 2 6.48 2 12s4.48 10 10 10 10-4.48 10-10S17.52 2 12 2zm-2 15l-5-5 "
        "1.41-1.41L10 14.17l7.59-7.59L19 8l-9 9z\"/></svg>");
    const auto n = normalize(doc);
    CHECK(n.viewbox == ViewBox{0, 0, 200, 200});
    int count = 0;
    for_each_point(n, [&](const Point& p) {
        ++count;
        CHECK(p.x == std::round(p.x));
        CHECK(p.y == std::round(p.y));
        CHECK(p.x >= 0);
        CHECK(p.x <= 200);
        CHECK(p.y >= 0);
        CHECK(p.y <= 200);
    });
    CHECK(count > 10);
}

TEST_CASE("property: normalize is idempotent") {
    testing::DocGen gen(99);
    for (int i = 0; i < 300; ++i) {
        const auto once = normalize(gen.document());
        const auto twice = normalize(once);
        REQUIRE_MESSAGE(twice == once, serialize_svg(once));
    }
    // Off-grid inputs, including values near rounding ties.
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int i = 0; i < 300; ++i) {
        std::vector<PathCommand> cmds{cmd::Move{{u(rng), u(rng)}}};
        for (int k = 0; k < 4; ++k) cmds.push_back(cmd::Line{{u(rng) * 0.3 + 0.5, u(rng) * 0.3 + 0.5}});
        cmds.push_back(cmd::Close{});
        const auto once = normalize(one_path(cmds, {-3, -3, 6.37, 6.37}));
        CHECK(normalize(once) == once);
    }
}

TEST_CASE("property: normalized output uses the restricted alphabet") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 100; ++i) {
        RawDocument raw;
        raw.viewbox = ViewBox{0, 0, 240, 120};
        raw.paths.push_back(RawPath{random_raw(rng), {}});
        const auto text = serialize_svg(normalize(lower_document(raw)));
        std::size_t pos = 0;
        while ((pos = text.find(" d=\"", pos)) != std::string::npos) {
            pos += 4;
            for (; text[pos] != '"'; ++pos) {
                const char ch = text[pos];
                if (std::isalpha(static_cast<unsigned char>(ch))) {
                    CHECK(std::string("MLCQAZ").find(ch) != std::string::npos);
                }
            }
        }
    }
}

TEST_CASE("property: quantization moves curves by at most one unit") {
    testing::DocGen gen(2024);
    std::mt19937_64 rng(3);
    double worst = 0;
    for (int i = 0; i < 60; ++i) {
        SvgDocument src = gen.document(3);
        // Push coordinates off the integer grid.
        src.viewbox = ViewBox{-7.31, 3.17, 183.3 + i, 171.9};
        const auto pre = rescale_viewbox(src);
        const auto post = quantize_coords(pre);
        for (std::size_t p = 0; p < pre.paths.size(); ++p) {
            const auto a = dense(pre.paths[p].commands);
            const auto b = dense(post.paths[p].commands);
            REQUIRE(a.size() == b.size());
            double total = 0;
            for (const auto& s : a) total += testing::polyline_length(s);
            for (std::size_t s = 0; s < a.size(); ++s) {
                const int n = std::max(2, int(1000 * testing::polyline_length(a[s]) / std::max(total, 1e-9)));
                for (const auto& pt : testing::resample(a[s], n)) {
                    worst = std::max(worst, testing::point_polyline_distance(pt, b[s]));
                }
            }
        }
    }
    MESSAGE("worst deviation " << worst);
    CHECK(worst <= 1.0);
}

TEST_CASE("property: lowering matches an independent reference flattening") {
    std::mt19937_64 rng(77);
    PathStyle style;
    style.fill = Color{20, 40, 200, 1.0};
    const ViewBox vb{0, 0, 200, 200};
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        const auto raw = random_raw(rng);
        const auto lowered = SvgDocument{vb, {SvgPath{lower_commands(raw), style}}};
        const auto reference = testing::polygons_document(testing::reference_flatten(raw), vb, style);
        const double diff = mean_abs_diff(render(lowered, 64), render(reference, 64));
        worst = std::max(worst, diff);
    }
    MESSAGE("worst mean difference " << worst);
    CHECK(worst <= 1.0);
}
