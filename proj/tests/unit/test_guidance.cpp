#include <doctest.h>

#include <sstream>
#include <thread>

#include "../../src/guidance/procedural.hpp"
#include "oracles/stub_server.hpp"
#include "vecdraw/encoding.hpp"
#include "vecdraw/error.hpp"
#include "vecdraw/guidance.hpp"

using namespace vecdraw;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::Io;
}

double differing_fraction(const RasterImage& a, const RasterImage& b) {
    std::size_t n = 0;
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x) n += !std::equal(a.at(x, y), a.at(x, y) + 3, b.at(x, y));
    return double(n) / (a.width() * a.height());
}

std::size_t word_count(const std::string& s) {
    std::istringstream in(s);
    std::string w;
    std::size_t n = 0;
    while (in >> w) ++n;
    return n;
}

RasterImage with_square(int size, int x0, int y0, int side, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    RasterImage img(size, size);
    for (int y = y0; y < y0 + side; ++y)
        for (int x = x0; x < x0 + side; ++x) {
            img.at(x, y)[0] = r;
            img.at(x, y)[1] = g;
            img.at(x, y)[2] = b;
        }
    return img;
}

std::string png_b64(const RasterImage& img) { return base64_encode(encode_png(img)); }

}  // namespace

TEST_CASE("guidance prompt templates") {
    CHECK(text_to_image_prompt("a cat") == "Minimalist vector-style icon of a cat. Empty background.");
    CHECK(edit_image_prompt("a cat") ==
          "Keep as many original elements as possible, but edit by adding elements to transform it into a "
          "minimalist vector-style icon: a cat");
    CHECK(caption_prompt() == "Please describe it within 50 words.");
    CHECK(suggestion_prompt("a cat").find("a cat") != std::string::npos);
}

TEST_CASE("truncate_words") {
    CHECK(truncate_words("a  b\tc\nd", 3) == "a b c");
    CHECK(truncate_words("one two", 60) == "one two");
    CHECK(truncate_words("", 5).empty());
}

TEST_CASE("mock text_to_image") {
    MockGuidance g(7, 128);
    const auto cat = g.text_to_image("cat");
    CHECK(cat.width() == 128);
    CHECK(cat.height() == 128);
    CHECK(cat == g.text_to_image("cat"));
    CHECK(cat == MockGuidance(7, 128).text_to_image("cat"));
    CHECK_FALSE(cat.all_white());
    CHECK(differing_fraction(cat, g.text_to_image("dog")) >= 0.01);
    CHECK(differing_fraction(cat, MockGuidance(8, 128).text_to_image("cat")) >= 0.01);
    CHECK(code_of([&] { g.text_to_image("  "); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { MockGuidance(0, 8); }) == ErrorCode::InvalidArgument);
    CHECK(text_to_image("cat", BackendConfig{"mock", 30, 2, 7}, 128) == cat);
}

TEST_CASE("mock text_to_image uses named colors") {
    MockGuidance g(1, 96);
    const auto img = g.text_to_image("a red apple");
    // Every pixel is a blend of white and the palette red; edge pixels are partial.
    std::size_t solid = 0;
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            const auto* p = img.at(x, y);
            const double c = (255.0 - p[1]) / (255.0 - 30.0);
            CHECK(std::fabs(p[0] - (255 - c * (255 - 220))) <= 1.0);
            CHECK(std::abs(int(p[2]) - int(p[1])) <= 1);
            solid += p[0] == 220 && p[1] == 30 && p[2] == 30;
        }
    CHECK(solid > 100);
}

TEST_CASE("property: mock edit_image only adds ink") {
    MockGuidance g(3, 64);
    for (const char* text : {"a house", "a blue bird", "tree", "green and yellow flag", "x"}) {
        const auto base = g.text_to_image(text);
        const auto edited = g.edit_image(base, std::string("more ") + text);
        REQUIRE(edited.width() == base.width());
        REQUIRE(edited.height() == base.height());
        for (int y = 0; y < base.height(); ++y)
            for (int x = 0; x < base.width(); ++x) {
                if (!base.is_white(x, y)) {
                    CHECK_FALSE(edited.is_white(x, y));
                    CHECK(std::equal(base.at(x, y), base.at(x, y) + 3, edited.at(x, y)));
                }
            }
        CHECK(edited == g.edit_image(base, std::string("more ") + text));
    }
    // Non-square inputs keep their size.
    const RasterImage wide(40, 20);
    const auto out = g.edit_image(wide, "sun");
    CHECK(out.width() == 40);
    CHECK(out.height() == 20);
    CHECK_FALSE(g.edit_image(RasterImage(64, 64), "sun").all_white());
}

TEST_CASE("mock caption_image") {
    MockGuidance g;
    CHECK(g.caption_image(RasterImage(32, 32)) == "blank white canvas");
    const auto red = with_square(20, 0, 0, 10, 220, 30, 30);
    const auto c = g.caption_image(red);
    CHECK(c == "minimalist icon in red covering 25% of the canvas");
    CHECK(g.caption_image(red) == c);
    const auto icon = g.text_to_image("a purple and orange kite");
    const auto cap = g.caption_image(icon);
    CHECK(word_count(cap) <= kMaxCaptionWords);
    CHECK(cap.find("purple") != std::string::npos);
}

TEST_CASE("mock suggest_completion") {
    MockGuidance g(4);
    CHECK(g.suggest_completion("a red barn", RasterImage(16, 16)) == "add remaining elements to match: a red barn");
    CHECK(g.suggest_completion("a red barn", RasterImage(16, 16)) ==
          g.suggest_completion("a red barn", RasterImage(16, 16)));
    CHECK(code_of([&] { g.suggest_completion("", RasterImage(16, 16)); }) == ErrorCode::InvalidArgument);
    CHECK(g.provenance("suggest") == Provenance{"mock", "suggest", 4});
}

TEST_CASE("procedural helpers") {
    const auto words = detail::color_words("A Red barn with grey and violet doors, red roof");
    REQUIRE(words.size() == 4);
    CHECK(mock_palette()[words[0]].name == std::string("red"));
    CHECK(mock_palette()[words[1]].name == std::string("gray"));
    CHECK(mock_palette()[words[2]].name == std::string("purple"));
    CHECK(detail::color_words("reddish tan").empty());

    const auto icon = detail::procedural_icon("x", 11, 3);
    CHECK(icon.paths.size() == 3);
    CHECK(icon == detail::procedural_icon("x", 11, 3));
    CHECK(nearest_palette_index(255, 255, 255) == 0);
    CHECK(nearest_palette_index(0, 0, 0) == 1);
}

TEST_CASE("palette embedder aligns color words and colored pixels") {
    PaletteEmbedder p;
    const auto red = with_square(20, 0, 0, 10, 220, 30, 30);
    const auto blue = with_square(20, 0, 0, 10, 30, 80, 220);
    CHECK(clip_score("a red ball", red, p).value == doctest::Approx(100.0));
    CHECK(clip_score("a red ball", blue, p).value == 0.0);
    CHECK(clip_score("a red and blue ball", red, p).value == doctest::Approx(100.0 / std::sqrt(2.0)));
    CHECK(p.embed_image(RasterImage(4, 4)).vector[0] == 1.0);
    CHECK(p.provider() == "mock:palette");
}

TEST_CASE("HttpGuidance wire contract") {
    const auto served = with_square(50, 0, 0, 25, 0, 0, 0);
    testing::StubServer server([&](const httplib::Request& req, httplib::Response& res) {
        const auto body = nlohmann::json::parse(req.body);
        if (req.path == "/g/text_to_image") {
            testing::reply_json(res, nlohmann::json{{"png_base64", png_b64(served)}}.dump());
        } else if (req.path == "/g/edit_image") {
            const auto in = decode_png(base64_decode(body["png_base64"].get<std::string>()));
            const auto out = in.width() == 30 ? RasterImage(31, 30) : in;
            testing::reply_json(res, nlohmann::json{{"png_base64", png_b64(out)}}.dump());
        } else if (req.path == "/g/caption") {
            std::string words;
            for (int i = 0; i < 70; ++i) words += "w" + std::to_string(i) + " ";
            testing::reply_json(res, nlohmann::json{{"text", words}}.dump());
        } else {
            testing::reply_json(res, nlohmann::json{{"text", "add a roof"}}.dump());
        }
    });
    BackendConfig cfg;
    cfg.endpoint = server.url() + "/g";
    cfg.seed = 9;
    HttpGuidance g(cfg, 100);

    const auto img = g.text_to_image("a cat");
    CHECK(img.width() == 100);
    CHECK(img.height() == 100);
    CHECK(img.at(10, 10)[0] == 0);
    CHECK(img.is_white(80, 80));
    const auto sent = nlohmann::json::parse(server.last_body());
    CHECK(sent["prompt"] == "Minimalist vector-style icon of a cat. Empty background.");
    CHECK(sent["seed"] == 9);
    CHECK(sent["resolution"] == 100);

    const RasterImage in(20, 20);
    CHECK(g.edit_image(in, "a cat") == in);
    CHECK(nlohmann::json::parse(server.last_body())["prompt"] == edit_image_prompt("a cat"));
    CHECK(code_of([&] { g.edit_image(RasterImage(30, 30), "a cat"); }) == ErrorCode::ProviderMalformedResponse);

    const auto cap = g.caption_image(in);
    CHECK(word_count(cap) == 60);
    CHECK(cap.rfind("w0 w1", 0) == 0);
    CHECK(nlohmann::json::parse(server.last_body())["prompt"] == "Please describe it within 50 words.");

    CHECK(g.suggest_completion("a house", in) == "add a roof");
    CHECK(server.last_path() == "/g/suggest");
    CHECK(g.provenance("caption").provider == "http:" + cfg.endpoint);
}

TEST_CASE("HttpGuidance provider failures") {
    SUBCASE("500 after retries") {
        testing::StubServer server([](const httplib::Request&, httplib::Response& res) { res.status = 500; });
        BackendConfig cfg;
        cfg.endpoint = server.url();
        cfg.max_retries = 1;
        CHECK(code_of([&] { text_to_image("cat", cfg); }) == ErrorCode::ProviderUnavailable);
        CHECK(server.hits() == 2);
    }
    SUBCASE("timeout") {
        testing::StubServer server([](const httplib::Request&, httplib::Response& res) {
            std::this_thread::sleep_for(std::chrono::milliseconds(600));
            testing::reply_json(res, R"({"text": "late"})");
        });
        BackendConfig cfg;
        cfg.endpoint = server.url();
        cfg.timeout_s = 0.15;
        cfg.max_retries = 0;
        CHECK(code_of([&] { suggest_completion("cat", RasterImage(16, 16), cfg); }) == ErrorCode::ProviderTimeout);
    }
    SUBCASE("malformed image payload") {
        testing::StubServer server(
            [](const httplib::Request&, httplib::Response& res) { testing::reply_json(res, R"({"png_base64": "!!"})"); });
        BackendConfig cfg;
        cfg.endpoint = server.url();
        CHECK(code_of([&] { text_to_image("cat", cfg); }) == ErrorCode::ProviderMalformedResponse);
    }
}

TEST_CASE("encoding helpers") {
    CHECK(base64_encode({'f', 'o', 'o', 'b'}) == "Zm9vYg==");
    CHECK(base64_decode("Zm9vYg==") == std::vector<std::uint8_t>{'f', 'o', 'o', 'b'});
    CHECK(base64_decode("") .empty());
    CHECK(code_of([] { base64_decode("Zm9v!"); }) == ErrorCode::ProviderMalformedResponse);
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    // FNV-1a 64 reference vectors.
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    std::uint64_t s = 0;
    CHECK(splitmix64(s) == 0xe220a8397b1dcdafULL);
    CHECK(mock_seed("t", "p", 1) == mock_seed("t", "p", 1));
    CHECK(mock_seed("t", "p", 1) != mock_seed("t", "p", 2));
    CHECK(mock_seed("tp", "", 0) != mock_seed("t", "p", 0));
}
