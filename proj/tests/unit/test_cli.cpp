#include <doctest.h>

#include <filesystem>
#include <map>
#include <sstream>

#include "cli.hpp"
#include "vecdraw/dataset.hpp"
#include "vecdraw/encoding.hpp"
#include "vecdraw/error.hpp"
#include "vecdraw/metrics.hpp"

using namespace vecdraw;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args, std::map<std::string, std::string> env = {}) {
    std::ostringstream out, err;
    const int code = cli::run_cli(args, out, err, [&](const std::string& k) -> std::optional<std::string> {
        const auto it = env.find(k);
        if (it == env.end()) return std::nullopt;
        return it->second;
    });
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("vecdraw_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

const std::string kShapes =
    R"(<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 100 100">)"
    R"(<circle cx="50" cy="50" r="20" fill="red"/><rect x="10" y="10" width="20" height="30" fill="blue"/></svg>)";

const std::string kGradient =
    R"(<svg viewBox="0 0 10 10"><defs><linearGradient id="g"><stop offset="0" stop-color="#f00"/></linearGradient></defs>)"
    R"x(<path d="M0 0 L10 0 L10 10 Z" fill="url(#g)"/></svg>)x";

}  // namespace

TEST_CASE("cli: normalize writes canonical markup") {
    const auto dir = scratch("normalize");
    write_text_file(dir / "a.svg", kShapes);
    const auto r = run({"normalize", (dir / "a.svg").string()});
    CHECK(r.code == cli::kOk);
    CHECK(check_svg(r.out).valid == 1);
    CHECK(r.out.find("viewBox=\"0 0 200 200\"") != std::string::npos);

    CHECK(run({"normalize", (dir / "a.svg").string(), "-o", (dir / "n.svg").string()}).code == 0);
    CHECK(read_text_file(dir / "n.svg") == r.out);
    // Normalizing canonical output is a no-op.
    CHECK(run({"normalize", (dir / "n.svg").string()}).out == r.out);
}

TEST_CASE("cli: strict mode and parse diagnostics") {
    const auto dir = scratch("strict");
    write_text_file(dir / "g.svg", kGradient);
    const auto lenient = run({"normalize", (dir / "g.svg").string()});
    CHECK(lenient.code == 0);
    CHECK(lenient.err.find("warning") != std::string::npos);

    const auto strict = run({"normalize", "--strict", (dir / "g.svg").string()});
    CHECK(strict.code == cli::kUsage);
    CHECK(strict.err.find("GradientUnsupported") != std::string::npos);

    write_text_file(dir / "bad.svg", R"(<svg viewBox="0 0 10 10"><path d="M 0 0 X"/></svg>)");
    const auto bad = run({"normalize", (dir / "bad.svg").string()});
    CHECK(bad.code == cli::kUsage);
    CHECK(bad.err.find("UnknownLetter at offset 6") != std::string::npos);

    const auto missing = run({"normalize", (dir / "nope.svg").string()});
    CHECK(missing.code == cli::kUsage);
    CHECK(missing.err.find("Io") != std::string::npos);
}

TEST_CASE("cli: render and score") {
    const auto dir = scratch("score");
    write_text_file(dir / "a.svg", kShapes);
    const auto png = (dir / "a.png").string();
    CHECK(run({"render", (dir / "a.svg").string(), "-o", png, "--size", "64"}).code == 0);
    CHECK(read_png_file(png).width() == 64);

    CHECK(run({"score", "--metric", "ssim", png, png}).out == "1.000000\n");
    const auto full = (dir / "full.png").string();
    CHECK(run({"render", (dir / "a.svg").string(), "-o", full}).code == 0);
    CHECK(run({"score", "--metric", "mse", (dir / "a.svg").string(), full}).out == "0.000000\n");
    CHECK(run({"score", "--metric", "mse", (dir / "a.svg").string(), png}).out != "0.000000\n");
    CHECK(run({"score", "--metric", "ssim", (dir / "a.svg").string(), (dir / "a.svg").string()}).out == "1.000000\n");

    const auto clip = run({"--mock", "score", "--metric", "clip", "red circle", (dir / "a.svg").string()});
    CHECK(clip.code == 0);
    const double v = std::stod(clip.out);
    CHECK(v >= 0);
    CHECK(v <= 100);

    CHECK(run({"score", "--metric", "psnr", png, png}).code == cli::kUsage);
}

TEST_CASE("cli: verify reports diagnostics without failing") {
    const auto dir = scratch("verify");
    write_text_file(dir / "a.svg", kShapes);
    const auto r = run({"verify", (dir / "a.svg").string()});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("valid=0\n", 0) == 0);
    CHECK(r.out.find("diagnostic") != std::string::npos);

    const auto n = run({"normalize", (dir / "a.svg").string()});
    write_text_file(dir / "n.svg", n.out);
    CHECK(run({"verify", (dir / "n.svg").string()}).out == "valid=1\n");
}

TEST_CASE("cli: trajectory output") {
    const auto dir = scratch("trajectory");
    write_text_file(dir / "l.svg", R"(<svg viewBox="0 0 200 200"><path d="M 0 0 L 10 0"/></svg>)");
    CHECK(run({"trajectory", (dir / "l.svg").string(), "--spacing", "5"}).out == "D 0 0\nD 5 0\nD 10 0\n");
}

TEST_CASE("cli: settings precedence and missing backends") {
    const auto dir = scratch("settings");
    write_text_file(dir / "a.svg", kShapes);
    const auto svg = (dir / "a.svg").string();

    const auto none = run({"score", "--metric", "clip", "red", svg});
    CHECK(none.code == cli::kUsage);
    CHECK(none.err.find("embedder port") != std::string::npos);
    CHECK(none.err.find("VECDRAW_EMBEDDER_URL") != std::string::npos);

    CHECK(run({"score", "--metric", "clip", "red", svg}, {{"NO_NETWORK", "1"}}).code == 0);

    write_text_file(dir / "mock.conf", "# comment\nmock = 1\nmock_embedder = histogram\n");
    CHECK(run({"--config", (dir / "mock.conf").string(), "score", "--metric", "dino", svg, svg}).out ==
          "1.000000\n");

    write_text_file(dir / "typo.conf", "embeder_url = http://x\n");
    const auto typo = run({"--config", (dir / "typo.conf").string(), "verify", svg});
    CHECK(typo.code == cli::kUsage);
    CHECK(typo.err.find("embeder_url") != std::string::npos);

    cli::Settings s;
    s.load_env([](const std::string& k) -> std::optional<std::string> {
        if (k == "VECDRAW_GENERATOR_URL") return "http://127.0.0.1:9/gen";
        if (k == "VECDRAW_TIMEOUT") return "3.5";
        return std::nullopt;
    });
    const auto cfg = s.backend("generator");
    CHECK(cfg.endpoint == "http://127.0.0.1:9/gen");
    CHECK(cfg.timeout_s == 3.5);
    CHECK_THROWS_AS(s.backend("guidance"), Error);
    s.set("timeout", "soon");
    CHECK_THROWS_AS(s.backend("generator"), Error);
}

TEST_CASE("cli: run-task on mock backends is reproducible") {
    const auto dir = scratch("run");
    write_text_file(dir / "a.svg", kShapes);
    CHECK(run({"render", (dir / "a.svg").string(), "-o", (dir / "a.png").string()}).code == 0);
    std::string queries;
    const char* words[] = {"red apple", "blue star", "green leaf", "yellow sun", "black cat"};
    for (int i = 0; i < 10; ++i) {
        const std::string text = words[i % 5];
        switch (i % 4) {
        case 0: queries += R"({"id":"q)" + std::to_string(i) + R"(","task":"t1","text":")" + text + "\"}\n"; break;
        case 1: queries += R"({"id":"q)" + std::to_string(i) + R"(","task":"t2","image":"a.png"})" "\n"; break;
        case 2:
            queries += R"({"id":"q)" + std::to_string(i) + R"(","task":"t3","text":")" + text +
                       R"(","partial_svg":"a.svg"})" "\n";
            break;
        default:
            queries += R"({"id":"q)" + std::to_string(i) + R"(","task":"t4","text":")" + text +
                       R"(","image":"a.png"})" "\n";
        }
    }
    write_text_file(dir / "q.jsonl", queries);

    const auto first = run({"--mock", "--seed", "5", "run-task", "all", (dir / "q.jsonl").string(), "-o",
                            (dir / "out1").string()});
    REQUIRE_MESSAGE(first.code == cli::kOk, first.err);
    const auto second = run({"--mock", "--seed", "5", "--jobs", "3", "run-task", "all", (dir / "q.jsonl").string(),
                             "-o", (dir / "out2").string()});
    CHECK(second.out == first.out);

    const auto results = read_text_file(dir / "out1" / "results.jsonl");
    CHECK(std::count(results.begin(), results.end(), '\n') == 10);
    CHECK(results == read_text_file(dir / "out2" / "results.jsonl"));
    for (const auto& f : fs::recursive_directory_iterator(dir / "out1")) {
        if (!f.is_regular_file()) continue;
        const auto twin = dir / "out2" / fs::relative(f.path(), dir / "out1");
        CHECK_MESSAGE(read_text_file(f.path()) == read_text_file(twin), f.path().string());
        if (f.path().extension() == ".svg") CHECK(check_svg(read_text_file(f.path())).valid == 1);
    }

    const auto wrong = run({"--mock", "run-task", "t1", (dir / "q.jsonl").string(), "-o", (dir / "o").string()});
    CHECK(wrong.code == cli::kUsage);
    CHECK(wrong.err.find("InvalidQuery") != std::string::npos);
}

TEST_CASE("cli: unreachable provider gives exit code 2") {
    const auto dir = scratch("provider");
    write_text_file(dir / "q.jsonl", R"({"id":"x","task":"t1","text":"a red apple"})" "\n");
    const std::map<std::string, std::string> env{{"VECDRAW_GUIDANCE_URL", "http://127.0.0.1:1/g"},
                                                 {"VECDRAW_GENERATOR_URL", "http://127.0.0.1:1/s"},
                                                 {"VECDRAW_EMBEDDER_URL", "http://127.0.0.1:1/e"},
                                                 {"VECDRAW_RETRIES", "0"},
                                                 {"VECDRAW_TIMEOUT", "2"}};
    const auto r = run({"run-task", "t1", (dir / "q.jsonl").string(), "-o", (dir / "out").string()}, env);
    CHECK(r.code == cli::kProvider);
    const auto line = nlohmann::json::parse(read_text_file(dir / "out" / "results.jsonl"));
    CHECK(line["id"] == "x");
    CHECK(line["error"]["code"] == "ProviderUnavailable");
}

TEST_CASE("cli: curate, split and emit pipeline") {
    const auto dir = scratch("pipeline");
    fs::create_directories(dir / "svgs");
    nlohmann::json meta = nlohmann::json::object();
    const char* colors[] = {"red", "blue", "green", "orange"};
    for (int i = 0; i < 4; ++i) {
        const std::string c = colors[i];
        write_text_file(dir / "svgs" / (c + ".svg"),
                        R"(<svg viewBox="0 0 100 100"><rect x="10" y="10" width="80" height="40" fill=")" + c +
                            R"("/><circle cx="50" cy="70" r=")" + std::to_string(10 + i) + R"(" fill=")" + c +
                            R"("/></svg>)");
        meta[c + ".svg"] = "a " + c + " shape";
    }
    write_text_file(dir / "svgs" / "broken.svg", "<svg><path");
    meta["broken.svg"] = "nothing";
    write_text_file(dir / "meta.json", meta.dump());

    const auto cur = run({"--mock", "curate", (dir / "svgs").string(), "--metadata", (dir / "meta.json").string(),
                          "-o", (dir / "cur").string()});
    REQUIRE_MESSAGE(cur.code == 0, cur.err);
    const auto records = load_records(dir / "cur" / "records.jsonl");
    CHECK(records.size() == 4);
    CHECK(cur.out == "inputs\tretained\trejected\tduplicates\n5\t4\t1\t0\n");

    const auto recs = (dir / "cur" / "records.jsonl").string();
    const auto s1 = run({"--seed", "9", "split", recs, "--test-size", "1"});
    const auto s2 = run({"--seed", "9", "split", recs, "--test-size", "1", "-o", (dir / "split.json").string()});
    CHECK(s1.code == 0);
    CHECK(read_text_file(dir / "split.json") == s1.out);
    const auto manifest = nlohmann::json::parse(s1.out);
    CHECK(manifest["test"].size() == 1);
    CHECK(manifest["train"].size() == 3);
    CHECK(run({"split", recs, "--test-size", "4"}).code == cli::kUsage);

    const auto t2s = run({"emit", recs, "--flavor", "d_t2s"});
    CHECK(t2s.code == 0);
    CHECK(std::count(t2s.out.begin(), t2s.out.end(), '\n') == 4);

    const auto train = run({"emit", recs, "--flavor", "dp_t2s", "--split", (dir / "split.json").string(), "--part",
                            "train"});
    CHECK(std::count(train.out.begin(), train.out.end(), '\n') == 3);
    CHECK(run({"emit", recs, "--flavor", "d_t2s", "--part", "train"}).code == cli::kUsage);

    const auto no_caption = run({"emit", recs, "--flavor", "d_it2s"});
    CHECK(no_caption.code == cli::kUsage);
    CHECK(no_caption.err.find("MissingCaption") != std::string::npos);

    const auto cache = (dir / "captions.json").string();
    const auto captioned = run({"--mock", "emit", recs, "--flavor", "d_it2s", "--captions", cache, "--caption"});
    CHECK(captioned.code == 0);
    CHECK(fs::exists(cache));
    // The cache alone is enough on the next run.
    CHECK(run({"emit", recs, "--flavor", "d_it2s", "--captions", cache}).out == captioned.out);
}

TEST_CASE("cli: usage errors and help") {
    CHECK(run({}).code == cli::kUsage);
    CHECK(run({"frobnicate"}).code == cli::kUsage);
    CHECK(run({"render", "x.svg"}).code == cli::kUsage);
    const auto help = run({"--help"});
    CHECK(help.code == cli::kOk);
    CHECK(help.out.find("run-task") != std::string::npos);
}
