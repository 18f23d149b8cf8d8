#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <thread>

#include "vecdraw/dataset.hpp"
#include "vecdraw/encoding.hpp"
#include "vecdraw/error.hpp"
#include "vecdraw/generator.hpp"
#include "vecdraw/guidance.hpp"
#include "vecdraw/metrics.hpp"
#include "vecdraw/normalize.hpp"
#include "vecdraw/workflows.hpp"

namespace vecdraw::cli {

namespace {

const std::set<std::string> kKeys = {"generator_url", "guidance_url", "embedder_url", "api_key",
                                     "timeout",       "retries",      "seed",         "resolution",
                                     "max_in_flight", "fixtures",     "mock",         "mock_embedder"};

const std::pair<const char*, const char*> kEnv[] = {
    {"VECDRAW_GENERATOR_URL", "generator_url"}, {"VECDRAW_GUIDANCE_URL", "guidance_url"},
    {"VECDRAW_EMBEDDER_URL", "embedder_url"},   {"VECDRAW_API_KEY", "api_key"},
    {"VECDRAW_TIMEOUT", "timeout"},             {"VECDRAW_RETRIES", "retries"},
    {"VECDRAW_SEED", "seed"},                   {"VECDRAW_MAX_IN_FLIGHT", "max_in_flight"}};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used == v.size()) return d;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::InvalidArgument, "setting '" + key + "' is not a number: '" + v + "'");
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const auto n = std::stoull(v, &used);
        if (used == v.size() && v.find('-') == std::string::npos) return n;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::InvalidArgument, "setting '" + key + "' is not a non-negative integer: '" + v + "'");
}

int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::ProviderUnavailable:
    case ErrorCode::ProviderTimeout:
    case ErrorCode::ProviderMalformedResponse: return kProvider;
    case ErrorCode::GenerationInvalid:
    case ErrorCode::AllCandidatesInvalid: return kGeneration;
    case ErrorCode::EmptyCandidateSet: return kInternal;
    default: return kUsage;
    }
}

std::string lower_ext(const std::string& path) {
    auto e = std::filesystem::path(path).extension().string();
    for (auto& c : e) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return e;
}

SvgDocument load_svg(const std::string& path, bool strict, std::ostream& err) {
    const auto text = read_text_file(path);
    auto raw = parse_svg_raw(text, {strict ? ParseMode::Strict : ParseMode::Lenient});
    for (const auto& w : raw.warnings) err << path << ": warning: " << w << "\n";
    return lower_document(raw);
}

RasterImage load_visual(const std::string& path, int size, std::ostream& err) {
    if (lower_ext(path) == ".svg") return render(load_svg(path, false, err), size);
    return resample_letterbox(read_png_file(path), size);
}

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

struct Ports {
    std::unique_ptr<EmbeddingPort> embedder;
    std::unique_ptr<GuidancePort> guidance;
    std::unique_ptr<GeneratorBackendPort> generator;
};

std::unique_ptr<EmbeddingPort> make_embedder(const Settings& s) {
    const auto cfg = s.backend("embedder");
    if (!cfg.is_mock()) return std::make_unique<HttpEmbedder>(cfg);
    const auto kind = s.get("mock_embedder").value_or("palette");
    if (kind == "palette") return std::make_unique<PaletteEmbedder>();
    if (kind == "histogram") return std::make_unique<HistogramEmbedder>();
    throw Error(ErrorCode::InvalidArgument, "mock_embedder must be 'palette' or 'histogram', got '" + kind + "'");
}

int resolution(const Settings& s) {
    const auto r = s.get("resolution");
    return r ? static_cast<int>(to_u64("resolution", *r)) : kDefaultResolution;
}

std::unique_ptr<GuidancePort> make_guidance_port(const Settings& s) {
    return make_guidance(s.backend("guidance"), resolution(s));
}

std::unique_ptr<GeneratorBackendPort> make_generator(const Settings& s) {
    const auto cfg = s.backend("generator");
    if (!cfg.is_mock()) return std::make_unique<HttpGenerator>(cfg);
    const auto fixtures = s.get("fixtures");
    return std::make_unique<MockGenerator>(fixtures ? std::optional<std::filesystem::path>(*fixtures) : std::nullopt);
}

}  // namespace

// ---------------------------------------------------------------------------

void Settings::load_file(const std::string& path) {
    const auto text = read_text_file(path);
    std::size_t pos = 0, line_no = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        auto line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::InvalidArgument, path + ":" + std::to_string(line_no) + ": expected key = value");
        }
        set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

void Settings::load_env(const EnvLookup& env) {
    for (const auto& [var, key] : kEnv) {
        if (auto v = env(var)) set(key, *v);
    }
    if (auto v = env("NO_NETWORK"); v && *v == "1") set("mock", "1");
}

void Settings::set(const std::string& key, const std::string& value) {
    if (!kKeys.count(key)) throw Error(ErrorCode::InvalidArgument, "unknown setting '" + key + "'");
    values_[key] = value;
}

std::optional<std::string> Settings::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

bool Settings::mock() const {
    const auto v = get("mock");
    return v && (*v == "1" || *v == "true");
}

std::uint64_t Settings::seed() const {
    const auto v = get("seed");
    return v ? to_u64("seed", *v) : 0;
}

BackendConfig Settings::backend(const std::string& port) const {
    BackendConfig cfg;
    cfg.seed = seed();
    if (auto t = get("timeout")) cfg.timeout_s = to_double("timeout", *t);
    if (auto r = get("retries")) cfg.max_retries = static_cast<int>(to_u64("retries", *r));
    if (auto k = get("api_key")) cfg.api_key = *k;
    if (mock()) {
        cfg.endpoint = "mock";
    } else if (auto url = get(port + "_url")) {
        cfg.endpoint = *url;
    } else {
        throw Error(ErrorCode::InvalidArgument, "no endpoint for the " + port + " port: set " + port +
                                                    "_url in the config or VECDRAW_" +
                                                    [&] {
                                                        std::string up = port;
                                                        for (auto& c : up) c = static_cast<char>(std::toupper(c));
                                                        return up;
                                                    }() +
                                                    "_URL, or pass --mock");
    }
    cfg.validate();
    return cfg;
}

// ---------------------------------------------------------------------------

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env) {
    CLI::App app{"vecdraw: SVG normalization, rendering, scoring, curation and drawing workflows", "vecdraw"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    bool mock = false;
    std::optional<std::uint64_t> seed_flag;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    app.add_option("--config", config_path, "flat key = value settings file");
    app.add_flag("--mock", mock, "use the seeded mock backends for every port");
    app.add_option("--seed", seed_flag, "seed for mock backends and sampling");
    app.add_option("--jobs,-j", jobs, "worker threads for batch commands")->check(CLI::PositiveNumber);

    // normalize
    auto* normalize_cmd = app.add_subcommand("normalize", "write the canonical normalized form of an SVG");
    std::string norm_in, norm_out;
    bool strict = false;
    normalize_cmd->add_option("input", norm_in)->required();
    normalize_cmd->add_option("-o,--output", norm_out, "output path (default stdout)");
    normalize_cmd->add_flag("--strict", strict, "reject constructs outside the supported subset");

    // render
    auto* render_cmd = app.add_subcommand("render", "rasterize an SVG to PNG or PPM");
    std::string render_in, render_out;
    int render_size = kDefaultResolution;
    render_cmd->add_option("input", render_in)->required();
    render_cmd->add_option("-o,--output", render_out)->required();
    render_cmd->add_option("--size", render_size)->check(CLI::Range(1, 8192));

    // score
    auto* score_cmd = app.add_subcommand("score", "compare two inputs; for clip the first input is the text");
    std::string metric = "ssim", score_a, score_b;
    int score_size = kDefaultResolution;
    score_cmd->add_option("--metric", metric)->check(CLI::IsMember({"ssim", "mse", "clip", "dino"}));
    score_cmd->add_option("a", score_a)->required();
    score_cmd->add_option("b", score_b)->required();
    score_cmd->add_option("--size", score_size)->check(CLI::Range(11, 8192));

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "report whether an SVG meets the canonical drawing rules");
    std::string verify_in;
    verify_cmd->add_option("input", verify_in)->required();

    // trajectory
    auto* traj_cmd = app.add_subcommand("trajectory", "print pen moves for a plotter");
    std::string traj_in;
    double spacing = 1.0;
    traj_cmd->add_option("input", traj_in)->required();
    traj_cmd->add_option("--spacing", spacing)->check(CLI::PositiveNumber);

    // curate
    auto* curate_cmd = app.add_subcommand("curate", "filter and normalize an SVG corpus");
    std::string curate_in, curate_meta, curate_out;
    curate_cmd->add_option("input_dir", curate_in)->required();
    curate_cmd->add_option("--metadata", curate_meta, "JSON object mapping SVG paths to descriptions")->required();
    curate_cmd->add_option("-o,--output", curate_out)->required();

    // split
    auto* split_cmd = app.add_subcommand("split", "sample the test ids of a curated record file");
    std::string split_in, split_out;
    std::size_t test_size = kDefaultTestSize;
    split_cmd->add_option("records", split_in)->required();
    split_cmd->add_option("--test-size", test_size);
    split_cmd->add_option("-o,--output", split_out, "manifest path (default stdout)");

    // emit
    auto* emit_cmd = app.add_subcommand("emit", "write training records of one flavor");
    std::string emit_in, emit_out, flavor_name, captions_path, split_manifest_path, part;
    bool fill_captions = false;
    emit_cmd->add_option("records", emit_in)->required();
    emit_cmd->add_option("--flavor", flavor_name)->required()->check(
        CLI::IsMember({"d_i2s", "d_t2s", "d_it2s", "dp_t2s", "dp_it2s"}));
    emit_cmd->add_option("-o,--output", emit_out, "output path (default stdout)");
    emit_cmd->add_option("--captions", captions_path, "caption cache (JSON)");
    emit_cmd->add_flag("--caption", fill_captions, "caption uncached records and update the cache");
    emit_cmd->add_option("--split", split_manifest_path, "split manifest restricting the records");
    emit_cmd->add_option("--part", part, "train or test")->check(CLI::IsMember({"train", "test"}));

    // run-task
    auto* run_cmd = app.add_subcommand("run-task", "run drawing tasks over a JSONL query file");
    std::string task_name, queries_path, run_out;
    run_cmd->add_option("task", task_name, "t1..t4, a task name, or all")->required();
    run_cmd->add_option("queries", queries_path)->required();
    run_cmd->add_option("-o,--output", run_out)->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        Settings settings;
        if (!config_path.empty()) settings.load_file(config_path);
        settings.load_env(env);
        if (mock) settings.set("mock", "1");
        if (seed_flag) settings.set("seed", std::to_string(*seed_flag));
        if (auto limit = settings.get("max_in_flight")) {
            global_limiter().set_limit(static_cast<std::size_t>(to_u64("max_in_flight", *limit)));
        }

        if (*normalize_cmd) {
            const auto doc = normalize(load_svg(norm_in, strict, err));
            const auto text = serialize_svg(doc);
            if (norm_out.empty()) out << text;
            else write_text_file(norm_out, text);
        } else if (*render_cmd) {
            write_image(render_out, render(load_svg(render_in, false, err), render_size));
        } else if (*score_cmd) {
            Score s;
            if (metric == "clip") {
                auto embedder = make_embedder(settings);
                s = clip_score(score_a, load_visual(score_b, score_size, err), *embedder);
            } else {
                const auto a = load_visual(score_a, score_size, err), b = load_visual(score_b, score_size, err);
                if (metric == "ssim") s = ssim(a, b);
                else if (metric == "mse") s = mse(a, b);
                else {
                    auto embedder = make_embedder(settings);
                    s = dino_similarity(a, b, *embedder);
                }
            }
            out << fixed6(s.value) << "\n";
        } else if (*verify_cmd) {
            const auto report = check_svg(read_text_file(verify_in));
            out << "valid=" << report.valid << "\n";
            if (report.blank_render) out << "warning BlankRender the render is all white\n";
            for (const auto& d : report.diagnostics) out << "diagnostic " << d.code << " " << d.message << "\n";
        } else if (*traj_cmd) {
            out << format_trajectory(path_to_trajectory(normalize(load_svg(traj_in, false, err)), spacing));
        } else if (*curate_cmd) {
            auto embedder = make_embedder(settings);
            const auto report = curate_corpus(curate_in, curate_meta, *embedder, curate_out, settings.seed(), jobs);
            out << "inputs\tretained\trejected\tduplicates\n"
                << report.inputs << "\t" << report.records.size() << "\t" << report.rejections.size() << "\t"
                << report.duplicates << "\n";
        } else if (*split_cmd) {
            std::vector<std::string> ids;
            for (const auto& r : load_records(split_in)) ids.push_back(r.id);
            const auto s = split(ids, test_size, settings.seed());
            const auto text = split_manifest(s, test_size, settings.seed()).dump(2) + "\n";
            if (split_out.empty()) out << text;
            else write_text_file(split_out, text);
        } else if (*emit_cmd) {
            auto records = load_records(emit_in);
            if (!split_manifest_path.empty() || !part.empty()) {
                if (split_manifest_path.empty() || part.empty()) {
                    throw Error(ErrorCode::InvalidArgument, "--split and --part go together");
                }
                const auto manifest = nlohmann::json::parse(read_text_file(split_manifest_path));
                const auto wanted = manifest.at(part).get<std::set<std::string>>();
                std::erase_if(records, [&](const CurationRecord& r) { return !wanted.count(r.id); });
            }
            const auto flavor = *parse_flavor(flavor_name);
            CaptionCache cache;
            if (!captions_path.empty() && std::filesystem::exists(captions_path)) {
                cache = CaptionCache::from_json(nlohmann::json::parse(read_text_file(captions_path)));
            }
            if (fill_captions) {
                auto guidance = make_guidance_port(settings);
                cache.fill(records, *guidance);
                if (!captions_path.empty()) write_text_file(captions_path, cache.to_json().dump(2) + "\n");
            }
            std::string text;
            for (const auto& line : emit_training_records(records, flavor, &cache)) text += line.dump() + "\n";
            if (emit_out.empty()) out << text;
            else write_text_file(emit_out, text);
        } else if (*run_cmd) {
            std::optional<Task> only;
            if (task_name != "all") {
                only = parse_task(task_name);
                if (!only) throw Error(ErrorCode::InvalidArgument, "unknown task '" + task_name + "'");
            }
            auto queries = load_queries(queries_path);
            for (const auto& q : queries) {
                if (only && q.task != *only) {
                    throw Error(ErrorCode::InvalidQuery, "query " + q.id + " is " + std::string(to_string(q.task)) +
                                                             ", not " + std::string(to_string(*only)));
                }
            }
            auto guidance = make_guidance_port(settings);
            auto generator = make_generator(settings);
            auto embedder = make_embedder(settings);
            WorkflowContext ctx{*guidance, *generator, *embedder, settings.seed()};
            const auto summary = run_batch(queries, ctx, run_out, jobs);
            out << "task\tqueries\tsucceeded\tmetric\tmean_score\n";
            for (const auto& [task, stats] : summary.per_task) {
                out << to_string(task) << "\t" << stats.queries << "\t" << stats.succeeded << "\t"
                    << (stats.metric.empty() ? "-" : stats.metric) << "\t" << fixed6(stats.mean_score()) << "\n";
            }
            if (summary.generation_failures) {
                err << summary.generation_failures << " queries had no valid candidate\n";
                return kGeneration;
            }
            if (summary.provider_failures) {
                err << summary.provider_failures << " queries failed on a provider\n";
                return kProvider;
            }
            if (summary.other_failures) {
                err << summary.other_failures << " queries failed\n";
                return kInternal;
            }
        }
        return kOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kInternal;
    }
}

}  // namespace vecdraw::cli
