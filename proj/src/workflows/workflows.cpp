#include <atomic>
#include <cstdio>
#include <functional>
#include <future>
#include <set>
#include <thread>

#include "vecdraw/encoding.hpp"
#include "vecdraw/error.hpp"
#include "vecdraw/normalize.hpp"
#include "vecdraw/workflows.hpp"

namespace vecdraw {

namespace {

struct TaskName {
    Task task;
    std::string_view name;
    std::string_view short_name;
};

constexpr TaskName kTaskNames[] = {{Task::TextToSvg, "text_to_svg", "t1"},
                                   {Task::ImageToSvg, "image_to_svg", "t2"},
                                   {Task::PartialSvgToSvg, "partialsvg_to_svg", "t3"},
                                   {Task::PartialImageToSvg, "partialimage_to_svg", "t4"}};

template <class F>
auto launch(bool parallel, F&& f) {
    return std::async(parallel ? std::launch::async : std::launch::deferred, std::forward<F>(f));
}

template <class T>
Guided<T> guided(T value, const WorkflowContext& ctx, const std::string& op) {
    return Guided<T>{std::move(value), ctx.guidance.provenance(op)};
}

struct Plan {
    ModuleKind kind;
    std::vector<std::string> inputs;
    GenerationRequest request;
};

Plan plan(ModuleKind kind, std::vector<std::string> inputs, std::optional<std::string> text,
          std::vector<RasterImage> images, std::optional<SvgDocument> partial = std::nullopt,
          std::optional<std::string> aux = std::nullopt) {
    GenerationRequest req;
    req.kind = kind;
    req.text = std::move(text);
    req.aux_text = std::move(aux);
    req.images = std::move(images);
    req.partial_svg = std::move(partial);
    return Plan{kind, std::move(inputs), std::move(req)};
}

Candidate generate_candidate(Plan p, std::uint64_t seed, GeneratorBackendPort& backend) {
    Candidate c;
    c.module = p.kind;
    c.inputs = std::move(p.inputs);
    c.seed = seed;
    p.request.seed = seed;
    try {
        auto g = generate(p.request, backend);
        c.validity = check_svg(g.svg_text);
        c.document = std::move(g.document);
        c.svg_text = std::move(g.svg_text);
        c.attempts = g.attempts;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::GenerationInvalid) throw;
        c.validity.valid = 0;
        c.validity.diagnostics.push_back({std::string(to_string(e.code())), e.detail()});
        c.attempts = kGenerationRetries + 1;
    }
    return c;
}

using Scorer = std::function<Score(const SvgDocument&)>;

// Generates every planned candidate, scores the valid ones and picks the best.
void fill_candidates(TaskResult& r, std::vector<Plan> plans, const Scorer& scorer, WorkflowContext& ctx) {
    std::vector<std::future<Candidate>> pending;
    for (std::size_t i = 0; i < plans.size(); ++i) {
        const auto seed = candidate_seed(ctx.seed, i);
        pending.push_back(launch(ctx.parallel, [&ctx, seed, p = std::move(plans[i])]() mutable {
            return generate_candidate(std::move(p), seed, ctx.generator);
        }));
    }
    for (auto& f : pending) r.candidates.push_back(f.get());

    std::vector<std::future<Score>> scores;
    for (auto& c : r.candidates) {
        if (!c.document) continue;
        scores.push_back(launch(ctx.parallel, [&scorer, &c] { return scorer(*c.document); }));
    }
    std::vector<std::size_t> valid;
    std::vector<double> values;
    std::size_t k = 0;
    for (std::size_t i = 0; i < r.candidates.size(); ++i) {
        auto& c = r.candidates[i];
        if (!c.document) continue;
        c.score = scores[k++].get();
        valid.push_back(i);
        values.push_back(c.score->value);
    }
    if (valid.empty()) {
        std::string why;
        for (const auto& c : r.candidates) {
            why += (why.empty() ? "" : "; ") + std::string(to_string(c.module)) + ": " + c.validity.diagnostics.front().message;
        }
        throw Error(ErrorCode::AllCandidatesInvalid, std::string(to_string(r.task)) + ": " + why);
    }
    r.chosen_index = valid[select_best(values, higher_is_better(r.metric))];
    r.output = *r.chosen().document;
    r.output_svg = r.chosen().svg_text;
}

Scorer clip_scorer(const std::string& text, EmbeddingPort& embedder) {
    return [&text, &embedder](const SvgDocument& doc) { return clip_score(text, render(doc, kScoreResolution), embedder); };
}

Scorer ssim_scorer(RasterImage reference) {
    return [ref = std::move(reference)](const SvgDocument& doc) { return ssim(render(doc, ref.width()), ref); };
}

void expect(const TaskQuery& q, Task task) {
    if (q.task != task) {
        throw Error(ErrorCode::InvalidQuery, "query " + q.id + " is " + std::string(to_string(q.task)) + ", expected " +
                                                 std::string(to_string(task)));
    }
    q.validate();
}

std::string safe_name(const std::string& id) {
    std::string out;
    for (char c : id) out += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.' ? c : '_';
    if (out.empty() || out == "." || out == "..") out = "_" + out;
    return out;
}

}  // namespace

std::string_view to_string(Task task) {
    for (const auto& t : kTaskNames) {
        if (t.task == task) return t.name;
    }
    return "unknown";
}

std::optional<Task> parse_task(std::string_view name) {
    for (const auto& t : kTaskNames) {
        if (t.name == name || t.short_name == name) return t.task;
    }
    return std::nullopt;
}

void TaskQuery::validate() const {
    const bool has_text = text && text->find_first_not_of(" \t\r\n") != std::string::npos;
    bool want_text = false, want_image = false, want_partial = false;
    switch (task) {
    case Task::TextToSvg: want_text = true; break;
    case Task::ImageToSvg: want_image = true; break;
    case Task::PartialSvgToSvg: want_text = want_partial = true; break;
    case Task::PartialImageToSvg: want_text = want_image = true; break;
    }
    auto check = [&](bool want, bool have, const char* field) {
        if (want == have) return;
        throw Error(ErrorCode::InvalidQuery, "query " + id + " (" + std::string(to_string(task)) + ") " +
                                                 (want ? "needs" : "does not take") + " '" + field + "'");
    };
    check(want_text, want_text ? has_text : text.has_value(), "text");
    check(want_image, image.has_value(), "image");
    check(want_partial, partial_svg.has_value(), "partial_svg");
}

std::uint64_t candidate_seed(std::uint64_t seed, std::size_t index) {
    return mock_seed("candidate", std::to_string(index), seed);
}

TaskResult run_text_to_svg(const TaskQuery& q, WorkflowContext& ctx) {
    expect(q, Task::TextToSvg);
    TaskResult r;
    r.task = q.task;
    r.metric = "clip";
    r.reference = "T_c";
    const std::string& text = *q.text;
    r.guidance.image_complete = guided(ctx.guidance.text_to_image(text), ctx, "text_to_image");
    const auto& g_ic = r.guidance.image_complete->value;
    fill_candidates(r,
                    {plan(ModuleKind::Image2Svg, {"G_ic"}, std::nullopt, {g_ic}),
                     plan(ModuleKind::Text2Svg, {"T_c"}, text, {}),
                     plan(ModuleKind::ImageText2Svg, {"T_c", "G_ic"}, text, {g_ic})},
                    clip_scorer(text, ctx.embedder), ctx);
    return r;
}

TaskResult run_image_to_svg(const TaskQuery& q, WorkflowContext& ctx) {
    expect(q, Task::ImageToSvg);
    TaskResult r;
    r.task = q.task;
    r.metric = "ssim";
    r.reference = "I_c";
    const RasterImage& image = *q.image;
    r.guidance.text_complete = guided(truncate_words(ctx.guidance.caption_image(image), kMaxCaptionWords), ctx, "caption");
    const auto& g_tc = r.guidance.text_complete->value;
    fill_candidates(r,
                    {plan(ModuleKind::Image2Svg, {"I_c"}, std::nullopt, {image}),
                     plan(ModuleKind::ImageText2Svg, {"I_c", "G_tc"}, g_tc, {image})},
                    ssim_scorer(resample_letterbox(image, kScoreResolution)), ctx);
    return r;
}

TaskResult run_partialsvg_to_svg(const TaskQuery& q, WorkflowContext& ctx) {
    expect(q, Task::PartialSvgToSvg);
    TaskResult r;
    r.task = q.task;
    r.metric = "clip";
    r.reference = "T_c";
    const std::string& text = *q.text;
    const SvgDocument partial = normalize(*q.partial_svg);
    r.guidance.image_partial = Guided<RasterImage>{render(partial, kScoreResolution), {"native", "render", 0}};
    r.guidance.image_edited =
        guided(ctx.guidance.edit_image(r.guidance.image_partial->value, text), ctx, "edit_image");
    fill_candidates(r,
                    {plan(ModuleKind::Text2SvgPartial, {"T_c", "S_p"}, text, {}, partial),
                     plan(ModuleKind::ImageText2SvgPartial, {"G_ie", "T_c", "S_p"}, text,
                          {r.guidance.image_edited->value}, partial)},
                    clip_scorer(text, ctx.embedder), ctx);
    return r;
}

TaskResult run_partialimage_to_svg(const TaskQuery& q, WorkflowContext& ctx) {
    expect(q, Task::PartialImageToSvg);
    TaskResult r;
    r.task = q.task;
    r.metric = "ssim";
    r.reference = "G_ie";
    const std::string& text = *q.text;
    const RasterImage& i_p = *q.image;
    auto edited = launch(ctx.parallel, [&] { return ctx.guidance.edit_image(i_p, text); });
    auto suggestion = launch(ctx.parallel, [&] { return ctx.guidance.suggest_completion(text, i_p); });
    r.guidance.image_edited = guided(edited.get(), ctx, "edit_image");
    r.guidance.text_suggestion = guided(suggestion.get(), ctx, "suggest");
    const auto& g_ie = r.guidance.image_edited->value;
    // Candidates render square; a non-square G_ie is letterboxed to its longer side.
    RasterImage reference = g_ie.width() == g_ie.height() ? g_ie
                                                          : resample_letterbox(g_ie, std::max(g_ie.width(), g_ie.height()));
    fill_candidates(r,
                    {plan(ModuleKind::Image2Svg, {"G_ie"}, std::nullopt, {g_ie}),
                     plan(ModuleKind::ImageText2Svg, {"G_ie", "T_c"}, text, {g_ie}),
                     plan(ModuleKind::ImageText2Svg, {"I_p", "T_c", "G_tp"}, text, {i_p}, std::nullopt,
                          r.guidance.text_suggestion->value)},
                    ssim_scorer(std::move(reference)), ctx);
    return r;
}

TaskResult run_task(const TaskQuery& q, WorkflowContext& ctx) {
    switch (q.task) {
    case Task::TextToSvg: return run_text_to_svg(q, ctx);
    case Task::ImageToSvg: return run_image_to_svg(q, ctx);
    case Task::PartialSvgToSvg: return run_partialsvg_to_svg(q, ctx);
    case Task::PartialImageToSvg: return run_partialimage_to_svg(q, ctx);
    }
    throw Error(ErrorCode::InvalidQuery, "unknown task");
}

// ---------------------------------------------------------------------------

TaskQuery parse_query(const nlohmann::json& line, const std::filesystem::path& base_dir, std::size_t line_no) {
    auto fail = [&](const std::string& why) -> Error {
        return Error(ErrorCode::InvalidQuery, "line " + std::to_string(line_no) + ": " + why);
    };
    if (!line.is_object()) throw fail("expected a JSON object");
    for (const auto& [key, value] : line.items()) {
        if (key != "id" && key != "task" && key != "text" && key != "image" && key != "partial_svg") {
            throw fail("unknown field '" + key + "'");
        }
        if (!value.is_string()) throw fail("field '" + key + "' must be a string");
    }
    TaskQuery q;
    char fallback[32];
    std::snprintf(fallback, sizeof fallback, "q%05zu", line_no);
    q.id = line.value("id", std::string(fallback));
    if (!line.contains("task")) throw fail("missing 'task'");
    const auto task = parse_task(line["task"].get<std::string>());
    if (!task) throw fail("unknown task '" + line["task"].get<std::string>() + "'");
    q.task = *task;
    if (line.contains("text")) q.text = line["text"].get<std::string>();
    auto resolve = [&](const std::string& p) { const std::filesystem::path path(p);
        return path.is_absolute() ? path : base_dir / path;
    };
    try {
        if (line.contains("image")) q.image = read_png_file(resolve(line["image"].get<std::string>()).string());
        if (line.contains("partial_svg")) {
            const auto s = line["partial_svg"].get<std::string>();
            const std::string markup = s.rfind('<', 0) == 0 ? s : read_text_file(resolve(s));
            q.partial_svg = normalize(parse_svg(markup, {ParseMode::Lenient}));
        }
    } catch (const Error& e) {
        throw fail(std::string(to_string(e.code())) + ": " + e.what());
    }
    q.validate();
    return q;
}

std::vector<TaskQuery> load_queries(const std::filesystem::path& jsonl) {
    const std::string text = read_text_file(jsonl);
    std::vector<TaskQuery> out;
    std::size_t line_no = 0, pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        const std::string line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::InvalidQuery, "line " + std::to_string(line_no) + ": " + e.what());
        }
        out.push_back(parse_query(j, jsonl.parent_path(), line_no));
    }
    return out;
}

namespace {

nlohmann::json provenance_json(const Provenance& p) {
    return {{"provider", p.provider}, {"operation", p.operation}, {"seed", p.seed}};
}

nlohmann::json guidance_json(const GuidanceBundle& g) {
    nlohmann::json out = nlohmann::json::object();
    if (g.image_complete) out["G_ic"] = {{"provenance", provenance_json(g.image_complete->provenance)}};
    if (g.image_edited) out["G_ie"] = {{"provenance", provenance_json(g.image_edited->provenance)}};
    if (g.image_partial) out["G_ip"] = {{"provenance", provenance_json(g.image_partial->provenance)}};
    if (g.text_complete) {
        out["G_tc"] = {{"text", g.text_complete->value}, {"provenance", provenance_json(g.text_complete->provenance)}};
    }
    if (g.text_suggestion) {
        out["G_tp"] = {{"text", g.text_suggestion->value},
                       {"provenance", provenance_json(g.text_suggestion->provenance)}};
    }
    return out;
}

nlohmann::json candidates_json(const TaskResult& r) {
    nlohmann::json list = nlohmann::json::array();
    for (std::size_t i = 0; i < r.candidates.size(); ++i) {
        const auto& c = r.candidates[i];
        nlohmann::json diags = nlohmann::json::array();
        for (const auto& d : c.validity.diagnostics) diags.push_back({{"code", d.code}, {"message", d.message}});
        list.push_back({{"index", i},
                        {"module", to_string(c.module)},
                        {"inputs", c.inputs},
                        {"seed", c.seed},
                        {"valid", c.validity.valid},
                        {"attempts", c.attempts},
                        {"score", c.score ? nlohmann::json(c.score->value) : nlohmann::json(nullptr)},
                        {"provider", c.score ? c.score->provider : ""},
                        {"diagnostics", diags}});
    }
    return list;
}

}  // namespace

nlohmann::json result_to_json(const std::string& id, const TaskResult& r) {
    return {{"id", id},
            {"task", to_string(r.task)},
            {"metric", r.metric},
            {"reference", r.reference},
            {"chosen_index", r.chosen_index},
            {"chosen_module", to_string(r.chosen().module)},
            {"score", r.chosen().score->value},
            {"candidates", candidates_json(r)},
            {"guidance", guidance_json(r.guidance)},
            {"output_svg", r.output_svg}};
}

void write_artifacts(const TaskResult& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (std::size_t i = 0; i < r.candidates.size(); ++i) {
        const auto& c = r.candidates[i];
        if (!c.document) continue;
        const std::string stem = "candidate_" + std::to_string(i) + "_" + std::string(to_string(c.module));
        write_text_file(dir / (stem + ".svg"), c.svg_text);
        write_image((dir / (stem + ".png")).string(), render(*c.document, kScoreResolution));
    }
    write_text_file(dir / "output.svg", r.output_svg);
    nlohmann::json table = {{"metric", r.metric},
                            {"reference", r.reference},
                            {"chosen_index", r.chosen_index},
                            {"candidates", candidates_json(r)}};
    write_text_file(dir / "scores.json", table.dump(2) + "\n");
    write_text_file(dir / "guidance.json", guidance_json(r.guidance).dump(2) + "\n");
    if (r.guidance.image_complete) write_image((dir / "G_ic.png").string(), r.guidance.image_complete->value);
    if (r.guidance.image_edited) write_image((dir / "G_ie.png").string(), r.guidance.image_edited->value);
    if (r.guidance.image_partial) write_image((dir / "G_ip.png").string(), r.guidance.image_partial->value);
}

BatchSummary run_batch(const std::vector<TaskQuery>& queries, WorkflowContext& ctx,
                       const std::filesystem::path& out_dir, unsigned jobs) {
    std::set<std::string> names;
    for (const auto& q : queries) {
        if (!names.insert(safe_name(q.id)).second) throw Error(ErrorCode::InvalidQuery, "duplicate query id " + q.id);
    }
    std::filesystem::create_directories(out_dir);

    struct Outcome {
        nlohmann::json line;
        std::optional<ErrorCode> error;
        double score = 0.0;
        std::string metric;
    };
    std::vector<Outcome> outcomes(queries.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < queries.size(); i = next++) {
            const auto& q = queries[i];
            auto& o = outcomes[i];
            try {
                const auto result = run_task(q, ctx);
                write_artifacts(result, out_dir / safe_name(q.id));
                o.line = result_to_json(q.id, result);
                o.score = result.chosen().score->value;
                o.metric = result.metric;
            } catch (const Error& e) {
                o.error = e.code();
                o.line = {{"id", q.id},
                          {"task", to_string(q.task)},
                          {"error", {{"code", to_string(e.code())}, {"message", e.detail()}}}};
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(queries.size())));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < n; ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    BatchSummary summary;
    std::string lines;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        const auto& o = outcomes[i];
        lines += o.line.dump() + "\n";
        auto& stats = summary.per_task[queries[i].task];
        ++stats.queries;
        ++summary.total;
        if (!o.error) {
            ++stats.succeeded;
            stats.score_sum += o.score;
            stats.metric = o.metric;
        } else if (*o.error == ErrorCode::AllCandidatesInvalid) {
            ++summary.generation_failures;
        } else if (is_provider_error(*o.error)) {
            ++summary.provider_failures;
        } else {
            ++summary.other_failures;
        }
    }
    write_text_file(out_dir / "results.jsonl", lines);
    return summary;
}

}  // namespace vecdraw
