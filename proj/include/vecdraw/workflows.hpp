#pragma once

// The four drawing tasks: gather guidance, fan out to generator modules,
// score every valid candidate and keep the best one. Plus a JSONL batch runner.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vecdraw/generator.hpp"
#include "vecdraw/guidance.hpp"
#include "vecdraw/metrics.hpp"

namespace vecdraw {

enum class Task { TextToSvg, ImageToSvg, PartialSvgToSvg, PartialImageToSvg };

std::string_view to_string(Task task);  // text_to_svg, image_to_svg, partialsvg_to_svg, partialimage_to_svg
/// Accepts the long names and t1..t4.
std::optional<Task> parse_task(std::string_view name);

struct TaskQuery {
    std::string id;
    Task task = Task::TextToSvg;
    std::optional<std::string> text;          // T_c
    std::optional<RasterImage> image;         // I_c or I_p
    std::optional<SvgDocument> partial_svg;   // S_p, normalized

    /// Throws InvalidQuery unless exactly the task's fields are present:
    /// t1 {text}, t2 {image}, t3 {text, partial_svg}, t4 {text, image}.
    void validate() const;
};

struct Candidate {
    ModuleKind module = ModuleKind::Text2Svg;
    std::vector<std::string> inputs;  // e.g. {"T_c", "G_ic"}
    std::uint64_t seed = 0;
    ValidityReport validity;
    std::optional<SvgDocument> document;
    std::string svg_text;
    std::optional<Score> score;
    int attempts = 0;
};

struct TaskResult {
    Task task = Task::TextToSvg;
    std::vector<Candidate> candidates;  // module order of the task definition
    std::size_t chosen_index = 0;       // into `candidates`
    GuidanceBundle guidance;
    SvgDocument output;
    std::string output_svg;
    std::string metric;     // "clip" or "ssim"
    std::string reference;  // "T_c", "I_c" or "G_ie"

    const Candidate& chosen() const { return candidates.at(chosen_index); }
};

struct WorkflowContext {
    GuidancePort& guidance;
    GeneratorBackendPort& generator;
    EmbeddingPort& embedder;
    std::uint64_t seed = 0;
    bool parallel = true;  // run independent backend calls concurrently
};

inline constexpr int kScoreResolution = 224;

std::uint64_t candidate_seed(std::uint64_t seed, std::size_t index);

/// Each raises InvalidQuery on a mismatched query and AllCandidatesInvalid
/// when no candidate survives validation. Provider errors propagate.
TaskResult run_text_to_svg(const TaskQuery& query, WorkflowContext& ctx);
TaskResult run_image_to_svg(const TaskQuery& query, WorkflowContext& ctx);
TaskResult run_partialsvg_to_svg(const TaskQuery& query, WorkflowContext& ctx);
TaskResult run_partialimage_to_svg(const TaskQuery& query, WorkflowContext& ctx);
TaskResult run_task(const TaskQuery& query, WorkflowContext& ctx);

// ---------------------------------------------------------------------------
// Batch runner

/// One JSON object per line: {"id"?, "task", "text"?, "image"?, "partial_svg"?}.
/// `image` is a PNG/PPM path and `partial_svg` an SVG path or inline markup;
/// relative paths resolve against `base_dir`. Missing ids become q00001, ...
TaskQuery parse_query(const nlohmann::json& line, const std::filesystem::path& base_dir, std::size_t line_no);
std::vector<TaskQuery> load_queries(const std::filesystem::path& jsonl);

nlohmann::json result_to_json(const std::string& id, const TaskResult& result);

/// Candidate SVGs and renders, the output SVG, the score table and the guidance.
void write_artifacts(const TaskResult& result, const std::filesystem::path& dir);

struct TaskStats {
    std::size_t queries = 0;
    std::size_t succeeded = 0;
    double score_sum = 0.0;
    std::string metric;

    double mean_score() const { return succeeded ? score_sum / static_cast<double>(succeeded) : 0.0; }
};

struct BatchSummary {
    std::size_t total = 0;
    std::size_t generation_failures = 0;  // AllCandidatesInvalid
    std::size_t provider_failures = 0;
    std::size_t other_failures = 0;
    std::map<Task, TaskStats> per_task;
};

/// Runs every query with up to `jobs` workers. Writes `<out>/results.jsonl` in
/// input order and `<out>/<id>/` artifact directories. Failed queries get an
/// error line and no artifacts.
BatchSummary run_batch(const std::vector<TaskQuery>& queries, WorkflowContext& ctx,
                       const std::filesystem::path& out_dir, unsigned jobs = 1);

}  // namespace vecdraw
