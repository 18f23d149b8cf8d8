#pragma once

// Corpus curation: normalize raw SVGs, keep those whose render matches their
// description, derive partial drawings, split off a test set and emit the
// five training-record streams.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vecdraw/guidance.hpp"
#include "vecdraw/metrics.hpp"
#include "vecdraw/svg.hpp"

namespace vecdraw {

inline constexpr double kClipThreshold = 20.0;  // retained iff score > threshold
inline constexpr std::size_t kDefaultTestSize = 500;

/// First k paths, k uniform in [1, n-1] from SplitMix(seed). TooFewPaths when n < 2.
SvgDocument derive_partial(const SvgDocument& doc, std::uint64_t seed);

struct CurationRecord {
    std::string id;  // sha256(canonical SVG, NUL, text), first 16 hex digits
    SvgDocument complete;
    std::optional<SvgDocument> partial;  // absent for single-path documents
    std::string text;
    double clip_score = 0.0;
    std::string provider;
    std::string complete_render;  // relative to the dataset root
    std::optional<std::string> partial_render;
    std::string source;
};

enum class RejectReason { ParseFailed, NormalizeFailed, ScoreBelowThreshold, TooFewPaths };
std::string_view to_string(RejectReason reason);

struct Rejection {
    RejectReason reason;
    std::string message;
    std::string source;
};

struct CurationOutcome {
    std::optional<CurationRecord> record;
    std::optional<Rejection> rejection;
};

struct CurateOptions {
    std::uint64_t seed = 0;
    double threshold = kClipThreshold;
    std::optional<std::filesystem::path> root;  // when set, renders are written under root/renders
    std::string source;
};

/// Lenient parse, normalize, render at 224, score against `text`, derive the
/// partial. Rejections are returned, never thrown; provider errors propagate.
CurationOutcome curate(std::string_view raw_svg, const std::string& text, EmbeddingPort& embedder,
                       const CurateOptions& options = {});

struct CorpusReport {
    std::vector<CurationRecord> records;  // sorted by id, unique
    std::vector<Rejection> rejections;    // sorted by source
    std::size_t inputs = 0;
    std::size_t duplicates = 0;
};

/// `metadata` is a JSON object mapping SVG paths (relative to `input_dir`) to
/// descriptions. Writes records.jsonl, rejections.jsonl, manifest.json and
/// renders/ under `out_dir`.
CorpusReport curate_corpus(const std::filesystem::path& input_dir, const std::filesystem::path& metadata,
                           EmbeddingPort& embedder, const std::filesystem::path& out_dir, std::uint64_t seed,
                           unsigned jobs = 1);

nlohmann::json record_to_json(const CurationRecord& r);
CurationRecord record_from_json(const nlohmann::json& j);
std::vector<CurationRecord> load_records(const std::filesystem::path& jsonl);
void save_records(const std::vector<CurationRecord>& records, const std::filesystem::path& jsonl);

struct Split {
    std::vector<std::string> train;  // sorted
    std::vector<std::string> test;   // sorted
};

/// Seeded sample of `test_size` ids without replacement over the sorted ids.
/// NotEnoughRecords unless ids.size() > test_size; InvalidArgument on duplicates.
Split split(std::vector<std::string> ids, std::size_t test_size = kDefaultTestSize, std::uint64_t seed = 0);
nlohmann::json split_manifest(const Split& s, std::size_t test_size, std::uint64_t seed);

enum class Flavor { I2S, T2S, IT2S, PartialT2S, PartialIT2S };
std::string_view to_string(Flavor flavor);  // d_i2s, d_t2s, d_it2s, dp_t2s, dp_it2s
std::optional<Flavor> parse_flavor(std::string_view name);
bool is_partial(Flavor flavor);

/// Captions keyed by the SHA-256 of the complete render's PNG bytes.
class CaptionCache {
public:
    static std::string key(const CurationRecord& r);
    std::optional<std::string> find(const std::string& key) const;
    void put(const std::string& key, std::string caption);
    std::size_t size() const { return entries_.size(); }
    /// Captions every record not yet cached.
    void fill(const std::vector<CurationRecord>& records, GuidancePort& guidance);

    nlohmann::json to_json() const;
    static CaptionCache from_json(const nlohmann::json& j);

private:
    std::map<std::string, std::string> entries_;
};

/// One line per eligible record, sorted by id: {id, flavor, input, output}.
/// Partial flavors skip records without a partial. d_it2s raises
/// MissingCaption when a record's caption is not cached.
std::vector<nlohmann::json> emit_training_records(const std::vector<CurationRecord>& records, Flavor flavor,
                                                  const CaptionCache* captions = nullptr);

}  // namespace vecdraw
