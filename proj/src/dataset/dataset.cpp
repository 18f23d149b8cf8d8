#include <algorithm>
#include <atomic>
#include <cstdio>
#include <functional>
#include <thread>

#include "vecdraw/dataset.hpp"
#include "vecdraw/encoding.hpp"
#include "vecdraw/error.hpp"
#include "vecdraw/normalize.hpp"

namespace vecdraw {

namespace {

constexpr std::size_t kIdDigits = 16;

void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) fn(i);
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < workers; ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
}

void write_renders(const CurationRecord& r, const std::filesystem::path& root) {
    std::filesystem::create_directories(root / "renders");
    write_image((root / r.complete_render).string(), render(r.complete, kDefaultResolution));
    if (r.partial && r.partial_render) write_image((root / *r.partial_render).string(), render(*r.partial, kDefaultResolution));
}

std::string two_decimals(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

constexpr RejectReason kReasons[] = {RejectReason::ParseFailed, RejectReason::NormalizeFailed,
                                     RejectReason::ScoreBelowThreshold, RejectReason::TooFewPaths};

}  // namespace

SvgDocument derive_partial(const SvgDocument& doc, std::uint64_t seed) {
    const std::size_t n = doc.paths.size();
    if (n < 2) throw Error(ErrorCode::TooFewPaths, "a partial needs at least 2 paths, got " + std::to_string(n));
    SplitMix rng(seed);
    const auto k = static_cast<std::size_t>(rng.range(1, static_cast<std::int64_t>(n - 1)));
    SvgDocument out;
    out.viewbox = doc.viewbox;
    out.paths.assign(doc.paths.begin(), doc.paths.begin() + static_cast<std::ptrdiff_t>(k));
    return out;
}

std::string_view to_string(RejectReason reason) {
    switch (reason) {
    case RejectReason::ParseFailed: return "ParseFailed";
    case RejectReason::NormalizeFailed: return "NormalizeFailed";
    case RejectReason::ScoreBelowThreshold: return "ScoreBelowThreshold";
    case RejectReason::TooFewPaths: return "TooFewPaths";
    }
    return "unknown";
}

CurationOutcome curate(std::string_view raw_svg, const std::string& text, EmbeddingPort& embedder,
                       const CurateOptions& options) {
    CurationOutcome out;
    auto reject = [&](RejectReason reason, std::string message) {
        out.rejection = Rejection{reason, std::move(message), options.source};
        return out;
    };
    SvgDocument parsed;
    try {
        parsed = parse_svg(raw_svg, {ParseMode::Lenient});
    } catch (const Error& e) {
        return reject(RejectReason::ParseFailed, e.what());
    }
    SvgDocument doc;
    try {
        doc = normalize(parsed);
    } catch (const Error& e) {
        return reject(RejectReason::NormalizeFailed, e.what());
    }
    if (doc.paths.empty()) return reject(RejectReason::TooFewPaths, "no drawable paths");

    const std::string canonical = serialize_svg(doc);
    const auto score = clip_score(text, render(doc, kDefaultResolution), embedder);
    if (!(score.value > options.threshold)) {
        return reject(RejectReason::ScoreBelowThreshold,
                      "clip score " + two_decimals(score.value) + " <= " + two_decimals(options.threshold));
    }

    CurationRecord r;
    r.id = sha256_hex(canonical + '\0' + text).substr(0, kIdDigits);
    r.text = text;
    r.clip_score = score.value;
    r.provider = score.provider;
    r.source = options.source;
    r.complete_render = "renders/" + r.id + ".png";
    if (doc.paths.size() >= 2) {
        r.partial = derive_partial(doc, options.seed ^ fnv1a64(canonical));
        r.partial_render = "renders/" + r.id + "_partial.png";
    }
    r.complete = std::move(doc);
    if (options.root) write_renders(r, *options.root);
    out.record = std::move(r);
    return out;
}

CorpusReport curate_corpus(const std::filesystem::path& input_dir, const std::filesystem::path& metadata,
                           EmbeddingPort& embedder, const std::filesystem::path& out_dir, std::uint64_t seed,
                           unsigned jobs) {
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(read_text_file(metadata));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, metadata.string() + ": " + e.what());
    }
    if (!meta.is_object()) throw Error(ErrorCode::InvalidArgument, metadata.string() + ": expected a JSON object");
    std::vector<std::pair<std::string, std::string>> entries;
    for (const auto& [file, text] : meta.items()) {
        if (!text.is_string()) throw Error(ErrorCode::InvalidArgument, metadata.string() + ": '" + file + "' has no text");
        entries.emplace_back(file, text.get<std::string>());
    }

    std::vector<CurationOutcome> outcomes(entries.size());
    parallel_for(entries.size(), jobs, [&](std::size_t i) {
        const auto& [file, text] = entries[i];
        CurateOptions opts;
        opts.seed = seed;
        opts.source = file;
        std::string raw;
        try {
            raw = read_text_file(input_dir / file);
        } catch (const Error& e) {
            outcomes[i].rejection = Rejection{RejectReason::ParseFailed, e.what(), file};
            return;
        }
        outcomes[i] = curate(raw, text, embedder, opts);
    });

    CorpusReport report;
    report.inputs = entries.size();
    for (auto& o : outcomes) {
        if (o.record) report.records.push_back(std::move(*o.record));
        else report.rejections.push_back(std::move(*o.rejection));
    }
    std::stable_sort(report.records.begin(), report.records.end(),
                     [](const auto& a, const auto& b) { return a.id < b.id; });
    const auto last = std::unique(report.records.begin(), report.records.end(),
                                  [](const auto& a, const auto& b) { return a.id == b.id; });
    report.duplicates = static_cast<std::size_t>(report.records.end() - last);
    report.records.erase(last, report.records.end());

    std::filesystem::create_directories(out_dir / "renders");
    parallel_for(report.records.size(), jobs, [&](std::size_t i) { write_renders(report.records[i], out_dir); });
    save_records(report.records, out_dir / "records.jsonl");

    std::string rejected;
    nlohmann::json by_reason = nlohmann::json::object();
    for (auto reason : kReasons) by_reason[std::string(to_string(reason))] = 0;
    for (const auto& r : report.rejections) {
        rejected += nlohmann::json{{"source", r.source}, {"reason", to_string(r.reason)}, {"message", r.message}}.dump() + "\n";
        by_reason[std::string(to_string(r.reason))] = by_reason[std::string(to_string(r.reason))].get<int>() + 1;
    }
    write_text_file(out_dir / "rejections.jsonl", rejected);

    const auto with_partial = std::count_if(report.records.begin(), report.records.end(),
                                            [](const auto& r) { return r.partial.has_value(); });
    const nlohmann::json manifest = {{"inputs", report.inputs},
                                     {"retained", report.records.size()},
                                     {"rejected", report.rejections.size()},
                                     {"duplicates", report.duplicates},
                                     {"rejections_by_reason", by_reason},
                                     {"with_partial", with_partial},
                                     {"threshold", kClipThreshold},
                                     {"seed", seed},
                                     {"embedder", embedder.provider()}};
    write_text_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
    return report;
}

nlohmann::json record_to_json(const CurationRecord& r) {
    return {{"id", r.id},
            {"text", r.text},
            {"clip_score", r.clip_score},
            {"provider", r.provider},
            {"complete_svg", serialize_svg(r.complete)},
            {"partial_svg", r.partial ? nlohmann::json(serialize_svg(*r.partial)) : nlohmann::json(nullptr)},
            {"complete_render", r.complete_render},
            {"partial_render", r.partial_render ? nlohmann::json(*r.partial_render) : nlohmann::json(nullptr)},
            {"source", r.source}};
}

CurationRecord record_from_json(const nlohmann::json& j) {
    try {
        CurationRecord r;
        r.id = j.at("id").get<std::string>();
        r.text = j.at("text").get<std::string>();
        r.clip_score = j.at("clip_score").get<double>();
        r.provider = j.value("provider", "");
        r.complete = parse_svg(j.at("complete_svg").get<std::string>());
        if (j.contains("partial_svg") && !j["partial_svg"].is_null()) {
            r.partial = parse_svg(j["partial_svg"].get<std::string>());
        }
        r.complete_render = j.at("complete_render").get<std::string>();
        if (j.contains("partial_render") && !j["partial_render"].is_null()) {
            r.partial_render = j["partial_render"].get<std::string>();
        }
        r.source = j.value("source", "");
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("malformed record: ") + e.what());
    }
}

std::vector<CurationRecord> load_records(const std::filesystem::path& jsonl) {
    const std::string text = read_text_file(jsonl);
    std::vector<CurationRecord> out;
    std::size_t pos = 0, line_no = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        const auto line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(record_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::InvalidArgument, jsonl.string() + " line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

void save_records(const std::vector<CurationRecord>& records, const std::filesystem::path& jsonl) {
    std::string out;
    for (const auto& r : records) out += record_to_json(r).dump() + "\n";
    write_text_file(jsonl, out);
}

Split split(std::vector<std::string> ids, std::size_t test_size, std::uint64_t seed) {
    if (ids.size() <= test_size) {
        throw Error(ErrorCode::NotEnoughRecords, std::to_string(ids.size()) + " records cannot hold a test set of " +
                                                     std::to_string(test_size));
    }
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
        throw Error(ErrorCode::InvalidArgument, "duplicate record id " + *std::adjacent_find(ids.begin(), ids.end()));
    }
    SplitMix rng(seed);
    const auto n = static_cast<std::int64_t>(ids.size());
    for (std::size_t i = 0; i < test_size; ++i) {
        const auto j = static_cast<std::size_t>(rng.range(static_cast<std::int64_t>(i), n - 1));
        std::swap(ids[i], ids[j]);
    }
    Split s;
    s.test.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(test_size));
    s.train.assign(ids.begin() + static_cast<std::ptrdiff_t>(test_size), ids.end());
    std::sort(s.test.begin(), s.test.end());
    std::sort(s.train.begin(), s.train.end());
    return s;
}

nlohmann::json split_manifest(const Split& s, std::size_t test_size, std::uint64_t seed) {
    return {{"seed", seed},
            {"test_size", test_size},
            {"train_count", s.train.size()},
            {"test_count", s.test.size()},
            {"train", s.train},
            {"test", s.test}};
}

namespace {

struct FlavorName {
    Flavor flavor;
    std::string_view name;
};

constexpr FlavorName kFlavors[] = {{Flavor::I2S, "d_i2s"},
                                   {Flavor::T2S, "d_t2s"},
                                   {Flavor::IT2S, "d_it2s"},
                                   {Flavor::PartialT2S, "dp_t2s"},
                                   {Flavor::PartialIT2S, "dp_it2s"}};

}  // namespace

std::string_view to_string(Flavor flavor) {
    for (const auto& f : kFlavors) {
        if (f.flavor == flavor) return f.name;
    }
    return "unknown";
}

std::optional<Flavor> parse_flavor(std::string_view name) {
    for (const auto& f : kFlavors) {
        if (f.name == name) return f.flavor;
    }
    return std::nullopt;
}

bool is_partial(Flavor flavor) { return flavor == Flavor::PartialT2S || flavor == Flavor::PartialIT2S; }

std::string CaptionCache::key(const CurationRecord& r) {
    return sha256_hex(encode_png(render(r.complete, kDefaultResolution)));
}

std::optional<std::string> CaptionCache::find(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void CaptionCache::put(const std::string& key, std::string caption) { entries_[key] = std::move(caption); }

void CaptionCache::fill(const std::vector<CurationRecord>& records, GuidancePort& guidance) {
    for (const auto& r : records) {
        const auto image = render(r.complete, kDefaultResolution);
        const auto k = sha256_hex(encode_png(image));
        if (entries_.count(k)) continue;
        entries_[k] = truncate_words(guidance.caption_image(image), kMaxCaptionWords);
    }
}

nlohmann::json CaptionCache::to_json() const { return entries_; }

CaptionCache CaptionCache::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "caption cache must be a JSON object");
    CaptionCache c;
    for (const auto& [k, v] : j.items()) {
        if (!v.is_string()) throw Error(ErrorCode::InvalidArgument, "caption for " + k + " is not a string");
        c.entries_[k] = v.get<std::string>();
    }
    return c;
}

std::vector<nlohmann::json> emit_training_records(const std::vector<CurationRecord>& records, Flavor flavor,
                                                  const CaptionCache* captions) {
    std::vector<const CurationRecord*> sorted;
    for (const auto& r : records) {
        if (!is_partial(flavor) || r.partial) sorted.push_back(&r);
    }
    std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) { return a->id < b->id; });

    std::vector<nlohmann::json> out;
    for (const auto* r : sorted) {
        nlohmann::json input = nlohmann::json::object();
        switch (flavor) {
        case Flavor::I2S: input["image"] = r->complete_render; break;
        case Flavor::T2S: input["text"] = r->text; break;
        case Flavor::IT2S: {
            const auto caption = captions ? captions->find(CaptionCache::key(*r)) : std::nullopt;
            if (!caption) throw Error(ErrorCode::MissingCaption, "no cached caption for record " + r->id);
            input["image"] = r->complete_render;
            input["text"] = r->text;
            input["aux_text"] = *caption;
            break;
        }
        case Flavor::PartialT2S:
            input["text"] = r->text;
            input["partial_svg"] = serialize_svg(*r->partial);
            break;
        case Flavor::PartialIT2S:
            input["image"] = r->complete_render;
            input["text"] = r->text;
            input["partial_svg"] = serialize_svg(*r->partial);
            break;
        }
        out.push_back({{"id", r->id}, {"flavor", to_string(flavor)}, {"input", input}, {"output", serialize_svg(r->complete)}});
    }
    return out;
}

}  // namespace vecdraw
