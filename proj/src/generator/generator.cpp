#include <fstream>
#include <iterator>
#include <map>

#include "../guidance/procedural.hpp"
#include "vecdraw/encoding.hpp"
#include "vecdraw/error.hpp"
#include "vecdraw/generator.hpp"
#include "vecdraw/normalize.hpp"

namespace vecdraw {

namespace {

constexpr std::string_view kCompletionHead =
    "Please complete the SVG code so that it fully represents the following description. Make sure to include the "
    "existing SVG code in the final result.\nDescription: ";
constexpr std::string_view kExistingMarker = ". Existing SVG code: ";

struct KindName {
    ModuleKind kind;
    std::string_view name;
};

constexpr KindName kKindNames[] = {{ModuleKind::Image2Svg, "image2svg"},
                                   {ModuleKind::Text2Svg, "text2svg"},
                                   {ModuleKind::ImageText2Svg, "imagetext2svg"},
                                   {ModuleKind::Text2SvgPartial, "text2svg_partial"},
                                   {ModuleKind::ImageText2SvgPartial, "imagetext2svg_partial"}};

bool has_text(const std::optional<std::string>& t) {
    return t && t->find_first_not_of(" \t\r\n") != std::string::npos;
}

std::string wrap_reply(const std::string& svg) {
    return "Here is the SVG code:\n```svg\n" + svg + "```\nLet me know if you would like any changes.\n";
}

}  // namespace

std::string_view to_string(ModuleKind kind) {
    for (const auto& k : kKindNames) {
        if (k.kind == kind) return k.name;
    }
    return "unknown";
}

std::optional<ModuleKind> parse_module_kind(std::string_view name) {
    for (const auto& k : kKindNames) {
        if (k.name == name) return k.kind;
    }
    return std::nullopt;
}

bool is_partial(ModuleKind kind) {
    return kind == ModuleKind::Text2SvgPartial || kind == ModuleKind::ImageText2SvgPartial;
}

void GenerationRequest::validate() const {
    const std::string name(to_string(kind));
    const bool needs_image = kind == ModuleKind::Image2Svg || kind == ModuleKind::ImageText2Svg ||
                             kind == ModuleKind::ImageText2SvgPartial;
    const bool needs_text = kind != ModuleKind::Image2Svg;
    if (needs_image && images.empty()) throw Error(ErrorCode::MissingRequiredInput, name + " needs an image");
    if (needs_text && !has_text(text)) throw Error(ErrorCode::MissingRequiredInput, name + " needs a description");
    if (is_partial(kind) && !partial_svg) throw Error(ErrorCode::MissingRequiredInput, name + " needs a partial SVG");
}

std::string build_prompt(const GenerationRequest& req) {
    req.validate();
    switch (req.kind) {
    case ModuleKind::Image2Svg:
        return "Convert this raster image to SVG code.";
    case ModuleKind::Text2Svg:
        return "Generate an SVG illustration from the given description: " + *req.text;
    case ModuleKind::ImageText2Svg: {
        std::string description = *req.text;
        if (has_text(req.aux_text)) description += kAuxTextSeparator + *req.aux_text;
        return "Convert this raster image to SVG code with the following description: " + description;
    }
    case ModuleKind::Text2SvgPartial:
    case ModuleKind::ImageText2SvgPartial:
        return std::string(kCompletionHead) + *req.text + std::string(kExistingMarker) + serialize_svg(*req.partial_svg);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown module kind");
}

std::optional<std::string> extract_svg(std::string_view reply) {
    std::size_t pos = 0;
    while ((pos = reply.find("<svg", pos)) != std::string_view::npos) {
        const std::size_t after = pos + 4;
        if (after < reply.size() && (reply[after] == '>' || std::isspace(static_cast<unsigned char>(reply[after])))) {
            const auto end = reply.find("</svg>", after);
            if (end == std::string_view::npos) return std::nullopt;
            return std::string(reply.substr(pos, end + 6 - pos));
        }
        pos = after;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------

HttpGenerator::HttpGenerator(BackendConfig cfg, int max_tokens) : cfg_(std::move(cfg)), max_tokens_(max_tokens) {
    cfg_.validate();
}

std::string HttpGenerator::provider() const { return "http:" + cfg_.endpoint; }

std::string HttpGenerator::complete(const std::string& prompt, const std::vector<RasterImage>& images,
                                    std::uint64_t seed) {
    nlohmann::json encoded = nlohmann::json::array();
    for (const auto& img : images) encoded.push_back(base64_encode(encode_png(img)));
    const auto reply = post_json(
        cfg_, "", {{"prompt", prompt}, {"images", encoded}, {"seed", seed}, {"max_tokens", max_tokens_}}, "generator");
    if (!reply.is_object() || !reply.contains("text") || !reply["text"].is_string()) {
        throw Error(ErrorCode::ProviderMalformedResponse, "generator: reply lacks 'text'");
    }
    return reply["text"].get<std::string>();
}

std::string request_hash(const std::string& prompt, const std::vector<RasterImage>& images, std::uint64_t seed) {
    nlohmann::json key{{"prompt", prompt}, {"seed", seed}, {"images", nlohmann::json::array()}};
    for (const auto& img : images) {
        key["images"].push_back(std::to_string(img.width()) + "x" + std::to_string(img.height()) + ":" +
                                sha256_hex(img.pixels()));
    }
    return sha256_hex(key.dump());
}

SvgDocument vectorize_blocks(const RasterImage& image, int cells) {
    if (cells < 1) throw Error(ErrorCode::InvalidArgument, "cells must be positive");
    const auto small = resample_letterbox(image, cells);
    const double step = kCanonicalSide / cells;
    auto level = [](std::uint8_t v) { return static_cast<std::uint8_t>((v + 8) / 17 * 17); };

    // One path per color, in order of first appearance; one subpath per run.
    std::vector<std::uint32_t> order;
    std::map<std::uint32_t, SvgPath> by_color;
    for (int y = 0; y < cells; ++y) {
        int x = 0;
        while (x < cells) {
            const auto* p = small.at(x, y);
            const Color c{level(p[0]), level(p[1]), level(p[2]), 1.0};
            const std::uint32_t key = (std::uint32_t(c.r) << 16) | (std::uint32_t(c.g) << 8) | c.b;
            int end = x + 1;
            while (end < cells) {
                const auto* q = small.at(end, y);
                if (level(q[0]) != c.r || level(q[1]) != c.g || level(q[2]) != c.b) break;
                ++end;
            }
            if (!(c.r >= 238 && c.g >= 238 && c.b >= 238)) {
                auto [it, inserted] = by_color.try_emplace(key);
                if (inserted) {
                    order.push_back(key);
                    it->second.style.fill = c;
                }
                auto& cmds = it->second.commands;
                const double x0 = x * step, x1 = end * step, y0 = y * step, y1 = (y + 1) * step;
                cmds.push_back(cmd::Move{{x0, y0}});
                cmds.push_back(cmd::Line{{x1, y0}});
                cmds.push_back(cmd::Line{{x1, y1}});
                cmds.push_back(cmd::Line{{x0, y1}});
                cmds.push_back(cmd::Close{});
            }
            x = end;
        }
    }
    SvgDocument doc;
    for (auto key : order) doc.paths.push_back(std::move(by_color[key]));
    return doc;
}

MockGenerator::MockGenerator(std::optional<std::filesystem::path> fixtures) : fixtures_(std::move(fixtures)) {}

std::string MockGenerator::complete(const std::string& prompt, const std::vector<RasterImage>& images,
                                    std::uint64_t seed) {
    if (fixtures_) {
        const auto file = *fixtures_ / (request_hash(prompt, images, seed) + ".svg");
        std::ifstream in(file, std::ios::binary);
        if (in) return wrap_reply(std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()));
    }

    const auto existing = prompt.find(kExistingMarker);
    if (prompt.rfind(kCompletionHead, 0) == 0 && existing != std::string::npos) {
        const std::string description =
            prompt.substr(kCompletionHead.size(), existing - kCompletionHead.size());
        const auto partial = extract_svg(std::string_view(prompt).substr(existing));
        SvgDocument doc = partial ? parse_svg(*partial) : SvgDocument{};
        SplitMix rng(mock_seed("complete", prompt, seed));
        const auto colors = detail::color_words(description);
        const int extra = 1 + static_cast<int>(rng.range(0, 1));
        for (int i = 0; i < extra; ++i) doc.paths.push_back(detail::procedural_shape(rng, colors, doc.paths.size()));
        return wrap_reply(serialize_svg(doc));
    }
    if (!images.empty()) {
        static constexpr int kCells[] = {10, 12, 14, 16, 20, 25};
        const auto pick = mock_seed("vectorize", prompt, seed) % std::size(kCells);
        return wrap_reply(serialize_svg(vectorize_blocks(images.front(), kCells[pick])));
    }
    const auto colon = prompt.find(": ");
    const std::string description = colon == std::string::npos ? prompt : prompt.substr(colon + 2);
    const auto s = mock_seed("text2svg", prompt, seed);
    return wrap_reply(serialize_svg(detail::procedural_icon(description, s, 2 + static_cast<int>(s % 3))));
}

// ---------------------------------------------------------------------------

Generation generate(const GenerationRequest& req, GeneratorBackendPort& backend) {
    const std::string prompt = build_prompt(req);
    std::optional<SvgDocument> partial;
    if (is_partial(req.kind)) partial = normalize(*req.partial_svg);

    std::string reasons;
    for (int attempt = 0; attempt <= kGenerationRetries; ++attempt) {
        const std::uint64_t seed = attempt == 0 ? req.seed : mock_seed("retry", std::to_string(attempt), req.seed);
        const std::string reply = backend.complete(prompt, req.images, seed);
        auto note = [&](const std::string& why) {
            reasons += (reasons.empty() ? "" : "; ") + std::string("attempt ") + std::to_string(attempt + 1) + ": " + why;
        };
        const auto svg = extract_svg(reply);
        if (!svg) {
            note("no <svg> block in reply");
            continue;
        }
        const auto report = check_svg(*svg);
        if (!report.valid) {
            note(report.diagnostics.front().code + " " + report.diagnostics.front().message);
            continue;
        }
        SvgDocument doc = normalize(parse_svg(*svg));
        if (partial && !preservation_check(*partial, doc)) {
            note("partial SVG not preserved");
            continue;
        }
        std::string text = serialize_svg(doc);
        return Generation{std::move(doc), std::move(text), attempt + 1};
    }
    throw Error(ErrorCode::GenerationInvalid,
                std::string(to_string(req.kind)) + " produced no valid SVG (" + reasons + ")");
}

}  // namespace vecdraw
