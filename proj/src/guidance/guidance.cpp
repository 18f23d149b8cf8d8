#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "procedural.hpp"
#include "vecdraw/encoding.hpp"
#include "vecdraw/error.hpp"
#include "vecdraw/guidance.hpp"

namespace vecdraw {

std::string text_to_image_prompt(const std::string& description) {
    return "Minimalist vector-style icon of " + description + ". Empty background.";
}

std::string edit_image_prompt(const std::string& description) {
    return "Keep as many original elements as possible, but edit by adding elements to transform it into a "
           "minimalist vector-style icon: " +
           description;
}

std::string caption_prompt() { return "Please describe it within 50 words."; }

std::string suggestion_prompt(const std::string& description) {
    return "This image is an unfinished drawing. In one sentence, say which elements should be added so that it "
           "fully represents the following description: " +
           description;
}

std::string truncate_words(const std::string& text, std::size_t max_words) {
    std::istringstream in(text);
    std::string word, out;
    std::size_t n = 0;
    while (n < max_words && in >> word) {
        if (n++) out += ' ';
        out += word;
    }
    return out;
}

namespace {

void require_text(const std::string& text, const char* op) {
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
        throw Error(ErrorCode::InvalidArgument, std::string(op) + ": text must be non-empty");
    }
}

std::string image_key(const RasterImage& img) {
    const auto& px = img.pixels();
    const std::uint64_t h = fnv1a64(std::string_view(reinterpret_cast<const char*>(px.data()), px.size()),
                                    fnv1a64(std::to_string(img.width()) + "x" + std::to_string(img.height())));
    return std::to_string(h);
}

std::string percent(double fraction) { return std::to_string(static_cast<int>(std::lround(fraction * 100.0))) + "%"; }

}  // namespace

MockGuidance::MockGuidance(std::uint64_t seed, int resolution) : seed_(seed), resolution_(resolution) {
    if (resolution < 16) throw Error(ErrorCode::InvalidArgument, "resolution must be >= 16");
}

Provenance MockGuidance::provenance(const std::string& operation) const { return {"mock", operation, seed_}; }

RasterImage MockGuidance::text_to_image(const std::string& text) {
    require_text(text, "text_to_image");
    const auto doc = detail::procedural_icon(text, mock_seed("text_to_image", text, seed_), 3);
    return render(doc, resolution_);
}

RasterImage MockGuidance::edit_image(const RasterImage& image, const std::string& text) {
    require_text(text, "edit_image");
    SplitMix rng(mock_seed("edit_image", text + '\n' + image_key(image), seed_));
    const auto colors = detail::color_words(text);
    SvgDocument overlay;
    for (std::size_t i = 0; i < 2; ++i) overlay.paths.push_back(detail::procedural_shape(rng, colors, i + 1));
    const auto layer = render(overlay, std::max(image.width(), image.height()));

    RasterImage out = image;
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            if (!image.is_white(x, y)) continue;
            std::copy_n(layer.at(x, y), 3, out.at(x, y));
        }
    }
    return out;
}

std::string MockGuidance::caption_image(const RasterImage& image) {
    if (image.all_white()) return kBlankCaption;
    const auto& palette = mock_palette();
    std::vector<std::size_t> counts(palette.size(), 0);
    std::size_t inked = 0;
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            if (image.is_white(x, y)) continue;
            ++inked;
            const auto* p = image.at(x, y);
            ++counts[nearest_palette_index(p[0], p[1], p[2])];
        }
    }
    const double coverage = static_cast<double>(inked) / (static_cast<double>(image.width()) * image.height());
    std::vector<std::size_t> order;
    for (std::size_t i = 1; i < palette.size(); ++i) {
        if (counts[i] > 0) order.push_back(i);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });
    if (order.empty()) return "faint sketch covering " + percent(coverage) + " of the canvas";
    std::string colors = palette[order[0]].name;
    if (order.size() > 1) colors += std::string(" and ") + palette[order[1]].name;
    return "minimalist icon in " + colors + " covering " + percent(coverage) + " of the canvas";
}

std::string MockGuidance::suggest_completion(const std::string& text, const RasterImage&) {
    require_text(text, "suggest_completion");
    return "add remaining elements to match: " + text;
}

// ---------------------------------------------------------------------------

HttpGuidance::HttpGuidance(BackendConfig cfg, int resolution) : cfg_(std::move(cfg)), resolution_(resolution) {
    cfg_.validate();
}

Provenance HttpGuidance::provenance(const std::string& operation) const {
    return {"http:" + cfg_.endpoint, operation, cfg_.seed};
}

RasterImage HttpGuidance::image_reply(const nlohmann::json& reply, const std::string& op) const {
    if (!reply.is_object() || !reply.contains("png_base64") || !reply["png_base64"].is_string()) {
        throw Error(ErrorCode::ProviderMalformedResponse, op + ": reply lacks 'png_base64'");
    }
    try {
        return decode_png(base64_decode(reply["png_base64"].get<std::string>()));
    } catch (const Error& e) {
        throw Error(ErrorCode::ProviderMalformedResponse, op + ": " + e.detail());
    }
}

std::string HttpGuidance::text_reply(const nlohmann::json& reply, const std::string& op) const {
    if (!reply.is_object() || !reply.contains("text") || !reply["text"].is_string()) {
        throw Error(ErrorCode::ProviderMalformedResponse, op + ": reply lacks 'text'");
    }
    auto text = reply["text"].get<std::string>();
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
        throw Error(ErrorCode::ProviderMalformedResponse, op + ": empty text");
    }
    return text;
}

RasterImage HttpGuidance::text_to_image(const std::string& text) {
    require_text(text, "text_to_image");
    const auto reply = post_json(
        cfg_, "/text_to_image",
        {{"prompt", text_to_image_prompt(text)}, {"seed", cfg_.seed}, {"resolution", resolution_}}, "text_to_image");
    return resample_letterbox(image_reply(reply, "text_to_image"), resolution_);
}

RasterImage HttpGuidance::edit_image(const RasterImage& image, const std::string& text) {
    require_text(text, "edit_image");
    const auto reply = post_json(
        cfg_, "/edit_image", {{"png_base64", base64_encode(encode_png(image))}, {"prompt", edit_image_prompt(text)}},
        "edit_image");
    auto out = image_reply(reply, "edit_image");
    if (out.width() != image.width() || out.height() != image.height()) {
        throw Error(ErrorCode::ProviderMalformedResponse, "edit_image: provider changed the image dimensions");
    }
    return out;
}

std::string HttpGuidance::caption_image(const RasterImage& image) {
    const auto reply = post_json(
        cfg_, "/caption", {{"png_base64", base64_encode(encode_png(image))}, {"prompt", caption_prompt()}}, "caption");
    return truncate_words(text_reply(reply, "caption"), kMaxCaptionWords);
}

std::string HttpGuidance::suggest_completion(const std::string& text, const RasterImage& partial_image) {
    require_text(text, "suggest_completion");
    const auto reply = post_json(
        cfg_, "/suggest",
        {{"prompt", suggestion_prompt(text)}, {"png_base64", base64_encode(encode_png(partial_image))}}, "suggest");
    return text_reply(reply, "suggest");
}

std::unique_ptr<GuidancePort> make_guidance(const BackendConfig& cfg, int resolution) {
    if (cfg.is_mock()) return std::make_unique<MockGuidance>(cfg.seed, resolution);
    return std::make_unique<HttpGuidance>(cfg, resolution);
}

RasterImage text_to_image(const std::string& text, const BackendConfig& cfg, int resolution) {
    return make_guidance(cfg, resolution)->text_to_image(text);
}

RasterImage edit_image(const RasterImage& image, const std::string& text, const BackendConfig& cfg) {
    return make_guidance(cfg)->edit_image(image, text);
}

std::string caption_image(const RasterImage& image, const BackendConfig& cfg) {
    return make_guidance(cfg)->caption_image(image);
}

std::string suggest_completion(const std::string& text, const RasterImage& partial_image, const BackendConfig& cfg) {
    return make_guidance(cfg)->suggest_completion(text, partial_image);
}

}  // namespace vecdraw
