#include <algorithm>
#include <cmath>

#include "vecdraw/encoding.hpp"
#include "vecdraw/error.hpp"
#include "vecdraw/metrics.hpp"

namespace vecdraw {

Embedding Embedding::from_raw(std::vector<double> raw, std::string provider) {
    double norm2 = 0.0;
    for (double v : raw) norm2 += v * v;
    const double norm = std::sqrt(norm2);
    if (raw.empty() || !std::isfinite(norm) || norm == 0.0) {
        throw Error(ErrorCode::ProviderMalformedResponse, provider + ": embedding is empty, zero or non-finite");
    }
    for (double& v : raw) v /= norm;
    return Embedding{std::move(raw), std::move(provider)};
}

double cosine(const Embedding& a, const Embedding& b) {
    if (a.vector.size() != b.vector.size()) {
        throw Error(ErrorCode::DimensionMismatch, "embedding sizes differ: " + std::to_string(a.vector.size()) +
                                                      " vs " + std::to_string(b.vector.size()));
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < a.vector.size(); ++i) dot += a.vector[i] * b.vector[i];
    return std::clamp(dot, -1.0, 1.0);
}

Score clip_score(const std::string& text, const RasterImage& image, EmbeddingPort& embedder) {
    const double c = cosine(embedder.embed_text(text), embedder.embed_image(image));
    return Score{"clip", 100.0 * std::max(0.0, c), ReferenceKind::Text, embedder.provider()};
}

Score dino_similarity(const RasterImage& a, const RasterImage& b, EmbeddingPort& embedder) {
    const double c = cosine(embedder.embed_image(a), embedder.embed_image(b));
    return Score{"dino", c, ReferenceKind::Image, embedder.provider()};
}

HttpEmbedder::HttpEmbedder(BackendConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

std::string HttpEmbedder::provider() const { return "http:" + cfg_.endpoint; }

Embedding HttpEmbedder::embed_text(const std::string& text) { return request("text", text); }

Embedding HttpEmbedder::embed_image(const RasterImage& image) {
    return request("image", base64_encode(encode_png(image)));
}

Embedding HttpEmbedder::request(const std::string& kind, const std::string& payload) {
    const auto reply = post_json(cfg_, "", {{"kind", kind}, {"payload", payload}}, "embedder");
    if (!reply.is_object() || !reply.contains("vector") || !reply["vector"].is_array()) {
        throw Error(ErrorCode::ProviderMalformedResponse, "embedder: reply lacks a 'vector' array");
    }
    std::vector<double> v;
    for (const auto& x : reply["vector"]) {
        if (!x.is_number()) throw Error(ErrorCode::ProviderMalformedResponse, "embedder: non-numeric vector entry");
        v.push_back(x.get<double>());
    }
    return Embedding::from_raw(std::move(v), provider());
}

}  // namespace vecdraw
