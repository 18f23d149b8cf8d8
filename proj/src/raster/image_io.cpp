#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "vecdraw/error.hpp"
#include "vecdraw/raster.hpp"

namespace vecdraw {

std::vector<std::uint8_t> encode_png(const RasterImage& img) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width());
    image.height = static_cast<png_uint_32>(img.height());
    image.format = PNG_FORMAT_RGB;
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&image, nullptr, &size, 0, img.pixels().data(), 0, nullptr)) {
        throw Error(ErrorCode::Io, std::string("PNG encode failed: ") + image.message);
    }
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&image, out.data(), &size, 0, img.pixels().data(), 0, nullptr)) {
        throw Error(ErrorCode::Io, std::string("PNG encode failed: ") + image.message);
    }
    out.resize(size);
    return out;
}

RasterImage decode_png(const std::vector<std::uint8_t>& bytes) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
        throw Error(ErrorCode::ImageDecode, std::string("not a PNG: ") + image.message);
    }
    image.format = PNG_FORMAT_RGB;
    // Transparent regions are composited over white, matching the render background.
    png_color background{255, 255, 255};
    std::vector<std::uint8_t> px(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, &background, px.data(), 0, nullptr)) {
        throw Error(ErrorCode::ImageDecode, std::string("PNG decode failed: ") + image.message);
    }
    return RasterImage(static_cast<int>(image.width), static_cast<int>(image.height), std::move(px));
}

std::vector<std::uint8_t> encode_ppm(const RasterImage& img) {
    const std::string header = "P6\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.pixels().begin(), img.pixels().end());
    return out;
}

void write_image(const std::string& path, const RasterImage& img) {
    const bool ppm = path.size() >= 4 && path.compare(path.size() - 4, 4, ".ppm") == 0;
    const auto bytes = ppm ? encode_ppm(img) : encode_png(img);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::Io, "cannot write " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw Error(ErrorCode::Io, "short write to " + path);
}

RasterImage read_png_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::Io, "cannot read " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return decode_png(bytes);
}

RasterImage resample_letterbox(const RasterImage& img, int side) {
    if (side < 1) throw Error(ErrorCode::InvalidArgument, "side must be positive");
    if (img.width() == side && img.height() == side) return img;

    const double scale = static_cast<double>(side) / std::max(img.width(), img.height());
    const double content_w = img.width() * scale;
    const double content_h = img.height() * scale;
    const double off_x = (side - content_w) / 2.0;
    const double off_y = (side - content_h) / 2.0;

    RasterImage out(side, side);
    for (int y = 0; y < side; ++y) {
        // Source rows covered by this output row, clipped to the content area.
        const double sy0 = std::max(0.0, (y - off_y) / scale);
        const double sy1 = std::min(static_cast<double>(img.height()), (y + 1 - off_y) / scale);
        for (int x = 0; x < side; ++x) {
            const double sx0 = std::max(0.0, (x - off_x) / scale);
            const double sx1 = std::min(static_cast<double>(img.width()), (x + 1 - off_x) / scale);
            if (sx1 <= sx0 || sy1 <= sy0) continue;
            double acc[3] = {0, 0, 0};
            double total = 0;
            for (int iy = static_cast<int>(std::floor(sy0)); iy < static_cast<int>(std::ceil(sy1)); ++iy) {
                const double wy = std::min<double>(iy + 1, sy1) - std::max<double>(iy, sy0);
                if (wy <= 0) continue;
                for (int ix = static_cast<int>(std::floor(sx0)); ix < static_cast<int>(std::ceil(sx1)); ++ix) {
                    const double wx = std::min<double>(ix + 1, sx1) - std::max<double>(ix, sx0);
                    if (wx <= 0) continue;
                    const auto* p = img.at(ix, iy);
                    const double w = wx * wy;
                    for (int c = 0; c < 3; ++c) acc[c] += p[c] * w;
                    total += w;
                }
            }
            // Pixels straddling the letterbox edge blend with the white margin.
            const double cell = 1.0 / (scale * scale);
            auto* q = out.at(x, y);
            for (int c = 0; c < 3; ++c) {
                const double v = (acc[c] + 255.0 * std::max(0.0, cell - total)) / std::max(cell, total);
                q[c] = static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
            }
        }
    }
    return out;
}

}  // namespace vecdraw
