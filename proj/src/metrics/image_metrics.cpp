#include <cmath>
#include <string>
#include <vector>

#include "vecdraw/error.hpp"
#include "vecdraw/metrics.hpp"

namespace vecdraw {

namespace {

void require_same_size(const RasterImage& a, const RasterImage& b) {
    if (a.width() != b.width() || a.height() != b.height()) {
        throw Error(ErrorCode::DimensionMismatch, std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                                                      " vs " + std::to_string(b.width()) + "x" +
                                                      std::to_string(b.height()));
    }
}

std::vector<double> luma(const RasterImage& img) {
    std::vector<double> out(static_cast<std::size_t>(img.width()) * img.height());
    const auto& px = img.pixels();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = 0.299 * px[3 * i] + 0.587 * px[3 * i + 1] + 0.114 * px[3 * i + 2];
    }
    return out;
}

std::vector<double> gaussian_kernel() {
    std::vector<double> k(kSsimWindow);
    const int r = kSsimWindow / 2;
    double sum = 0.0;
    for (int i = -r; i <= r; ++i) {
        k[i + r] = std::exp(-(i * i) / (2.0 * kSsimSigma * kSsimSigma));
        sum += k[i + r];
    }
    for (double& v : k) v /= sum;
    return k;
}

// Separable filtering restricted to positions where the window fits.
std::vector<double> filter_valid(const std::vector<double>& src, int w, int h, const std::vector<double>& k) {
    const int n = static_cast<int>(k.size());
    const int ow = w - n + 1, oh = h - n + 1;
    std::vector<double> rows(static_cast<std::size_t>(ow) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += k[i] * src[static_cast<std::size_t>(y) * w + x + i];
            rows[static_cast<std::size_t>(y) * ow + x] = s;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(ow) * oh);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += k[i] * rows[static_cast<std::size_t>(y + i) * ow + x];
            out[static_cast<std::size_t>(y) * ow + x] = s;
        }
    }
    return out;
}

}  // namespace

bool higher_is_better(std::string_view metric) { return metric != "mse"; }

Score mse(const RasterImage& a, const RasterImage& b) {
    require_same_size(a, b);
    double sum = 0.0;
    const auto& pa = a.pixels();
    const auto& pb = b.pixels();
    for (std::size_t i = 0; i < pa.size(); ++i) {
        const double d = (static_cast<double>(pa[i]) - pb[i]) / 255.0;
        sum += d * d;
    }
    return Score{"mse", sum / static_cast<double>(pa.size()), ReferenceKind::Image, "native"};
}

Score ssim(const RasterImage& a, const RasterImage& b) {
    require_same_size(a, b);
    if (a.width() < kSsimWindow || a.height() < kSsimWindow) {
        throw Error(ErrorCode::TooSmall, "SSIM needs both sides >= " + std::to_string(kSsimWindow));
    }
    const int w = a.width(), h = a.height();
    const auto la = luma(a), lb = luma(b);
    std::vector<double> aa(la.size()), bb(la.size()), ab(la.size());
    for (std::size_t i = 0; i < la.size(); ++i) {
        aa[i] = la[i] * la[i];
        bb[i] = lb[i] * lb[i];
        ab[i] = la[i] * lb[i];
    }
    const auto k = gaussian_kernel();
    const auto mu_a = filter_valid(la, w, h, k), mu_b = filter_valid(lb, w, h, k);
    const auto e_aa = filter_valid(aa, w, h, k), e_bb = filter_valid(bb, w, h, k), e_ab = filter_valid(ab, w, h, k);

    double total = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
        const double var_a = e_aa[i] - mu_a[i] * mu_a[i];
        const double var_b = e_bb[i] - mu_b[i] * mu_b[i];
        const double cov = e_ab[i] - mu_a[i] * mu_b[i];
        const double num = (2.0 * mu_a[i] * mu_b[i] + kSsimC1) * (2.0 * cov + kSsimC2);
        const double den = (mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + kSsimC1) * (var_a + var_b + kSsimC2);
        total += num / den;
    }
    return Score{"ssim", total / static_cast<double>(mu_a.size()), ReferenceKind::Image, "native"};
}

}  // namespace vecdraw
