#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "aima/core/error.hpp"

namespace aima {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
};

/// 8-bit interleaved RGB raster.
struct ImageU8 {
    int w = 0, h = 0;
    std::vector<std::uint8_t> px;  // h*w*3, row-major, RGB

    ImageU8() = default;
    ImageU8(int width, int height, Rgb fill = {0, 0, 0}) : w(width), h(height), px(std::size_t(width) * height * 3) {
        for (int i = 0; i < w * h; ++i) {
            px[std::size_t(i) * 3 + 0] = fill.r;
            px[std::size_t(i) * 3 + 1] = fill.g;
            px[std::size_t(i) * 3 + 2] = fill.b;
        }
    }

    std::uint8_t& at(int x, int y, int c) { return px[(std::size_t(y) * w + x) * 3 + c]; }
    std::uint8_t at(int x, int y, int c) const { return px[(std::size_t(y) * w + x) * 3 + c]; }

    void set(int x, int y, Rgb col) {
        if (x < 0 || y < 0 || x >= w || y >= h) return;
        at(x, y, 0) = col.r;
        at(x, y, 1) = col.g;
        at(x, y, 2) = col.b;
    }

    Rgb get(int x, int y) const {
        x = std::clamp(x, 0, w - 1);
        y = std::clamp(y, 0, h - 1);
        return {at(x, y, 0), at(x, y, 1), at(x, y, 2)};
    }
};

inline void fill_rect(ImageU8& img, int x0, int y0, int x1, int y1, Rgb col) {
    x0 = std::max(0, x0);
    y0 = std::max(0, y0);
    x1 = std::min(img.w, x1);
    y1 = std::min(img.h, y1);
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) img.set(x, y, col);
}

inline void draw_border(ImageU8& img, int x0, int y0, int x1, int y1, int t, Rgb col) {
    fill_rect(img, x0, y0, x1, y0 + t, col);
    fill_rect(img, x0, y1 - t, x1, y1, col);
    fill_rect(img, x0, y0, x0 + t, y1, col);
    fill_rect(img, x1 - t, y0, x1, y1, col);
}

inline Rgb hsv_to_rgb(double hue, double sat, double val) {
    hue = hue - std::floor(hue);
    double h6 = hue * 6.0;
    int sector = int(h6) % 6;
    double f = h6 - std::floor(h6);
    double p = val * (1 - sat), q = val * (1 - sat * f), t = val * (1 - sat * (1 - f));
    double r = 0, g = 0, b = 0;
    switch (sector) {
        case 0: r = val; g = t; b = p; break;
        case 1: r = q; g = val; b = p; break;
        case 2: r = p; g = val; b = t; break;
        case 3: r = p; g = q; b = val; break;
        case 4: r = t; g = p; b = val; break;
        default: r = val; g = p; b = q; break;
    }
    auto u8 = [](double v) { return std::uint8_t(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); };
    return {u8(r), u8(g), u8(b)};
}

/// Box down-scale by integer factor (for report thumbnails).
inline ImageU8 downscale(const ImageU8& src, int factor) {
    if (factor <= 1) return src;
    ImageU8 out(src.w / factor, src.h / factor);
    for (int y = 0; y < out.h; ++y)
        for (int x = 0; x < out.w; ++x) {
            int acc[3] = {0, 0, 0};
            for (int dy = 0; dy < factor; ++dy)
                for (int dx = 0; dx < factor; ++dx)
                    for (int c = 0; c < 3; ++c) acc[c] += src.at(x * factor + dx, y * factor + dy, c);
            for (int c = 0; c < 3; ++c) out.at(x, y, c) = std::uint8_t(acc[c] / (factor * factor));
        }
    return out;
}

inline void paste(ImageU8& dst, const ImageU8& src, int ox, int oy) {
    for (int y = 0; y < src.h; ++y)
        for (int x = 0; x < src.w; ++x) dst.set(ox + x, oy + y, src.get(x, y));
}

}  // namespace aima
