#pragma once

// Minimal PNG reader/writer on top of zlib. Handles what the synthetic
// pipeline produces (8-bit RGB, non-interlaced) plus grayscale/RGBA reads
// so externally produced manifests keep working.

#include <zlib.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "aima/core/error.hpp"
#include "aima/core/image.hpp"

namespace aima {
namespace png_detail {

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(std::uint8_t(v >> 24));
    out.push_back(std::uint8_t(v >> 16));
    out.push_back(std::uint8_t(v >> 8));
    out.push_back(std::uint8_t(v));
}

inline std::uint32_t get_u32(const std::uint8_t* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) | (std::uint32_t(p[2]) << 8) | p[3];
}

inline void write_chunk(std::vector<std::uint8_t>& out, const char type[4],
                        const std::uint8_t* data, std::size_t len) {
    put_u32(out, std::uint32_t(len));
    std::size_t start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data, data + len);
    std::uint32_t crc = std::uint32_t(::crc32(0, out.data() + start, uInt(4 + len)));
    put_u32(out, crc);
}

inline std::uint8_t paeth(int a, int b, int c) {
    int p = a + b - c;
    int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return std::uint8_t(a);
    if (pb <= pc) return std::uint8_t(b);
    return std::uint8_t(c);
}

}  // namespace png_detail

inline std::vector<std::uint8_t> encode_png(const ImageU8& img) {
    using namespace png_detail;
    if (img.w <= 0 || img.h <= 0) throw IoError("encode_png: empty image");
    std::vector<std::uint8_t> out;
    static const std::uint8_t sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    out.insert(out.end(), sig, sig + 8);

    std::uint8_t ihdr[13];
    ihdr[0] = std::uint8_t(img.w >> 24);
    ihdr[1] = std::uint8_t(img.w >> 16);
    ihdr[2] = std::uint8_t(img.w >> 8);
    ihdr[3] = std::uint8_t(img.w);
    ihdr[4] = std::uint8_t(img.h >> 24);
    ihdr[5] = std::uint8_t(img.h >> 16);
    ihdr[6] = std::uint8_t(img.h >> 8);
    ihdr[7] = std::uint8_t(img.h);
    ihdr[8] = 8;    // bit depth
    ihdr[9] = 2;    // color type RGB
    ihdr[10] = 0;   // compression
    ihdr[11] = 0;   // filter
    ihdr[12] = 0;   // no interlace
    write_chunk(out, "IHDR", ihdr, 13);

    // Filter type 0 per scanline.
    const std::size_t stride = std::size_t(img.w) * 3;
    std::vector<std::uint8_t> raw((stride + 1) * img.h);
    for (int y = 0; y < img.h; ++y) {
        raw[(stride + 1) * y] = 0;
        std::memcpy(&raw[(stride + 1) * y + 1], &img.px[stride * y], stride);
    }
    uLongf zlen = compressBound(uLong(raw.size()));
    std::vector<std::uint8_t> z(zlen);
    if (compress2(z.data(), &zlen, raw.data(), uLong(raw.size()), 6) != Z_OK)
        throw IoError("encode_png: deflate failed");
    z.resize(zlen);
    write_chunk(out, "IDAT", z.data(), z.size());
    write_chunk(out, "IEND", nullptr, 0);
    return out;
}

inline void write_png(const std::filesystem::path& path, const ImageU8& img) {
    auto bytes = encode_png(img);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for write: " + path.string());
    f.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!f) throw IoError("write failed: " + path.string());
}

inline ImageU8 decode_png(const std::vector<std::uint8_t>& bytes) {
    using namespace png_detail;
    static const std::uint8_t sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    if (bytes.size() < 8 || std::memcmp(bytes.data(), sig, 8) != 0)
        throw IoError("decode_png: not a PNG file");
    std::size_t pos = 8;
    int w = 0, h = 0, depth = 0, color = 0;
    std::vector<std::uint8_t> idat;
    while (pos + 8 <= bytes.size()) {
        std::uint32_t len = get_u32(&bytes[pos]);
        std::string type(reinterpret_cast<const char*>(&bytes[pos + 4]), 4);
        pos += 8;
        if (pos + len + 4 > bytes.size()) throw IoError("decode_png: truncated chunk " + type);
        const std::uint8_t* data = &bytes[pos];
        if (type == "IHDR") {
            w = int(get_u32(data));
            h = int(get_u32(data + 4));
            depth = data[8];
            color = data[9];
            if (data[12] != 0) throw IoError("decode_png: interlaced PNG unsupported");
            if (depth != 8) throw IoError("decode_png: only 8-bit depth supported");
            if (color != 0 && color != 2 && color != 6)
                throw IoError("decode_png: unsupported color type " + std::to_string(color));
        } else if (type == "IDAT") {
            idat.insert(idat.end(), data, data + len);
        } else if (type == "IEND") {
            break;
        }
        pos += len + 4;  // skip data + crc
    }
    if (w <= 0 || h <= 0 || idat.empty()) throw IoError("decode_png: missing IHDR/IDAT");

    const int ch = color == 0 ? 1 : (color == 2 ? 3 : 4);
    const std::size_t stride = std::size_t(w) * ch;
    std::vector<std::uint8_t> raw((stride + 1) * h);
    uLongf rawlen = uLongf(raw.size());
    int zr = uncompress(raw.data(), &rawlen, idat.data(), uLong(idat.size()));
    if (zr != Z_OK || rawlen != raw.size()) throw IoError("decode_png: inflate failed");

    // Undo per-scanline filters.
    std::vector<std::uint8_t> prev(stride, 0), cur(stride);
    ImageU8 img(w, h);
    for (int y = 0; y < h; ++y) {
        const std::uint8_t* line = &raw[(stride + 1) * y];
        int filter = line[0];
        const std::uint8_t* src = line + 1;
        for (std::size_t i = 0; i < stride; ++i) {
            int a = i >= std::size_t(ch) ? cur[i - ch] : 0;
            int b = prev[i];
            int c = i >= std::size_t(ch) ? prev[i - ch] : 0;
            int v = src[i];
            switch (filter) {
                case 0: break;
                case 1: v += a; break;
                case 2: v += b; break;
                case 3: v += (a + b) / 2; break;
                case 4: v += paeth(a, b, c); break;
                default: throw IoError("decode_png: bad filter type");
            }
            cur[i] = std::uint8_t(v);
        }
        for (int x = 0; x < w; ++x) {
            std::uint8_t r, g, bch;
            if (ch == 1) r = g = bch = cur[x];
            else {
                r = cur[std::size_t(x) * ch + 0];
                g = cur[std::size_t(x) * ch + 1];
                bch = cur[std::size_t(x) * ch + 2];
            }
            img.at(x, y, 0) = r;
            img.at(x, y, 1) = g;
            img.at(x, y, 2) = bch;
        }
        std::swap(prev, cur);
    }
    return img;
}

inline ImageU8 read_png(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return decode_png(bytes);
}

}  // namespace aima
