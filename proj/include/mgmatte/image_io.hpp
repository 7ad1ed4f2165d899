#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mgmatte/grid.hpp"
#include "mgmatte/laplacian.hpp"
#include "mgmatte/system.hpp"

namespace mgmatte {

// Binary PPM (P6) and PGM (P5), 8-bit only. Chosen because they parse
// without external decoders; convert other formats before use.
class ImageIoError : public std::runtime_error {
public:
    enum class Kind { malformed_header, truncated_payload, unsupported_depth, dimension_mismatch, io_failure };

    ImageIoError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

namespace detail {

// Next whitespace-delimited token, skipping '#' comment lines.
inline std::string next_pnm_token(std::istream& in) {
    std::string tok;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c)) {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    return tok;
}

inline int parse_pnm_int(std::istream& in, const char* what) {
    const std::string tok = next_pnm_token(in);
    if (tok.empty()) throw ImageIoError(ImageIoError::Kind::malformed_header,
                                        std::string("missing ") + what + " in PNM header");
    try {
        std::size_t used = 0;
        const int v = std::stoi(tok, &used);
        if (used != tok.size() || v < 0) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ImageIoError(ImageIoError::Kind::malformed_header,
                           std::string("invalid ") + what + " '" + tok + "' in PNM header");
    }
}

struct PnmHeader {
    bool color = false;  // P6 vs P5
    int width = 0, height = 0;
};

inline PnmHeader read_pnm_header(std::istream& in, const std::string& path) {
    const std::string magic = next_pnm_token(in);
    PnmHeader hd;
    if (magic == "P6") hd.color = true;
    else if (magic == "P5") hd.color = false;
    else throw ImageIoError(ImageIoError::Kind::malformed_header,
                            path + ": not a binary PPM/PGM (magic '" + magic + "')");
    hd.width = parse_pnm_int(in, "width");
    hd.height = parse_pnm_int(in, "height");
    const int maxval = parse_pnm_int(in, "maxval");
    if (hd.width <= 0 || hd.height <= 0)
        throw ImageIoError(ImageIoError::Kind::malformed_header, path + ": non-positive dimensions");
    if (maxval != 255)
        throw ImageIoError(ImageIoError::Kind::unsupported_depth,
                           path + ": unsupported maxval " + std::to_string(maxval) + " (only 255)");
    return hd;
}

inline std::vector<std::uint8_t> read_pnm_payload(std::istream& in, std::size_t bytes,
                                                  const std::string& path) {
    std::vector<std::uint8_t> buf(bytes);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(bytes));
    if (static_cast<std::size_t>(in.gcount()) != bytes)
        throw ImageIoError(ImageIoError::Kind::truncated_payload, path + ": truncated pixel payload");
    return buf;
}

}  // namespace detail

// Reads a P6 (3-channel) or P5 (1-channel) image; values scaled to [0,1].
inline ImagePlane read_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ImageIoError(ImageIoError::Kind::io_failure, path + ": cannot open");
    const detail::PnmHeader hd = detail::read_pnm_header(in, path);
    const int channels = hd.color ? 3 : 1;
    const std::size_t n = static_cast<std::size_t>(hd.width) * hd.height;
    const auto buf = detail::read_pnm_payload(in, n * channels, path);
    ImagePlane img(hd.width, hd.height, channels);
    for (std::size_t p = 0; p < n; ++p)
        for (int c = 0; c < channels; ++c)
            img.plane(c)[p] = buf[p * channels + c] / 255.0;
    return img;
}

// Scribble decoding: 255 constrains to 1 (foreground), 0 constrains to 0
// (background), anything else is unconstrained.
inline ConstraintMap read_scribbles(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ImageIoError(ImageIoError::Kind::io_failure, path + ": cannot open");
    const detail::PnmHeader hd = detail::read_pnm_header(in, path);
    if (hd.color)
        throw ImageIoError(ImageIoError::Kind::malformed_header, path + ": scribbles must be P5 grayscale");
    const std::size_t n = static_cast<std::size_t>(hd.width) * hd.height;
    const auto buf = detail::read_pnm_payload(in, n, path);
    ConstraintMap cm(hd.width, hd.height);
    for (std::size_t p = 0; p < n; ++p) {
        if (buf[p] == 255) { cm.constrained[p] = 1; cm.target[p] = 1.0; }
        else if (buf[p] == 0) { cm.constrained[p] = 1; cm.target[p] = 0.0; }
    }
    return cm;
}

inline ConstraintMap read_scribbles(const std::string& path, int expected_width, int expected_height) {
    ConstraintMap cm = read_scribbles(path);
    if (cm.width != expected_width || cm.height != expected_height)
        throw ImageIoError(ImageIoError::Kind::dimension_mismatch,
                           path + ": scribble dimensions do not match the image");
    return cm;
}

// P5 output, clamped to [0,1] and quantized with round-to-nearest.
inline void write_matte(const GridField& alpha, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ImageIoError(ImageIoError::Kind::io_failure, path + ": cannot open for writing");
    out << "P5\n" << alpha.width << " " << alpha.height << "\n255\n";
    std::vector<std::uint8_t> buf(alpha.size());
    for (std::size_t p = 0; p < alpha.size(); ++p) {
        const double v = std::clamp(alpha[p], 0.0, 1.0);
        buf[p] = static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw ImageIoError(ImageIoError::Kind::io_failure, path + ": write failed");
}

// P6 (3-channel) or P5 (1-channel) output of an image plane.
inline void write_image(const ImagePlane& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ImageIoError(ImageIoError::Kind::io_failure, path + ": cannot open for writing");
    out << (img.channels == 3 ? "P6" : "P5") << "\n" << img.width << " " << img.height << "\n255\n";
    std::vector<std::uint8_t> buf(img.pixels() * img.channels);
    for (std::size_t p = 0; p < img.pixels(); ++p)
        for (int c = 0; c < img.channels; ++c) {
            const double v = std::clamp(img.plane(c)[p], 0.0, 1.0);
            buf[p * img.channels + c] = static_cast<std::uint8_t>(std::lround(v * 255.0));
        }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw ImageIoError(ImageIoError::Kind::io_failure, path + ": write failed");
}

// Scribble map rendered back to P5: 255 foreground, 0 background, 128 free.
inline void write_scribbles(const ConstraintMap& cm, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ImageIoError(ImageIoError::Kind::io_failure, path + ": cannot open for writing");
    out << "P5\n" << cm.width << " " << cm.height << "\n255\n";
    std::vector<std::uint8_t> buf(cm.size(), 128);
    for (std::size_t p = 0; p < cm.size(); ++p)
        if (cm.constrained[p]) buf[p] = cm.target[p] >= 0.5 ? 255 : 0;
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw ImageIoError(ImageIoError::Kind::io_failure, path + ": write failed");
}

}  // namespace mgmatte
