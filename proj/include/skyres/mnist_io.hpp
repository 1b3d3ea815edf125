#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "skyres/encoding.hpp"
#include "skyres/errors.hpp"

namespace skyres {

namespace detail {

inline std::uint32_t read_be32(std::istream& in, const std::string& what) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4))
        throw FormatError("truncated IDX header while reading " + what);
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
           (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

} // namespace detail

/// Parse the big-endian IDX pair (images magic 0x803, labels 0x801),
/// scaling pixel bytes to [0, 1].
inline std::vector<MnistImage> load_mnist(const std::string& images_path,
                                          const std::string& labels_path) {
    std::ifstream img(images_path, std::ios::binary);
    if (!img) throw IoError("cannot open " + images_path);
    std::ifstream lab(labels_path, std::ios::binary);
    if (!lab) throw IoError("cannot open " + labels_path);

    if (detail::read_be32(img, "image magic") != 0x00000803u)
        throw FormatError(images_path + ": bad image magic");
    const std::uint32_t n_images = detail::read_be32(img, "image count");
    const std::uint32_t rows = detail::read_be32(img, "rows");
    const std::uint32_t cols = detail::read_be32(img, "cols");
    if (rows != 28 || cols != 28)
        throw FormatError(images_path + ": expected 28x28 images, got " + std::to_string(rows) +
                          "x" + std::to_string(cols));

    if (detail::read_be32(lab, "label magic") != 0x00000801u)
        throw FormatError(labels_path + ": bad label magic");
    const std::uint32_t n_labels = detail::read_be32(lab, "label count");
    if (n_labels != n_images)
        throw FormatError("image/label counts differ: " + std::to_string(n_images) + " vs " +
                          std::to_string(n_labels));

    std::vector<MnistImage> out(n_images);
    std::vector<unsigned char> buf(28 * 28);
    for (std::uint32_t i = 0; i < n_images; ++i) {
        if (!img.read(reinterpret_cast<char*>(buf.data()), buf.size()))
            throw FormatError(images_path + ": truncated at image " + std::to_string(i));
        for (size_t p = 0; p < buf.size(); ++p) out[i].pixels[p] = buf[p] / 255.0;
        char lbl;
        if (!lab.read(&lbl, 1))
            throw FormatError(labels_path + ": truncated at label " + std::to_string(i));
        out[i].label = static_cast<unsigned char>(lbl);
        if (out[i].label > 9) throw FormatError("label out of range at " + std::to_string(i));
    }
    return out;
}

} // namespace skyres
