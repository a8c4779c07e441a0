#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "wecure/graph.hpp"
#include "wecure/image.hpp"
#include "wecure/ssl.hpp"

namespace wecure::io {

/// Raw unsigned-byte IDX tensor.
struct IdxTensor {
    std::vector<Index> dims;
    std::vector<std::uint8_t> data;
};

/// Parses an unsigned-byte IDX file (big-endian header: 0x00 0x00 0x08 ndims,
/// then ndims 32-bit sizes). Throws ParseError with the byte offset on bad magic
/// or truncated payload.
IdxTensor read_idx(const std::filesystem::path& path);

/// Image tensor (magic 0x00000803) flattened to one row per image, scaled to [0, 1].
PointCloud load_idx_images(const std::filesystem::path& path);
/// Label vector (magic 0x00000801).
std::vector<int> load_idx_labels(const std::filesystem::path& path);

void write_idx_images(const std::filesystem::path& path, Index rows, Index cols, const std::vector<std::uint8_t>& data);
void write_idx_labels(const std::filesystem::path& path, const std::vector<std::uint8_t>& labels);

struct CsvOptions {
    std::optional<Index> label_column;  // 0-based; empty field = unlabeled
    bool header = false;                // skip the first line
};

/// Rectangular numeric CSV, one point per row. Throws ParseError with the
/// 1-based line number on ragged rows or non-numeric cells.
LabeledDataset load_pointcloud_csv(const std::filesystem::path& path, const CsvOptions& opts = {});

/// Binary PGM (P5, maxval <= 255) or 8-bit grayscale PNG, chosen by magic bytes.
/// Throws UnsupportedFormat for 16-bit or colour data.
GrayImage load_image(const std::filesystem::path& path);

/// Rounds to the nearest integer in [0, 255]. Writes PNG when the extension is
/// .png, binary PGM otherwise.
void write_image(const GrayImage& img, const std::filesystem::path& path);

/// Masks are stored as images: nonzero = observed.
Mask load_mask(const std::filesystem::path& path);
void write_mask(const Mask& mask, const std::filesystem::path& path);

}  // namespace wecure::io
