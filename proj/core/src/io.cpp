#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include <png.h>

#include "wecure/io.hpp"

namespace wecure::io {

namespace {

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& path, const std::string& header, const std::vector<std::uint8_t>& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.write(reinterpret_cast<const char*>(body.data()), static_cast<std::streamsize>(body.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::uint32_t read_be32(const std::vector<std::uint8_t>& b, std::size_t off) {
    if (off + 4 > b.size()) throw ParseError(off, "IDX: header truncated at byte " + std::to_string(off));
    return (std::uint32_t{b[off]} << 24) | (std::uint32_t{b[off + 1]} << 16) | (std::uint32_t{b[off + 2]} << 8) |
           std::uint32_t{b[off + 3]};
}

std::string be32(std::uint32_t v) {
    std::string s(4, '\0');
    for (int k = 0; k < 4; ++k) s[static_cast<std::size_t>(k)] = static_cast<char>((v >> (24 - 8 * k)) & 0xFF);
    return s;
}

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

// --- PGM --------------------------------------------------------------------

GrayImage parse_pgm(const std::vector<std::uint8_t>& b, const std::filesystem::path& path) {
    std::size_t pos = 2;
    auto skip_space = [&] {
        while (pos < b.size()) {
            if (b[pos] == '#') {
                while (pos < b.size() && b[pos] != '\n') ++pos;
            } else if (std::isspace(b[pos])) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto number = [&](const char* what) {
        skip_space();
        const std::size_t start = pos;
        long v = 0;
        while (pos < b.size() && std::isdigit(b[pos])) v = v * 10 + (b[pos++] - '0');
        if (pos == start) throw ParseError(start, std::string("PGM: missing ") + what + " in " + path.string());
        return v;
    };
    const long width = number("width");
    const long height = number("height");
    const long maxval = number("maxval");
    if (maxval > 255) throw UnsupportedFormat("PGM: maxval " + std::to_string(maxval) + " (16-bit) is not supported");
    if (maxval < 1) throw ParseError(pos, "PGM: invalid maxval");
    if (pos >= b.size() || !std::isspace(b[pos])) throw ParseError(pos, "PGM: header not terminated by whitespace");
    ++pos;
    const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (b.size() - pos < count) throw ParseError(b.size(), "PGM: pixel data truncated in " + path.string());

    std::vector<double> px(count);
    const double scale = 255.0 / static_cast<double>(maxval);
    for (std::size_t k = 0; k < count; ++k) {
        px[k] = maxval == 255 ? static_cast<double>(b[pos + k]) : std::round(static_cast<double>(b[pos + k]) * scale);
    }
    return GrayImage(height, width, std::move(px));
}

// --- PNG --------------------------------------------------------------------

GrayImage read_png(const std::filesystem::path& path) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str())) {
        throw UnsupportedFormat("PNG: " + std::string(image.message));
    }
    const png_uint_32 fmt = image.format;
    if ((fmt & PNG_FORMAT_FLAG_COLOR) || (fmt & PNG_FORMAT_FLAG_LINEAR) || (fmt & PNG_FORMAT_FLAG_ALPHA)) {
        png_image_free(&image);
        throw UnsupportedFormat("PNG: only 8-bit grayscale without alpha is supported (" + path.string() + ")");
    }
    image.format = PNG_FORMAT_GRAY;
    std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
        const std::string msg = image.message;
        png_image_free(&image);
        throw UnsupportedFormat("PNG: " + msg);
    }
    std::vector<double> px(buf.begin(), buf.end());
    return GrayImage(static_cast<Index>(image.height), static_cast<Index>(image.width), std::move(px));
}

void write_png(const GrayImage& img, const std::filesystem::path& path) {
    std::vector<std::uint8_t> buf(static_cast<std::size_t>(img.size()));
    for (Index k = 0; k < img.size(); ++k) buf[static_cast<std::size_t>(k)] = to_byte(img[k]);
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.cols());
    image.height = static_cast<png_uint_32>(img.rows());
    image.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&image, path.c_str(), 0, buf.data(), 0, nullptr)) {
        throw std::runtime_error("PNG: " + std::string(image.message));
    }
}

// --- CSV --------------------------------------------------------------------

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

IdxTensor read_idx(const std::filesystem::path& path) {
    const std::vector<std::uint8_t> b = read_bytes(path);
    if (b.size() < 4) throw ParseError(b.size(), "IDX: file shorter than its magic number");
    if (b[0] != 0 || b[1] != 0) throw ParseError(0, "IDX: bad magic in " + path.string());
    if (b[2] != 0x08) throw ParseError(2, "IDX: only unsigned-byte payloads are supported");
    const std::size_t ndims = b[3];
    if (ndims == 0) throw ParseError(3, "IDX: zero dimensions");

    IdxTensor t;
    std::size_t count = 1;
    for (std::size_t k = 0; k < ndims; ++k) {
        const std::uint32_t d = read_be32(b, 4 + 4 * k);
        t.dims.push_back(static_cast<Index>(d));
        count *= d;
    }
    const std::size_t off = 4 + 4 * ndims;
    if (b.size() < off + count) {
        throw ParseError(b.size(), "IDX: payload truncated at byte " + std::to_string(b.size()) + " (expected " +
                                       std::to_string(off + count) + ")");
    }
    t.data.assign(b.begin() + static_cast<std::ptrdiff_t>(off), b.begin() + static_cast<std::ptrdiff_t>(off + count));
    return t;
}

PointCloud load_idx_images(const std::filesystem::path& path) {
    const IdxTensor t = read_idx(path);
    if (t.dims.size() != 3) throw ParseError(3, "IDX: expected an image tensor (magic 0x00000803)");
    const Index n = t.dims[0];
    const Index d = t.dims[1] * t.dims[2];
    RowMatrix pts(n, d);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < d; ++j) pts(i, j) = static_cast<double>(t.data[static_cast<std::size_t>(i * d + j)]) / 255.0;
    }
    return PointCloud(std::move(pts));
}

std::vector<int> load_idx_labels(const std::filesystem::path& path) {
    const IdxTensor t = read_idx(path);
    if (t.dims.size() != 1) throw ParseError(3, "IDX: expected a label vector (magic 0x00000801)");
    return {t.data.begin(), t.data.end()};
}

void write_idx_images(const std::filesystem::path& path, Index rows, Index cols, const std::vector<std::uint8_t>& data) {
    if (rows < 1 || cols < 1 || data.size() % static_cast<std::size_t>(rows * cols) != 0) {
        throw InvalidArgument("write_idx_images: data size is not a multiple of rows * cols");
    }
    const auto n = static_cast<std::uint32_t>(data.size() / static_cast<std::size_t>(rows * cols));
    write_bytes(path, be32(0x803) + be32(n) + be32(static_cast<std::uint32_t>(rows)) + be32(static_cast<std::uint32_t>(cols)),
                data);
}

void write_idx_labels(const std::filesystem::path& path, const std::vector<std::uint8_t>& labels) {
    write_bytes(path, be32(0x801) + be32(static_cast<std::uint32_t>(labels.size())), labels);
}

LabeledDataset load_pointcloud_csv(const std::filesystem::path& path, const CsvOptions& opts) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());

    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::optional<std::size_t> width;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (opts.header && lineno == 1) continue;
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (!width) width = cells.size();
        if (cells.size() != *width) {
            throw ParseError(lineno, "CSV: line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                                         " fields, expected " + std::to_string(*width));
        }
        if (opts.label_column && *opts.label_column >= static_cast<Index>(cells.size())) {
            throw ParseError(lineno, "CSV: label column beyond the last field");
        }
        std::vector<double> row;
        int label = kUnlabeled;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const std::string cell = trim(cells[c]);
            if (opts.label_column && static_cast<Index>(c) == *opts.label_column) {
                if (cell.empty()) continue;
                const auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), label);
                if (ec != std::errc() || p != cell.data() + cell.size() || label < 0) {
                    throw ParseError(lineno, "CSV: line " + std::to_string(lineno) + ": label '" + cell +
                                                 "' is not a nonnegative integer");
                }
                continue;
            }
            double v = 0.0;
            const auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (cell.empty() || ec != std::errc() || p != cell.data() + cell.size() || !std::isfinite(v)) {
                throw ParseError(lineno, "CSV: line " + std::to_string(lineno) + ", field " + std::to_string(c + 1) +
                                             ": '" + cell + "' is not a number");
            }
            row.push_back(v);
        }
        rows.push_back(std::move(row));
        labels.push_back(label);
    }
    if (rows.empty()) throw ParseError(lineno, "CSV: no data rows in " + path.string());

    RowMatrix pts(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) pts(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
    return {PointCloud(std::move(pts)), std::move(labels)};
}

GrayImage load_image(const std::filesystem::path& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw std::runtime_error("cannot open " + path.string());
    char magic[8] = {};
    probe.read(magic, sizeof magic);
    probe.close();
    if (magic[0] == 'P' && magic[1] == '5') return parse_pgm(read_bytes(path), path);
    if (std::memcmp(magic, "\x89PNG\r\n\x1a\n", 8) == 0) return read_png(path);
    throw UnsupportedFormat("unsupported image format: " + path.string() + " (expected binary PGM or PNG)");
}

void write_image(const GrayImage& img, const std::filesystem::path& path) {
    if (path.extension() == ".png") {
        write_png(img, path);
        return;
    }
    std::vector<std::uint8_t> body(static_cast<std::size_t>(img.size()));
    for (Index k = 0; k < img.size(); ++k) body[static_cast<std::size_t>(k)] = to_byte(img[k]);
    write_bytes(path, "P5\n" + std::to_string(img.cols()) + " " + std::to_string(img.rows()) + "\n255\n", body);
}

Mask load_mask(const std::filesystem::path& path) {
    const GrayImage img = load_image(path);
    Mask m = Mask::empty(img.rows(), img.cols());
    for (Index k = 0; k < img.size(); ++k) m.observed[static_cast<std::size_t>(k)] = img[k] != 0.0 ? 1 : 0;
    return m;
}

void write_mask(const Mask& mask, const std::filesystem::path& path) {
    GrayImage img(mask.rows, mask.cols);
    for (Index k = 0; k < img.size(); ++k) img[k] = mask.observed[static_cast<std::size_t>(k)] ? 255.0 : 0.0;
    write_image(img, path);
}

}  // namespace wecure::io
