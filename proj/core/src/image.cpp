#include <algorithm>
#include <cmath>
#include <string>

#include "wecure/image.hpp"

namespace wecure {

GrayImage::GrayImage(Index rows, Index cols, double fill) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) throw InvalidArgument("GrayImage: negative dimensions");
    pixels_.assign(static_cast<std::size_t>(rows * cols), fill);
}

GrayImage::GrayImage(Index rows, Index cols, std::vector<double> pixels)
    : rows_(rows), cols_(cols), pixels_(std::move(pixels)) {
    if (rows < 0 || cols < 0) throw InvalidArgument("GrayImage: negative dimensions");
    if (static_cast<Index>(pixels_.size()) != rows * cols) {
        throw InvalidArgument("GrayImage: " + std::to_string(pixels_.size()) + " pixels for a " +
                              std::to_string(rows) + "x" + std::to_string(cols) + " grid");
    }
    if (!std::all_of(pixels_.begin(), pixels_.end(), [](double v) { return std::isfinite(v); })) {
        throw InvalidArgument("GrayImage: non-finite intensity");
    }
}

Mask Mask::full(Index rows, Index cols) {
    return {rows, cols, std::vector<std::uint8_t>(static_cast<std::size_t>(rows * cols), 1)};
}

Mask Mask::empty(Index rows, Index cols) {
    return {rows, cols, std::vector<std::uint8_t>(static_cast<std::size_t>(rows * cols), 0)};
}

Index Mask::count() const noexcept {
    return static_cast<Index>(std::count_if(observed.begin(), observed.end(), [](std::uint8_t v) { return v != 0; }));
}

}  // namespace wecure
