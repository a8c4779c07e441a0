#pragma once

#include <cstdint>
#include <vector>

#include "wecure/errors.hpp"

namespace wecure {

/// Row-major grid of intensities, nominally in [0, 255].
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(Index rows, Index cols, double fill = 0.0);
    /// Throws InvalidArgument on size mismatch or non-finite intensities.
    GrayImage(Index rows, Index cols, std::vector<double> pixels);

    Index rows() const noexcept { return rows_; }
    Index cols() const noexcept { return cols_; }
    Index size() const noexcept { return rows_ * cols_; }

    double operator()(Index r, Index c) const { return pixels_[static_cast<std::size_t>(r * cols_ + c)]; }
    double& operator()(Index r, Index c) { return pixels_[static_cast<std::size_t>(r * cols_ + c)]; }
    double operator[](Index k) const { return pixels_[static_cast<std::size_t>(k)]; }
    double& operator[](Index k) { return pixels_[static_cast<std::size_t>(k)]; }

    const std::vector<double>& pixels() const noexcept { return pixels_; }
    std::vector<double>& pixels() noexcept { return pixels_; }

    bool same_shape(const GrayImage& other) const noexcept {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }
    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    Index rows_ = 0;
    Index cols_ = 0;
    std::vector<double> pixels_;
};

/// Observed-pixel set Omega, one flag per pixel in row-major order.
struct Mask {
    Index rows = 0;
    Index cols = 0;
    std::vector<std::uint8_t> observed;

    static Mask full(Index rows, Index cols);
    static Mask empty(Index rows, Index cols);

    bool at(Index r, Index c) const { return observed[static_cast<std::size_t>(r * cols + c)] != 0; }
    Index count() const noexcept;
    bool matches(const GrayImage& img) const noexcept { return rows == img.rows() && cols == img.cols(); }
    friend bool operator==(const Mask&, const Mask&) = default;
};

}  // namespace wecure
