#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "wecure/graph.hpp"
#include "wecure/image.hpp"
#include "wecure/solver.hpp"

namespace wecure {

/// Patch vectors of the current image, one row per pixel (row-major pixel
/// order). Each row is the s1 x s2 window flattened row by row, followed by the
/// two semi-local coordinates.
struct PatchSet {
    Index patch_h = 0;
    Index patch_w = 0;
    double semilocal_scale = 0.0;
    RowMatrix vectors;
    Eigen::VectorXd center_value;
};

/// Mirror index into [0, len): -1 -> 1, len -> len - 2, repeated as needed.
Index reflect_index(Index i, Index len) noexcept;

/// One s1 x s2 window per pixel with reflective boundaries. Throws InvalidArgument
/// when either side is even or non-positive.
RowMatrix extract_patches(const GrayImage& img, Index patch_h, Index patch_w);

/// Appends (scale * r * M / rows, scale * c * M / cols) to every patch, with
/// 1-based pixel coordinates (r, c) and M the largest observed magnitude.
/// Throws InvalidArgument on an empty mask or negative scale.
PatchSet semilocal_augment(const RowMatrix& raw, const GrayImage& img, const Mask& mask, double scale,
                           Index patch_h, Index patch_w);

/// max(initial - step, floor).
double lambda_schedule(double initial, double floor, Index step);

/// Observed pixels copied; missing ones drawn from N(mean, sd^2) of the observed
/// values and clamped to [0, 255].
GrayImage initialize_image(const GrayImage& observed, const Mask& mask, std::uint64_t seed);

/// floor(rate * rows * cols) pixels chosen uniformly without replacement.
Mask sample_mask(Index rows, Index cols, double rate, std::uint64_t seed);

struct InpaintConfig {
    Index patch_h = 11;
    Index patch_w = 11;
    GraphConfig graph{20, 50};
    Method method = Method::WeCURE;
    double lambda = 1.0;
    std::optional<double> gamma;
    double cg_tol = 1e-6;
    std::optional<Index> cg_max_iters;
    Index warm_start_iters = 6;  // leading iterations solved with WNLL
    Index outer_iters = 10;      // total, warm start included
    double schedule_start = 10.0;
    double schedule_floor = 3.0;
    double rel_change_tol = 0.0;  // stop early when |u' - u| / |u| drops below; 0 disables
    std::uint64_t seed = 0;

    void validate() const;
};

/// Per-iteration diagnostics handed to an optional observer.
struct InpaintIterate {
    Index iteration = 0;  // 0-based index of the iteration just finished
    Method method = Method::WNLL;
    double semilocal_scale = 0.0;
    double relative_change = 0.0;
    const GrayImage* image = nullptr;
};

/// The outer patch-graph loop as a resumable state machine. Copying a session
/// forks it, so a shared warm start can feed several methods.
class InpaintSession {
public:
    InpaintSession(GrayImage observed, Mask mask, InpaintConfig cfg);

    const GrayImage& current() const noexcept { return current_; }
    Index iteration() const noexcept { return iteration_; }
    bool done() const noexcept;
    const InpaintConfig& config() const noexcept { return cfg_; }
    /// Switches the method used after the warm start.
    void set_method(Method m) noexcept { cfg_.method = m; }

    void step();
    /// Steps until outer_iters is reached, the change threshold fires, or
    /// `stop_after` iterations have run in total.
    void run(std::optional<Index> stop_after = std::nullopt);

    std::function<void(const InpaintIterate&)> observer;

private:
    GrayImage observed_;
    Mask mask_;
    InpaintConfig cfg_;
    GrayImage current_;
    Index iteration_ = 0;
    bool converged_ = false;
};

GrayImage inpaint(const GrayImage& observed, const Mask& mask, const InpaintConfig& cfg);

}  // namespace wecure
