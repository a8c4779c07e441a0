#pragma once

#include "wecure/image.hpp"

namespace wecure {

/// PSNR in dB, -20 log10(RMSE / 255). Identical images give +infinity.
double psnr(const GrayImage& restored, const GrayImage& truth);

/// SSIM settings. Defaults are the usual 8-bit parameterization:
/// C1 = (0.01 L)^2, C2 = (0.03 L)^2, C3 = C2 / 2 with L = 255 and an 11x11
/// Gaussian window of standard deviation 1.5.
struct SsimParams {
    double alpha = 1.0;
    double beta = 1.0;
    double gamma = 1.0;
    double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    double c2 = (0.03 * 255.0) * (0.03 * 255.0);
    double c3 = (0.03 * 255.0) * (0.03 * 255.0) / 2.0;
    Index window = 11;
    double window_sigma = 1.5;
};

/// Mean of l^alpha * c^beta * s^gamma over every window position that fits
/// entirely inside the image.
double ssim(const GrayImage& x, const GrayImage& y, const SsimParams& params = {});

}  // namespace wecure
