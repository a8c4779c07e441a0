#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "wecure/metrics.hpp"

namespace wecure {

namespace {

void check_same_shape(const GrayImage& a, const GrayImage& b, const char* who) {
    if (!a.same_shape(b)) {
        throw InvalidArgument(std::string(who) + ": image dimensions differ (" + std::to_string(a.rows()) + "x" +
                              std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                              std::to_string(b.cols()) + ")");
    }
}

std::vector<double> gaussian_window(Index size, double sigma) {
    std::vector<double> w(static_cast<std::size_t>(size * size));
    const double mid = static_cast<double>(size - 1) / 2.0;
    double total = 0.0;
    for (Index r = 0; r < size; ++r) {
        for (Index c = 0; c < size; ++c) {
            const double dr = static_cast<double>(r) - mid;
            const double dc = static_cast<double>(c) - mid;
            const double v = std::exp(-(dr * dr + dc * dc) / (2.0 * sigma * sigma));
            w[static_cast<std::size_t>(r * size + c)] = v;
            total += v;
        }
    }
    for (double& v : w) v /= total;
    return w;
}

}  // namespace

double psnr(const GrayImage& restored, const GrayImage& truth) {
    check_same_shape(restored, truth, "psnr");
    if (truth.size() == 0) throw InvalidArgument("psnr: empty image");
    double sq = 0.0;
    for (Index k = 0; k < truth.size(); ++k) {
        const double d = restored[k] - truth[k];
        sq += d * d;
    }
    if (sq == 0.0) return std::numeric_limits<double>::infinity();
    const double rmse = std::sqrt(sq / static_cast<double>(truth.size()));
    return -20.0 * std::log10(rmse / 255.0);
}

double ssim(const GrayImage& x, const GrayImage& y, const SsimParams& p) {
    check_same_shape(x, y, "ssim");
    if (!(p.c1 > 0.0 && p.c2 > 0.0 && p.c3 > 0.0)) throw InvalidArgument("ssim: stabilizing constants must be positive");
    if (p.window < 1 || x.rows() < p.window || x.cols() < p.window) {
        throw InvalidArgument("ssim: image smaller than the " + std::to_string(p.window) + "x" +
                              std::to_string(p.window) + " window");
    }
    const std::vector<double> w = gaussian_window(p.window, p.window_sigma);
    const Index ws = p.window;

    double total = 0.0;
    Index count = 0;
    for (Index r0 = 0; r0 + ws <= x.rows(); ++r0) {
        for (Index c0 = 0; c0 + ws <= x.cols(); ++c0) {
            double mx = 0.0, my = 0.0;
            for (Index r = 0; r < ws; ++r) {
                for (Index c = 0; c < ws; ++c) {
                    const double wk = w[static_cast<std::size_t>(r * ws + c)];
                    mx += wk * x(r0 + r, c0 + c);
                    my += wk * y(r0 + r, c0 + c);
                }
            }
            // Centered second moments: never negative, and bitwise equal when x == y.
            double vx = 0.0, vy = 0.0, cxy = 0.0;
            for (Index r = 0; r < ws; ++r) {
                for (Index c = 0; c < ws; ++c) {
                    const double wk = w[static_cast<std::size_t>(r * ws + c)];
                    const double dx = x(r0 + r, c0 + c) - mx;
                    const double dy = y(r0 + r, c0 + c) - my;
                    vx += wk * dx * dx;
                    vy += wk * dy * dy;
                    cxy += wk * dx * dy;
                }
            }
            const double sxy = std::sqrt(vx * vy);  // sigma_x * sigma_y
            const double l = (2.0 * mx * my + p.c1) / (mx * mx + my * my + p.c1);
            const double con = (2.0 * sxy + p.c2) / (vx + vy + p.c2);
            const double s = (cxy + p.c3) / (sxy + p.c3);
            total += std::pow(l, p.alpha) * std::pow(con, p.beta) * std::pow(s, p.gamma);
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

}  // namespace wecure
