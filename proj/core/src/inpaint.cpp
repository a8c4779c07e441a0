#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "wecure/inpaint.hpp"

namespace wecure {

namespace {

void check_patch_side(Index s, const char* name) {
    if (s < 1 || s % 2 == 0) {
        throw InvalidArgument(std::string("patch ") + name + " must be a positive odd integer, got " + std::to_string(s));
    }
}

void check_mask(const GrayImage& img, const Mask& mask, const char* who) {
    if (!mask.matches(img) || static_cast<Index>(mask.observed.size()) != img.size()) {
        throw InvalidArgument(std::string(who) + ": mask shape does not match the image");
    }
    if (mask.count() == 0) throw InvalidArgument(std::string(who) + ": mask has no observed pixels");
}

double clamp_intensity(double v) { return std::clamp(v, 0.0, 255.0); }

}  // namespace

Index reflect_index(Index i, Index len) noexcept {
    if (len <= 1) return 0;
    const Index period = 2 * (len - 1);
    i %= period;
    if (i < 0) i += period;
    return i < len ? i : period - i;
}

RowMatrix extract_patches(const GrayImage& img, Index patch_h, Index patch_w) {
    check_patch_side(patch_h, "height");
    check_patch_side(patch_w, "width");
    const Index hr = patch_h / 2;
    const Index hc = patch_w / 2;
    RowMatrix out(img.size(), patch_h * patch_w);
    for (Index r = 0; r < img.rows(); ++r) {
        for (Index c = 0; c < img.cols(); ++c) {
            double* dst = out.row(r * img.cols() + c).data();
            for (Index dr = -hr; dr <= hr; ++dr) {
                const Index rr = reflect_index(r + dr, img.rows());
                for (Index dc = -hc; dc <= hc; ++dc) *dst++ = img(rr, reflect_index(c + dc, img.cols()));
            }
        }
    }
    return out;
}

PatchSet semilocal_augment(const RowMatrix& raw, const GrayImage& img, const Mask& mask, double scale,
                           Index patch_h, Index patch_w) {
    check_mask(img, mask, "semilocal_augment");
    if (!(scale >= 0.0)) throw InvalidArgument("semilocal_augment: scale must be nonnegative");
    if (raw.rows() != img.size() || raw.cols() != patch_h * patch_w) {
        throw InvalidArgument("semilocal_augment: patch matrix does not match the image and patch size");
    }
    double amplitude = 0.0;
    for (Index k = 0; k < img.size(); ++k) {
        if (mask.observed[static_cast<std::size_t>(k)]) amplitude = std::max(amplitude, std::abs(img[k]));
    }

    PatchSet ps;
    ps.patch_h = patch_h;
    ps.patch_w = patch_w;
    ps.semilocal_scale = scale;
    const Index d = raw.cols();
    ps.vectors.resize(raw.rows(), d + 2);
    ps.vectors.leftCols(d) = raw;
    ps.center_value.resize(img.size());
    const double row_step = scale * amplitude / static_cast<double>(img.rows());
    const double col_step = scale * amplitude / static_cast<double>(img.cols());
    for (Index r = 0; r < img.rows(); ++r) {
        for (Index c = 0; c < img.cols(); ++c) {
            const Index k = r * img.cols() + c;
            ps.vectors(k, d) = static_cast<double>(r + 1) * row_step;
            ps.vectors(k, d + 1) = static_cast<double>(c + 1) * col_step;
            ps.center_value[k] = img[k];
        }
    }
    return ps;
}

double lambda_schedule(double initial, double floor, Index step) {
    if (initial < floor) throw InvalidArgument("lambda_schedule: initial value below the floor");
    if (step < 0) throw InvalidArgument("lambda_schedule: negative step");
    return std::max(initial - static_cast<double>(step), floor);
}

GrayImage initialize_image(const GrayImage& observed, const Mask& mask, std::uint64_t seed) {
    check_mask(observed, mask, "initialize_image");
    double sum = 0.0;
    Index count = 0;
    for (Index k = 0; k < observed.size(); ++k) {
        if (mask.observed[static_cast<std::size_t>(k)]) {
            sum += observed[k];
            ++count;
        }
    }
    const double mean = sum / static_cast<double>(count);
    double sq = 0.0;
    for (Index k = 0; k < observed.size(); ++k) {
        if (mask.observed[static_cast<std::size_t>(k)]) sq += (observed[k] - mean) * (observed[k] - mean);
    }
    const double sd = std::sqrt(sq / static_cast<double>(count));

    GrayImage out = observed;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Index k = 0; k < out.size(); ++k) {
        if (mask.observed[static_cast<std::size_t>(k)]) continue;
        // sd == 0 reduces the draw to the mean; still consume the stream for a stable layout.
        const double z = normal(rng);
        out[k] = sd > 0.0 ? clamp_intensity(mean + sd * z) : clamp_intensity(mean);
    }
    return out;
}

Mask sample_mask(Index rows, Index cols, double rate, std::uint64_t seed) {
    if (!(rate > 0.0 && rate <= 1.0)) throw InvalidArgument("sample_mask: rate must lie in (0, 1]");
    if (rows < 1 || cols < 1) throw InvalidArgument("sample_mask: empty image");
    const Index total = rows * cols;
    const auto keep = static_cast<Index>(std::floor(rate * static_cast<double>(total)));
    Mask mask = Mask::empty(rows, cols);
    if (keep >= total) return Mask::full(rows, cols);

    std::vector<Index> perm(static_cast<std::size_t>(total));
    std::iota(perm.begin(), perm.end(), Index{0});
    std::mt19937_64 rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (Index k = 0; k < keep; ++k) mask.observed[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])] = 1;
    return mask;
}

void InpaintConfig::validate() const {
    check_patch_side(patch_h, "height");
    check_patch_side(patch_w, "width");
    if (outer_iters < 1) throw InvalidArgument("InpaintConfig: outer_iters must be at least 1");
    if (warm_start_iters < 0) throw InvalidArgument("InpaintConfig: warm_start_iters must be nonnegative");
    if (schedule_start < schedule_floor) throw InvalidArgument("InpaintConfig: schedule start below its floor");
    if (schedule_floor < 0.0) throw InvalidArgument("InpaintConfig: negative schedule floor");
    if (!(cg_tol > 0.0)) throw InvalidArgument("InpaintConfig: cg_tol must be positive");
    if (rel_change_tol < 0.0) throw InvalidArgument("InpaintConfig: rel_change_tol must be nonnegative");
}

InpaintSession::InpaintSession(GrayImage observed, Mask mask, InpaintConfig cfg)
    : observed_(std::move(observed)), mask_(std::move(mask)), cfg_(std::move(cfg)) {
    cfg_.validate();
    check_mask(observed_, mask_, "inpaint");
    current_ = initialize_image(observed_, mask_, cfg_.seed);
}

bool InpaintSession::done() const noexcept {
    return converged_ || iteration_ >= cfg_.outer_iters || mask_.count() == mask_.rows * mask_.cols;
}

void InpaintSession::step() {
    if (done()) return;
    const Index k = iteration_;
    const double scale = lambda_schedule(cfg_.schedule_start, cfg_.schedule_floor, k);
    const Method method = k < cfg_.warm_start_iters ? Method::WNLL : cfg_.method;

    const RowMatrix raw = extract_patches(current_, cfg_.patch_h, cfg_.patch_w);
    PatchSet patches = semilocal_augment(raw, current_, mask_, scale, cfg_.patch_h, cfg_.patch_w);
    const SparseWeightGraph graph = build_weight_graph(PointCloud(std::move(patches.vectors)), cfg_.graph);

    Observations obs;
    for (Index p = 0; p < observed_.size(); ++p) {
        if (mask_.observed[static_cast<std::size_t>(p)]) {
            obs.vertices.push_back(p);
            obs.values.push_back(observed_[p]);
        }
    }
    RecoveryParams params;
    params.method = method;
    params.lambda = cfg_.lambda;
    params.gamma = cfg_.gamma;
    params.cg_tol = cfg_.cg_tol;
    params.cg_max_iters = cfg_.cg_max_iters;

    Eigen::VectorXd u;
    try {
        u = recover(graph, obs, params);
    } catch (const NonConvergence& e) {
        throw NonConvergence(e.last_residual(), e.iterations(),
                             "inpaint iteration " + std::to_string(k) + ": " + e.what());
    }

    GrayImage next = current_;
    double diff = 0.0, base = 0.0;
    for (Index p = 0; p < next.size(); ++p) {
        next[p] = mask_.observed[static_cast<std::size_t>(p)] ? observed_[p] : clamp_intensity(u[p]);
        diff += (next[p] - current_[p]) * (next[p] - current_[p]);
        base += current_[p] * current_[p];
    }
    const double rel = base > 0.0 ? std::sqrt(diff / base) : std::sqrt(diff);
    current_ = std::move(next);
    ++iteration_;
    if (cfg_.rel_change_tol > 0.0 && rel < cfg_.rel_change_tol) converged_ = true;

    if (observer) observer({k, method, scale, rel, &current_});
}

void InpaintSession::run(std::optional<Index> stop_after) {
    while (!done() && (!stop_after || iteration_ < *stop_after)) step();
}

GrayImage inpaint(const GrayImage& observed, const Mask& mask, const InpaintConfig& cfg) {
    InpaintSession session(observed, mask, cfg);
    session.run();
    return session.current();
}

}  // namespace wecure
