// Copyright (c) 2026 The lowlight Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lowlight/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "lowlight/json_util.hpp"
#include "lowlight/parallel.hpp"
#include "lowlight/png_io.hpp"

namespace fs = std::filesystem;

namespace lowlight {

namespace {

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;
constexpr double kSsimK1 = 0.01;
constexpr double kSsimK2 = 0.03;
constexpr double kDegenerateMeanThreshold = 1e-8;

// Normalized 11-tap Gaussian, sigma 1.5, centered.
std::vector<double> ssim_kernel() {
    std::vector<double> k(kSsimWindow);
    const int half = kSsimWindow / 2;
    double sum = 0.0;
    for (int i = 0; i < kSsimWindow; ++i) {
        const double d = i - half;
        k[i] = std::exp(-d * d / (2.0 * kSsimSigma * kSsimSigma));
        sum += k[i];
    }
    for (double& v : k) v /= sum;
    return k;
}

// Horizontal then vertical valid-mode convolution of one channel plane.
// Input plane is h x w; output is (h - win + 1) x (w - win + 1).
std::vector<double> gauss_valid(const std::vector<double>& plane, int w, int h,
                                const std::vector<double>& kernel) {
    const int win = static_cast<int>(kernel.size());
    const int out_w = w - win + 1;
    const int out_h = h - win + 1;
    std::vector<double> tmp(static_cast<std::size_t>(h) * out_w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < out_w; ++x) {
            double acc = 0.0;
            for (int t = 0; t < win; ++t)
                acc += kernel[t] * plane[static_cast<std::size_t>(y) * w + x + t];
            tmp[static_cast<std::size_t>(y) * out_w + x] = acc;
        }
    std::vector<double> out(static_cast<std::size_t>(out_h) * out_w);
    for (int y = 0; y < out_h; ++y)
        for (int x = 0; x < out_w; ++x) {
            double acc = 0.0;
            for (int t = 0; t < win; ++t)
                acc += kernel[t] * tmp[static_cast<std::size_t>(y + t) * out_w + x];
            out[static_cast<std::size_t>(y) * out_w + x] = acc;
        }
    return out;
}

std::vector<double> extract_plane(const ImageF& img, int c) {
    std::vector<double> plane(static_cast<std::size_t>(img.width()) *
                              img.height());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            plane[static_cast<std::size_t>(y) * img.width() + x] = img.at(x, y, c);
    return plane;
}

} // namespace

double psnr(const ImageF& pred, const ImageF& gt) {
    require_same_shape(pred, gt, "psnr");
    const auto& a = pred.samples();
    const auto& b = gt.samples();
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    const double mse = sum / static_cast<double>(a.size());
    if (mse <= 0.0) return kPsnrCap;
    return std::min(10.0 * std::log10(1.0 / mse), kPsnrCap);
}

double ssim(const ImageF& pred, const ImageF& gt) {
    require_same_shape(pred, gt, "ssim");
    if (pred.width() < kSsimWindow || pred.height() < kSsimWindow)
        throw ContractError("ssim: image smaller than the " +
                            std::to_string(kSsimWindow) + "x" +
                            std::to_string(kSsimWindow) + " window");

    static const std::vector<double> kernel = ssim_kernel();
    const double c1 = kSsimK1 * kSsimK1; // (K1 * L)^2, L = 1
    const double c2 = kSsimK2 * kSsimK2;
    const int w = pred.width();
    const int h = pred.height();

    double channel_sum = 0.0;
    for (int c = 0; c < pred.channels(); ++c) {
        const auto x = extract_plane(pred, c);
        const auto y = extract_plane(gt, c);
        std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            xx[i] = x[i] * x[i];
            yy[i] = y[i] * y[i];
            xy[i] = x[i] * y[i];
        }
        const auto mu_x = gauss_valid(x, w, h, kernel);
        const auto mu_y = gauss_valid(y, w, h, kernel);
        const auto s_xx = gauss_valid(xx, w, h, kernel);
        const auto s_yy = gauss_valid(yy, w, h, kernel);
        const auto s_xy = gauss_valid(xy, w, h, kernel);

        double acc = 0.0;
        for (std::size_t i = 0; i < mu_x.size(); ++i) {
            const double var_x = s_xx[i] - mu_x[i] * mu_x[i];
            const double var_y = s_yy[i] - mu_y[i] * mu_y[i];
            const double cov = s_xy[i] - mu_x[i] * mu_y[i];
            const double num = (2.0 * mu_x[i] * mu_y[i] + c1) * (2.0 * cov + c2);
            const double den = (mu_x[i] * mu_x[i] + mu_y[i] * mu_y[i] + c1) *
                               (var_x + var_y + c2);
            acc += num / den;
        }
        channel_sum += acc / static_cast<double>(mu_x.size());
    }
    return channel_sum / pred.channels();
}

double l1_loss(const ImageF& pred, const ImageF& gt) {
    require_same_shape(pred, gt, "l1_loss");
    const auto& a = pred.samples();
    const auto& b = gt.samples();
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
    return sum / static_cast<double>(a.size());
}

double l2_loss(const ImageF& pred, const ImageF& gt) {
    require_same_shape(pred, gt, "l2_loss");
    const auto& a = pred.samples();
    const auto& b = gt.samples();
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum / static_cast<double>(a.size());
}

std::vector<std::string> IdentityExtractor::layers() const {
    return {"identity"};
}

FeatureVolume IdentityExtractor::extract(const std::string& layer,
                                         const ImageF& img) const {
    if (layer != "identity")
        throw ContractError("IdentityExtractor: unknown layer '" + layer + "'");
    FeatureVolume v;
    v.channels = img.channels();
    v.height = img.height();
    v.width = img.width();
    // Keeps the image's native sample order; the loss reduces over the whole
    // volume so layout is irrelevant, and this makes the identity case agree
    // with l1_loss bit for bit.
    v.data = img.samples();
    return v;
}

std::vector<std::string> AvgPoolExtractor::layers() const { return {"pool3"}; }

FeatureVolume AvgPoolExtractor::extract(const std::string& layer,
                                        const ImageF& img) const {
    if (layer != "pool3")
        throw ContractError("AvgPoolExtractor: unknown layer '" + layer + "'");
    if (img.width() < 3 || img.height() < 3)
        throw ContractError("AvgPoolExtractor: image smaller than the pool");
    FeatureVolume v;
    v.channels = img.channels();
    v.height = img.height() / 3;
    v.width = img.width() / 3;
    v.data.reserve(static_cast<std::size_t>(v.channels) * v.height * v.width);
    for (int c = 0; c < v.channels; ++c)
        for (int py = 0; py < v.height; ++py)
            for (int px = 0; px < v.width; ++px) {
                double acc = 0.0;
                for (int dy = 0; dy < 3; ++dy)
                    for (int dx = 0; dx < 3; ++dx)
                        acc += img.at(px * 3 + dx, py * 3 + dy, c);
                v.data.push_back(acc / 9.0);
            }
    return v;
}

double perceptual_loss(const FeatureExtractor& extractor,
                       const std::string& layer, const ImageF& pred,
                       const ImageF& gt) {
    require_same_shape(pred, gt, "perceptual_loss");
    const FeatureVolume fp = extractor.extract(layer, pred);
    const FeatureVolume fg = extractor.extract(layer, gt);
    if (fp.size() != fg.size())
        throw ContractError("perceptual_loss: extractor is not shape-stable");
    double sum = 0.0;
    for (std::size_t i = 0; i < fp.data.size(); ++i)
        sum += std::abs(fp.data[i] - fg.data[i]);
    return sum / (static_cast<double>(fp.channels) * fp.height * fp.width);
}

DiscriminatorScores::DiscriminatorScores(std::vector<double> real,
                                         std::vector<double> fake, double eps)
    : real_(std::move(real)), fake_(std::move(fake)) {
    if (real_.empty() || fake_.empty())
        throw ContractError("DiscriminatorScores: arrays must be non-empty");
    if (!(eps > 0.0) || eps >= 0.5)
        throw ContractError("DiscriminatorScores: eps must lie in (0, 0.5)");
    for (double& v : real_) v = std::clamp(v, eps, 1.0 - eps);
    for (double& v : fake_) v = std::clamp(v, eps, 1.0 - eps);
}

CganLosses cgan_losses(const DiscriminatorScores& scores) {
    double log_real = 0.0;
    for (double v : scores.real()) log_real += std::log(v);
    log_real /= static_cast<double>(scores.real().size());

    double log_one_minus_fake = 0.0;
    double log_fake = 0.0;
    for (double v : scores.fake()) {
        log_one_minus_fake += std::log(1.0 - v);
        log_fake += std::log(v);
    }
    log_one_minus_fake /= static_cast<double>(scores.fake().size());
    log_fake /= static_cast<double>(scores.fake().size());

    CganLosses out;
    out.d_loss = -log_real - log_one_minus_fake;
    out.g_loss = -log_fake;
    return out;
}

double combined_objective(double g_loss, double l1, double lambda) {
    if (lambda < 0.0)
        throw ContractError("combined_objective: lambda must be nonnegative");
    return g_loss + lambda * l1;
}

double estimate_k_nonref(double corpus_mean_intensity, const ImageF& input) {
    require_range(input, Range::kUnit, "estimate_k_nonref");
    if (!(corpus_mean_intensity > 0.0) || corpus_mean_intensity > 1.0)
        throw ContractError("estimate_k_nonref: corpus mean must lie in (0, 1]");
    const double input_mean = input.mean();
    if (input_mean <= kDegenerateMeanThreshold)
        throw DegenerateImageError(
            "estimate_k_nonref: input mean below threshold");
    return corpus_mean_intensity / input_mean;
}

std::vector<EvalPair> pairs_from_dirs(const fs::path& pred_dir,
                                      const fs::path& gt_dir,
                                      std::vector<std::string>* skipped) {
    auto list_files = [](const fs::path& dir) {
        if (!fs::exists(dir) || !fs::is_directory(dir))
            throw IoError("evaluate: '" + dir.string() +
                          "' is not a readable directory");
        std::map<std::string, fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.is_regular_file())
                files.emplace(entry.path().filename().string(), entry.path());
        return files;
    };
    const auto pred_files = list_files(pred_dir);
    const auto gt_files = list_files(gt_dir);

    std::vector<EvalPair> pairs;
    for (const auto& [name, path] : pred_files) {
        const auto it = gt_files.find(name);
        if (it == gt_files.end()) {
            if (skipped) skipped->push_back(name + " (no ground truth)");
            continue;
        }
        pairs.push_back({name, path, it->second});
    }
    for (const auto& [name, path] : gt_files)
        if (!pred_files.count(name) && skipped)
            skipped->push_back(name + " (no prediction)");
    return pairs;
}

std::vector<EvalPair> pairs_from_manifest(const Manifest& manifest,
                                          const fs::path& base_dir) {
    std::vector<EvalPair> pairs;
    pairs.reserve(manifest.records.size());
    for (const auto& record : manifest.records) {
        EvalPair p;
        // Dark is scored against its bright reference.
        p.id = fs::path(record.dark_path).stem().string();
        p.pred = base_dir / record.dark_path;
        p.gt = base_dir / record.bright_path;
        pairs.push_back(std::move(p));
    }
    return pairs;
}

MetricReport evaluate(const std::vector<EvalPair>& pairs, int workers) {
    struct Slot {
        bool ok = false;
        PairScore score;
        std::string skip_reason;
    };
    std::vector<Slot> slots(pairs.size());

    parallel_for(pairs.size(), workers, [&](std::size_t i) {
        Slot& slot = slots[i];
        try {
            const ImageF pred = load_image(pairs[i].pred);
            const ImageF gt = load_image(pairs[i].gt);
            slot.score.id = pairs[i].id;
            slot.score.psnr = psnr(pred, gt);
            slot.score.ssim = ssim(pred, gt);
            slot.ok = true;
        } catch (const Error& e) {
            slot.skip_reason = pairs[i].id + " (" + e.what() + ")";
        }
    });

    MetricReport report;
    double psnr_sum = 0.0, ssim_sum = 0.0;
    for (auto& slot : slots) {
        if (slot.ok) {
            psnr_sum += slot.score.psnr;
            ssim_sum += slot.score.ssim;
            report.per_image.push_back(std::move(slot.score));
        } else {
            report.skipped.push_back(std::move(slot.skip_reason));
        }
    }
    if (!report.per_image.empty()) {
        report.mean_psnr = psnr_sum / static_cast<double>(report.per_image.size());
        report.mean_ssim = ssim_sum / static_cast<double>(report.per_image.size());
    }
    return report;
}

std::string report_to_json(const MetricReport& report) {
    JsonWriter w;
    w.begin_object();
    w.field("config", report.config);
    w.begin_object("aggregate");
    w.field("count", static_cast<std::uint64_t>(report.per_image.size()));
    w.field("mean_psnr", report.mean_psnr);
    w.field("mean_ssim", report.mean_ssim);
    w.end_object();
    w.begin_array("per_image");
    for (const auto& row : report.per_image) {
        w.begin_object();
        w.field("id", row.id);
        w.field("psnr", row.psnr);
        w.field("ssim", row.ssim);
        w.end_object();
    }
    w.end_array();
    w.begin_array("skipped");
    for (const auto& s : report.skipped) w.value(s);
    w.end_array();
    w.end_object();
    return w.str();
}

std::string report_to_csv(const MetricReport& report) {
    std::string out = "id,psnr,ssim\n";
    for (const auto& row : report.per_image) {
        out += row.id;
        out += ',';
        out += format_double(row.psnr);
        out += ',';
        out += format_double(row.ssim);
        out += '\n';
    }
    return out;
}

void save_report(const MetricReport& report, const fs::path& json_path) {
    {
        std::ofstream out(json_path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("save_report: cannot open '" + json_path.string() + "'");
        out << report_to_json(report);
        if (!out)
            throw IoError("save_report: write failed for '" +
                          json_path.string() + "'");
    }
    fs::path csv_path = json_path;
    csv_path.replace_extension(".csv");
    std::ofstream out(csv_path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("save_report: cannot open '" + csv_path.string() + "'");
    out << report_to_csv(report);
    if (!out)
        throw IoError("save_report: write failed for '" + csv_path.string() + "'");
}

} // namespace lowlight
