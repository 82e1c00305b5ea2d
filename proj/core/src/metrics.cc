// Copyright 2026 The msfdpm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "msfdpm/metrics.h"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>

#include "msfdpm/error.h"

namespace msfdpm {
namespace {

constexpr std::array<double, 5> kMsSsimWeights = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
constexpr int kWindow = 11;
constexpr double kWindowSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

// Single-channel plane.
struct Plane {
  int height = 0;
  int width = 0;
  std::vector<double> v;
  double at(int y, int x) const { return v[static_cast<std::size_t>(y) * width + x]; }
};

Plane luma(const FeatureMap& image) {
  Plane p{image.height(), image.width(), {}};
  p.v.resize(static_cast<std::size_t>(p.height) * p.width);
  for (int y = 0; y < p.height; ++y) {
    for (int x = 0; x < p.width; ++x) {
      p.v[static_cast<std::size_t>(y) * p.width + x] =
          image.channels() == 1 ? image.at(y, x, 0)
                                : 0.299 * image.at(y, x, 0) + 0.587 * image.at(y, x, 1) +
                                      0.114 * image.at(y, x, 2);
    }
  }
  return p;
}

std::array<double, kWindow> gaussian_window() {
  std::array<double, kWindow> g{};
  double sum = 0.0;
  for (int t = 0; t < kWindow; ++t) {
    const double d = t - kWindow / 2;
    g[t] = std::exp(-d * d / (2.0 * kWindowSigma * kWindowSigma));
    sum += g[t];
  }
  for (double& w : g) w /= sum;
  return g;
}

// Separable "valid" Gaussian filtering.
Plane filter_valid(const Plane& in) {
  static const auto g = gaussian_window();
  Plane tmp{in.height, in.width - kWindow + 1, {}};
  tmp.v.resize(static_cast<std::size_t>(tmp.height) * tmp.width);
  for (int y = 0; y < tmp.height; ++y) {
    for (int x = 0; x < tmp.width; ++x) {
      double s = 0.0;
      for (int t = 0; t < kWindow; ++t) s += g[t] * in.at(y, x + t);
      tmp.v[static_cast<std::size_t>(y) * tmp.width + x] = s;
    }
  }
  Plane out{in.height - kWindow + 1, tmp.width, {}};
  out.v.resize(static_cast<std::size_t>(out.height) * out.width);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      double s = 0.0;
      for (int t = 0; t < kWindow; ++t) s += g[t] * tmp.at(y + t, x);
      out.v[static_cast<std::size_t>(y) * out.width + x] = s;
    }
  }
  return out;
}

Plane product(const Plane& a, const Plane& b) {
  Plane p{a.height, a.width, std::vector<double>(a.v.size())};
  for (std::size_t t = 0; t < a.v.size(); ++t) p.v[t] = a.v[t] * b.v[t];
  return p;
}

Plane downsample(const Plane& in) {
  Plane out{in.height / 2, in.width / 2, {}};
  out.v.resize(static_cast<std::size_t>(out.height) * out.width);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      out.v[static_cast<std::size_t>(y) * out.width + x] =
          (in.at(2 * y, 2 * x) + in.at(2 * y, 2 * x + 1) + in.at(2 * y + 1, 2 * x) +
           in.at(2 * y + 1, 2 * x + 1)) /
          4.0;
    }
  }
  return out;
}

// Mean contrast-structure term and mean SSIM at one scale.
std::pair<double, double> ssim_terms(const Plane& a, const Plane& b) {
  const Plane mu_a = filter_valid(a);
  const Plane mu_b = filter_valid(b);
  const Plane e_aa = filter_valid(product(a, a));
  const Plane e_bb = filter_valid(product(b, b));
  const Plane e_ab = filter_valid(product(a, b));
  double cs_sum = 0.0;
  double ssim_sum = 0.0;
  for (std::size_t t = 0; t < mu_a.v.size(); ++t) {
    const double ma = mu_a.v[t];
    const double mb = mu_b.v[t];
    const double var_a = e_aa.v[t] - ma * ma;
    const double var_b = e_bb.v[t] - mb * mb;
    const double cov = e_ab.v[t] - ma * mb;
    const double cs = (2.0 * cov + kC2) / (var_a + var_b + kC2);
    const double lum = (2.0 * ma * mb + kC1) / (ma * ma + mb * mb + kC1);
    cs_sum += cs;
    ssim_sum += lum * cs;
  }
  const double n = static_cast<double>(mu_a.v.size());
  return {cs_sum / n, ssim_sum / n};
}

double polyval(const Eigen::Vector4d& c, double x) {
  return ((c[3] * x + c[2]) * x + c[1]) * x + c[0];
}

double quality_of(const RdPoint& p, QualityField field) {
  return field == QualityField::kPsnr ? p.psnr : p.ms_ssim;
}

// log10(bpp) as a function of quality.
class LogRateModel {
 public:
  LogRateModel(const RdCurve& curve, QualityField field, BdMethod method) : method_(method) {
    for (const auto& p : curve.points()) {
      xs_.push_back(quality_of(p, field));
      ys_.push_back(std::log10(p.bpp));
    }
    if (method_ == BdMethod::kCubicFit) {
      Eigen::MatrixXd vander(xs_.size(), 4);
      Eigen::VectorXd rhs(xs_.size());
      for (std::size_t r = 0; r < xs_.size(); ++r) {
        double pw = 1.0;
        for (int c = 0; c < 4; ++c, pw *= xs_[r]) vander(r, c) = pw;
        rhs[r] = ys_[r];
      }
      coeffs_ = vander.colPivHouseholderQr().solve(rhs);
    } else {
      std::vector<std::size_t> order(xs_.size());
      for (std::size_t t = 0; t < order.size(); ++t) order[t] = t;
      std::sort(order.begin(), order.end(), [&](auto a, auto b) { return xs_[a] < xs_[b]; });
      std::vector<double> x;
      std::vector<double> y;
      for (auto t : order) {
        x.push_back(xs_[t]);
        y.push_back(ys_[t]);
      }
      for (std::size_t t = 1; t < x.size(); ++t) {
        if (!(x[t] > x[t - 1])) {
          throw InvalidInputError("piecewise-cubic BD-rate needs distinct quality values");
        }
      }
      xs_ = std::move(x);
      ys_ = std::move(y);
      slopes_ = pchip_slopes(xs_, ys_);
    }
  }

  double min_quality() const { return *std::min_element(xs_.begin(), xs_.end()); }
  double max_quality() const { return *std::max_element(xs_.begin(), xs_.end()); }

  double operator()(double x) const {
    if (method_ == BdMethod::kCubicFit) return polyval(coeffs_, x);
    std::size_t seg = std::upper_bound(xs_.begin(), xs_.end(), x) - xs_.begin();
    seg = std::clamp<std::size_t>(seg, 1, xs_.size() - 1) - 1;
    const double h = xs_[seg + 1] - xs_[seg];
    const double t = (x - xs_[seg]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * ys_[seg] + (t3 - 2 * t2 + t) * h * slopes_[seg] +
           (-2 * t3 + 3 * t2) * ys_[seg + 1] + (t3 - t2) * h * slopes_[seg + 1];
  }

 private:
  // Fritsch-Carlson monotone slopes with the three-point end condition.
  static std::vector<double> pchip_slopes(const std::vector<double>& x,
                                          const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> h(n - 1);
    std::vector<double> delta(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      h[k] = x[k + 1] - x[k];
      delta[k] = (y[k + 1] - y[k]) / h[k];
    }
    std::vector<double> d(n, 0.0);
    for (std::size_t k = 1; k + 1 < n; ++k) {
      if (delta[k - 1] * delta[k] > 0) {
        const double w1 = 2 * h[k] + h[k - 1];
        const double w2 = h[k] + 2 * h[k - 1];
        d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
      }
    }
    auto edge = [](double h0, double h1, double m0, double m1) {
      double e = ((2 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
      if (std::signbit(e) != std::signbit(m0) || m0 == 0) {
        e = 0;
      } else if (std::signbit(m0) != std::signbit(m1) && std::abs(e) > 3 * std::abs(m0)) {
        e = 3 * m0;
      }
      return e;
    };
    d[0] = edge(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = edge(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    return d;
  }

  BdMethod method_;
  std::vector<double> xs_;
  std::vector<double> ys_;
  Eigen::Vector4d coeffs_ = Eigen::Vector4d::Zero();
  std::vector<double> slopes_;
};

}  // namespace

RdCurve::RdCurve(std::vector<RdPoint> points) : points_(std::move(points)) {
  for (std::size_t t = 0; t < points_.size(); ++t) {
    const RdPoint& p = points_[t];
    if (!(p.bpp >= 0) || !std::isfinite(p.bpp)) throw InvalidInputError("bpp must be >= 0");
    if (!(p.ms_ssim >= 0 && p.ms_ssim <= 1)) throw InvalidInputError("MS-SSIM must lie in [0, 1]");
    if (t > 0 && !(p.bpp > points_[t - 1].bpp)) {
      throw InvalidInputError("RD curve bpp must be strictly increasing");
    }
  }
}

double mse(const FeatureMap& a, const FeatureMap& b) {
  if (!a.same_shape(b)) throw InvalidInputError("MSE of differently shaped images");
  if (a.empty()) throw InvalidInputError("MSE of empty images");
  auto av = a.values();
  auto bv = b.values();
  double s = 0.0;
  for (std::size_t t = 0; t < av.size(); ++t) {
    const double d = av[t] - bv[t];
    s += d * d;
  }
  return s / static_cast<double>(av.size());
}

double psnr(const FeatureMap& a, const FeatureMap& b, double peak) {
  if (!(peak > 0)) throw DomainError("PSNR peak must be positive");
  const double e = mse(a, b);
  if (e == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / e);
}

MsSsimResult ms_ssim_detailed(const FeatureMap& a, const FeatureMap& b) {
  if (!a.same_shape(b)) throw InvalidInputError("MS-SSIM of differently shaped images");
  if (a.channels() != 1 && a.channels() != 3) {
    throw InvalidInputError("MS-SSIM needs 1- or 3-channel images");
  }
  const int min_side = std::min(a.height(), a.width());
  if (min_side < kWindow) {
    throw InvalidInputError("MS-SSIM needs images of at least 11x11");
  }
  int scales = 1;
  while (scales < 5 && (min_side >> scales) >= kWindow) ++scales;

  double weight_sum = 0.0;
  for (int s = 0; s < scales; ++s) weight_sum += kMsSsimWeights[s];

  Plane pa = luma(a);
  Plane pb = luma(b);
  double value = 1.0;
  for (int s = 0; s < scales; ++s) {
    const auto [cs, ssim] = ssim_terms(pa, pb);
    const double w = kMsSsimWeights[s] / weight_sum;
    const double term = (s + 1 == scales) ? ssim : cs;
    value *= std::pow(std::max(term, 0.0), w);
    if (s + 1 < scales) {
      pa = downsample(pa);
      pb = downsample(pb);
    }
  }
  return {std::clamp(value, 0.0, 1.0), scales};
}

double ms_ssim(const FeatureMap& a, const FeatureMap& b) { return ms_ssim_detailed(a, b).value; }

double latent_entropy_bits(const Latent& latent) {
  if (latent.values.empty()) throw InvalidInputError("entropy of an empty latent");
  std::map<long long, std::size_t> histogram;
  for (double v : latent.values.values()) ++histogram[std::llround(v / latent.step)];
  const double n = static_cast<double>(latent.values.size());
  double bits = 0.0;
  for (const auto& [symbol, count] : histogram) {
    const double p = static_cast<double>(count) / n;
    bits += p * std::log2(1.0 / p);
  }
  return bits;
}

double bpp_estimate(const Latent& latent, int height, int width) {
  if (height <= 0 || width <= 0) throw InvalidInputError("image dims must be positive");
  return latent_entropy_bits(latent) * static_cast<double>(latent.values.size()) /
         (static_cast<double>(height) * width);
}

double rd_loss(double entropy, double d1, double d2, double lambda, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0, 1]");
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  return entropy + lambda * ((1.0 - alpha) * d1 + alpha * d2);
}

double bd_rate(const RdCurve& reference, const RdCurve& test, QualityField field,
               BdMethod method) {
  if (reference.size() < 4 || test.size() < 4) {
    throw InvalidInputError("BD-rate needs at least 4 points per curve");
  }
  for (const RdCurve* c : {&reference, &test}) {
    for (const auto& p : c->points()) {
      if (!(p.bpp > 0)) throw InvalidInputError("BD-rate needs positive bpp values");
    }
  }
  const LogRateModel ref(reference, field, method);
  const LogRateModel tst(test, field, method);
  const double lo = std::max(ref.min_quality(), tst.min_quality());
  const double hi = std::min(ref.max_quality(), tst.max_quality());
  if (!(hi > lo)) throw DomainError("RD curves share no quality range");

  const int n = kBdIntegrationSamples;
  const double step = (hi - lo) / (n - 1);
  double area = 0.0;
  double prev = tst(lo) - ref(lo);
  for (int t = 1; t < n; ++t) {
    const double x = (t == n - 1) ? hi : lo + step * t;
    const double cur = tst(x) - ref(x);
    area += 0.5 * (prev + cur) * step;
    prev = cur;
  }
  const double mean_log_gap = area / (hi - lo);
  return (std::pow(10.0, mean_log_gap) - 1.0) * 100.0;
}

double performance_reduction(double gain_before, double gain_after) {
  if (gain_before == 0.0 || !std::isfinite(gain_before)) {
    throw DomainError("performance reduction is undefined for a zero baseline improvement");
  }
  return 1.0 - gain_after / gain_before;
}

}  // namespace msfdpm
