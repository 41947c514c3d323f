/*
 * Copyright 2026 The POTP Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oracles/oracles.hpp"
#include "potp/dsp/landmarks.hpp"
#include "potp/random.hpp"
#include "potp/spectral/fft.hpp"
#include "potp/spectral/psd.hpp"

using namespace potp;
using namespace potp::spectral;
using std::numbers::pi;

namespace {

std::vector<double> sine(double fs, std::size_t n, double f, double amp = 1.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = amp * std::sin(2 * pi * f * i / fs);
  return x;
}

PsdEstimate flat_psd(double lo, double hi, double step, double level = 1.0) {
  PsdEstimate p;
  p.freqs_hz = frequency_grid(lo, hi, step);
  p.power.assign(p.freqs_hz.size(), level);
  p.resolution_hz = step;
  return p;
}

}  // namespace

TEST(Fft, MatchesDirectDftForAllLengths) {
  Rng rng(2);
  for (std::size_t n : {1u, 2u, 3u, 8u, 12u, 17u, 64u, 100u}) {
    std::vector<double> x(n);
    for (auto& v : x) v = rng.normal();
    const auto got = fft_real(x);
    for (std::size_t k = 0; k < n; ++k) {
      std::complex<double> z = 0;
      for (std::size_t i = 0; i < n; ++i) z += x[i] * std::polar(1.0, -2 * pi * double(k * i) / n);
      EXPECT_NEAR(std::abs(got[k] - z), 0.0, 1e-9) << n << " " << k;
    }
  }
}

TEST(Welch, MatchesDirectDftOracle) {
  Rng rng(4);
  std::vector<double> x(300);
  for (auto& v : x) v = rng.normal() + 0.3 * std::sin(0.1 * v);
  for (double seg_s : {10.0, 12.5, 30.0}) {
    const auto psd = welch_psd(x, 4.0, seg_s);
    const auto nseg = static_cast<std::size_t>(std::llround(seg_s * 4.0));
    const auto ref = oracle::welch_direct(x, 4.0, nseg, nseg - nseg / 2);
    ASSERT_EQ(psd.power.size(), ref.size());
    for (std::size_t k = 0; k < ref.size(); ++k) EXPECT_NEAR(psd.power[k], ref[k], 1e-9 * (1 + ref[k]));
  }
}

TEST(Welch, SinusoidPeakWithinOneBin) {
  const auto psd = welch_psd(sine(4, 180, 0.3), 4, 30);
  const auto it = std::max_element(psd.power.begin(), psd.power.end());
  const double f = psd.freqs_hz[static_cast<std::size_t>(it - psd.power.begin())];
  EXPECT_LE(std::abs(f - 0.3), psd.resolution_hz);
}

TEST(Welch, WhiteNoiseIntegratesToVariance) {
  Rng rng(99);
  std::vector<double> x(4 * 600);
  for (auto& v : x) v = rng.normal();
  const auto psd = welch_psd(x, 4, 30);
  EXPECT_NEAR(total_power(psd), 1.0, 0.1);
}

TEST(Welch, ConstantSignalHasZeroPower) {
  const auto psd = welch_psd(std::vector<double>(200, 5.0), 4, 30);
  EXPECT_NEAR(total_power(psd), 0.0, 1e-20);
}

TEST(Welch, ScaleEquivariance) {
  Rng rng(8);
  std::vector<double> x(500);
  for (auto& v : x) v = rng.normal();
  const auto base = welch_psd(x, 10, 20);
  for (double a : {-3.0, 0.01, 250.0}) {
    auto y = x;
    for (auto& v : y) v *= a;
    const auto scaled = welch_psd(y, 10, 20);
    for (std::size_t k = 0; k < base.power.size(); ++k)
      EXPECT_NEAR(scaled.power[k], a * a * base.power[k], 1e-9 * a * a * base.power[k] + 1e-300);
  }
}

TEST(Welch, TooShortIsAnError) {
  EXPECT_THROW(welch_psd(std::vector<double>(10, 0.0), 4, 30), InvalidArgument);
}

TEST(Psd, NonNegativeOnRandomInputs) {
  for (int seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    std::vector<double> x(rng.index(400) + 64), t;
    for (auto& v : x) v = rng.normal() * rng.uniform(0, 100);
    for (std::size_t i = 0; i < x.size(); ++i) t.push_back(i + rng.uniform(0, 0.5));
    for (double p : welch_psd(x, 4, 16).power) EXPECT_GE(p, 0.0);
    for (double p : lomb_psd(t, x, frequency_grid(0.01, 0.5, 0.01)).power) EXPECT_GE(p, 0.0);
  }
}

TEST(Lomb, JitteredSinusoidPeak) {
  Rng rng(21);
  std::vector<double> t, y;
  double now = 0.0;
  while (now < 60.0) {
    t.push_back(now);
    y.push_back(std::sin(2 * pi * 0.25 * now));
    now += rng.uniform(0.15, 0.35);
  }
  const auto grid = frequency_grid(0.05, 1.0, 0.005);
  EXPECT_NEAR(peak_frequency(lomb_psd(t, y, grid), 0.05, 1.0), 0.25, 0.005 + 1e-12);
  // The independent single-window periodogram agrees on the peak.
  const auto ref = oracle::lomb_classic(t, y, grid);
  const auto k = std::max_element(ref.begin(), ref.end()) - ref.begin();
  EXPECT_NEAR(grid[static_cast<std::size_t>(k)], 0.25, 0.005 + 1e-12);
}

TEST(Lomb, SingleWindowMatchesClassicFormula) {
  // Nine samples cannot be split into two sub-windows of eight, so the
  // estimate is one periodogram of the detrended data.
  std::vector<double> t{0.0, 0.4, 1.1, 1.3, 2.0, 2.2, 3.1, 3.3, 4.0};
  std::vector<double> y;
  for (double ti : t) y.push_back(std::cos(2 * pi * 0.3 * ti) + 0.2 * ti * ti);
  const auto grid = frequency_grid(0.05, 1.0, 0.05);
  // Oracle input: remove the least-squares line first.
  const double mt = mean(t), my = mean(y), b = ls_slope(t, y);
  std::vector<double> yd;
  for (std::size_t i = 0; i < t.size(); ++i) yd.push_back(y[i] - my - b * (t[i] - mt));
  const auto ref = oracle::lomb_classic(t, yd, grid);
  const auto got = lomb_psd(t, y, grid);
  const double fs_eff = 8.0 / 4.0;
  for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_NEAR(got.power[k] * fs_eff / 2.0, ref[k], 1e-9);  // one-sided doubling
}

TEST(Lomb, LinearTrendHasNoPeak) {
  std::vector<double> t, y;
  for (int i = 0; i < 120; ++i) {
    t.push_back(i * 0.25 + 0.01 * (i % 3));
    y.push_back(3.0 + 0.7 * t.back());
  }
  const auto psd = lomb_psd(t, y, frequency_grid(0.08, 0.6, 0.005));
  EXPECT_LT(*std::max_element(psd.power.begin(), psd.power.end()), 1e-20);
}

TEST(Lomb, InputErrors) {
  std::vector<double> t5{0, 1, 2, 3, 4}, y5(5, 1.0);
  EXPECT_THROW(lomb_psd(t5, y5, frequency_grid(0.1, 0.2, 0.1)), InvalidArgument);
  std::vector<double> t{0, 1, 2, 3, 4, 5, 6, 7, 8}, y(9, 1.0), none;
  EXPECT_THROW(lomb_psd(t, y, none), InvalidArgument);
  t[4] = t[3];
  EXPECT_THROW(lomb_psd(t, y, frequency_grid(0.1, 0.2, 0.1)), InvalidArgument);
}

TEST(BandPower, ConcentratedPowerNormalizesToOne) {
  auto p = flat_psd(0, 1, 0.01, 0.0);
  for (std::size_t i = 0; i < p.freqs_hz.size(); ++i)
    if (p.freqs_hz[i] > 0.3 && p.freqs_hz[i] < 0.4) p.power[i] = 2.0;
  EXPECT_NEAR(band_power(p, {0.25, 0.5}, Band{0, 1}), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(band_power(p, {0.6, 0.9}), 0.0);
}

TEST(BandPower, SinusoidBandRatio) {
  const auto psd = welch_psd(sine(4, 180, 0.3), 4, 30);
  EXPECT_GT(band_power(psd, {0.25, 0.5}), 10 * band_power(psd, {0.0, 0.25}));
}

TEST(BandPower, PartitionSumsToOne) {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    PsdEstimate p;
    p.freqs_hz = frequency_grid(0, 2, rng.uniform(0.003, 0.1));
    for (std::size_t i = 0; i < p.freqs_hz.size(); ++i) p.power.push_back(rng.uniform(0, 5));
    std::vector<double> edges{0.0, 1.0};
    for (int k = 0; k < 4; ++k) edges.push_back(rng.uniform(0, 1));
    std::sort(edges.begin(), edges.end());
    double sum = 0;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k)
      if (edges[k + 1] > edges[k]) sum += band_power(p, {edges[k], edges[k + 1]}, Band{0, 1});
    EXPECT_NEAR(sum, 1.0, 1e-6);
  }
}

TEST(BandPower, UniformPsdQuartersAreEqual) {
  const auto p = flat_psd(0, 1, 0.01);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(band_power(p, {0.25 * k, 0.25 * (k + 1)}, Band{0, 1}), 0.25, 1e-12);
}

TEST(BandPower, InvertedAndOutOfRangeBandsAreErrors) {
  const auto p = flat_psd(0, 1, 0.01);
  EXPECT_THROW(band_power(p, {0.5, 0.2}), InvalidArgument);
  EXPECT_THROW(band_power(p, {0.5, 1.5}), InvalidArgument);
}

TEST(GaussianFit, UniformPsdGivesMidpoint) {
  EXPECT_NEAR(gaussian_peak_fit(flat_psd(0, 1, 0.005)), 0.325, 1e-12);
}

TEST(GaussianFit, SymmetricPeak) {
  auto p = flat_psd(0, 1, 0.005, 0.0);
  for (std::size_t i = 0; i < p.power.size(); ++i) {
    const double d = (p.freqs_hz[i] - 0.3) / 0.01;
    p.power[i] = std::exp(-0.5 * d * d);
  }
  const double f = gaussian_peak_fit(p);
  EXPECT_NEAR(f, 0.3, 0.005);
  EXPECT_GE(f, 0.15);
  EXPECT_LE(f, 0.5);
}

TEST(GaussianFit, ZeroPowerIsAnError) {
  try {
    gaussian_peak_fit(flat_psd(0, 1, 0.005, 0.0));
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("zero power in band"), std::string::npos);
  }
}

TEST(PsdCsv, HeaderAndRows) {
  const auto p = flat_psd(0, 0.5, 0.25, 2.0);
  EXPECT_EQ(psd_csv(p), "freq_hz,power\n0,2\n0.25,2\n0.5,2\n");
}
