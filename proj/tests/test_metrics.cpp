#include <gtest/gtest.h>

#include <numeric>

#include "deforma/error.hpp"
#include "deforma/metrics.hpp"
#include "test_support.hpp"

using namespace deforma;
using deforma::testing::random_tensor;
using deforma::testing::Rng;

TEST(GaussianWindow, NormalizedAndSymmetric) {
  const auto g = gaussian_window(11, 1.5);
  ASSERT_EQ(g.size(), 11u);
  EXPECT_NEAR(std::accumulate(g.begin(), g.end(), 0.0), 1.0, 1e-15);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(g[i], g[10 - i]);
  EXPECT_GT(g[5], g[4]);
}

TEST(Ssim, SelfIsOne) {
  Rng rng(81);
  const Tensor x = random_tensor(rng, {24, 20, 3});
  EXPECT_NEAR(ssim(x, x), 1.0, 1e-9);
}

TEST(Ssim, ConstantBlackVersusWhite) {
  EXPECT_LT(ssim(Tensor(16, 16, 1, 0.0f), Tensor(16, 16, 1, 1.0f)), 0.01);
}

TEST(Ssim, SymmetricAndMatchesOracle) {
  Rng rng(82);
  for (int trial = 0; trial < 10; ++trial) {
    const Tensor x = random_tensor(rng, {20, 17, 2}), y = random_tensor(rng, {20, 17, 2});
    EXPECT_NEAR(ssim(x, y), ssim(y, x), 1e-9);
    EXPECT_NEAR(ssim(x, y), deforma::testing::ssim_oracle(x, y), 1e-6);
  }
}

TEST(Ssim, NonDefaultWindow) {
  Rng rng(83);
  const Tensor x = random_tensor(rng, {12, 12, 1}), y = random_tensor(rng, {12, 12, 1});
  SsimParams p;
  p.window = 7;
  p.gaussian_sigma = 1.0;
  EXPECT_NEAR(ssim(x, y, p), deforma::testing::ssim_oracle(x, y, 7, 1.0), 1e-6);
}

TEST(MaskedSsim, OnesMaskEqualsSsim) {
  Rng rng(84);
  const Tensor x = random_tensor(rng, {16, 16, 3}), y = random_tensor(rng, {16, 16, 3});
  EXPECT_NEAR(masked_ssim(x, y, Tensor(16, 16, 1, 1.0f)), ssim(x, y), 1e-12);
}

TEST(MaskedSsim, EqualsSsimOfMaskedInputs) {
  Rng rng(85);
  const Tensor x = random_tensor(rng, {16, 16, 2}), y = random_tensor(rng, {16, 16, 2});
  Tensor mask(16, 16, 1);
  for (std::size_t r = 4; r < 12; ++r)
    for (std::size_t c = 2; c < 14; ++c) mask.at(r, c) = 1.0f;
  Tensor mx = x, my = y;
  for (std::size_t r = 0; r < 16; ++r)
    for (std::size_t c = 0; c < 16; ++c)
      for (std::size_t ch = 0; ch < 2; ++ch) {
        mx.at(r, c, ch) *= mask.at(r, c);
        my.at(r, c, ch) *= mask.at(r, c);
      }
  EXPECT_NEAR(masked_ssim(x, y, mask), ssim(mx, my), 1e-12);
}

TEST(Ssim, TranslationOnPaddedCanvas) {
  // Content surrounded by a zero border wider than the window: shifting both
  // images together inside the canvas leaves SSIM unchanged.
  Rng rng(86);
  const Tensor a = random_tensor(rng, {8, 8, 1}), b = random_tensor(rng, {8, 8, 1});
  auto place = [](const Tensor& t, std::size_t r0, std::size_t c0) {
    Tensor canvas(40, 40, 1);
    for (std::size_t r = 0; r < 8; ++r)
      for (std::size_t c = 0; c < 8; ++c) canvas.at(r0 + r, c0 + c) = t.at(r, c);
    return canvas;
  };
  const double base = ssim(place(a, 12, 12), place(b, 12, 12));
  EXPECT_NEAR(ssim(place(a, 15, 18), place(b, 15, 18)), base, 1e-9);
}

TEST(Ssim, Errors) {
  const Tensor x(16, 16, 1), y(16, 15, 1);
  EXPECT_THROW(ssim(x, y), ShapeError);
  EXPECT_THROW(ssim(Tensor(8, 8, 1), Tensor(8, 8, 1)), DomainError);
  SsimParams even;
  even.window = 10;
  EXPECT_THROW(ssim(x, x, even), DomainError);
  EXPECT_THROW(masked_ssim(x, x, Tensor(16, 16, 2)), ShapeError);
}
