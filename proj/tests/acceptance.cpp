// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Everything is checked against independent reference code from
// test_support.hpp or closed-form values.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cli_fixture.hpp"
#include "deforma/affine.hpp"
#include "deforma/metrics.hpp"
#include "deforma/nnloss.hpp"
#include "deforma/pose.hpp"
#include "deforma/regions.hpp"
#include "deforma/tensor_io.hpp"
#include "deforma/warp.hpp"
#include "test_support.hpp"

using namespace deforma;
using namespace deforma::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

// Collects the first failure message of a criterion.
struct Check {
  std::string failure;
  void expect(bool ok, const std::string& what) {
    if (!ok && failure.empty()) failure = what;
  }
  bool ok() const { return failure.empty(); }
};

std::string str(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

double timed_min(int repeats, const std::function<void()>& fn) {
  double best = 1e300;
  for (int i = 0; i < repeats; ++i) {
    const auto start = Clock::now();
    fn();
    best = std::min(best, seconds_since(start));
  }
  return best;
}

// 1
Check nn_equivalence() {
  Check c;
  Rng rng(1001);
  const Shape shapes[] = {{8, 8, 1}, {16, 16, 8}, {64, 32, 16}};
  const int ns[] = {1, 3, 5};
  const auto start = Clock::now();
  for (int trial = 0; trial < 200; ++trial) {
    const Shape s = shapes[trial % 3];
    const int n = ns[(trial / 3) % 3];
    const Tensor x = random_tensor(rng, s, -1, 1), y = random_tensor(rng, s, -1, 1);
    const double fast = nn_loss_fast(x, y, n), brute = nn_loss_bruteforce(x, y, n);
    c.expect(close_rel(fast, brute, 1e-5, 1e-9),
             "trial " + std::to_string(trial) + ": fast " + str(fast) + " vs brute " + str(brute));
  }
  const double elapsed = seconds_since(start);
  c.expect(elapsed < 60, "runtime " + str(elapsed) + " s");
  return c;
}

// 2
Check nn_special_cases() {
  Check c;
  Rng rng(1002);
  for (int trial = 0; trial < 50; ++trial) {
    const Shape s{static_cast<std::size_t>(4 + trial % 13), static_cast<std::size_t>(5 + trial % 7),
                  static_cast<std::size_t>(1 + trial % 6)};
    const Tensor x = random_tensor(rng, s, -2, 2), y = random_tensor(rng, s, -2, 2);
    const double l1 = l1_loss(x, y);
    const double one = nn_loss_fast(x, y, 1);
    c.expect(std::memcmp(&one, &l1, sizeof one) == 0, "n=1 " + str(one) + " != L1 " + str(l1));
    c.expect(std::abs(nn_loss_bruteforce(x, y, 1) - l1_oracle(x, y)) <= 1e-9 * std::max(1.0, l1),
             "brute-force n=1 differs from the L1 oracle");
    c.expect(nn_loss_fast(x, x, 3) == 0.0 && nn_loss_bruteforce(y, y, 5) == 0.0, "self-loss is not zero");
    double prev = INFINITY;
    for (int n : {1, 3, 5, 7}) {
      const double v = nn_loss_fast(x, y, n);
      c.expect(v <= prev, "not monotone at n=" + std::to_string(n));
      prev = v;
    }
  }
  return c;
}

// 3
Check nn_performance(std::string& detail) {
  Check c;
  Rng rng(1003);
  const auto start = Clock::now();
  const Tensor x = random_tensor(rng, {128, 64, 64}), y = random_tensor(rng, {128, 64, 64});
  double fast = 0, brute = 0;
  const double fast_s = timed_min(3, [&] { fast = nn_loss_fast(x, y, 5); });
  const double brute_s = timed_min(3, [&] { brute = nn_loss_bruteforce(x, y, 5); });
  detail = "fast " + str(fast_s * 1e3) + " ms, brute " + str(brute_s * 1e3) + " ms, ratio " + str(fast_s / brute_s);
  c.expect(close_rel(fast, brute, 1e-5, 1e-9), "values disagree");
  c.expect(fast_s <= 0.5 * brute_s, "ratio above 0.5");
  c.expect(seconds_since(start) < 30, "runtime above 30 s");
  return c;
}

// 4
Check affine_recovery() {
  Check c;
  Rng rng(1004);
  for (int trial = 0; trial < 1000; ++trial) {
    const AffineTransform t = random_affine(rng, 0.2);
    const Quad src = rotated_rect({uniform(rng, 10, 100), uniform(rng, 10, 100)}, uniform(rng, 5, 40),
                                  uniform(rng, 2, 20), uniform(rng, 0, 2 * std::numbers::pi));
    Quad dst;
    for (std::size_t k = 0; k < 4; ++k) {
      const Point2& p = src[k];
      dst[k] = {t.a11 * p.x + t.a12 * p.y + t.tx, t.a21 * p.x + t.a22 * p.y + t.ty};
    }
    const AffineTransform f = fit_affine(src, dst);
    const double want[] = {t.a11, t.a12, t.a21, t.a22, t.tx, t.ty};
    const double got[] = {f.a11, f.a12, f.a21, f.a22, f.tx, f.ty};
    for (int k = 0; k < 6; ++k) {
      c.expect(std::abs(got[k] - want[k]) < 1e-6 * std::max(1.0, std::abs(want[k])),
               "fit trial " + std::to_string(trial) + " parameter " + std::to_string(k));
    }
  }
  for (int trial = 0; trial < 1000; ++trial) {
    const AffineTransform t = random_affine(rng, 0.2);
    const Dims from{static_cast<std::size_t>(uniform(rng, 16, 512)), static_cast<std::size_t>(uniform(rng, 16, 512))};
    const Dims to{static_cast<std::size_t>(uniform(rng, 4, 512)), static_cast<std::size_t>(uniform(rng, 4, 512))};
    const double sx = double(to.width) / double(from.width), sy = double(to.height) / double(from.height);
    const Point2 p{uniform(rng, 0, double(from.width)), uniform(rng, 0, double(from.height))};
    const Point2 lhs = apply_affine(rescale_affine(t, from, to), {sx * p.x, sy * p.y});
    const Point2 mapped{t.a11 * p.x + t.a12 * p.y + t.tx, t.a21 * p.x + t.a22 * p.y + t.ty};
    const Point2 rhs{sx * mapped.x, sy * mapped.y};
    c.expect(std::abs(lhs.x - rhs.x) <= 1e-6 * std::max(1.0, std::abs(rhs.x)) &&
                 std::abs(lhs.y - rhs.y) <= 1e-6 * std::max(1.0, std::abs(rhs.y)),
             "conjugation trial " + std::to_string(trial));
  }
  return c;
}

// 5
Check heatmap_values() {
  Check c;
  Keypoints kp;
  kp[Joint::Neck] = Point2{20, 30};
  const Tensor hm = encode_heatmaps(kp, 80, 80);
  const std::size_t neck = index_of(Joint::Neck);
  c.expect(std::abs(hm.at(30, 20, neck) - 1.0) <= 1e-6, "peak is not 1");
  c.expect(std::abs(hm.at(30, 56, neck) - std::exp(-1.0)) <= 1e-6, "value at distance 36 is not exp(-1)");
  c.expect(std::abs(hm.at(66, 20, neck) - 0.36787944117144233) <= 1e-6, "vertical distance 36");
  Rng rng(1005);
  std::uniform_int_distribution<int> shift(-10, 10);
  for (int trial = 0; trial < 100; ++trial) {
    const Keypoints p = random_pose(rng, 64, 48);
    const int dx = shift(rng), dy = shift(rng);
    Keypoints moved;
    for (std::size_t j = 0; j < kNumJoints; ++j) moved.joints[j] = *p.joints[j] + Point2{double(dx), double(dy)};
    const Tensor a = encode_heatmaps(p, 64, 48), b = encode_heatmaps(moved, 64, 48);
    for (int r = 0; r < 64; ++r) {
      for (int col = 0; col < 48; ++col) {
        const int r2 = r + dy, c2 = col + dx;
        if (r2 < 0 || c2 < 0 || r2 >= 64 || c2 >= 48) continue;
        for (std::size_t j = 0; j < kNumJoints; ++j) {
          if (std::abs(a.at(std::size_t(r), std::size_t(col), j) - b.at(std::size_t(r2), std::size_t(c2), j)) > 1e-6) {
            c.expect(false, "translation equivariance, trial " + std::to_string(trial));
          }
        }
      }
    }
  }
  return c;
}

// 6
Check warp_identity_shift() {
  Check c;
  Rng rng(1006);
  std::uniform_int_distribution<int> shift(-8, 8);
  for (int trial = 0; trial < 100; ++trial) {
    Tensor f = random_tensor(rng, {20, 16, 3}, -4, 4);
    f.at(1, 1, 0) = -0.0f;
    const Tensor ones(20, 16, 1, 1.0f);
    c.expect(warp_feature(f, ones, AffineTransform::identity()).bit_equal(f), "identity trial " + std::to_string(trial));
    const int dx = shift(rng), dy = shift(rng);
    c.expect(warp_feature(f, ones, AffineTransform::translation(dx, dy)).bit_equal(shift_oracle(f, dx, dy)),
             "shift trial " + std::to_string(trial));
  }
  return c;
}

// 7
Check merges() {
  Check c;
  Rng rng(1007);
  for (int trial = 0; trial < 100; ++trial) {
    const Shape s{6, 5, 3};
    std::vector<Tensor> parts, weights;
    for (int h = 0; h < 10; ++h) parts.push_back(random_tensor(rng, s, 0, 1));
    for (int h = 0; h < 10; ++h) weights.push_back(random_tensor(rng, {6, 5, 1}, 0.05f, 1));
    for (std::size_t i = 0; i < 30; ++i) {
      double total = 0;
      for (auto& w : weights) total += w.values()[i];
      for (auto& w : weights) w.values()[i] = float(w.values()[i] / total);
    }
    const Tensor mx = merge_max(parts), av = merge_average(parts), ln = merge_linear(parts, weights);
    const Tensor uni = merge_linear(parts, std::vector<Tensor>(10, Tensor(6, 5, 1, 0.1f)));
    for (std::size_t i = 0; i < s.size(); ++i) {
      double m = -INFINITY, a = 0, l = 0, ws = 0;
      for (std::size_t h = 0; h < 10; ++h) {
        const double v = parts[h].values()[i], w = weights[h].values()[i / 3];
        m = std::max(m, v);
        a += v;
        l += w * v;
        ws += w;
      }
      c.expect(std::abs(mx.values()[i] - m) <= 1e-6, "max oracle");
      c.expect(std::abs(av.values()[i] - a / 10) <= 1e-6, "average oracle");
      c.expect(std::abs(ln.values()[i] - l / ws) <= 1e-6, "linear oracle");
      c.expect(std::abs(uni.values()[i] - av.values()[i]) <= 1e-6, "uniform linear != average");
      c.expect(mx.values()[i] >= av.values()[i], "max below average");
    }
  }
  return c;
}

// 8
Check region_geometry() {
  Check c;
  Rng rng(1008);
  for (int trial = 0; trial < 200; ++trial) {
    const Quad q = rotated_rect({uniform(rng, -8, 72), uniform(rng, -8, 72)}, uniform(rng, 1, 30), uniform(rng, 0.5, 15),
                                uniform(rng, 0, 2 * std::numbers::pi));
    const Tensor m = rasterize_mask(Region{Part::LULeg, q, {64, 64}}, 64, 64);
    for (std::size_t r = 0; r < 64; ++r) {
      for (std::size_t col = 0; col < 64; ++col) {
        const bool want = point_in_rect_oracle(q, {double(col), double(r)});
        if ((m.at(r, col) == 1.0f) != want) c.expect(false, "mask mismatch, rectangle " + std::to_string(trial));
      }
    }
  }
  for (int trial = 0; trial < 100; ++trial) {
    const Keypoints kp = random_pose(rng, 128, 64);
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (Joint j : {Joint::RShoulder, Joint::LShoulder, Joint::RHip, Joint::LHip}) {
      x0 = std::min(x0, kp[j]->x);
      x1 = std::max(x1, kp[j]->x);
      y0 = std::min(y0, kp[j]->y);
      y1 = std::max(y1, kp[j]->y);
    }
    const double want = std::hypot(x1 - x0, y1 - y0) / 3;
    for (const Region& r : decompose(kp, 128, 64)) {
      if (!is_limb(r.part) || r.empty()) continue;
      const Quad& q = *r.corners;
      c.expect(std::abs(norm(q[3] - q[0]) - want) <= 1e-4, "limb width, pose " + std::to_string(trial));
    }
  }
  const Quad qa = rotated_rect({10, 10}, 6, 2, 0.2), qm = rotated_rect({50, 10}, 6, 2, 1.1),
             qb = rotated_rect({30, 40}, 6, 2, 2.0);
  for (Part h : {Part::LUArm, Part::LLArm, Part::LULeg, Part::LLLeg}) {
    const Part t = mirror_part(h);
    for (int bits = 0; bits < 16; ++bits) {
      const bool ah = bits & 1, bh = bits & 2, at = bits & 4, bt = bits & 8;
      RegionSet a, b;
      for (Part p : kAllParts) a[index_of(p)] = b[index_of(p)] = Region{p, std::nullopt, {64, 64}};
      if (ah) a[index_of(h)].corners = qa;
      if (at) a[index_of(t)].corners = qm;
      if (bh) b[index_of(h)].corners = qb;
      if (bt) b[index_of(t)].corners = qb;
      const RegionSet out = apply_symmetry(a, b);
      // A part missing in a is replaced by its twin's a-region when the part is
      // present in b and the twin is present in a.
      const std::optional<Quad> want_h = ah ? std::optional(qa) : (bh && at ? std::optional(qm) : std::nullopt);
      const std::optional<Quad> want_t = at ? std::optional(qm) : (bt && ah ? std::optional(qa) : std::nullopt);
      c.expect(out[index_of(h)].corners == want_h && out[index_of(t)].corners == want_t,
               "symmetry " + std::string(part_name(h)) + " case " + std::to_string(bits));
    }
  }
  return c;
}

// 9
Check ssim_checks() {
  Check c;
  Rng rng(1009);
  for (int trial = 0; trial < 50; ++trial) {
    const Shape s{static_cast<std::size_t>(14 + trial % 9), static_cast<std::size_t>(12 + trial % 7),
                  static_cast<std::size_t>(1 + trial % 3)};
    const Tensor x = random_tensor(rng, s), y = random_tensor(rng, s);
    c.expect(std::abs(ssim(x, x) - 1.0) <= 1e-9, "self-SSIM");
    const double xy = ssim(x, y);
    c.expect(std::abs(xy - ssim(y, x)) <= 1e-9, "symmetry");
    c.expect(std::abs(xy - ssim_oracle(x, y)) <= 1e-6, "oracle, pair " + std::to_string(trial));
    c.expect(std::abs(masked_ssim(x, y, Tensor(s.height, s.width, 1, 1.0f)) - xy) <= 1e-12, "all-ones mask");
  }
  return c;
}

// 10
Check losses() {
  Check c;
  const std::vector<double> half{0.5};
  c.expect(std::abs(gan_losses(half, half).d_loss - 2 * std::numbers::ln2) <= 1e-9, "d-term at 0.5");
  c.expect(kDefaultLambda == 0.01 && std::abs(combined_objective(1, 100) - 2.0) <= 1e-12, "default lambda");
  Rng rng(1010);
  for (int trial = 0; trial < 100; ++trial) {
    const Tensor g = random_tensor(rng, {8, 8, 3}), t = random_tensor(rng, {8, 8, 3});
    std::vector<double> real(4), fake(4);
    for (double& v : real) v = uniform(rng, 0.01, 0.99);
    for (double& v : fake) v = uniform(rng, 0.01, 0.99);
    const double lambda = uniform(rng, 0, 2);
    const LossReport r = make_loss_report(g, t, real, fake, 3, lambda);
    double lr = 0, lf = 0, lg = 0;
    for (double v : real) lr += std::log(v);
    for (double v : fake) {
      lf += std::log(1 - v);
      lg += std::log(v);
    }
    c.expect(std::abs(r.combined - (r.gan_g + lambda * r.nn)) <= 1e-9 * std::max(1.0, std::abs(r.combined)),
             "combined invariant");
    c.expect(std::abs(r.gan_d - (-lr / 4 - lf / 4)) <= 1e-9 && std::abs(r.gan_g + lg / 4) <= 1e-9, "gan terms");
    c.expect(r.nn <= r.l1 && std::abs(r.l1 - l1_oracle(g, t)) <= 1e-4, "nn and l1 terms");
  }
  return c;
}

// 11
Check determinism_and_format() {
  Check c;
  TempDir dir("acceptance");
  populate_cli_dir(dir.path());
  for (const CliCase& cc : cli_cases(dir.path())) {
    std::string out[2];
    std::vector<std::string> files[2];
    for (int run = 0; run < 2; ++run) {
      const ProcessResult r = run_process(std::string(DEFORMA_CLI_PATH) + " " + cc.args + " 2>/dev/null");
      c.expect(r.exit_code == 0, cc.name + " exited with " + std::to_string(r.exit_code));
      out[run] = comparable_stdout(r.out, cc.strip_timings);
      for (const auto& f : cc.outputs) files[run].push_back(read_file(dir / f));
    }
    c.expect(out[0] == out[1] && files[0] == files[1], cc.name + " differs between runs");
  }
  Rng rng(1011);
  const float specials[] = {-0.0f, 1e-40f, -1e-45f, std::numeric_limits<float>::denorm_min(),
                            std::numeric_limits<float>::min() / 3, std::numeric_limits<float>::max()};
  for (int trial = 0; trial < 100; ++trial) {
    const Shape s{static_cast<std::size_t>(1 + trial % 9), static_cast<std::size_t>(1 + trial % 5),
                  static_cast<std::size_t>(1 + trial % 4)};
    Tensor t = random_tensor(rng, s, -1e6f, 1e6f);
    for (std::size_t k = 0; k < std::size(specials) && k < t.size(); ++k) t.values()[(k * 7) % t.size()] = specials[k];
    const Tensor back = decode_tensor(encode_tensor(t));
    c.expect(back.bit_equal(t), "in-memory round trip " + std::to_string(trial));
    write_tensor(t, dir / "rt.dft");
    c.expect(read_tensor(dir / "rt.dft").bit_equal(t), "file round trip " + std::to_string(trial));
  }
  return c;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const std::string& title, const Check& c, const std::string& detail = "") {
    std::cout << (c.ok() ? "PASS" : "FAIL") << " criterion " << id << ": " << title;
    if (!detail.empty()) std::cout << " [" << detail << "]";
    if (!c.ok()) std::cout << " -- " << c.failure;
    std::cout << std::endl;
    failures += c.ok() ? 0 : 1;
  };
  auto guarded = [&](int id, const std::string& title, const std::function<Check(std::string&)>& fn) {
    std::string detail;
    Check c;
    try {
      c = fn(detail);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    report(id, title, c, detail);
  };
  auto plain = [](Check (*fn)()) { return [fn](std::string&) { return fn(); }; };

  guarded(1, "nn_loss fast path equals brute force on 200 pairs", plain(nn_equivalence));
  guarded(2, "nn_loss special cases (n=1 is L1, self-loss 0, monotone in n)", plain(nn_special_cases));
  guarded(3, "nn_loss fast path at most half the brute-force time on 128x64x64, n=5", nn_performance);
  guarded(4, "affine recovery and rescale conjugation on 1000 trials each", plain(affine_recovery));
  guarded(5, "heatmap peak, exp(-1) at distance 36, translation equivariance", plain(heatmap_values));
  guarded(6, "warp identity bit-exact and integer shifts match the shift oracle", plain(warp_identity_shift));
  guarded(7, "merge strategies match loop oracles", plain(merges));
  guarded(8, "region masks, limb width and symmetry truth table", plain(region_geometry));
  guarded(9, "SSIM self, symmetry, oracle agreement and all-ones mask", plain(ssim_checks));
  guarded(10, "adversarial terms, default lambda and loss report invariant", plain(losses));
  guarded(11, "CLI byte-identical across runs and DFT1 bit-exact round trips", plain(determinism_and_format));

  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
