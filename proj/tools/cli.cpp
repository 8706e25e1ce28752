#include "cli.hpp"

#include <chrono>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "deforma/affine.hpp"
#include "deforma/error.hpp"
#include "deforma/metrics.hpp"
#include "deforma/nnloss.hpp"
#include "deforma/pose.hpp"
#include "deforma/tensor_io.hpp"
#include "deforma/warp.hpp"

namespace deforma::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string num(double v) { return fmt::format("{:.9g}", v); }

std::vector<Joint> to_joints(const std::vector<int>& indices, const char* what) {
  std::vector<Joint> joints;
  for (int i : indices) {
    if (i < 0 || i >= static_cast<int>(kNumJoints)) {
      throw DomainError(std::string(what) + ": joint index " + std::to_string(i) + " is outside 0..17");
    }
    joints.push_back(static_cast<Joint>(i));
  }
  return joints;
}

Dims parse_dims(const std::string& text) {
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    std::size_t used = 0;
    const auto h = std::stoul(text.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(text);
    const auto w = std::stoul(text.substr(x + 1), &used);
    if (used != text.size() - x - 1 || h == 0 || w == 0) throw std::invalid_argument(text);
    return {h, w};
  } catch (const std::logic_error&) {
    throw DomainError("dimensions must look like HxW with positive integers, got \"" + text + "\"");
  }
}

ordered_json region_set_json(const RegionSet& set) {
  ordered_json parts = ordered_json::array();
  for (const Region& r : set) {
    ordered_json corners = nullptr;
    if (r.corners) {
      corners = ordered_json::array();
      for (const Point2& c : *r.corners) corners.push_back({c.x, c.y});
    }
    parts.push_back({{"part", part_name(r.part)}, {"corners", corners}});
  }
  return parts;
}

struct RegionsFile {
  Dims dims;
  RegionSet a, b;
};

RegionSet region_set_from_json(const nlohmann::json& parts, Dims dims) {
  if (!parts.is_array() || parts.size() != kNumParts) throw FormatError("regions file needs 10 parts per pose");
  RegionSet set;
  for (std::size_t h = 0; h < kNumParts; ++h) {
    const auto& entry = parts[h];
    const Part part = part_from_name(entry.at("part").get<std::string>());
    if (part != kAllParts[h]) throw FormatError("regions file parts are not in canonical order");
    set[h] = Region{part, std::nullopt, dims};
    const auto& corners = entry.at("corners");
    if (corners.is_null()) continue;
    if (!corners.is_array() || corners.size() != 4) throw FormatError("a region needs 4 corners");
    Quad q;
    for (std::size_t k = 0; k < 4; ++k) {
      const auto& c = corners[k];
      if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number()) {
        throw FormatError("a corner must be [x, y]");
      }
      q[k] = {c[0].get<double>(), c[1].get<double>()};
    }
    set[h].corners = q;
  }
  return set;
}

RegionsFile read_regions(const std::string& path) {
  try {
    const auto doc = nlohmann::json::parse(read_file(path));
    RegionsFile f;
    f.dims = {doc.at("height").get<std::size_t>(), doc.at("width").get<std::size_t>()};
    f.a = region_set_from_json(doc.at("a"), f.dims);
    f.b = region_set_from_json(doc.at("b"), f.dims);
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed regions file: ") + e.what());
  }
}

std::pair<RegionSet, RegionSet> pose_regions(const Config& cfg, const std::string& pose_a, const std::string& pose_b,
                                             Dims dims) {
  const RegionConfig rc = cfg.region_config();
  const auto a = decompose(read_pose(pose_a, cfg.min_confidence), dims.height, dims.width, rc);
  const auto b = decompose(read_pose(pose_b, cfg.min_confidence), dims.height, dims.width, rc);
  return {cfg.symmetry ? apply_symmetry(a, b) : a, b};
}

MergeStrategy parse_strategy(const std::string& name, const std::optional<std::string>& weights_path, Dims dims) {
  if (name == "max") return MergeMax{};
  if (name == "average") return MergeAverage{};
  if (name != "linear") throw DomainError("unknown merge strategy \"" + name + "\" (max, average, linear)");
  if (!weights_path) throw DomainError("--strategy linear needs --weights (an HxWx10 tensor)");
  const Tensor stacked = read_tensor(*weights_path);
  if (stacked.channels() != kNumParts || stacked.height() != dims.height || stacked.width() != dims.width) {
    throw ShapeError("weights must be " + std::to_string(dims.height) + "x" + std::to_string(dims.width) +
                     "x10, got " + to_string(stacked.shape()));
  }
  MergeLinear linear;
  for (std::size_t h = 0; h < kNumParts; ++h) linear.weights.push_back(stacked.channel(h));
  return linear;
}

Resampling parse_resampling(const std::string& name) {
  if (name == "bilinear") return Resampling::BackwardBilinear;
  if (name == "splat") return Resampling::ForwardNearest;
  throw DomainError("unknown resampling \"" + name + "\" (bilinear, splat)");
}

JointSet parse_joint_groups(const std::vector<std::string>& groups) {
  JointSet set;
  for (const auto& g : groups) {
    if (g == "arms") {
      set |= joint_sets::arms();
    } else if (g == "legs") {
      set |= joint_sets::legs();
    } else if (g == "all") {
      set.set();
    } else {
      throw DomainError("unknown joint group \"" + g + "\" (arms, legs, all)");
    }
  }
  return set;
}

Tensor random_tensor(Shape shape, std::mt19937_64& rng) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  Tensor t(shape);
  for (float& v : t.values()) v = u(rng);
  return t;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Flags that may override Config; unset optionals leave the config value.
struct Overrides {
  std::optional<std::string> config_path;
  std::optional<double> sigma;
  std::optional<int> n;
  std::optional<double> lambda;
  std::optional<std::string> merge;
  std::optional<bool> symmetry;
  std::optional<std::vector<int>> head_joints;
  std::optional<std::vector<int>> torso_anchor_joints;
  std::optional<double> min_confidence;

  Config resolve() const {
    Config cfg = config_path ? load_config(*config_path) : Config{};
    if (sigma) cfg.sigma = *sigma;
    if (n) cfg.n = *n;
    if (lambda) cfg.lambda = *lambda;
    if (merge) cfg.merge = *merge;
    if (symmetry) cfg.symmetry = *symmetry;
    if (head_joints) cfg.head_joints = *head_joints;
    if (torso_anchor_joints) cfg.torso_anchor_joints = *torso_anchor_joints;
    if (min_confidence) cfg.min_confidence = *min_confidence;
    cfg.validate();
    return cfg;
  }
};

void add_region_flags(CLI::App* sub, Overrides& o) {
  sub->add_flag("--symmetry,!--no-symmetry", o.symmetry, "Fill missing limbs from their twin (default on)");
  sub->add_option("--head-joints", o.head_joints, "Joint indices enclosed by the head box")->delimiter(',');
  sub->add_option("--torso-anchor-joints", o.torso_anchor_joints, "Joint indices sizing the limb width")
      ->delimiter(',');
}

}  // namespace

RegionConfig Config::region_config() const {
  RegionConfig rc;
  rc.head_joints = to_joints(head_joints, "head_joints");
  rc.torso_anchor_joints = to_joints(torso_anchor_joints, "torso_anchor_joints");
  return rc;
}

void Config::validate() const {
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive, got " + num(sigma));
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive, got " + num(lambda));
  if (n < 1 || n % 2 == 0) throw DomainError("n must be odd and >= 1, got " + std::to_string(n));
  if (merge != "max" && merge != "average" && merge != "linear") {
    throw DomainError("merge must be max, average or linear, got \"" + merge + "\"");
  }
  to_joints(head_joints, "head_joints");
  to_joints(torso_anchor_joints, "torso_anchor_joints");
}

Config load_config(const std::string& path) {
  Config cfg;
  try {
    const auto doc = nlohmann::json::parse(read_file(path));
    if (!doc.is_object()) throw FormatError("config must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
      if (key == "sigma") {
        cfg.sigma = value.get<double>();
      } else if (key == "n") {
        cfg.n = value.get<int>();
      } else if (key == "lambda") {
        cfg.lambda = value.get<double>();
      } else if (key == "merge") {
        cfg.merge = value.get<std::string>();
      } else if (key == "symmetry") {
        cfg.symmetry = value.get<bool>();
      } else if (key == "head_joints") {
        cfg.head_joints = value.get<std::vector<int>>();
      } else if (key == "torso_anchor_joints") {
        cfg.torso_anchor_joints = value.get<std::vector<int>>();
      } else if (key == "min_confidence") {
        cfg.min_confidence = value.get<double>();
      } else {
        throw FormatError("unknown config key \"" + key + "\"");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("malformed config " + path + ": " + e.what());
  }
  cfg.validate();
  return cfg;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pose-conditioned feature warping, nearest-neighbour loss and SSIM tools", "deforma"};
  app.require_subcommand(1);
  app.fallthrough();
  Overrides o;
  app.add_option("--config", o.config_path, "JSON file with default settings")->check(CLI::ExistingFile);

  std::function<void()> action;
  auto on = [&](CLI::App* sub, std::function<void()> fn) { sub->callback([&action, fn] { action = fn; }); };

  // heatmap
  std::string pose, out_path;
  std::size_t height = 0, width = 0;
  bool squared = false;
  {
    auto* sub = app.add_subcommand("heatmap", "Encode a pose as an 18-channel heatmap tensor");
    sub->add_option("--pose", pose, "Pose JSON")->required();
    sub->add_option("--height", height)->required();
    sub->add_option("--width", width)->required();
    sub->add_option("--sigma", o.sigma, "Heatmap spread in pixels (default 6)");
    sub->add_flag("--squared-distance", squared, "Use the squared distance in the exponent");
    sub->add_option("--min-confidence", o.min_confidence);
    sub->add_option("--out", out_path)->required();
    on(sub, [&] {
      const Config cfg = o.resolve();
      const auto kp = read_pose(pose, cfg.min_confidence);
      write_tensor(encode_heatmaps(kp, height, width, {cfg.sigma, squared}), out_path);
    });
  }

  // regions
  std::string pose_a, pose_b;
  {
    auto* sub = app.add_subcommand("regions", "Decompose two poses into the 10 body-part regions");
    sub->add_option("--pose-a", pose_a, "Source pose JSON")->required();
    sub->add_option("--pose-b", pose_b, "Target pose JSON")->required();
    sub->add_option("--height", height)->required();
    sub->add_option("--width", width)->required();
    add_region_flags(sub, o);
    sub->add_option("--min-confidence", o.min_confidence);
    sub->add_option("--out", out_path)->required();
    on(sub, [&] {
      const Config cfg = o.resolve();
      const auto [a, b] = pose_regions(cfg, pose_a, pose_b, {height, width});
      ordered_json doc = {{"height", height},
                          {"width", width},
                          {"symmetry", cfg.symmetry},
                          {"a", region_set_json(a)},
                          {"b", region_set_json(b)}};
      write_file(out_path, doc.dump(2) + "\n");
    });
  }

  // mask
  std::string regions_path, part_name_arg, which = "a";
  std::optional<std::size_t> mask_height, mask_width;
  {
    auto* sub = app.add_subcommand("mask", "Rasterize one region of a regions file");
    sub->add_option("--regions", regions_path)->required();
    sub->add_option("--part", part_name_arg, "head, torso, luarm, llarm, ruarm, rlarm, luleg, llleg, ruleg, rlleg")
        ->required();
    sub->add_option("--pose", which, "Which pose's region: a or b")->check(CLI::IsMember({"a", "b"}));
    sub->add_option("--height", mask_height, "Output height (default: regions file)");
    sub->add_option("--width", mask_width, "Output width (default: regions file)");
    sub->add_option("--out", out_path)->required();
    on(sub, [&] {
      const auto file = read_regions(regions_path);
      const Region& r = (which == "a" ? file.a : file.b)[index_of(part_from_name(part_name_arg))];
      const Dims to{mask_height.value_or(file.dims.height), mask_width.value_or(file.dims.width)};
      write_tensor(rasterize_mask(rescale_region(r, to), to.height, to.width), out_path);
    });
  }

  // affine
  std::optional<std::string> from_dims, to_dims;
  {
    auto* sub = app.add_subcommand("affine", "Fit the source-to-target affine map of one part");
    sub->add_option("--regions", regions_path)->required();
    sub->add_option("--part", part_name_arg)->required();
    sub->add_option("--from", from_dims, "Resolution of the fit, HxW (default: regions file)");
    sub->add_option("--to", to_dims, "Resolution to rescale to, HxW (default: --from)");
    on(sub, [&] {
      const auto file = read_regions(regions_path);
      const Part part = part_from_name(part_name_arg);
      const Region& a = file.a[index_of(part)];
      const Region& b = file.b[index_of(part)];
      if (a.empty() || b.empty()) {
        throw DomainError("part \"" + part_name_arg + "\" is EMPTY in " + (a.empty() ? "pose a" : "pose b"));
      }
      const Dims from = from_dims ? parse_dims(*from_dims) : file.dims;
      const Dims to = to_dims ? parse_dims(*to_dims) : from;
      const auto src = rescale_region(a, from);
      const auto dst = rescale_region(b, from);
      const auto t = rescale_affine(fit_affine(*src.corners, *dst.corners), from, to);
      fmt::print(out, "{{\"a11\": {}, \"a12\": {}, \"a21\": {}, \"a22\": {}, \"tx\": {}, \"ty\": {}}}\n", num(t.a11),
                 num(t.a12), num(t.a21), num(t.a22), num(t.tx), num(t.ty));
    });
  }

  // warp and deform-image
  std::string features_path, strategy_name, resampling = "bilinear";
  std::optional<std::string> weights_path;
  std::optional<std::size_t> image_height, image_width;
  auto run_deform = [&](const Tensor& features, Dims image_dims) {
    const Config cfg = o.resolve();
    const Dims feature_dims{features.height(), features.width()};
    const auto [a, b] = pose_regions(cfg, pose_a, pose_b, image_dims);
    const WarpPlan plan = build_plan(a, b, image_dims, feature_dims);
    const auto strategy = parse_strategy(strategy_name.empty() ? cfg.merge : strategy_name, weights_path, feature_dims);
    write_tensor(deform(features, plan, strategy, parse_resampling(resampling)), out_path);
  };
  auto add_deform_flags = [&](CLI::App* sub) {
    sub->add_option("--pose-a", pose_a, "Source pose JSON (image resolution)")->required();
    sub->add_option("--pose-b", pose_b, "Target pose JSON (image resolution)")->required();
    sub->add_option("--strategy", strategy_name, "max, average or linear (default: config merge)");
    sub->add_option("--weights", weights_path, "HxWx10 weight maps for --strategy linear");
    sub->add_option("--resampling", resampling, "bilinear (backward) or splat (forward nearest)");
    add_region_flags(sub, o);
    sub->add_option("--min-confidence", o.min_confidence);
    sub->add_option("--out", out_path)->required();
  };
  {
    auto* sub = app.add_subcommand("warp", "Deform a feature tensor from pose a to pose b");
    sub->add_option("--features", features_path)->required();
    sub->add_option("--image-height", image_height, "Pose image height (default: feature height)");
    sub->add_option("--image-width", image_width, "Pose image width (default: feature width)");
    add_deform_flags(sub);
    on(sub, [&] {
      const Tensor features = read_tensor(features_path);
      run_deform(features, {image_height.value_or(features.height()), image_width.value_or(features.width())});
    });
  }
  std::string image_path;
  {
    auto* sub = app.add_subcommand("deform-image", "Deform an image tensor from pose a to pose b");
    sub->add_option("--image", image_path)->required();
    add_deform_flags(sub);
    on(sub, [&] {
      const Tensor image = read_tensor(image_path);
      run_deform(image, {image.height(), image.width()});
    });
  }

  // nnloss
  std::string a_path, b_path;
  bool bruteforce = false, timed = false;
  {
    auto* sub = app.add_subcommand("nnloss", "Nearest-neighbour loss between two feature tensors");
    sub->add_option("--a", a_path, "Generated features")->required();
    sub->add_option("--b", b_path, "Target features")->required();
    sub->add_option("--n", o.n, "Odd neighbourhood size (default 3)");
    sub->add_option("--lambda", o.lambda, "Weight reported for lambda * loss (default 0.01)");
    sub->add_flag("--bruteforce", bruteforce, "Use the reference scan instead of the shifted-tensor path");
    sub->add_flag("--time", timed, "Run both paths and report wall-clock seconds");
    on(sub, [&] {
      const Config cfg = o.resolve();
      const Tensor a = read_tensor(a_path);
      const Tensor b = read_tensor(b_path);
      auto start = std::chrono::steady_clock::now();
      const double fast = nn_loss_fast(a, b, cfg.n);
      const double fast_s = seconds_since(start);
      std::optional<double> brute;
      double brute_s = 0.0;
      if (bruteforce || timed) {
        start = std::chrono::steady_clock::now();
        brute = nn_loss_bruteforce(a, b, cfg.n);
        brute_s = seconds_since(start);
      }
      const double loss = bruteforce ? *brute : fast;
      fmt::print(out, "nn_loss {}\n", num(loss));
      fmt::print(out, "weighted_nn_loss {}\n", num(cfg.lambda * loss));
      if (timed) {
        fmt::print(out, "nn_loss_fast {}\nnn_loss_bruteforce {}\n", num(fast), num(*brute));
        fmt::print(out, "fast_seconds {}\nbruteforce_seconds {}\n", num(fast_s), num(brute_s));
      }
    });
  }

  // ssim
  std::optional<std::string> mask_path;
  SsimParams ssim_params;
  {
    auto* sub = app.add_subcommand("ssim", "SSIM (or mask-SSIM) between two tensors");
    sub->add_option("--a", a_path)->required();
    sub->add_option("--b", b_path)->required();
    sub->add_option("--mask", mask_path, "Single-channel 0/1 mask");
    sub->add_option("--window", ssim_params.window, "Odd Gaussian window size (default 11)");
    sub->add_option("--k1", ssim_params.k1);
    sub->add_option("--k2", ssim_params.k2);
    sub->add_option("--range", ssim_params.dynamic_range, "Dynamic range of the values (default 1)");
    on(sub, [&] {
      const Tensor a = read_tensor(a_path);
      const Tensor b = read_tensor(b_path);
      if (mask_path) {
        fmt::print(out, "masked_ssim {}\n", num(masked_ssim(a, b, read_tensor(*mask_path), ssim_params)));
      } else {
        fmt::print(out, "ssim {}\n", num(ssim(a, b, ssim_params)));
      }
    });
  }

  // perturb
  double sigma_noise = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::string> groups = {"arms", "legs"};
  {
    auto* sub = app.add_subcommand("perturb", "Add Gaussian noise to selected joints of a pose");
    sub->add_option("--pose", pose)->required();
    sub->add_option("--sigma-noise", sigma_noise, "Standard deviation in pixels")->required();
    sub->add_option("--seed", seed)->required();
    sub->add_option("--parts", groups, "Joint groups: arms, legs, all")->delimiter(',');
    sub->add_option("--min-confidence", o.min_confidence);
    sub->add_option("--out", out_path)->required();
    on(sub, [&] {
      const Config cfg = o.resolve();
      const auto kp = read_pose(pose, cfg.min_confidence);
      write_pose(perturb_pose(kp, sigma_noise, parse_joint_groups(groups), seed), out_path);
    });
  }

  // bench
  std::size_t channels = 64;
  int repeats = 1;
  std::uint64_t bench_seed = 1;
  {
    auto* sub = app.add_subcommand("bench", "Time the shifted-tensor and brute-force NN loss on random tensors");
    height = 128;
    width = 64;
    sub->add_option("--height", height, "default 128");
    sub->add_option("--width", width, "default 64");
    sub->add_option("--channels", channels, "default 64");
    sub->add_option("--n", o.n, "Odd neighbourhood size (default 3)");
    sub->add_option("--seed", bench_seed, "default 1");
    sub->add_option("--repeats", repeats, "Best-of count for each timing (default 1)")->check(CLI::PositiveNumber);
    on(sub, [&] {
      const Config cfg = o.resolve();
      std::mt19937_64 rng(bench_seed);
      const Tensor a = random_tensor({height, width, channels}, rng);
      const Tensor b = random_tensor({height, width, channels}, rng);
      double fast = 0, brute = 0, fast_s = 1e300, brute_s = 1e300;
      for (int i = 0; i < repeats; ++i) {
        auto start = std::chrono::steady_clock::now();
        fast = nn_loss_fast(a, b, cfg.n);
        fast_s = std::min(fast_s, seconds_since(start));
        start = std::chrono::steady_clock::now();
        brute = nn_loss_bruteforce(a, b, cfg.n);
        brute_s = std::min(brute_s, seconds_since(start));
      }
      fmt::print(out, "nn_loss_fast {}\nnn_loss_bruteforce {}\n", num(fast), num(brute));
      fmt::print(out, "relative_difference {}\n", num(std::abs(fast - brute) / std::max(std::abs(brute), 1e-300)));
      fmt::print(out, "fast_seconds {}\nbruteforce_seconds {}\nspeedup {}\n", num(fast_s), num(brute_s),
                 num(brute_s / fast_s));
    });
  }

  std::vector<const char*> argv;
  argv.push_back("deforma");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (action) action();
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.kind() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace deforma::cli
