#include "deforma/tensor_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "deforma/error.hpp"

namespace deforma {

namespace {

constexpr char kMagic[4] = {'D', 'F', 'T', '1'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint32_t checked_dim(std::size_t d) {
  if (d > UINT32_MAX) throw FormatError("tensor dimension exceeds 32 bits");
  return static_cast<std::uint32_t>(d);
}

}  // namespace

std::string encode_tensor(const Tensor& t) {
  std::string out;
  out.reserve(kTensorHeaderBytes + 4 * t.size());
  out.append(kMagic, 4);
  put_u32(out, checked_dim(t.height()));
  put_u32(out, checked_dim(t.width()));
  put_u32(out, checked_dim(t.channels()));
  out.push_back('\0');
  for (float v : t.values()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

Tensor decode_tensor(std::string_view bytes) {
  if (bytes.size() < kTensorHeaderBytes) throw FormatError("tensor file shorter than its header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("bad tensor magic, expected DFT1");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const Shape shape{get_u32(p + 4), get_u32(p + 8), get_u32(p + 12)};
  if (p[16] != 0) throw FormatError("unsupported tensor flags byte " + std::to_string(p[16]));
  if (shape.height == 0 || shape.width == 0 || shape.channels == 0) {
    throw FormatError("tensor header has a zero dimension: " + to_string(shape));
  }
  const std::size_t payload = bytes.size() - kTensorHeaderBytes;
  if (payload % 4 != 0 || payload / 4 != shape.size()) {
    throw FormatError("tensor header " + to_string(shape) + " promises " + std::to_string(shape.size()) +
                      " floats but payload holds " + std::to_string(payload / 4) +
                      (payload % 4 ? " and a partial value" : ""));
  }
  std::vector<float> data(shape.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = std::bit_cast<float>(get_u32(p + kTensorHeaderBytes + 4 * i));
    if (!std::isfinite(data[i])) {
      throw ValidationError("non-finite value at tensor element " + std::to_string(i));
    }
  }
  return Tensor(shape, std::move(data));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("failed reading " + path.string());
  return bytes;
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

Tensor read_tensor(const std::filesystem::path& path) { return decode_tensor(read_file(path)); }

void write_tensor(const Tensor& t, const std::filesystem::path& path) {
  if (t.empty()) throw ValidationError("refusing to write an empty tensor");
  write_file(path, encode_tensor(t));
}

Keypoints parse_pose(std::string_view text, double min_confidence) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("pose is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("joints") || !doc["joints"].is_array()) {
    throw FormatError("pose JSON needs a \"joints\" array");
  }
  const auto& joints = doc["joints"];
  if (joints.size() != kNumJoints) {
    throw FormatError("pose has " + std::to_string(joints.size()) + " joints, expected 18");
  }
  Keypoints kp;
  for (std::size_t j = 0; j < kNumJoints; ++j) {
    const auto& entry = joints[j];
    if (entry.is_null()) continue;
    if (!entry.is_object()) throw FormatError("joint " + std::to_string(j) + " must be null or an object");
    auto coordinate = [&](const char* key) -> std::optional<double> {
      if (!entry.contains(key) || entry[key].is_null()) return std::nullopt;
      if (!entry[key].is_number()) {
        throw FormatError("joint " + std::to_string(j) + " field \"" + key + "\" is not a number");
      }
      return entry[key].get<double>();
    };
    const auto x = coordinate("x");
    const auto y = coordinate("y");
    const auto c = coordinate("c");
    if (!x || !y) continue;
    if (c && *c < min_confidence) continue;
    kp.joints[j] = Point2{*x, *y};
  }
  return kp;
}

Keypoints read_pose(const std::filesystem::path& path, double min_confidence) {
  return parse_pose(read_file(path), min_confidence);
}

std::string format_pose(const Keypoints& kp) {
  nlohmann::json joints = nlohmann::json::array();
  for (const auto& j : kp.joints) {
    if (j) {
      joints.push_back({{"x", j->x}, {"y", j->y}});
    } else {
      joints.push_back(nullptr);
    }
  }
  return nlohmann::json{{"joints", joints}}.dump(2) + "\n";
}

void write_pose(const Keypoints& kp, const std::filesystem::path& path) { write_file(path, format_pose(kp)); }

}  // namespace deforma
