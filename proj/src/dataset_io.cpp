// Copyright 2026 The SASCI Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sasci/dataset_io.hpp"

#include <fnmatch.h>
#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sasci/error.hpp"

namespace sasci {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIoFailure, "cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Next whitespace-delimited PGM header token, skipping '#' comments.
std::string pgm_token(const std::string& bytes, std::size_t& pos) {
  while (pos < bytes.size()) {
    if (bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
      ++pos;
    } else {
      break;
    }
  }
  const std::size_t start = pos;
  while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  return bytes.substr(start, pos - start);
}

GrayImage read_pgm(const fs::path& path) {
  const std::string bytes = read_all(path);
  std::size_t pos = 0;
  const auto corrupt = [&](const std::string& why) {
    return Error(ErrorKind::kCorruptImage, path.string() + ": " + why);
  };
  if (pgm_token(bytes, pos) != "P5") throw corrupt("not a binary PGM (P5)");
  std::size_t width = 0, height = 0;
  long maxval = 0;
  try {
    width = std::stoul(pgm_token(bytes, pos));
    height = std::stoul(pgm_token(bytes, pos));
    maxval = std::stol(pgm_token(bytes, pos));
  } catch (const std::exception&) {
    throw corrupt("malformed header");
  }
  if (width == 0 || height == 0 || maxval <= 0 || maxval > 65535) throw corrupt("invalid header values");
  ++pos;  // single whitespace byte before the raster
  const std::size_t bytes_per_sample = maxval > 255 ? 2 : 1;
  const std::size_t n = width * height;
  if (bytes.size() < pos + n * bytes_per_sample) throw corrupt("truncated raster");
  std::vector<double> values(n);
  const auto* raster = reinterpret_cast<const unsigned char*>(bytes.data() + pos);
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned v = bytes_per_sample == 1 ? raster[i] : (unsigned{raster[2 * i]} << 8) | raster[2 * i + 1];
    if (v > static_cast<unsigned>(maxval)) throw corrupt("sample exceeds maxval");
    values[i] = static_cast<double>(v) / static_cast<double>(maxval);
  }
  return GrayImage{Image(height, width, std::move(values)), bytes_per_sample == 1 ? 8 : 16};
}

GrayImage read_png(const fs::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_file(&image, path.string().c_str()) == 0) {
    throw Error(ErrorKind::kCorruptImage, path.string() + ": " + image.message);
  }
  if ((image.format & (PNG_FORMAT_FLAG_COLOR | PNG_FORMAT_FLAG_LINEAR)) != 0) {
    png_image_free(&image);
    throw Error(ErrorKind::kCorruptImage, path.string() + ": only 8-bit grayscale PNG is supported");
  }
  image.format = PNG_FORMAT_GRAY;
  std::vector<unsigned char> buffer(PNG_IMAGE_SIZE(image));
  if (png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr) == 0) {
    throw Error(ErrorKind::kCorruptImage, path.string() + ": " + image.message);
  }
  std::vector<double> values(buffer.size());
  std::transform(buffer.begin(), buffer.end(), values.begin(), [](unsigned char v) { return v / 255.0; });
  return GrayImage{Image(image.height, image.width, std::move(values)), 8};
}

std::vector<fs::path> match_pattern(const DatasetManifest& manifest) {
  const fs::path pattern = manifest.base_dir / manifest.frame_pattern;
  const fs::path dir = pattern.parent_path().empty() ? fs::path(".") : pattern.parent_path();
  const std::string name_pattern = pattern.filename().string();
  std::vector<fs::path> out;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw Error(ErrorKind::kMissingFrame, "frame directory " + dir.string() + " does not exist");
  }
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (fnmatch(name_pattern.c_str(), entry.path().filename().string().c_str(), 0) == 0) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  return out;
}

template <typename T>
Tensor make_tensor(std::vector<std::size_t> dims, std::span<const T> values) {
  Tensor t{std::move(dims), {}};
  t.data.reserve(values.size());
  for (const T& v : values) t.data.push_back(static_cast<float>(v));
  return t;
}

}  // namespace

void DatasetManifest::validate() const {
  if (frame_pattern.empty()) throw Error(ErrorKind::kInvalidConfig, "manifest frame_pattern is empty");
  if (grouping == 0) throw Error(ErrorKind::kInvalidConfig, "manifest grouping C must be >= 1");
  if (frame_count < grouping) throw Error(ErrorKind::kInvalidConfig, "manifest needs T >= C");
  if (height == 0 || width == 0) throw Error(ErrorKind::kInvalidConfig, "manifest H and W must be >= 1");
  if (bit_depth != 8 && bit_depth != 16) throw Error(ErrorKind::kInvalidConfig, "manifest bit_depth must be 8 or 16");
}

DatasetManifest DatasetManifest::from_json(const json& j, const fs::path& base_dir) {
  DatasetManifest m;
  try {
    m.name = j.at("name").get<std::string>();
    m.frame_pattern = j.at("frame_pattern").get<std::string>();
    m.frame_count = j.at("frame_count").get<std::size_t>();
    m.height = j.at("height").get<std::size_t>();
    m.width = j.at("width").get<std::size_t>();
    m.bit_depth = j.value("bit_depth", 8);
    m.grouping = j.at("grouping").get<std::size_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kInvalidConfig, std::string("manifest: ") + e.what());
  }
  m.base_dir = base_dir;
  m.validate();
  return m;
}

DatasetManifest DatasetManifest::load(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_all(path));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kInvalidConfig, path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

json DatasetManifest::to_json() const {
  return json{{"name", name},     {"frame_pattern", frame_pattern}, {"frame_count", frame_count},
              {"height", height}, {"width", width},                 {"bit_depth", bit_depth},
              {"grouping", grouping}};
}

GrayImage read_grayscale(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw Error(ErrorKind::kMissingFrame, path.string() + " does not exist");
  std::ifstream in(path, std::ios::binary);
  char magic[8] = {};
  in.read(magic, sizeof(magic));
  if (in.gcount() >= 2 && magic[0] == 'P' && magic[1] == '5') return read_pgm(path);
  if (in.gcount() == 8 && png_sig_cmp(reinterpret_cast<png_const_bytep>(magic), 0, 8) == 0) return read_png(path);
  throw Error(ErrorKind::kCorruptImage, path.string() + ": neither PGM (P5) nor PNG");
}

void write_pgm(const fs::path& path, const Image& image, double scale) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIoFailure, "cannot write " + path.string());
  out << "P5\n" << image.width() << " " << image.height() << "\n255\n";
  std::vector<unsigned char> raster(image.size());
  const auto values = image.data();
  for (std::size_t i = 0; i < raster.size(); ++i) {
    const double v = std::clamp(values[i] * scale, 0.0, 1.0);
    raster[i] = static_cast<unsigned char>(std::lround(v * 255.0));
  }
  out.write(reinterpret_cast<const char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
  if (!out) throw Error(ErrorKind::kIoFailure, "short write to " + path.string());
}

LoadedSequence load_frame_sequence(const DatasetManifest& manifest) {
  manifest.validate();
  const auto files = match_pattern(manifest);
  if (files.size() < manifest.frame_count) {
    throw Error(ErrorKind::kMissingFrame, "pattern " + manifest.frame_pattern + " matched " +
                                              std::to_string(files.size()) + " files, manifest expects " +
                                              std::to_string(manifest.frame_count));
  }
  LoadedSequence seq;
  const std::size_t c = manifest.grouping;
  const std::size_t groups = manifest.frame_count / c;
  seq.dropped = manifest.frame_count - groups * c;
  std::vector<Image> frames;
  for (std::size_t i = 0; i < manifest.frame_count; ++i) {
    GrayImage img = read_grayscale(files[i]);
    if (img.pixels.height() != manifest.height || img.pixels.width() != manifest.width) {
      throw Error(ErrorKind::kShapeMismatch, files[i].string() + " is " + std::to_string(img.pixels.height()) +
                                                 "x" + std::to_string(img.pixels.width()) + ", manifest says " +
                                                 std::to_string(manifest.height) + "x" +
                                                 std::to_string(manifest.width));
    }
    if (img.bit_depth != manifest.bit_depth) {
      throw Error(ErrorKind::kShapeMismatch, files[i].string() + " has bit depth " +
                                                 std::to_string(img.bit_depth) + ", manifest says " +
                                                 std::to_string(manifest.bit_depth));
    }
    seq.files.push_back(files[i]);
    if (i < groups * c) frames.push_back(std::move(img.pixels));
  }
  for (std::size_t g = 0; g < groups; ++g) {
    std::vector<Image> group(frames.begin() + static_cast<std::ptrdiff_t>(g * c),
                             frames.begin() + static_cast<std::ptrdiff_t>((g + 1) * c));
    seq.groups.push_back(FrameCube::from_frames(group));
  }
  if (seq.dropped > 0) {
    std::clog << "sasci: " << manifest.name << ": dropped " << seq.dropped << " trailing frame(s) beyond "
              << groups << " group(s) of " << c << "\n";
  }
  return seq;
}

std::size_t Tensor::element_count() const {
  std::size_t n = 1;
  for (std::size_t d : dims) n *= d;
  return dims.empty() ? 0 : n;
}

fs::path sidecar_path(const fs::path& path) {
  fs::path out = path;
  out += ".json";
  return out;
}

void write_tensor(const fs::path& path, const Tensor& tensor) {
  if (tensor.element_count() != tensor.data.size()) {
    throw Error(ErrorKind::kInvalidValue, "tensor dims do not match its data length");
  }
  std::vector<std::uint32_t> words(tensor.data.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    std::uint32_t w = std::bit_cast<std::uint32_t>(tensor.data[i]);
    if constexpr (std::endian::native == std::endian::big) w = __builtin_bswap32(w);
    words[i] = w;
  }
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::kIoFailure, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(words.data()), static_cast<std::streamsize>(words.size() * 4));
    if (!out) throw Error(ErrorKind::kIoFailure, "short write to " + path.string());
  }
  std::ofstream side(sidecar_path(path));
  if (!side) throw Error(ErrorKind::kIoFailure, "cannot write " + sidecar_path(path).string());
  side << json{{"dims", tensor.dims}, {"order", "row-major"}, {"dtype", "f32"}}.dump() << "\n";
}

Tensor read_tensor(const fs::path& path) {
  const fs::path side = sidecar_path(path);
  std::error_code ec;
  if (!fs::is_regular_file(side, ec)) throw Error(ErrorKind::kIoFailure, "missing sidecar " + side.string());
  if (!fs::is_regular_file(path, ec)) throw Error(ErrorKind::kIoFailure, "missing tensor " + path.string());
  Tensor t;
  try {
    const json meta = json::parse(read_all(side));
    t.dims = meta.at("dims").get<std::vector<std::size_t>>();
    if (meta.at("order").get<std::string>() != "row-major" || meta.at("dtype").get<std::string>() != "f32") {
      throw Error(ErrorKind::kSidecarMismatch, side.string() + ": expected row-major f32");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kSidecarMismatch, side.string() + ": " + e.what());
  }
  const std::string bytes = read_all(path);
  const std::size_t expected = t.element_count() * 4;
  if (bytes.size() != expected) {
    throw Error(ErrorKind::kSidecarMismatch, path.string() + " holds " + std::to_string(bytes.size()) +
                                                 " bytes, sidecar dims need " + std::to_string(expected));
  }
  t.data.resize(t.element_count());
  for (std::size_t i = 0; i < t.data.size(); ++i) {
    std::uint32_t w;
    std::memcpy(&w, bytes.data() + 4 * i, 4);
    if constexpr (std::endian::native == std::endian::big) w = __builtin_bswap32(w);
    t.data[i] = std::bit_cast<float>(w);
  }
  return t;
}

Tensor to_tensor(const FrameCube& cube) {
  return make_tensor<double>({cube.height(), cube.width(), cube.depth()}, cube.data());
}
Tensor to_tensor(const MaskStack& masks) {
  return make_tensor<std::uint8_t>({masks.height(), masks.width(), masks.depth()}, masks.data());
}
Tensor to_tensor(const Measurement& y) { return make_tensor<double>({y.height(), y.width()}, y.data()); }
Tensor to_tensor(const SaliencyStack& saliency) {
  return make_tensor<std::uint8_t>({saliency.height(), saliency.width(), saliency.depth()}, saliency.data());
}
Tensor to_tensor(const ProbabilityMap& probability) {
  return make_tensor<double>({probability.height(), probability.width()}, probability.data());
}

MaskStack masks_from_tensor(const Tensor& tensor) {
  if (tensor.dims.size() != 3) throw Error(ErrorKind::kShapeMismatch, "mask tensor must be H x W x C");
  std::vector<std::uint8_t> data(tensor.data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const float v = tensor.data[i];
    if (v != 0.0f && v != 1.0f) throw Error(ErrorKind::kInvalidValue, "mask tensor holds a non-binary value");
    data[i] = v == 1.0f ? 1 : 0;
  }
  return MaskStack(Shape{tensor.dims[0], tensor.dims[1], tensor.dims[2]}, std::move(data));
}

Measurement measurement_from_tensor(const Tensor& tensor, std::size_t capture_index) {
  if (tensor.dims.size() != 2) throw Error(ErrorKind::kShapeMismatch, "measurement tensor must be H x W");
  return Measurement(tensor.dims[0], tensor.dims[1], std::vector<double>(tensor.data.begin(), tensor.data.end()),
                     capture_index);
}

}  // namespace sasci
