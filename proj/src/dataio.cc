// Copyright 2026 The corrupt_forge Authors.
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

#include "corrupt_forge/dataio.h"

#include <jpeglib.h>
#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "corrupt_forge/errors.h"

namespace corrupt_forge {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void PutFloat(std::uint8_t* out, float value) {
  const auto bits = std::bit_cast<std::uint32_t>(value);
  for (int i = 0; i < 4; ++i) out[i] = static_cast<std::uint8_t>(bits >> (8 * i));
}

float GetFloat(const std::uint8_t* in) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(in[i]) << (8 * i);
  return std::bit_cast<float>(bits);
}

void EnsureParent(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) {
      throw IoError("cannot create directory " + path.parent_path().string() +
                    ": " + ec.message());
    }
  }
}

// libjpeg reports fatal errors through a callback that must not return.
struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void JpegErrorExit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

ImageBuffer DecodeJpeg(const std::vector<std::uint8_t>& bytes,
                       const fs::path& path) {
  jpeg_decompress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = JpegErrorExit;
  std::vector<std::uint8_t> pixels;
  int width = 0;
  int height = 0;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw FormatError(path.string() + ": " + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  width = static_cast<int>(cinfo.output_width);
  height = static_cast<int>(cinfo.output_height);
  pixels.resize(static_cast<std::size_t>(width) * height * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = pixels.data() +
                   static_cast<std::size_t>(cinfo.output_scanline) * width * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return ImageBuffer(width, height, std::move(pixels));
}

ImageBuffer DecodePng(const std::vector<std::uint8_t>& bytes,
                      const fs::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw FormatError(path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
    std::string message = image.message;
    png_image_free(&image);
    throw FormatError(path.string() + ": " + message);
  }
  return ImageBuffer(static_cast<int>(image.width),
                     static_cast<int>(image.height), std::move(pixels));
}

json CalibToJson(const Calibration& calib) {
  const auto& q = calib.rotation;
  json j = {{"rotation", {q.w(), q.x(), q.y(), q.z()}},
            {"translation",
             {calib.translation.x(), calib.translation.y(),
              calib.translation.z()}}};
  if (calib.intrinsic) {
    json rows = json::array();
    for (int r = 0; r < 3; ++r) {
      rows.push_back({(*calib.intrinsic)(r, 0), (*calib.intrinsic)(r, 1),
                      (*calib.intrinsic)(r, 2)});
    }
    j["intrinsic"] = rows;
  }
  return j;
}

Eigen::Vector3d Vec3FromJson(const json& j) {
  if (!j.is_array() || j.size() != 3) throw FormatError("expected 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json Vec3ToJson(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

Calibration CalibFromJson(const json& j) {
  Calibration calib;
  const json& q = j.at("rotation");
  if (!q.is_array() || q.size() != 4) {
    throw FormatError("rotation must be a 4-element quaternion (w, x, y, z)");
  }
  calib.rotation = Eigen::Quaterniond(q[0].get<double>(), q[1].get<double>(),
                                      q[2].get<double>(), q[3].get<double>());
  calib.translation = Vec3FromJson(j.at("translation"));
  if (j.contains("intrinsic")) {
    const json& k = j.at("intrinsic");
    if (!k.is_array() || k.size() != 3) {
      throw FormatError("intrinsic must be a 3x3 nested array");
    }
    Eigen::Matrix3d m;
    for (int r = 0; r < 3; ++r) {
      if (!k[r].is_array() || k[r].size() != 3) {
        throw FormatError("intrinsic must be a 3x3 nested array");
      }
      for (int c = 0; c < 3; ++c) m(r, c) = k[r][c].get<double>();
    }
    calib.intrinsic = m;
  }
  return calib;
}

json PerturbationToJson(const RigidPerturbation& p) {
  return {{"axis", Vec3ToJson(p.axis)},
          {"angle_deg", p.angle_deg},
          {"translation", Vec3ToJson(p.translation)}};
}

RigidPerturbation PerturbationFromJson(const json& j) {
  RigidPerturbation p;
  p.axis = Vec3FromJson(j.at("axis"));
  p.angle_deg = j.at("angle_deg").get<double>();
  p.translation = Vec3FromJson(j.at("translation"));
  return p;
}

json SampleToJson(const SampleDescriptor& s) {
  json cameras = json::object();
  for (int i = 0; i < kNumCameras; ++i) {
    const CameraEntry& cam = s.cameras[i];
    json entry = {{"path", cam.path}, {"calib", CalibToJson(cam.calib)}};
    if (cam.absent) entry["absent"] = true;
    cameras[std::string(kCameraNames[i])] = entry;
  }
  json j = {{"sample_id", s.sample_id},
            {"scene_id", s.scene_id},
            {"timestamp_us", s.timestamp_us},
            {"prev_sample_id",
             s.prev_sample_id ? json(*s.prev_sample_id) : json(nullptr)},
            {"lidar",
             {{"path", s.lidar.path}, {"calib", CalibToJson(s.lidar.calib)}}},
            {"cameras", cameras}};
  if (s.corruption) {
    json c = json::object();
    if (s.corruption->spatial) {
      c["spatial"] = PerturbationToJson(*s.corruption->spatial);
    }
    if (!s.corruption->camera_spatial.empty()) {
      json cams = json::object();
      for (const auto& [name, p] : s.corruption->camera_spatial) {
        cams[name] = PerturbationToJson(p);
      }
      c["camera_spatial"] = cams;
    }
    if (!s.corruption->frozen.empty()) c["frozen"] = s.corruption->frozen;
    j["corruption"] = c;
  }
  return j;
}

SampleDescriptor SampleFromJson(const json& j) {
  SampleDescriptor s;
  s.sample_id = j.at("sample_id").get<std::string>();
  if (s.sample_id.empty()) throw FormatError("empty sample_id");
  s.scene_id = j.at("scene_id").get<std::string>();
  s.timestamp_us = j.at("timestamp_us").get<std::int64_t>();
  if (j.contains("prev_sample_id") && !j.at("prev_sample_id").is_null()) {
    s.prev_sample_id = j.at("prev_sample_id").get<std::string>();
  }
  const json& lidar = j.at("lidar");
  s.lidar.path = lidar.at("path").get<std::string>();
  s.lidar.calib = CalibFromJson(lidar.at("calib"));

  const json& cameras = j.at("cameras");
  if (!cameras.is_object() || cameras.size() != kNumCameras) {
    throw FormatError("sample " + s.sample_id + ": expected exactly 6 cameras");
  }
  for (const auto& [name, entry] : cameras.items()) {
    const auto index = CameraIndex(name);
    if (!index) {
      throw FormatError("sample " + s.sample_id + ": unknown camera " + name);
    }
    CameraEntry& cam = s.cameras[*index];
    cam.path = entry.at("path").get<std::string>();
    cam.calib = CalibFromJson(entry.at("calib"));
    cam.absent = entry.value("absent", false);
    if (!cam.calib.intrinsic) {
      throw FormatError("sample " + s.sample_id + ": camera " + name +
                        " has no intrinsic matrix");
    }
  }
  if (j.contains("corruption")) {
    const json& c = j.at("corruption");
    SampleCorruptionRecord record;
    if (c.contains("spatial")) record.spatial = PerturbationFromJson(c["spatial"]);
    if (c.contains("camera_spatial")) {
      for (const auto& [name, p] : c["camera_spatial"].items()) {
        record.camera_spatial[name] = PerturbationFromJson(p);
      }
    }
    if (c.contains("frozen")) {
      record.frozen = c["frozen"].get<std::vector<std::string>>();
    }
    s.corruption = std::move(record);
  }
  return s;
}

void ValidateStructure(const DatasetManifest& manifest) {
  std::map<std::string_view, const SampleDescriptor*> by_id;
  for (const SampleDescriptor& s : manifest.samples) {
    if (!by_id.emplace(s.sample_id, &s).second) {
      throw ValidationError("duplicate sample_id " + s.sample_id);
    }
    try {
      s.lidar.calib.Validate();
      for (const CameraEntry& cam : s.cameras) cam.calib.Validate();
    } catch (const CalibrationError& e) {
      throw ValidationError("sample " + s.sample_id + ": " + e.what());
    }
  }

  std::map<std::string_view, int> heads_per_scene;
  std::set<std::string_view> used_as_prev;
  for (const SampleDescriptor& s : manifest.samples) {
    heads_per_scene.try_emplace(s.scene_id, 0);
    if (!s.prev_sample_id) {
      ++heads_per_scene[s.scene_id];
      continue;
    }
    const auto it = by_id.find(*s.prev_sample_id);
    if (it == by_id.end()) {
      throw ValidationError("sample " + s.sample_id +
                            ": unknown predecessor " + *s.prev_sample_id);
    }
    if (it->second->scene_id != s.scene_id) {
      throw ValidationError("sample " + s.sample_id + ": predecessor " +
                            *s.prev_sample_id + " belongs to another scene");
    }
    if (!used_as_prev.insert(*s.prev_sample_id).second) {
      throw ValidationError("sample " + *s.prev_sample_id +
                            " is the predecessor of more than one sample");
    }
  }
  // Walking back from any sample must reach a head within |samples| steps.
  for (const SampleDescriptor& s : manifest.samples) {
    const SampleDescriptor* cur = &s;
    for (std::size_t steps = 0; cur->prev_sample_id; ++steps) {
      if (steps > manifest.samples.size()) {
        throw ValidationError("cyclic predecessor link through sample " +
                              s.sample_id);
      }
      cur = by_id.at(*cur->prev_sample_id);
    }
  }
  for (const auto& [scene, heads] : heads_per_scene) {
    if (heads != 1) {
      throw ValidationError("scene " + std::string(scene) + " has " +
                            std::to_string(heads) +
                            " samples without a predecessor, expected 1");
    }
  }
}

}  // namespace

PointCloud DecodePointCloud(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() % kPointRecordBytes != 0) {
    throw FormatError("point cloud length " + std::to_string(bytes.size()) +
                      " is not a multiple of " +
                      std::to_string(kPointRecordBytes));
  }
  PointCloud cloud;
  const std::size_t count = bytes.size() / kPointRecordBytes;
  cloud.points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint8_t* rec = bytes.data() + i * kPointRecordBytes;
    const float x = GetFloat(rec);
    const float y = GetFloat(rec + 4);
    const float z = GetFloat(rec + 8);
    const float intensity = GetFloat(rec + 12);
    const float ring = GetFloat(rec + 16);
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
      throw FormatError("record " + std::to_string(i) +
                        ": non-finite coordinate");
    }
    if (!std::isfinite(ring) || !std::isfinite(intensity)) {
      throw FormatError("record " + std::to_string(i) +
                        ": non-finite intensity or ring");
    }
    cloud.points.push_back({x, y, z, intensity,
                            static_cast<int>(std::lround(ring))});
  }
  return cloud;
}

std::vector<std::uint8_t> EncodePointCloud(const PointCloud& cloud) {
  std::vector<std::uint8_t> bytes(cloud.size() * kPointRecordBytes);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const PointRecord& p = cloud.points[i];
    std::uint8_t* rec = bytes.data() + i * kPointRecordBytes;
    PutFloat(rec, static_cast<float>(p.x));
    PutFloat(rec + 4, static_cast<float>(p.y));
    PutFloat(rec + 8, static_cast<float>(p.z));
    PutFloat(rec + 12, static_cast<float>(p.intensity));
    PutFloat(rec + 16, static_cast<float>(p.ring));
  }
  return bytes;
}

std::vector<std::uint8_t> ReadFileBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return bytes;
}

void WriteFileBytes(const std::vector<std::uint8_t>& bytes,
                    const fs::path& path) {
  EnsureParent(path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

PointCloud ReadPointCloud(const fs::path& path) {
  try {
    return DecodePointCloud(ReadFileBytes(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void WritePointCloud(const PointCloud& cloud, const fs::path& path) {
  WriteFileBytes(EncodePointCloud(cloud), path);
}

ImageBuffer ReadImage(const fs::path& path) {
  const auto bytes = ReadFileBytes(path);
  static constexpr std::uint8_t kPngMagic[] = {0x89, 'P', 'N', 'G'};
  if (bytes.size() >= 4 && std::equal(kPngMagic, kPngMagic + 4, bytes.begin())) {
    return DecodePng(bytes, path);
  }
  if (bytes.size() >= 2 && bytes[0] == 0xFF && bytes[1] == 0xD8) {
    return DecodeJpeg(bytes, path);
  }
  throw FormatError(path.string() + ": neither PNG nor JPEG");
}

void WritePng(const ImageBuffer& image, const fs::path& path) {
  EnsureParent(path);
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width());
  png.height = static_cast<png_uint_32>(image.height());
  png.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&png, path.c_str(), 0, image.pixels().data(), 0,
                               nullptr)) {
    throw IoError("cannot write " + path.string() + ": " + png.message);
  }
}

std::optional<std::size_t> DatasetManifest::Find(
    std::string_view sample_id) const {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].sample_id == sample_id) return i;
  }
  return std::nullopt;
}

DatasetManifest ParseManifest(const std::string& text,
                              const fs::path& dataset_root) {
  DatasetManifest manifest;
  manifest.dataset_root = dataset_root;
  try {
    const json doc = json::parse(text);
    for (const json& sample : doc.at("samples")) {
      manifest.samples.push_back(SampleFromJson(sample));
    }
    if (doc.contains("corruption")) {
      const json& c = doc.at("corruption");
      manifest.corruption = CorruptionMetadata{
          c.at("kind").get<std::string>(), c.at("level").get<int>(),
          c.at("seed").get<std::uint64_t>(),
          c.at("tool_version").get<std::string>()};
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed manifest: ") + e.what());
  }
  ValidateStructure(manifest);
  return manifest;
}

DatasetManifest LoadManifest(const fs::path& path) {
  fs::path file = path;
  if (fs::is_directory(file)) file /= kManifestFileName;
  const auto bytes = ReadFileBytes(file);
  DatasetManifest manifest = ParseManifest(
      std::string(bytes.begin(), bytes.end()), file.parent_path());

  std::vector<std::string> missing;
  for (const SampleDescriptor& s : manifest.samples) {
    if (!fs::exists(manifest.Resolve(s.lidar.path))) {
      missing.push_back(s.lidar.path);
    }
    for (const CameraEntry& cam : s.cameras) {
      if (!fs::exists(manifest.Resolve(cam.path))) missing.push_back(cam.path);
    }
  }
  if (!missing.empty()) {
    std::string message = "manifest references missing files:";
    for (const auto& m : missing) message += "\n  " + m;
    throw ValidationError(message);
  }
  return manifest;
}

std::string SerializeManifest(const DatasetManifest& manifest) {
  json doc;
  doc["samples"] = json::array();
  for (const SampleDescriptor& s : manifest.samples) {
    doc["samples"].push_back(SampleToJson(s));
  }
  if (manifest.corruption) {
    doc["corruption"] = {{"kind", manifest.corruption->kind},
                         {"level", manifest.corruption->level},
                         {"seed", manifest.corruption->seed},
                         {"tool_version", manifest.corruption->tool_version}};
  }
  return doc.dump(2) + "\n";
}

void WriteManifest(const DatasetManifest& manifest, const fs::path& path) {
  const std::string text = SerializeManifest(manifest);
  WriteFileBytes(std::vector<std::uint8_t>(text.begin(), text.end()), path);
}

SampleBundle LoadSample(const DatasetManifest& manifest, std::size_t index) {
  const SampleDescriptor& desc = manifest.samples.at(index);
  SampleBundle bundle;
  bundle.sample_id = desc.sample_id;
  bundle.scene_id = desc.scene_id;
  bundle.timestamp_us = desc.timestamp_us;
  bundle.prev_sample_id = desc.prev_sample_id;
  bundle.lidar = ReadPointCloud(manifest.Resolve(desc.lidar.path));
  bundle.lidar_calib = desc.lidar.calib;
  for (int i = 0; i < kNumCameras; ++i) {
    bundle.cameras[i].calib = desc.cameras[i].calib;
    if (!desc.cameras[i].absent) {
      bundle.cameras[i].frame = ReadImage(manifest.Resolve(desc.cameras[i].path));
    }
  }
  return bundle;
}

DepthMap::DepthMap(int width, int height)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw UsageError("depth map size must be positive");
  }
  depth_.assign(static_cast<std::size_t>(width) * height, 0.0);
}

std::optional<double> DepthMap::At(int x, int y) const {
  const double d = depth_[static_cast<std::size_t>(y) * width_ + x];
  if (d > 0.0) return d;
  return std::nullopt;
}

void DepthMap::Set(int x, int y, double depth) {
  depth_[static_cast<std::size_t>(y) * width_ + x] = depth;
}

std::size_t DepthMap::KnownCount() const {
  return static_cast<std::size_t>(
      std::count_if(depth_.begin(), depth_.end(), [](double d) { return d > 0; }));
}

DepthMap ProjectPoints(const PointCloud& cloud, const Calibration& lidar_calib,
                       const Calibration& cam_calib, int width, int height) {
  lidar_calib.Validate();
  cam_calib.Validate();
  if (!cam_calib.intrinsic) {
    throw CalibrationError("camera calibration has no intrinsic matrix");
  }
  DepthMap depth(width, height);

  const Eigen::Matrix3d lidar_rot = lidar_calib.rotation.toRotationMatrix();
  const Eigen::Matrix3d cam_rot_inv =
      cam_calib.rotation.toRotationMatrix().transpose();
  const Eigen::Matrix3d& k = *cam_calib.intrinsic;

  for (const PointRecord& p : cloud.points) {
    const Eigen::Vector3d vehicle =
        lidar_rot * Eigen::Vector3d(p.x, p.y, p.z) + lidar_calib.translation;
    const Eigen::Vector3d cam = cam_rot_inv * (vehicle - cam_calib.translation);
    if (cam.z() <= kMinProjectionDepth) continue;
    const Eigen::Vector3d img = k * cam;
    const double u = std::floor(img.x() / img.z());
    const double v = std::floor(img.y() / img.z());
    if (u < 0 || v < 0 || u >= width || v >= height) continue;
    const int px = static_cast<int>(u);
    const int py = static_cast<int>(v);
    const auto current = depth.At(px, py);
    if (!current || cam.z() < *current) depth.Set(px, py, cam.z());
  }
  return depth;
}

}  // namespace corrupt_forge
