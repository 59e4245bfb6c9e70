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

#ifndef CORRUPT_FORGE_DATAIO_H_
#define CORRUPT_FORGE_DATAIO_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "corrupt_forge/types.h"

namespace corrupt_forge {

// Bytes per record in a `.bin` cloud: five little-endian float32 values.
inline constexpr std::size_t kPointRecordBytes = 20;

// Throws FormatError if the file length is not a record multiple or a
// coordinate is non-finite (the message names the record index), IoError if
// the file cannot be read.
PointCloud ReadPointCloud(const std::filesystem::path& path);
PointCloud DecodePointCloud(const std::vector<std::uint8_t>& bytes);

// Creates parent directories as needed. Throws IoError.
void WritePointCloud(const PointCloud& cloud, const std::filesystem::path& path);
std::vector<std::uint8_t> EncodePointCloud(const PointCloud& cloud);

// Decodes PNG or JPEG (sniffed from the file header) to 8-bit RGB.
ImageBuffer ReadImage(const std::filesystem::path& path);
// Lossless PNG. Creates parent directories as needed.
void WritePng(const ImageBuffer& image, const std::filesystem::path& path);

std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::vector<std::uint8_t>& bytes,
                    const std::filesystem::path& path);

struct LidarEntry {
  std::string path;  // relative to the dataset root
  Calibration calib;
  bool operator==(const LidarEntry&) const = default;
};

struct CameraEntry {
  std::string path;
  Calibration calib;
  bool absent = false;
  bool operator==(const CameraEntry&) const = default;
};

// What a corruption actually did to one sample, for corrupted outputs only.
struct SampleCorruptionRecord {
  std::optional<RigidPerturbation> spatial;                 // LiDAR
  std::map<std::string, RigidPerturbation> camera_spatial;  // per camera
  std::vector<std::string> frozen;  // sensors carrying the predecessor frame
  bool operator==(const SampleCorruptionRecord&) const = default;
};

struct SampleDescriptor {
  std::string sample_id;
  std::string scene_id;
  std::int64_t timestamp_us = 0;
  std::optional<std::string> prev_sample_id;
  LidarEntry lidar;
  std::array<CameraEntry, kNumCameras> cameras;  // kCameraNames order
  std::optional<SampleCorruptionRecord> corruption;
  bool operator==(const SampleDescriptor&) const = default;
};

struct CorruptionMetadata {
  std::string kind;
  int level = 0;
  std::uint64_t seed = 0;
  std::string tool_version;
  bool operator==(const CorruptionMetadata&) const = default;
};

struct DatasetManifest {
  std::filesystem::path dataset_root;
  std::vector<SampleDescriptor> samples;
  std::optional<CorruptionMetadata> corruption;

  std::filesystem::path Resolve(const std::string& relative) const {
    return dataset_root / relative;
  }
  // Index of the sample with this id, or nullopt.
  std::optional<std::size_t> Find(std::string_view sample_id) const;
};

inline constexpr std::string_view kManifestFileName = "manifest.json";

// Parses `<root>/manifest.json` (or the given file) and validates it:
// calibrations, predecessor links (present, same scene, acyclic, one scene
// head), and existence of every referenced file. Throws ValidationError
// listing every missing path, FormatError on malformed documents.
DatasetManifest LoadManifest(const std::filesystem::path& path);
// Parses and validates structure only; no filesystem checks.
DatasetManifest ParseManifest(const std::string& text,
                              const std::filesystem::path& dataset_root);
std::string SerializeManifest(const DatasetManifest& manifest);
void WriteManifest(const DatasetManifest& manifest,
                   const std::filesystem::path& path);

// Loads the payloads of one sample. Absent cameras get no frame.
SampleBundle LoadSample(const DatasetManifest& manifest, std::size_t index);

// Per-pixel camera-frame depth in meters; 0 marks Unknown.
class DepthMap {
 public:
  DepthMap(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  std::optional<double> At(int x, int y) const;
  void Set(int x, int y, double depth);
  std::size_t KnownCount() const;

 private:
  int width_;
  int height_;
  std::vector<double> depth_;
};

inline constexpr double kMinProjectionDepth = 0.1;

// Sparse depth image of `cloud` seen from the camera: LiDAR -> vehicle ->
// camera, points at or closer than 0.1 m in front of the camera dropped,
// pinhole projection, nearest return wins per pixel. Throws CalibrationError
// for invalid or non-invertible calibrations.
DepthMap ProjectPoints(const PointCloud& cloud, const Calibration& lidar_calib,
                       const Calibration& cam_calib, int width, int height);

}  // namespace corrupt_forge

#endif  // CORRUPT_FORGE_DATAIO_H_
