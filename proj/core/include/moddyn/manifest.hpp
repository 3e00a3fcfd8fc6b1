/*
 * Copyright 2026 The moddyn Authors.
 *
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

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace moddyn {

enum class Split { kTrain, kValid, kTest };

std::string_view to_string(Split s);

struct ManifestRecord {
  std::string id;
  std::string path;  // audio (.wav) or tensor (.wrx1), relative to base_dir
  int label = 0;
  std::string speaker;
  Split split = Split::kTrain;
};

struct DatasetManifest {
  std::vector<ManifestRecord> records;
  std::filesystem::path base_dir;
  std::vector<std::string> warnings;

  std::vector<const ManifestRecord*> in_split(Split s) const;
  std::filesystem::path resolve(const ManifestRecord& r) const;
  // Speakers that contribute to more than one split, sorted.
  std::vector<std::string> overlapping_speakers() const;
};

enum class SpeakerCheck { kIgnore, kWarn, kStrict };

// CSV with the mandatory header `id,path,label,speaker,split`. Problems are
// reported as FormatError citing the 1-based line number.
DatasetManifest parse_manifest(const std::filesystem::path& path,
                               SpeakerCheck check = SpeakerCheck::kWarn);
DatasetManifest parse_manifest_text(std::string_view text,
                                    const std::filesystem::path& base_dir,
                                    SpeakerCheck check = SpeakerCheck::kWarn,
                                    std::string_view source = "manifest");

void write_manifest(const DatasetManifest& m, const std::filesystem::path& path);

}  // namespace moddyn
