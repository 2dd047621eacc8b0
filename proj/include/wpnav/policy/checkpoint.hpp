#pragma once

#include <string>

#include "wpnav/policy/policy.hpp"

namespace wpnav {

// Binary checkpoint: magic "WPNVCKPT", format version, policy config digest,
// the canonical config text, then named parameter blobs with shapes
// (little-endian doubles).
struct CheckpointMeta {
  std::string digest;
  std::string config_text;
  std::string note;  // free-form, e.g. the training step
};

std::string serialize_checkpoint(const Policy& policy, const std::string& note = "");
// Throws ParseError on malformed data. When expected_digest is non-empty and
// differs, throws DigestMismatch unless force is set.
Policy deserialize_checkpoint(const std::string& bytes, const PolicyConfig& cfg,
                              const std::string& expected_digest = "", bool force = false,
                              CheckpointMeta* meta = nullptr);
CheckpointMeta read_checkpoint_meta(const std::string& bytes);

void save_checkpoint(const std::string& path, const Policy& policy, const std::string& note = "");
Policy load_checkpoint(const std::string& path, const PolicyConfig& cfg, bool force = false,
                       CheckpointMeta* meta = nullptr);

}  // namespace wpnav
