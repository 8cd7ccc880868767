#pragma once

#include <filesystem>
#include <iosfwd>

#include "kelm/classifier.hpp"

namespace kelm {

inline constexpr int kModelFormatVersion = 1;

/// JSON document holding everything predict needs. Doubles are written in
/// shortest round-trip form, so a reloaded model predicts bit-identically.
void save_model(std::ostream& out, const TrainedModel& model);
void save_model(const std::filesystem::path& path, const TrainedModel& model);

/// Throws DataError on malformed input or a format version newer than this build.
TrainedModel load_model(std::istream& in);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace kelm
