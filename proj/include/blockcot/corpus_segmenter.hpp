#pragma once

// Checks the output of an external segmentation step. The segmenter may only
// insert <continue_think> separators into the original reasoning text, and
// the separator count must lie in [ceil(difficulty / 2), floor(2 * difficulty)].

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "blockcot/error.hpp"

namespace blockcot::segment {

struct SegmentBounds {
  std::uint64_t min_required = 0;
  std::uint64_t max_allowed = 0;

  bool operator==(const SegmentBounds&) const = default;
};

// Throws NonPositiveDifficulty.
SegmentBounds segment_bounds(double difficulty);

std::string strip_separators(std::string_view segmented);

std::uint64_t count_separators(std::string_view segmented);

enum class ViolationKind { TooFewSeparators, TooManySeparators, ContentModified, NonPositiveDifficulty };

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string message;
};

struct SegmentationReport {
  std::uint64_t separator_count = 0;
  std::uint64_t min_required = 0;
  std::uint64_t max_allowed = 0;
  bool content_preserved = false;
  // Byte offset of the first difference after stripping, when not preserved.
  std::uint64_t first_difference = 0;
  std::vector<Violation> violations;

  bool valid() const { return violations.empty(); }
};

// Total: every problem is reported as a violation.
SegmentationReport validate_segmentation(std::string_view original, std::string_view segmented,
                                         double difficulty);

}  // namespace blockcot::segment
