#include "blockcot/corpus_segmenter.hpp"

#include <algorithm>
#include <cmath>

#include "blockcot/cot_format.hpp"

namespace blockcot::segment {

SegmentBounds segment_bounds(double difficulty) {
  if (!(difficulty > 0.0) || !std::isfinite(difficulty)) {
    throw Error(ErrorCode::NonPositiveDifficulty,
                "difficulty must be a positive finite number, got " + std::to_string(difficulty));
  }
  // "At least" rounds up, "no more than" rounds down.
  return {static_cast<std::uint64_t>(std::ceil(difficulty / 2.0)),
          static_cast<std::uint64_t>(std::floor(2.0 * difficulty))};
}

std::string strip_separators(std::string_view segmented) {
  std::string out;
  out.reserve(segmented.size());
  std::size_t start = 0;
  while (true) {
    auto p = segmented.find(format::kContinue, start);
    if (p == std::string_view::npos) break;
    out.append(segmented.substr(start, p - start));
    start = p + format::kContinue.size();
  }
  out.append(segmented.substr(start));
  return out;
}

std::uint64_t count_separators(std::string_view segmented) {
  std::uint64_t n = 0;
  for (auto p = segmented.find(format::kContinue); p != std::string_view::npos;
       p = segmented.find(format::kContinue, p + format::kContinue.size())) {
    ++n;
  }
  return n;
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::TooFewSeparators: return "TooFewSeparators";
    case ViolationKind::TooManySeparators: return "TooManySeparators";
    case ViolationKind::ContentModified: return "ContentModified";
    case ViolationKind::NonPositiveDifficulty: return "NonPositiveDifficulty";
  }
  return "Unknown";
}

SegmentationReport validate_segmentation(std::string_view original, std::string_view segmented,
                                         double difficulty) {
  SegmentationReport r;
  r.separator_count = count_separators(segmented);

  const auto stripped = strip_separators(segmented);
  r.content_preserved = stripped == original;
  if (!r.content_preserved) {
    auto [a, b] = std::mismatch(stripped.begin(), stripped.end(), original.begin(), original.end());
    r.first_difference = static_cast<std::uint64_t>(a - stripped.begin());
    r.violations.push_back({ViolationKind::ContentModified,
                            "segmented text differs from the original at byte " +
                                std::to_string(r.first_difference) + " once separators are removed"});
  }

  try {
    const auto bounds = segment_bounds(difficulty);
    r.min_required = bounds.min_required;
    r.max_allowed = bounds.max_allowed;
  } catch (const Error& e) {
    r.violations.push_back({ViolationKind::NonPositiveDifficulty, e.what()});
    return r;
  }
  if (r.separator_count < r.min_required) {
    r.violations.push_back({ViolationKind::TooFewSeparators,
                            std::to_string(r.separator_count) + " separators, at least " +
                                std::to_string(r.min_required) + " required"});
  }
  if (r.separator_count > r.max_allowed) {
    r.violations.push_back({ViolationKind::TooManySeparators,
                            std::to_string(r.separator_count) + " separators, at most " +
                                std::to_string(r.max_allowed) + " allowed"});
  }
  return r;
}

}  // namespace blockcot::segment
