#pragma once

// Block-structured chain-of-thought wire format.
//
//   <think><thought_segments>n</thought_segments>
//   block 1<continue_think>block 2 ... <continue_think>block n
//   </think>final response
//
// A response without a think section is a no-think answer (n = 0). The
// canonical no-think serialization keeps an empty think section so the budget
// is always machine readable:
//
//   <think><thought_segments>0</thought_segments></think>answer

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blockcot/error.hpp"

namespace blockcot::format {

inline constexpr std::string_view kThinkOpen = "<think>";
inline constexpr std::string_view kThinkClose = "</think>";
inline constexpr std::string_view kCountOpen = "<thought_segments>";
inline constexpr std::string_view kCountClose = "</thought_segments>";
inline constexpr std::string_view kContinue = "<continue_think>";

inline constexpr std::array<std::string_view, 5> kReservedTags = {
    kThinkOpen, kThinkClose, kCountOpen, kCountClose, kContinue};

enum class ParseMode {
  // Tags matched byte-exactly; count must be a plain decimal without leading zeros.
  Strict,
  // Whitespace around tags and inside the count tag is tolerated and trimmed.
  Lenient,
};

struct ParseDiagnostic {
  ErrorCode code;
  std::size_t offset;
  std::string message;

  bool operator==(const ParseDiagnostic&) const = default;
};

struct ReasoningTrace {
  std::uint64_t declared_count = 0;
  std::vector<std::string> blocks;
  std::string final_response;
  // Original text when the trace came from parse_trace.
  std::optional<std::string> raw;
  std::vector<ParseDiagnostic> diagnostics;

  std::size_t actual_count() const noexcept { return blocks.size(); }
  bool parsed_cleanly() const noexcept { return diagnostics.empty(); }

  // Structural equality; `raw` is provenance and does not participate.
  friend bool operator==(const ReasoningTrace& a, const ReasoningTrace& b) {
    return a.declared_count == b.declared_count && a.blocks == b.blocks &&
           a.final_response == b.final_response && a.diagnostics == b.diagnostics;
  }
};

struct ConsistencyReport {
  std::uint64_t declared = 0;
  std::uint64_t actual = 0;
  std::uint64_t mismatch = 0;
  bool is_consistent = true;
  std::vector<ParseDiagnostic> parse_errors;
};

// Never throws on malformed input; problems are recorded in trace.diagnostics.
ReasoningTrace parse_trace(std::string_view text, ParseMode mode = ParseMode::Strict);

// Throws Error{ReservedTagInBody} if any block or the final response carries a
// reserved tag.
std::string serialize_trace(const ReasoningTrace& trace);

ConsistencyReport validate_consistency(const ReasoningTrace& trace);

// Position of the first reserved tag in `text`, if any.
std::optional<std::size_t> find_reserved_tag(std::string_view text);

// A trace is canonical when serialize_trace(t) parses back to t: no reserved
// tags in any body and no lone empty block (which would serialize exactly like
// zero blocks).
bool is_canonical(const ReasoningTrace& trace);

// ---------------------------------------------------------------------------
// Length measurement

using LengthFn = std::function<std::uint64_t(std::string_view)>;

enum class LengthUnit { WhitespaceTokens, Characters };

// Number of maximal runs of non-whitespace bytes.
std::uint64_t whitespace_token_count(std::string_view text);

// Number of UTF-8 code points (continuation bytes are not counted).
std::uint64_t char_count(std::string_view text);

LengthFn length_fn_for(LengthUnit unit);

std::vector<std::uint64_t> block_lengths(const ReasoningTrace& trace,
                                         const LengthFn& length_fn = whitespace_token_count);

// Full response text: the raw input when present, else the canonical form.
std::string response_text(const ReasoningTrace& trace);

}  // namespace blockcot::format
