#include "blockcot/cot_format.hpp"

#include <charconv>

namespace blockcot::format {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

std::size_t skip_space(std::string_view text, std::size_t pos) {
  while (pos < text.size() && is_space(text[pos])) ++pos;
  return pos;
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

bool all_space(std::string_view s) { return trim(s).empty(); }

struct TagHit {
  std::size_t offset;
  std::string_view tag;
};

std::optional<TagHit> first_tag(std::string_view text,
                                 std::initializer_list<std::string_view> tags) {
  std::optional<TagHit> best;
  for (auto tag : tags) {
    auto p = text.find(tag);
    if (p != std::string_view::npos && (!best || p < best->offset)) best = TagHit{p, tag};
  }
  return best;
}

std::optional<std::uint64_t> parse_count(std::string_view body, ParseMode mode) {
  if (mode == ParseMode::Lenient) body = trim(body);
  if (body.empty()) return std::nullopt;
  for (char c : body) {
    if (c < '0' || c > '9') return std::nullopt;
  }
  // Canonical form has no leading zeros, otherwise "02" would not round-trip.
  if (mode == ParseMode::Strict && body.size() > 1 && body.front() == '0') return std::nullopt;
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
  if (ec != std::errc{} || ptr != body.data() + body.size()) return std::nullopt;
  return value;
}

void split_blocks(std::string_view body, ParseMode mode, std::vector<std::string>& out) {
  if (mode == ParseMode::Lenient ? all_space(body) : body.empty()) return;
  std::size_t start = 0;
  while (true) {
    auto p = body.find(kContinue, start);
    auto piece = body.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start);
    out.emplace_back(mode == ParseMode::Lenient ? trim(piece) : piece);
    if (p == std::string_view::npos) break;
    start = p + kContinue.size();
  }
}

}  // namespace

std::optional<std::size_t> find_reserved_tag(std::string_view text) {
  auto hit = first_tag(text, {kThinkOpen, kThinkClose, kCountOpen, kCountClose, kContinue});
  if (!hit) return std::nullopt;
  return hit->offset;
}

ReasoningTrace parse_trace(std::string_view text, ParseMode mode) {
  ReasoningTrace trace;
  trace.raw = std::string(text);
  auto diag = [&](ErrorCode code, std::size_t offset, std::string msg) {
    trace.diagnostics.push_back({code, offset, std::move(msg)});
  };

  const auto think = text.find(kThinkOpen);
  if (think == std::string_view::npos) {
    // Bare answer: no-think.
    trace.final_response = std::string(text);
    if (auto hit = first_tag(text, {kThinkClose, kCountOpen, kCountClose, kContinue})) {
      diag(ErrorCode::MalformedTag, hit->offset,
           "stray " + std::string(hit->tag) + " outside a think section");
    }
    return trace;
  }

  const auto prefix = text.substr(0, think);
  if (mode == ParseMode::Strict ? !prefix.empty() : !all_space(prefix)) {
    diag(ErrorCode::MalformedTag, 0, "text before <think>");
  }

  std::size_t cur = think + kThinkOpen.size();
  if (mode == ParseMode::Lenient) cur = skip_space(text, cur);

  if (text.substr(cur).starts_with(kCountOpen)) {
    const std::size_t body_start = cur + kCountOpen.size();
    const auto close = text.find(kCountClose, body_start);
    if (close == std::string_view::npos) {
      diag(ErrorCode::MalformedTag, cur, "unclosed <thought_segments>");
      return trace;
    }
    const auto body = text.substr(body_start, close - body_start);
    if (auto n = parse_count(body, mode)) {
      trace.declared_count = *n;
    } else {
      diag(ErrorCode::NonIntegerCount, body_start,
           "block count '" + std::string(body) + "' is not a non-negative base-10 integer");
    }
    cur = close + kCountClose.size();
  } else {
    diag(ErrorCode::MalformedTag, cur, "missing <thought_segments> after <think>");
  }

  std::string_view body;
  const auto close_think = text.find(kThinkClose, cur);
  if (close_think == std::string_view::npos) {
    diag(ErrorCode::MalformedTag, think, "unclosed <think>");
    body = text.substr(cur);
  } else {
    body = text.substr(cur, close_think - cur);
    auto tail = text.substr(close_think + kThinkClose.size());
    if (mode == ParseMode::Lenient) tail = tail.substr(skip_space(tail, 0));
    trace.final_response = std::string(tail);
    if (auto hit = first_tag(tail, {kThinkOpen, kThinkClose, kCountOpen, kCountClose, kContinue})) {
      diag(ErrorCode::MalformedTag, close_think + kThinkClose.size() + hit->offset,
           std::string(hit->tag) + " after </think>");
    }
  }

  if (auto hit = first_tag(body, {kThinkOpen, kCountOpen, kCountClose})) {
    diag(ErrorCode::MalformedTag, cur + hit->offset,
         "nested " + std::string(hit->tag) + " inside think section");
  }
  split_blocks(body, mode, trace.blocks);
  return trace;
}

std::string serialize_trace(const ReasoningTrace& trace) {
  std::size_t total = kThinkOpen.size() + kCountOpen.size() + 20 + kCountClose.size() +
                      kThinkClose.size() + trace.final_response.size();
  for (std::size_t i = 0; i < trace.blocks.size(); ++i) {
    if (find_reserved_tag(trace.blocks[i])) {
      throw Error(ErrorCode::ReservedTagInBody,
                  "block " + std::to_string(i + 1) + " contains a reserved tag");
    }
    total += trace.blocks[i].size() + kContinue.size();
  }
  if (find_reserved_tag(trace.final_response)) {
    throw Error(ErrorCode::ReservedTagInBody, "final response contains a reserved tag");
  }

  std::string out;
  out.reserve(total);
  out.append(kThinkOpen).append(kCountOpen);
  out.append(std::to_string(trace.declared_count));
  out.append(kCountClose);
  for (std::size_t i = 0; i < trace.blocks.size(); ++i) {
    if (i > 0) out.append(kContinue);
    out.append(trace.blocks[i]);
  }
  out.append(kThinkClose).append(trace.final_response);
  return out;
}

ConsistencyReport validate_consistency(const ReasoningTrace& trace) {
  ConsistencyReport r;
  r.declared = trace.declared_count;
  r.actual = trace.actual_count();
  r.mismatch = r.declared > r.actual ? r.declared - r.actual : r.actual - r.declared;
  r.parse_errors = trace.diagnostics;
  r.is_consistent = r.mismatch == 0 && r.parse_errors.empty();
  return r;
}

bool is_canonical(const ReasoningTrace& trace) {
  if (!trace.diagnostics.empty()) return false;
  if (trace.blocks.size() == 1 && trace.blocks.front().empty()) return false;
  for (const auto& b : trace.blocks) {
    if (find_reserved_tag(b)) return false;
  }
  return !find_reserved_tag(trace.final_response);
}

std::uint64_t whitespace_token_count(std::string_view text) {
  std::uint64_t n = 0;
  bool in_token = false;
  for (char c : text) {
    if (is_space(c)) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++n;
    }
  }
  return n;
}

std::uint64_t char_count(std::string_view text) {
  std::uint64_t n = 0;
  for (unsigned char c : text) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

LengthFn length_fn_for(LengthUnit unit) {
  switch (unit) {
    case LengthUnit::Characters: return char_count;
    case LengthUnit::WhitespaceTokens: break;
  }
  return whitespace_token_count;
}

std::vector<std::uint64_t> block_lengths(const ReasoningTrace& trace, const LengthFn& length_fn) {
  std::vector<std::uint64_t> out;
  out.reserve(trace.blocks.size());
  for (const auto& b : trace.blocks) out.push_back(length_fn(b));
  return out;
}

std::string response_text(const ReasoningTrace& trace) {
  if (trace.raw) return *trace.raw;
  return serialize_trace(trace);
}

}  // namespace blockcot::format
