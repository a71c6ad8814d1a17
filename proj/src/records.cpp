#include "blockcot/records.hpp"

namespace blockcot {

SampledResponse make_response(std::string problem_id, std::string_view text, bool correct,
                              const format::LengthFn& length_fn, format::ParseMode mode) {
  SampledResponse r;
  r.trace = format::parse_trace(text, mode);
  r.correct = correct;
  r.length = length_fn(text);
  r.problem_id = std::move(problem_id);
  return r;
}

}  // namespace blockcot
