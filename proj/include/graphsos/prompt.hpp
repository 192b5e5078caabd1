#pragma once

#include <string>
#include <string_view>

namespace graphsos {

/// Rendered graph followed by the question.
inline std::string build_task_prompt(std::string_view serialized, std::string_view question) {
  std::string out(serialized);
  out += "\nQuestion: ";
  out += question;
  return out;
}

/// Task prompt asking for a direct answer.
inline std::string build_answer_prompt(std::string_view serialized, std::string_view question) {
  return build_task_prompt(serialized, question) + "\nAnswer:";
}

}  // namespace graphsos
