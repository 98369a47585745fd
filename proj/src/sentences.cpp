#include "rcourt/retrieval_env.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace rcourt {

namespace {

constexpr std::array<std::string_view, 20> kAbbreviations = {
    "u.s.", "u.k.", "dr.", "st.", "mr.", "mrs.", "ms.", "jr.", "sr.", "vs.",
    "e.g.", "i.e.", "inc.", "ltd.", "co.", "mt.", "no.", "prof.", "gen.", "etc."};

bool is_space(char c) { return c == ' ' || c == '\n' || c == '\t' || c == '\r'; }

// The whitespace-delimited token that ends at `end` (inclusive).
std::string_view token_ending_at(std::string_view text, std::size_t end) {
  std::size_t start = end;
  while (start > 0 && !is_space(text[start - 1])) --start;
  return text.substr(start, end - start + 1);
}

bool is_abbreviation(std::string_view token) {
  // Strip leading punctuation such as '(' or a quote.
  while (!token.empty() && !std::isalnum(static_cast<unsigned char>(token.front()))) {
    token.remove_prefix(1);
  }
  auto lowered = to_lower(token);
  if (std::find(kAbbreviations.begin(), kAbbreviations.end(), lowered) != kAbbreviations.end()) {
    return true;
  }
  // Single initial: "J." in "J. R. R. Tolkien".
  return token.size() == 2 && std::isupper(static_cast<unsigned char>(token[0]));
}

bool starts_sentence(unsigned char c) {
  return std::isupper(c) || std::isdigit(c) || c == '"' || c == '\'' || c == '(' || c == '[' ||
         c >= 0x80;
}

}  // namespace

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    auto sentence = trim(text.substr(start, end - start));
    if (!sentence.empty()) out.push_back(std::move(sentence));
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c != '.' && c != '?' && c != '!') continue;
    // Closing quotes or brackets directly after the terminator belong to the sentence.
    std::size_t end = i + 1;
    while (end < text.size() && (text[end] == '"' || text[end] == '\'' || text[end] == ')')) ++end;
    if (end >= text.size()) break;
    if (!is_space(text[end])) continue;
    std::size_t next = end;
    while (next < text.size() && is_space(text[next])) ++next;
    if (next >= text.size()) break;
    if (!starts_sentence(static_cast<unsigned char>(text[next]))) continue;
    if (c == '.' && is_abbreviation(token_ending_at(text, i))) continue;
    emit(end);
    start = next;
    i = next - 1;
  }
  emit(text.size());
  return out;
}

std::string normalize_title(std::string_view title) {
  std::string out;
  bool pending_space = false;
  for (char c : title) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace rcourt
