#pragma once

#include <cctype>
#include <map>
#include <string>

namespace abortd::names {

// mediumBowl3 -> medium_bowl3. Underscores appear at lower/digit-to-upper
// boundaries; digits stay attached to their word. Idempotent on names that
// are already snake_case.
inline std::string to_snake(const std::string& name) {
  std::string out;
  out.reserve(name.size() + 4);
  char prev = 0;
  for (char ch : name) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (std::isupper(c) && (std::islower(static_cast<unsigned char>(prev)) ||
                            std::isdigit(static_cast<unsigned char>(prev))))
      out.push_back('_');
    out.push_back(static_cast<char>(std::tolower(c)));
    prev = ch;
  }
  return out;
}

// Words form for ontology label matching: camelCase and snake_case both
// normalize to lower-case space-separated words.
inline std::string to_words(const std::string& name) {
  std::string snake = to_snake(name);
  for (char& c : snake)
    if (c == '_') c = ' ';
  return snake;
}

// Remembers the original snapshot spelling of every normalized name so plan
// arguments can be rendered back.
class NameMap {
 public:
  // Returns false on collision (two originals normalizing to one name).
  bool insert(const std::string& original) {
    return map_.emplace(to_snake(original), original).second;
  }

  const std::string& render(const std::string& normalized) const {
    auto it = map_.find(normalized);
    return it == map_.end() ? normalized : it->second;
  }

  const std::map<std::string, std::string>& entries() const { return map_; }

 private:
  std::map<std::string, std::string> map_;
};

}  // namespace abortd::names
