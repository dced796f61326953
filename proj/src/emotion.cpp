#include "fdaer/emotion.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace fdaer {

std::string_view to_string(Emotion e) {
  switch (e) {
    case Emotion::Angry: return "angry";
    case Emotion::Disgust: return "disgust";
    case Emotion::Fear: return "fear";
    case Emotion::Happy: return "happy";
    case Emotion::Sad: return "sad";
    case Emotion::Surprise: return "surprise";
  }
  return "?";
}

std::optional<Emotion> parse_emotion(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (Emotion e : kAllEmotions) {
    if (lower == to_string(e)) return e;
  }
  return std::nullopt;
}

}  // namespace fdaer
