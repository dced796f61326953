#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace fdaer {

// The six labels used for recognition; neutral is never represented.
// Enumerators are in lexicographic order of their names.
enum class Emotion : std::uint8_t { Angry, Disgust, Fear, Happy, Sad, Surprise };

inline constexpr std::size_t kEmotionCount = 6;

inline constexpr std::array<Emotion, kEmotionCount> kAllEmotions = {
    Emotion::Angry, Emotion::Disgust, Emotion::Fear,
    Emotion::Happy, Emotion::Sad,     Emotion::Surprise};

std::string_view to_string(Emotion e);

// Case-insensitive. Returns nullopt for "neutral" and anything unrecognised.
std::optional<Emotion> parse_emotion(std::string_view text);

inline constexpr std::size_t index_of(Emotion e) { return static_cast<std::size_t>(e); }

}  // namespace fdaer
