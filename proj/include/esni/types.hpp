#pragma once

#include <array>
#include <compare>
#include <cstdlib>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace esni {

// Grid coordinate. x grows rightward, y grows downward, origin top-left.
struct Position {
  int x = 0;
  int y = 0;

  friend bool operator==(const Position&, const Position&) = default;
  // Row-major (y, x) order, used for every deterministic tie-break.
  friend std::strong_ordering operator<=>(const Position& a, const Position& b) {
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.x <=> b.x;
  }
};

inline int manhattan(Position a, Position b) {
  return std::abs(a.x - b.x) + std::abs(a.y - b.y);
}

inline long squared_distance(Position a, Position b) {
  const long dx = a.x - b.x;
  const long dy = a.y - b.y;
  return dx * dx + dy * dy;
}

std::string to_string(Position p);

// Declaration order is the tie-break order used by segmentation and planning.
enum class SectionLabel : std::uint8_t { Kitchen, LivingRoom, Bedroom, Studio, Bathroom, Balcony };

inline constexpr std::size_t kSectionCount = 6;
inline constexpr std::array<SectionLabel, kSectionCount> kAllSections = {
    SectionLabel::Kitchen, SectionLabel::LivingRoom, SectionLabel::Bedroom,
    SectionLabel::Studio,  SectionLabel::Bathroom,   SectionLabel::Balcony};

inline constexpr std::size_t index_of(SectionLabel s) { return static_cast<std::size_t>(s); }

std::string_view section_name(SectionLabel s);
char section_letter(SectionLabel s);
std::optional<SectionLabel> section_from_letter(char c);
// Accepts the canonical name ("LivingRoom"), case-insensitively, or the single-letter code.
std::optional<SectionLabel> parse_section(std::string_view text);

enum class ErrorCode {
  UnknownCellChar,
  ObjectOutOfBounds,
  ObjectOnWall,
  DuplicateObjectId,
  EmptyMap,
  MalformedPlan,
  MalformedKnowledge,
  NoCellInSection,
  StartNotWalkable,
  UnknownObjectName,
  NoEvidence,
  Unreachable,
  UnlabeledPosition,
  NoVerbMatch,
  MissingObject,
  MissingSection,
  AmbiguousQuery,
  ObjectNotInMemory,
  SectionUnknown,
  HandsFull,
  NotAdjacent,
  NotCarrying,
  NotMovable,
  InvalidConfig,
  InvalidPlan,
  UnknownSession,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace esni

template <>
struct std::hash<esni::Position> {
  std::size_t operator()(const esni::Position& p) const noexcept {
    return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.x)) << 32) |
                                      static_cast<std::uint32_t>(p.y));
  }
};
