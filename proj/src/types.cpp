#include "esni/types.hpp"

#include <algorithm>
#include <cctype>

namespace esni {

std::string to_string(Position p) { return std::to_string(p.x) + "," + std::to_string(p.y); }

std::string_view section_name(SectionLabel s) {
  switch (s) {
    case SectionLabel::Kitchen: return "Kitchen";
    case SectionLabel::LivingRoom: return "LivingRoom";
    case SectionLabel::Bedroom: return "Bedroom";
    case SectionLabel::Studio: return "Studio";
    case SectionLabel::Bathroom: return "Bathroom";
    case SectionLabel::Balcony: return "Balcony";
  }
  return "?";
}

char section_letter(SectionLabel s) {
  static constexpr char kLetters[] = {'K', 'L', 'B', 'S', 'T', 'A'};
  return kLetters[index_of(s)];
}

std::optional<SectionLabel> section_from_letter(char c) {
  for (auto s : kAllSections) {
    if (section_letter(s) == c) return s;
  }
  return std::nullopt;
}

std::optional<SectionLabel> parse_section(std::string_view text) {
  if (text.size() == 1) return section_from_letter(text[0]);
  auto lower = [](std::string_view v) {
    std::string out(v);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
  };
  const std::string wanted = lower(text);
  for (auto s : kAllSections) {
    if (lower(section_name(s)) == wanted) return s;
  }
  return std::nullopt;
}

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownCellChar: return "UnknownCellChar";
    case ErrorCode::ObjectOutOfBounds: return "ObjectOutOfBounds";
    case ErrorCode::ObjectOnWall: return "ObjectOnWall";
    case ErrorCode::DuplicateObjectId: return "DuplicateObjectId";
    case ErrorCode::EmptyMap: return "EmptyMap";
    case ErrorCode::MalformedPlan: return "MalformedPlan";
    case ErrorCode::MalformedKnowledge: return "MalformedKnowledge";
    case ErrorCode::NoCellInSection: return "NoCellInSection";
    case ErrorCode::StartNotWalkable: return "StartNotWalkable";
    case ErrorCode::UnknownObjectName: return "UnknownObjectName";
    case ErrorCode::NoEvidence: return "NoEvidence";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::UnlabeledPosition: return "UnlabeledPosition";
    case ErrorCode::NoVerbMatch: return "NoVerbMatch";
    case ErrorCode::MissingObject: return "MissingObject";
    case ErrorCode::MissingSection: return "MissingSection";
    case ErrorCode::AmbiguousQuery: return "AmbiguousQuery";
    case ErrorCode::ObjectNotInMemory: return "ObjectNotInMemory";
    case ErrorCode::SectionUnknown: return "SectionUnknown";
    case ErrorCode::HandsFull: return "HandsFull";
    case ErrorCode::NotAdjacent: return "NotAdjacent";
    case ErrorCode::NotCarrying: return "NotCarrying";
    case ErrorCode::NotMovable: return "NotMovable";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidPlan: return "InvalidPlan";
    case ErrorCode::UnknownSession: return "UnknownSession";
  }
  return "Unknown";
}

}  // namespace esni
