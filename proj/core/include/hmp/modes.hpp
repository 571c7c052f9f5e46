#pragma once

#include <cstdint>
#include <string_view>

namespace hmp {

/// Operating mode of a single joint at an instant.
enum class JointMode : std::uint8_t { Active, Passive, Transition };

constexpr std::string_view to_string(JointMode m) noexcept {
  switch (m) {
    case JointMode::Active:
      return "active";
    case JointMode::Passive:
      return "passive";
    case JointMode::Transition:
      return "transition";
  }
  return "?";
}

}  // namespace hmp
