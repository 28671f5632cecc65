#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string_view>
#include <type_traits>
#include <vector>

namespace tpart {

/// Stable external identifier of a line (branch row number in the source
/// case).  Survives switching, unlike positional indices.
enum class LineId : std::int32_t {};

constexpr std::int32_t to_int(LineId id) noexcept { return static_cast<std::int32_t>(id); }
constexpr LineId line_id(std::int32_t v) noexcept { return static_cast<LineId>(v); }

enum class BusType : int { kPQ = 1, kPV = 2, kSlack = 3 };

enum class Engine { kDC, kAC };

std::string_view to_string(Engine engine);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Set of lines to switch off.  Kept sorted and free of duplicates.
class SwitchSet {
 public:
  SwitchSet() = default;
  explicit SwitchSet(std::vector<LineId> lines);

  const std::vector<LineId>& lines() const noexcept { return lines_; }
  bool empty() const noexcept { return lines_.empty(); }
  std::size_t size() const noexcept { return lines_.size(); }
  bool contains(LineId id) const;

  void insert(LineId id);
  void merge(const SwitchSet& other);

  friend bool operator==(const SwitchSet&, const SwitchSet&) = default;

 private:
  std::vector<LineId> lines_;
};

}  // namespace tpart
