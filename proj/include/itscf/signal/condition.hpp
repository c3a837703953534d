#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace itscf::signal {

enum class Side : uint8_t { HV = 0, LV = 1 };
enum class Phase : uint8_t { A = 0, B = 1, C = 2 };

inline constexpr int kNumSeverities = 8;
inline constexpr int kNumConditions = 48;
inline constexpr int kNumClasses = 6;
inline constexpr int kNumChannels = 6;

// Class / channel order is HA, HB, HC, LA, LB, LC throughout.
inline constexpr std::array<const char*, kNumClasses> kClassNames = {"HA", "HB", "HC",
                                                                     "LA", "LB", "LC"};

// One of the 48 winding-fault conditions: (side, phase, severity 1..8).
struct FaultCondition {
    Side side{Side::HV};
    Phase phase{Phase::A};
    int severity = 1; // 1..8

    int condition_id() const {
        return static_cast<int>(side) * 24 + static_cast<int>(phase) * 8 + (severity - 1);
    }
    int label() const { return static_cast<int>(side) * 3 + static_cast<int>(phase); }
    std::string label_name() const { return kClassNames[label()]; }

    bool operator==(const FaultCondition&) const = default;
};

char side_letter(Side s);
char phase_letter(Phase p);
Side side_from_letter(char c);
Phase phase_from_letter(char c);

bool valid_condition_id(int id);
FaultCondition condition_from_id(int id);

// All 48 conditions in condition_id order.
const std::vector<FaultCondition>& all_conditions();

// Label index of the channel a (side, phase) pair maps to.
int channel_index(Side side, Phase phase);

} // namespace itscf::signal
