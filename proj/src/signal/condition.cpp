#include "itscf/signal/condition.hpp"

#include <stdexcept>

namespace itscf::signal {

char side_letter(Side s) { return s == Side::HV ? 'H' : 'L'; }
char phase_letter(Phase p) { return static_cast<char>('A' + static_cast<int>(p)); }

Side side_from_letter(char c) {
    if (c == 'H') return Side::HV;
    if (c == 'L') return Side::LV;
    throw std::invalid_argument(std::string("unknown side letter: ") + c);
}

Phase phase_from_letter(char c) {
    if (c < 'A' || c > 'C') throw std::invalid_argument(std::string("unknown phase letter: ") + c);
    return static_cast<Phase>(c - 'A');
}

bool valid_condition_id(int id) { return id >= 0 && id < kNumConditions; }

FaultCondition condition_from_id(int id) {
    if (!valid_condition_id(id)) throw std::invalid_argument("condition id out of range: " + std::to_string(id));
    FaultCondition c;
    c.side = static_cast<Side>(id / 24);
    c.phase = static_cast<Phase>((id % 24) / 8);
    c.severity = id % 8 + 1;
    return c;
}

const std::vector<FaultCondition>& all_conditions() {
    static const std::vector<FaultCondition> conds = [] {
        std::vector<FaultCondition> v;
        v.reserve(kNumConditions);
        for (int id = 0; id < kNumConditions; ++id) v.push_back(condition_from_id(id));
        return v;
    }();
    return conds;
}

int channel_index(Side side, Phase phase) {
    return static_cast<int>(side) * 3 + static_cast<int>(phase);
}

} // namespace itscf::signal
