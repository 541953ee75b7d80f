/**
 * @file strategy.hpp
 * @brief Selling-strategy labels shared by the discrete and continuous solvers.
 *
 * The labels follow the regime ordering in the belief dimension,
 * SA -> PC -> (IR) -> FC -> NB:
 *   - SA: sell only the safe arm, no learning.
 *   - PC: partial coverage — safe arm by default, risky arm plus a report for
 *         agents whose bonus covers their reporting cost.
 *   - IR: immediate revelation — bonus pinned at the cost cap so the next
 *         agent reports with certainty.
 *   - FC: full coverage — risky arm for everyone, bonus-paid reports from
 *         low-cost agents.
 *   - NB: sell the risky arm with no bonus, no learning.
 */
#pragma once

#include <string>

#include "bandit_bonus/errors.hpp"

namespace bb {

enum class Strategy { SA, PC, IR, FC, NB };

inline const char* to_string(Strategy s) {
    switch (s) {
        case Strategy::SA: return "SA";
        case Strategy::PC: return "PC";
        case Strategy::IR: return "IR";
        case Strategy::FC: return "FC";
        case Strategy::NB: return "NB";
    }
    return "??";
}

inline Strategy strategy_from_string(const std::string& name) {
    if (name == "SA" || name == "sa") return Strategy::SA;
    if (name == "PC" || name == "pc") return Strategy::PC;
    if (name == "IR" || name == "ir") return Strategy::IR;
    if (name == "FC" || name == "fc") return Strategy::FC;
    if (name == "NB" || name == "nb") return Strategy::NB;
    throw ConfigError("unknown strategy label: " + name);
}

} // namespace bb
