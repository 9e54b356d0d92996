#pragma once

// Regulation state straight from its definition, checking monotonicity over
// every ordered pair of minutes rather than neighbours.

#include <vector>

namespace oracle {

inline int literal_regulation_state(const std::vector<double>& deltas) {
    bool any_up = false;
    bool any_down = false;
    for (double d : deltas) {
        if (d > 1e-9) any_up = true;
        if (d < -1e-9) any_down = true;
    }
    if (!any_up && !any_down) return 0;
    if (any_up && !any_down) return 1;
    if (any_down && !any_up) return -1;

    bool increasing = true;
    bool decreasing = true;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        for (std::size_t j = i + 1; j < deltas.size(); ++j) {
            if (deltas[j] < deltas[i] - 1e-9) increasing = false;
            if (deltas[j] > deltas[i] + 1e-9) decreasing = false;
        }
    }
    if (increasing) return 1;
    if (decreasing) return -1;
    return 2;
}

}  // namespace oracle
