#pragma once

#include <doctest.h>

// doctest's Approx defaults to scale = 1.0, which silently turns relative
// comparisons of values far from unity into no-ops. All numeric checks in
// this suite go through this pure-relative form instead.
inline doctest::Approx approx_rel(double value) {
    return doctest::Approx(value).scale(0.0);
}
