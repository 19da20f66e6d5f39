#pragma once

namespace flatfoliate {

// Building with FLATFOLIATE_DROP_ORIENTATION_SIGN produces a deliberately
// wrong variant: bordered sheets keep their raw lift order and chamber
// chains lose their permutation sign. The integrality and arbitration
// checks must reject it.
#ifdef FLATFOLIATE_DROP_ORIENTATION_SIGN
inline constexpr bool kApplyOrientationSign = false;
#else
inline constexpr bool kApplyOrientationSign = true;
#endif

}  // namespace flatfoliate
