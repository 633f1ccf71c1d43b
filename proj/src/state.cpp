#include "vfm/state.hpp"

#include <cmath>

namespace vfm {

bool ObjectState::finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(psi) && std::isfinite(vx) &&
           std::isfinite(vy) && std::isfinite(psi_dot);
}

PolarView polar_view(const ObjectState& state, double origin_epsilon) {
    PolarView p;
    p.r = state.r();
    if (p.r <= origin_epsilon)
        throw Error(ErrorCode::OriginSingularity, "phi undefined at r <= origin epsilon");
    p.phi = std::atan2(state.y, state.x);
    p.r_dot = (state.x * state.vx + state.y * state.vy) / p.r;
    p.phi_dot = (state.x * state.vy - state.y * state.vx) / (p.r * p.r);
    return p;
}

}  // namespace vfm
