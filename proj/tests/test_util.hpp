#pragma once

#include <utility>
#include <vector>

#include "lagcoup/rng.hpp"

namespace lagcoup::testutil {

// Degenerate kernel: every state maps to `target`. The first comparison of the
// joint phase already couples when the initial distribution is a point mass.
struct ConstantKernel {
    using state_type = long;
    long target = 0;
    state_type marginal_step(const state_type&, RngStream&) const { return target; }
    std::pair<state_type, state_type> joint_step(const state_type&, const state_type&,
                                                 RngStream&) const {
        return {target, target};
    }
};

// Joint step that forces both chains onto one shared draw; the marginal is the
// same state-independent law, so faithfulness holds.
struct IdentityCouplingKernel {
    using state_type = long;
    long value = 7;
    state_type marginal_step(const state_type&, RngStream&) const { return value; }
    std::pair<state_type, state_type> joint_step(const state_type&, const state_type&,
                                                 RngStream&) const {
        return {value, value};
    }
};

// Never meets: exercises the sweep cap.
struct NeverMeetKernel {
    using state_type = long;
    state_type marginal_step(const state_type& s, RngStream&) const { return s; }
    std::pair<state_type, state_type> joint_step(const state_type&, const state_type&,
                                                 RngStream&) const {
        return {0, 1};
    }
};

} // namespace lagcoup::testutil
