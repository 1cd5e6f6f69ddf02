#ifndef LORENZ_DYNAMICS_HPP
#define LORENZ_DYNAMICS_HPP

#include <cstddef>
#include <vector>

namespace lorenz {

struct SystemParams {
    double sigma = 10.0;
    double rho = 28.0;
    double beta = 8.0 / 3.0;
};

struct State {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

struct Derivative {
    double dx = 0.0;
    double dy = 0.0;
    double dz = 0.0;
};

struct Trajectory {
    SystemParams params;
    double dt = 0.01;
    State initial;
    std::vector<State> states;
    std::vector<Derivative> derivatives;  // always rhs(states[i], params)

    std::size_t size() const { return states.size(); }
};

// The Lorenz63 vector field.
Derivative rhs(const State& s, const SystemParams& p);

// Integrates the Lorenz system with an embedded Dormand-Prince RK4(5)
// scheme (adaptive internal steps, abs/rel tol 1e-9) and returns states
// sampled exactly on the uniform dt grid: states[i] ~ solution at t = i*dt,
// states[0] == initial. Throws NonFiniteState if the solution blows up.
Trajectory integrate(const State& initial, const SystemParams& p, double dt,
                     std::size_t n_points);

// The three equilibria of the system for the given parameters (origin and
// the two wing centers). Used mostly by tests.
std::vector<State> fixed_points(const SystemParams& p);

}  // namespace lorenz

#endif
