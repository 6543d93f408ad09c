#pragma once

// Thin wrapper over Boost.Odeint's Dormand-Prince 5(4) pair with a step cap
// and a step budget. Failures surface as integration_error.

#include <phaselock/errors.hpp>
#include <phaselock/matrix.hpp>

#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <cstddef>
#include <string>

namespace phaselock {

struct IntegratorOptions {
    double atol = 1e-10;
    double rtol = 1e-10;
    double max_step = pi / 16.0;
    std::size_t max_steps = 2'000'000;
};

namespace detail {

template <class State>
struct step_budget_observer {
    std::size_t* steps;
    std::size_t limit;

    void operator()(const State& x, double t) const {
        for (double v : x) {
            if (!std::isfinite(v)) throw integration_error("non-finite state at t = " + std::to_string(t));
        }
        if (++*steps > limit) throw integration_error("step budget exhausted at t = " + std::to_string(t));
    }
};

}  // namespace detail

/// Integrates x' = sys(x, t) from t0 to t1 in place. Returns the number of
/// accepted steps.
template <class State, class System>
std::size_t integrate(System&& sys, State& x, double t0, double t1, const IntegratorOptions& opt) {
    namespace odeint = boost::numeric::odeint;
    using stepper_type = odeint::runge_kutta_dopri5<State>;
    auto stepper = odeint::make_controlled(opt.atol, opt.rtol, opt.max_step, stepper_type());
    std::size_t steps = 0;
    const double dt0 = std::min(opt.max_step, std::abs(t1 - t0)) / 4.0;
    if (t1 == t0) return 0;
    try {
        odeint::integrate_adaptive(stepper, sys, x, t0, t1, t1 > t0 ? dt0 : -dt0,
                                   detail::step_budget_observer<State>{&steps, opt.max_steps});
    } catch (const odeint::odeint_error& e) {
        throw integration_error(std::string("step-size control failed: ") + e.what());
    }
    return steps;
}

}  // namespace phaselock
