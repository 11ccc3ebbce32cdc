#pragma once

#include "phyp/boundary.hpp"
#include "phyp/system_model.hpp"

#include <vector>

namespace phyp {

/// One term a sin(2 pi k t / T + phase) of the forcing of one component (0-based).
struct Harmonic
{
    int component = 0;
    int multiple = 1;
    double amplitude = 0.0;
    double phase = 0.0;
};

/// Signals h, h' and h'' built from a list of harmonics.
void set_harmonic_forcing(BoundarySpec& bspec, int n, double period, const std::vector<Harmonic>& terms);

/// Feedback u_in = h + gain * sum(out) + quadratic * sum(out^2) at each end.
BoundarySpec feedback_boundary(int n, int m, double period, double gain_left, double gain_right, double quadratic,
                               const std::vector<Harmonic>& terms);

/// u_t + speed u_x = -damping u (one rightward family).
SystemSpec linear_damped_scalar(double speed = 1.0, double damping = 0.5, double L = 1.0, double radius = 0.1);

/// Two decoupled transports with speeds -speed and +speed, no source.
SystemSpec linear_reflect_2x2(double speed = 1.0, double L = 1.0, double radius = 0.1);

/// Isentropic Euler with linear friction, written in Riemann invariants
/// measured from the state at rest with sound speed `sound_speed`.
SystemSpec quasilinear_euler_damping(double gamma = 1.4, double damping = 0.2, double sound_speed = 1.25,
                                     double L = 1.0, double radius = 0.1);

} // namespace phyp
