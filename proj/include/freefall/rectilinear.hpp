#pragma once

namespace freefall::rectilinear {

/// Straight-line two-body fall from rest: separation r(u) = a(1 + cos u)
/// with a = r0/2, released at u = 0 and colliding at u = pi.
struct Solution {
  double initial_separation = 0.0;
  double mu = 0.0;          ///< gravitational parameter G(m1+m2)
  double semi_major = 0.0;  ///< a = r0/2
  double time_unit = 0.0;   ///< n = sqrt(a^3/mu); t = n(u + sin u)
  double collapse_time = 0.0;
};

Solution make_solution(double initial_separation, double mu);

struct Point {
  double u = 0.0;
  double separation = 0.0;
  double radial_velocity = 0.0;  ///< signed; negative while falling; 0 at the collision flag
  double t = 0.0;
  bool collision = false;        ///< true at u = pi where the speed diverges
};

/// Evaluate the fall at parameter u in [0, pi].
Point eval(const Solution& sol, double u);

/// Invert t = n(u + sin u) on [0, collapse_time]; monotone bisection
/// polished to ~1e-14 of a period.
double anomaly_from_time(const Solution& sol, double t);

/// Time from rest to collision for two point masses released at
/// separation r0: pi * sqrt((r0/2)^3 / mu).
double collapse_time(double initial_separation, double mu);

/// Leading-order separation a short interval dt before the collision:
/// r ~ (9 mu / 2)^(1/3) dt^(2/3).
double near_collision_separation(double mu, double dt_before_collision);

/// Leading-order speed a short interval dt before the collision:
/// |v| ~ (4 mu / (3 dt))^(1/3), the time derivative of the law above.
double near_collision_speed(double mu, double dt_before_collision);

/// Exact product r v^2 evaluated dt before the collision of `sol`; tends
/// to 2 mu as dt -> 0, from below, with a relative deficit ~ eps^2 / 4
/// where dt = time_unit * (eps - sin eps).
double approach_invariant(const Solution& sol, double dt_before_collision);

/// Analytic fundamental solutions of the linearised motion about the
/// straight-line fall, as functions of u:
///   along the line:   s1(u) = 2 tan(u/2)
///   transverse:       p1(u) = sin u,   p2(u) = (1 + cos u)/2
struct FundamentalBasis {
  double along_1 = 0.0;        ///< 2 tan(u/2)
  double transverse_1 = 0.0;   ///< sin u
  double transverse_2 = 0.0;   ///< (1 + cos u)/2
};
FundamentalBasis fundamental_basis(double u);

/// State of the linearised system: displacement/derivative along the line
/// (xi) and transverse to it (eta), with ' = d/du.
struct VariationalState {
  double xi = 0.0;
  double xi_prime = 0.0;
  double eta = 0.0;
  double eta_prime = 0.0;
};

/// Integrate the linearised system
///   xi''  + tan(u/2) xi'  - xi  / cos^2(u/2)     = 0
///   eta'' + tan(u/2) eta' + eta / (2 cos^2(u/2)) = 0
/// from u0 to u1 with relative tolerance tol.
VariationalState integrate_variational(const VariationalState& init, double u0, double u1,
                                       double tol = 1e-13);

/// The second independent along-the-line solution, fixed by value 1 and
/// slope 0 at u = 0 (it has no elementary closed form).
double second_along_solution(double u, double tol = 1e-13);

/// Wronskian of the along-the-line pair under the normalisation above:
/// W(u) = -cos^2(u/2) (equals -1 at u = 0).
double along_wronskian(double u);

}  // namespace freefall::rectilinear
