"""Build the joint-measurement scenario and inspect every moving part.

An entangled polarisation pair is prepared, qubit 1 passes a glass slide
whose reflectivity depends on polarisation (a semiweak X measurement), the
transmitted/reflected beam is then measured in the Y basis, and qubit 2 is
measured along a Bloch direction W.  This script prints the pieces: the
slide's Kraus operators and strength kappa, the contextual values that invert
the slide statistics back to <X>, and the simulated 8-entry outcome table.
"""

import math

import numpy as np

from jointmeas import (
    OUTCOMES,
    BlochObservable,
    epr_state,
    expectation,
    joint_distribution,
    pauli,
    slide_model,
    tensor,
)

GAMMA_DEG = 22.5
R_H, R_V = 0.1244, 0.4645  # reflectivities for H and V polarisation

rho = epr_state(math.radians(GAMMA_DEG))
slide = slide_model(R_H, R_V)
w = BlochObservable.from_degrees(90.0, 180.0)  # -X on qubit 2

print(f"source: cos({GAMMA_DEG})|HV> - sin({GAMMA_DEG})|VH>")
for name in ("X", "Y", "Z"):
    op1 = tensor(pauli(name), pauli("I"))
    print(f"  <{name} (x) 1> = {expectation(op1, rho):+.6f}")

print(f"\nslide: r_H = {R_H}, r_V = {R_V}")
print(f"  kappa (measurement strength) = {slide.kappa:.6f}")
print(f"  contextual values: xi_t = {slide.xi(+1):+.6f}, "
      f"xi_r = {slide.xi(-1):+.6f}")
m_r, m_t = slide.kraus(-1).matrix, slide.kraus(+1).matrix
print(f"  Kraus completeness |M_r^2 + M_t^2 - 1| = "
      f"{np.abs(m_r @ m_r + m_t @ m_t - np.eye(2)).max():.2e}")

# the contextual values recover <X> from the branch probabilities alone
p_t = float(np.real(np.trace(rho.matrix @ np.kron(m_t @ m_t, np.eye(2)))))
p_r = 1.0 - p_t
recovered = slide.xi(+1) * p_t + slide.xi(-1) * p_r
print(f"  xi_t p(t) + xi_r p(r) = {recovered:+.6f}  "
      f"(<X (x) 1> = {expectation(tensor(pauli('X'), pauli('I')), rho):+.6f})")

print(f"\njoint outcome table, W at theta = {w.theta_deg} deg, "
      f"phi = {w.phi_deg} deg:")
dist = joint_distribution(rho, slide, w)
print("   m   y   w      p")
for m in OUTCOMES:
    for y in OUTCOMES:
        for ww in OUTCOMES:
            print(f"  {m:+d}  {y:+d}  {ww:+d}   {dist.prob(m, y, ww):.6f}")
print(f"  total = {dist.total():.12f}")

print("\nmarginals:")
for axis in ("m", "y", "w"):
    marg = dist.marginal(axis)
    print(f"  {axis}: p(+1) = {marg[+1]:.6f}, p(-1) = {marg[-1]:.6f}")
