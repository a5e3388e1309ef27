"""Reference values for the pump-induced noise integrals and the ENR sweep.

Independent check used to freeze expected test values. The loss-corrected
noise density (out-referenced pump power P, depth u measured from the output
facet) is

    N(P)/a = P * int_0^L exp(a_p*u) * [ exp(-a_d*u)
             - eta_max * sin^2( u * sqrt(eta_nor * P * exp(a_p*u)) ) ] du

computed here with mpmath's adaptive quadrature at 30 significant digits.
The lossless form has the closed antiderivative

    N(P)/a = P * [ L - eta_max * (L/2 - sin(2kL)/(4k)) ],  k = sqrt(eta_nor*P).

Also computed: the location of the flattest noise growth (argmin of dN/dP)
for the lossy and lossless models, and the ENR sweep that pairs the noise
with the integrator's external efficiency on a 2 mW grid.
"""

import numpy as np
import mpmath as mp

from cme_reference import eta_int_of_x

mp.mp.dps = 30

LENGTH_CM = mp.mpf(2)
ALPHA_PUMP = mp.mpf("0.20")
ALPHA_DFG = mp.mpf("0.12")
ETA_NOR = mp.mpf("9.689147486591956")   # pinned so the efficiency peak sits at 52 mW
ETA_MAX = mp.mpf("0.93")
BUDGET = 0.49 * 0.80 * 0.79


def noise_lossy_per_a(p_w, eta_max=ETA_MAX):
    p = mp.mpf(p_w)

    def f(u):
        k = mp.sqrt(ETA_NOR * p * mp.e ** (ALPHA_PUMP * u))
        return mp.e ** (ALPHA_PUMP * u) * (
            mp.e ** (-ALPHA_DFG * u) - eta_max * mp.sin(u * k) ** 2
        )

    return p * mp.quad(f, [0, LENGTH_CM / 2, LENGTH_CM])


def noise_lossless_per_a(p_w, eta_max=ETA_MAX):
    p = mp.mpf(p_w)
    if p == 0:
        return mp.mpf(0)
    k = mp.sqrt(ETA_NOR * p)
    return p * (LENGTH_CM - eta_max * (LENGTH_CM / 2 - mp.sin(2 * k * LENGTH_CM) / (4 * k)))


def argmin_slope(noise_fn, grid_w):
    vals = [noise_fn(p) for p in grid_w]
    slopes = [(vals[i + 1] - vals[i - 1]) / (grid_w[i + 1] - grid_w[i - 1])
              for i in range(1, len(grid_w) - 1)]
    i = min(range(len(slopes)), key=lambda k: slopes[k])
    return grid_w[i + 1], slopes[i]


def main():
    print("= small-P limit of N/(a*P) =")
    lim = (mp.e ** ((ALPHA_PUMP - ALPHA_DFG) * LENGTH_CM) - 1) / (ALPHA_PUMP - ALPHA_DFG)
    print("(e^{(a_p-a_d)L}-1)/(a_p-a_d) :", mp.nstr(lim, 17))
    print("N/(aP) at P=1e-8 W           :", mp.nstr(noise_lossy_per_a(1e-8) / mp.mpf(1e-8), 12))

    print("\n= lossy N/a at pinned parameters (eta_max = 0.93) =")
    for p_mw in (5, 20, 52, 80):
        v = noise_lossy_per_a(p_mw / 1000.0)
        print(f"P = {p_mw:3d} mW : N/a = {mp.nstr(v, 17)}  (N/(aP) = {mp.nstr(v / mp.mpf(p_mw / 1000.0), 12)})")

    print("\n= lossless N/a (same eta_nor, eta_max) =")
    for p_mw in (5, 20, 52):
        print(f"P = {p_mw:3d} mW : N/a = {mp.nstr(noise_lossless_per_a(p_mw / 1000.0), 17)}")

    grid = [mp.mpf(m) / 1000 for m in range(2, 81, 2)]
    print("\n= flattest noise growth (argmin dN/dP), 2 mW grid =")
    p_l, s_l = argmin_slope(noise_lossy_per_a, grid)
    print("lossy  eta_max=0.93 :", mp.nstr(p_l * 1000, 6), "mW, min slope/a =", mp.nstr(s_l, 8))
    p_l1, s_l1 = argmin_slope(lambda p: noise_lossy_per_a(p, eta_max=mp.mpf(1)), grid)
    print("lossy  eta_max=1.0  :", mp.nstr(p_l1 * 1000, 6), "mW, min slope/a =", mp.nstr(s_l1, 8))
    p_0, s_0 = argmin_slope(noise_lossless_per_a, grid)
    print("lossless eta_max=0.93:", mp.nstr(p_0 * 1000, 6), "mW, min slope/a =", mp.nstr(s_0, 8))

    print("\n= ENR sweep on the 2 mW grid (out-referenced pump power) =")
    eta_ext = [BUDGET * eta_int_of_x(float(ETA_NOR) * float(p)) for p in grid]
    enr = [e / float(noise_lossy_per_a(p)) for e, p in zip(eta_ext, grid)]
    i_eta = int(np.argmax(eta_ext))
    i_enr = int(np.argmax(enr))
    print("argmax eta_ext:", float(grid[i_eta] * 1000), "mW  peak eta_ext =", eta_ext[i_eta])
    print("argmax ENR    :", float(grid[i_enr] * 1000), "mW")
    print("step gap      :", abs(i_eta - i_enr))
    print("ENR at eta-peak / max ENR :", enr[i_eta] / enr[i_enr])


if __name__ == "__main__":
    main()
