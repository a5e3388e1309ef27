"""Reference values for the lossy three-wave mixing integrator.

Independent check used to freeze expected test values: the coupled equations

    da1/dz = -1j*k*a3*conj(a2) - (alpha1/2)*a1
    da2/dz = -1j*k*a1*conj(a3) - (alpha2/2)*a2      (k = sqrt(eta_nor))
    da3/dz = -1j*k*a1*a2       - (alpha3/2)*a3

are integrated with scipy's DOP853 at rtol=1e-12 (no code shared with the
package integrator). Amplitudes are in W-equivalent photon-flux units, so
|a2|^2 is the pump power in W. The output-referenced internal efficiency is

    eta_int = |a3(L)|^2 / (|a1(0)|^2 * exp(-alpha1*L)).

The sweep variable is x = eta_nor * P2_out with P2_out = P2_in*exp(-alpha2*L),
which makes the curve independent of how eta_nor and power are split.
"""

import numpy as np
import mpmath as mp
from scipy.integrate import solve_ivp

ALPHAS = (0.22, 0.20, 0.12)
LENGTH_CM = 2.0
# Small enough that pump depletion cannot shift the frozen values: at 1e-3 the
# lossless curve already deviates from sin^2 by ~2e-4, at 1e-6 by ~2e-7.
SIGNAL_RATIO = 1e-6


def eta_int_of_x(x, alphas=ALPHAS, length=LENGTH_CM):
    """Output-referenced internal efficiency at x = eta_nor * P2_out."""
    a1l, a2l, a3l = alphas
    p2_in = x * np.exp(a2l * length)  # eta_nor folded in: coupling k = 1
    p1_in = SIGNAL_RATIO * p2_in

    def rhs(_, y):
        a1, a2, a3 = y
        return [
            -1j * a3 * np.conj(a2) - 0.5 * a1l * a1,
            -1j * a1 * np.conj(a3) - 0.5 * a2l * a2,
            -1j * a1 * a2 - 0.5 * a3l * a3,
        ]

    y0 = np.array([np.sqrt(p1_in), np.sqrt(p2_in), 0.0], dtype=complex)
    sol = solve_ivp(rhs, (0.0, length), y0, method="DOP853",
                    rtol=1e-12, atol=1e-16)
    a3_end = sol.y[2, -1]
    return abs(a3_end) ** 2 / (p1_in * np.exp(-a1l * length))


def golden_max(f, lo, hi, iters=90):
    invphi = (np.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def main():
    xs = np.linspace(0.05, 1.2, 24)
    vals = [eta_int_of_x(x) for x in xs]
    i = int(np.argmax(vals))
    x_peak, eta_peak = golden_max(eta_int_of_x, xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)])
    print("x_peak (eta_nor*P2_out)     :", repr(x_peak))
    print("eta_int at peak             :", repr(eta_peak))
    print("pinned eta_nor (52 mW peak) :", repr(x_peak / 0.052))

    for x in (0.1, 0.3, x_peak):
        print(f"eta_int(x={x!r}) :", repr(eta_int_of_x(x)))

    # low-conversion checks against the analytic undepleted-pump slope
    mp.mp.dps = 40
    d_alpha = mp.mpf("0.15")
    gain = (mp.e ** (d_alpha * 2) - 1) ** 2 / d_alpha ** 2
    print("\nlow-conversion gain factor  :", mp.nstr(gain, 17))
    for x in (1e-4, 1e-3):
        eta = eta_int_of_x(x)
        print(f"x={x:g}: eta_int={eta!r}  eta/(x*gain)={eta / (x * float(gain))!r}")

    # lossless sanity: quarter- and half-rotation closed-form checks
    for gl, want in ((np.pi / 2, 1.0), (np.pi, 0.0), (1.0, np.sin(1.0) ** 2)):
        x = (gl / LENGTH_CM) ** 2
        eta = eta_int_of_x(x, alphas=(0.0, 0.0, 0.0))
        print(f"lossless gL={gl:.6f}: eta={eta!r} vs sin^2={want!r}")

    # equal signal/converted attenuation with a lossless pump
    x_sym, eta_sym = golden_max(lambda x: eta_int_of_x(x, alphas=(0.2, 0.0, 0.2)), 0.3, 1.2)
    print("alpha1=alpha3, lossless pump peak:", repr(eta_sym))


if __name__ == "__main__":
    main()
