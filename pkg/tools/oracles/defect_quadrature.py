"""Reference values for the defect-perturbed conversion-amplitude integral.

Independent check used to freeze expected test values: the amplitude

    A(q, z_end) = int_0^z_end  d_eff * sin(2*pi*z / period) * exp(i*Phi(z))
                  * exp(-2j*pi*q*z) dz

with piecewise-constant cumulative phase Phi(z) (one step per defect) is
computed two ways that share no code with the package:

1. composite 16-point Gauss-Legendre quadrature with 4 panels per carrier
   period (64 nodes per period), splitting panels at defect positions;
2. per-segment closed-form integration evaluated in 50-digit mpmath
   arithmetic.

Their agreement bounds the quadrature error; the printed mpmath values are
the ones frozen into the test suite. Lengths are in micrometers, q in inverse
micrometers.
"""

import numpy as np
import mpmath as mp

mp.mp.dps = 50

PERIOD_UM = 3.07
LENGTH_UM = 20000.0


def reduce_phase(phi):
    """Reduce a phase to the half-open interval (-pi, pi]."""
    r = mp.fmod(phi, 2 * mp.pi)
    if r <= -mp.pi:
        r += 2 * mp.pi
    elif r > mp.pi:
        r -= 2 * mp.pi
    return r


def phase_steps(widths):
    return [reduce_phase(2 * mp.pi / PERIOD_UM * (mp.mpf(w) - PERIOD_UM / 2)) for w in widths]


def segments(positions, z_end, phases):
    """Yield (a, b, cumulative_phase) with the phase constant on [a, b)."""
    breaks = [mp.mpf(0)] + [mp.mpf(x) for x in positions if 0 < x < z_end] + [mp.mpf(z_end)]
    cum = mp.mpf(0)
    out = []
    for i in range(len(breaks) - 1):
        if i > 0:
            cum += phases[i - 1]
        out.append((breaks[i], breaks[i + 1], cum))
    return out


def amp_gauss(positions, widths, q, z_end=LENGTH_UM):
    """Gauss-Legendre quadrature, 4 panels per carrier period, 16 nodes each."""
    nodes, wts = np.polynomial.legendre.leggauss(16)
    phases = [float(p) for p in phase_steps(widths)]
    total = 0.0 + 0.0j
    panel = PERIOD_UM / 4.0
    for a, b, cum in segments(positions, z_end, phases):
        a, b, cum = float(a), float(b), float(cum)
        n_panel = max(1, int(np.ceil((b - a) / panel)))
        edges = np.linspace(a, b, n_panel + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1:] - edges[:-1])
        z = mid[:, None] + half[:, None] * nodes[None, :]
        f = np.sin(2 * np.pi * z / PERIOD_UM) * np.exp(1j * cum) * np.exp(-2j * np.pi * q * z)
        total += np.sum(f * wts[None, :] * half[:, None])
    return total


def amp_mpmath(positions, widths, q, z_end=LENGTH_UM):
    """Closed-form per-segment integral in 50-digit arithmetic."""
    q = mp.mpf(q)
    k1 = 2 * mp.pi * (1 / mp.mpf(PERIOD_UM) - q)
    k2 = -2 * mp.pi * (1 / mp.mpf(PERIOD_UM) + q)

    def iexp(k, a, b):
        if abs(k) * (b - a) < mp.mpf("1e-30"):
            return b - a
        return (mp.e ** (1j * k * b) - mp.e ** (1j * k * a)) / (1j * k)

    phases = phase_steps(widths)
    total = mp.mpc(0)
    for a, b, cum in segments(positions, z_end, phases):
        seg = (iexp(k1, a, b) - iexp(k2, a, b)) / (2j)
        total += mp.e ** (1j * cum) * seg
    return total


def golden_max(f, lo, hi, iters=200):
    invphi = (mp.sqrt(5) - 1) / 2
    a, b = mp.mpf(lo), mp.mpf(hi)
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
    x = (a + b) / 2
    return x, f(x)


def scan_max(f, lo, hi, n=512):
    """Dense scan then golden refinement around the best bracket.

    The curves can be multi-lobed, so a bare golden section over the full
    window may lock onto a minor lobe; the scan picks the right bracket first.
    """
    lo, hi = mp.mpf(lo), mp.mpf(hi)
    qs = [lo + (hi - lo) * i / (n - 1) for i in range(n)]
    vals = [f(q) for q in qs]
    i = max(range(n), key=lambda k: vals[k])
    a = qs[max(i - 1, 0)]
    b = qs[min(i + 1, n - 1)]
    return golden_max(f, a, b, iters=120)


def main():
    q_nom = 1 / mp.mpf(PERIOD_UM)
    window = 10 / mp.mpf(LENGTH_UM)

    print("= phase step for a 12.3 um defect (3.07 um period) =")
    print("phi :", mp.nstr(phase_steps([12.3])[0], 17))
    print("phi(w = period):", mp.nstr(phase_steps([PERIOD_UM])[0], 17))

    print("\n= ideal (defect-free) waveguide =")
    a_nom = amp_mpmath([], [], q_nom)
    print("|A(q_nom)|^2 / (L/2)^2 :", mp.nstr(abs(a_nom) ** 2 / (LENGTH_UM / 2) ** 2, 17))

    def ideal_score(q):
        return abs(amp_mpmath([], [], q)) ** 2

    q_peak, peak = scan_max(ideal_score, q_nom - window, q_nom + window)
    print("q_peak - q_nom (1/um):", mp.nstr(q_peak - q_nom, 12))
    print("peak |A|^2 / (L/2)^2 :", mp.nstr(peak / (LENGTH_UM / 2) ** 2, 17))
    gl = abs(amp_gauss([], [], float(q_nom))) ** 2
    print("gauss vs mpmath rel  :", mp.nstr(abs(gl - abs(a_nom) ** 2) / abs(a_nom) ** 2, 5))

    print("\n= single full-period defect at the midpoint =")
    pos, wid = [LENGTH_UM / 2], [PERIOD_UM]
    r_nom = abs(amp_mpmath(pos, wid, q_nom)) ** 2 / peak
    print("relative at q_nom    :", mp.nstr(r_nom, 12))

    def defect_score(q):
        return abs(amp_mpmath(pos, wid, q)) ** 2

    q_d, pk_d = scan_max(defect_score, q_nom - window, q_nom + window)
    print("peak-in-window rel   :", mp.nstr(pk_d / peak, 17))
    print("argmax offset (1/um) :", mp.nstr(q_d - q_nom, 12))

    print("\n= three-defect fixture =")
    pos = [3000.0, 9800.0, 16400.0]
    wid = [10.0, 15.0, 7.0]
    a_fix = amp_mpmath(pos, wid, q_nom)
    print("A(q_nom) (um)        :", mp.nstr(a_fix, 17))
    print("rel at q_nom         :", mp.nstr(abs(a_fix) ** 2 / peak, 17))

    def fix_score(q):
        return abs(amp_mpmath(pos, wid, q)) ** 2

    q_f, pk_f = scan_max(fix_score, q_nom - window, q_nom + window)
    print("peak-in-window rel   :", mp.nstr(pk_f / peak, 17))
    print("argmax offset (1/um) :", mp.nstr(q_f - q_nom, 12))
    glf = amp_gauss(pos, wid, float(q_nom))
    print("gauss vs mpmath rel  :", mp.nstr(abs(glf - complex(a_fix)) / abs(a_fix), 5))

    print("\n= half-period defect leaves the curve ideal =")
    a_half = amp_mpmath([LENGTH_UM / 2], [PERIOD_UM / 2], q_nom)
    print("rel diff vs ideal    :", mp.nstr(abs(a_half - a_nom) / abs(a_nom), 5))


if __name__ == "__main__":
    main()
