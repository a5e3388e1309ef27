"""Reference values for Fabry-Perot fringe-contrast loss extraction.

Forward model: a cavity of length L, facet reflectivity R = ((n-1)/(n+1))^2,
single-pass internal transmission exp(-alpha*L). With zeta = R*exp(-alpha*L),
the fringe peak-to-valley contrast is b = T_min/T_max = ((1-zeta)/(1+zeta))^2,
and the inversion is alpha = (1/L)*ln(R/R_bar) with R_bar = (1-sqrt(b))/(1+sqrt(b)).

Computed in 40-digit arithmetic to freeze the worked-example values.
"""

import mpmath as mp

mp.mp.dps = 40


def forward_contrast(alpha, n, length):
    r = ((n - 1) / (n + 1)) ** 2
    zeta = r * mp.e ** (-alpha * length)
    return ((1 - zeta) / (1 + zeta)) ** 2


def invert(b, n, length):
    r = ((n - 1) / (n + 1)) ** 2
    r_bar = (1 - mp.sqrt(b)) / (1 + mp.sqrt(b))
    return mp.log(r / r_bar) / length


def main():
    n = mp.mpf("2.14")
    length = mp.mpf(2)
    alpha = mp.mpf("0.12")

    r = ((n - 1) / (n + 1)) ** 2
    r_bar = r * mp.e ** (-alpha * length)
    b = forward_contrast(alpha, n, length)
    print("R                :", mp.nstr(r, 17))
    print("R_bar            :", mp.nstr(r_bar, 17))
    print("b                :", mp.nstr(b, 17))
    print("alpha recovered  :", mp.nstr(invert(b, n, length), 17))
    print("zero-loss b      :", mp.nstr(forward_contrast(0, n, length), 17))

    # round-trip across the advertised alpha range
    worst = mp.mpf(0)
    for k in range(200):
        a = mp.mpf("0.01") + (mp.mpf(1) - mp.mpf("0.01")) * k / 199
        rec = invert(forward_contrast(a, n, length), n, length)
        worst = max(worst, abs(rec - a) / a)
    print("worst round-trip :", mp.nstr(worst, 5))


if __name__ == "__main__":
    main()
