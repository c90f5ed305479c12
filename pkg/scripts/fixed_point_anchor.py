"""Independent quadrature for the truncated fixed-point law e^{-ell*} / K(X) on [1, X].

Uses mpmath at 30 digits with its own iterated-log length, integrating in x
with breakpoints at the e-tower values. Prints K(X), the length/entropy
excess and the closed form 2 + ln ln ln X (valid for e^e <= X <= e^(e^e)).
The printed values are frozen into tests/test_mixedlaw.py and
tests/test_acceptance.py.
"""

import mpmath as mp

mp.mp.dps = 30


def ell(x):
    total = mp.mpf(0)
    while x > 1:
        x = mp.log(x)
        total += x
    return total


def report(X):
    X = mp.mpf(X)
    edges = [mp.mpf(1), mp.e, mp.exp(mp.e), mp.exp(mp.exp(mp.e))]
    pts = [t for t in edges if t < X] + [X]
    K = mp.quad(lambda x: mp.exp(-ell(x)), pts)
    E = mp.quad(lambda x: ell(x) * mp.exp(-ell(x)), pts) / K
    H = mp.quad(lambda x: -(mp.exp(-ell(x)) / K) * mp.log(mp.exp(-ell(x)) / K), pts)
    return K, E, H


if __name__ == "__main__":
    for X in (10**2, 10**4, 10**6):
        K, E, H = report(X)
        closed = 2 + mp.log(mp.log(mp.log(X)))
        print(f"X=1e{len(str(X)) - 1}: K={mp.nstr(K, 20)} closed={mp.nstr(closed, 20)} "
              f"excess={mp.nstr(E - H, 20)} -lnK={mp.nstr(-mp.log(K), 20)}")
