# Throwaway: compare C++ kernel_K0 grid against mpmath contour oracle.
import subprocess

import mpmath as mp

mp.mp.dps = 30
nu = [2, 1]
n_t = 4


def k0(y, c=0.5):
    scale = -mp.loggamma(n_t)
    for n in nu:
        scale -= mp.loggamma(1 + n)

    def F(t):
        s = mp.mpf(c) + 1j * t
        lg = mp.mpf(scale)
        for n in nu:
            lg += mp.loggamma(n - s)
        poly = mp.mpf(1)
        for i in range(2, n_t + 1):
            poly *= s + i
        return (mp.e ** (lg + s * mp.log(y)) * poly).real

    return mp.quad(F, [-60, 0, 60]) / (2 * mp.pi)


out = subprocess.check_output(["./build/qscan"], text=True)
for line in out.strip().splitlines():
    ys, vs = line.split()
    y = mp.mpf(ys)
    got = mp.mpf(vs)
    want = k0(y)
    rel = abs(got - want) / max(abs(want), mp.mpf("1e-300"))
    flag = "  <-- BAD" if rel > mp.mpf("1e-8") else ""
    print(f"y={float(y):9.4f}  got={float(got): .12e}  want={float(want): .12e}  rel={float(rel):.2e}{flag}")
