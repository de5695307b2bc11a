# Throwaway oracle: q_l(y) for the Gaussian product nu=(5,2,2) via direct
# high-precision inverse-Mellin contour integration.
import mpmath as mp

mp.mp.dps = 40
nu = [5, 2, 2]


def q(l, y, c=1.0):
    scale = -mp.loggamma(l + 1)
    for n in nu:
        scale -= mp.loggamma(l + 1 + n)
    sgn = 1 if l % 2 == 0 else -1

    def F(t):
        s = mp.mpf(c) + 1j * t
        lg = mp.mpf(scale)
        for n in nu:
            lg += mp.loggamma(n - s)
        val = mp.e ** (lg + s * mp.log(y))
        poly = mp.mpf(sgn)
        for i in range(1, l + 1):
            poly *= s + i
        return (val * poly).real

    # integrand decays like exp(-3*pi*|t|/2); 40 units is plenty
    I = mp.quad(F, [-45, 0, 45])
    return I / (2 * mp.pi)


for l in [0, 1, 3, 5, 7]:
    for y in ["0.125", "0.5", "4", "16", "64", "256", "512"]:
        v = q(l, mp.mpf(y))
        print(f"l={l} y={y:>6}  q={mp.nstr(v, 17)}")
