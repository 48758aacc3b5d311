"""Independent reference values for the unit tests.

Evaluates the defining integrals of the overlap functionals by adaptive
quadrature (mpmath) for the unit-width Gaussian PSF and then the
downstream Fisher-information expressions. Run with `python3`.
"""
import mpmath as mp

mp.mp.dps = 30

def psf(x):
    return (2 * mp.pi) ** mp.mpf(-0.25) * mp.e ** (-x * x / 4)

def dpsf(x):
    return -x / 2 * psf(x)

def delta(s):
    return mp.quad(lambda x: psf(x + s / 2) * psf(x - s / 2), [-mp.inf, 0, mp.inf])

def beta(s):
    return mp.quad(lambda x: dpsf(x + s / 2) * dpsf(x - s / 2), [-mp.inf, 0, mp.inf])

dk2 = mp.quad(lambda x: dpsf(x) ** 2, [-mp.inf, 0, mp.inf])

def gamma(s):
    return mp.diff(delta, s)

def report(s, eta):
    d, g, b = delta(s), gamma(s), beta(s)
    ep = dk2 - b - g * g / (1 + d)
    em = dk2 + b - g * g / (1 - d)
    fp = ep + g * g / ((1 + d) * (1 - (1 + d) * eta))
    fm = em + g * g / ((1 - d) * (1 - (1 - d) * eta))
    print(f"s={s} eta={eta}: delta={mp.nstr(d, 15)} gamma={mp.nstr(g, 15)} beta={mp.nstr(b, 15)}")
    print(f"  dk2={mp.nstr(dk2, 15)} eps+={mp.nstr(ep, 15)} eps-={mp.nstr(em, 15)}")
    print(f"  f+={mp.nstr(fp, 15)} f-={mp.nstr(fm, 15)}")
    return d, g, b, ep, em, fp, fm

d, g, b, ep, em, fp, fm = report(mp.mpf(1), mp.mpf("0.4"))
eta = mp.mpf("0.4")
print("4 dtheta+^2 =", mp.nstr(eta * g * g / ((1 + d) * (1 - (1 + d) * eta)), 15))
print("fock(0,2) moment =", mp.nstr(2 * eta * g * g / ((1 - d) * (1 - (1 - d) * eta)), 15))
print("qfi_fock(0,2) =", mp.nstr(eta * 2 * fm, 15))
N = 1
qth = 2 * eta * N * (dk2 - eta * N * (1 + eta * N) * g * g / ((1 + eta * N) ** 2 - d * d * eta * eta * N * N))
print("qfi_thermal(eta=.4,N=1,s=1) =", mp.nstr(qth, 15), " crb =", mp.nstr(1 / mp.sqrt(qth), 15))
# correlated thermal, attenuated limit
etaN = mp.mpf("1e-5")
Np, Nm = 0, 2 * etaN
qc = Nm * (dk2 + b - Nm * g * g / (1 + (1 - d) * Nm))
print("qfi_corr(w=-1, etaN=1e-5, s=1) =", mp.nstr(qc, 15), " limit =", mp.nstr(2 * etaN * (dk2 + b), 15))
# tmsv image params, xi=1, eta=.4, delta=0
xi = mp.mpf(1)
e = mp.mpf("0.4")
T = (mp.sqrt(e * e + (1 - e) ** 2 + 2 * e * (1 - e) * mp.cosh(2 * xi)) - 1) / 2
print("T(xi=1, eta=0.4) =", mp.nstr(T, 15), " r =", mp.nstr(mp.asinh(e * mp.sinh(2 * xi) / (2 * T + 1)) / 2, 15))
print("beta(2) =", mp.nstr(beta(mp.mpf(2)), 15), " delta(10) =", mp.nstr(delta(mp.mpf(10)), 15))
# parity FI at s=0.5
s = mp.mpf("0.5")
d, g = delta(s), gamma(s)
print("F_parity(0,2; s=.5) =", mp.nstr(2 * e * g * g / ((1 - d) * (1 - (1 - d) * e)), 15))
# eps at s=10
report(mp.mpf(10), mp.mpf("0.4"))
