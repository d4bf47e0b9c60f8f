"""Independent high-precision evaluation of the frozen test values.

Evaluates the block statistics straight from their defining sums with mpmath
(no FFT, no Gram shortcuts) for the small deterministic fixtures used in the
unit tests, plus the normal-distribution reference values.
"""
import mpmath as mp

mp.mp.dps = 40


def local_dft(x, T, M, j, k):
    N = T // M
    u = mp.mpf(N * (j - 1) + N // 2) / T
    start = int(mp.floor(u * T)) - N // 2 + 1  # 1-based time of s = 0
    w = 2 * mp.pi * k / N
    acc = mp.mpc(0)
    for s in range(N):
        acc += x[start + s - 1] * mp.exp(-1j * w * s)
    return acc / mp.sqrt(2 * mp.pi * N)


def parts(x, T, M):
    """Scalar (constant-in-tau) series: curves are constants, <a,b> = a*conj(b)."""
    N = T // M
    K = N // 2
    d = {(j, k): local_dft(x, T, M, j, k) for j in range(1, M + 1) for k in range(0, K + 1)}
    f1 = sum(abs(d[j, k] * mp.conj(d[j, k - 1])) ** 2 for k in range(1, K + 1) for j in range(1, M + 1)) / T
    f2 = mp.mpf(0)
    for k in range(1, K + 1):
        acc = mp.mpf(0)
        for j1 in range(1, M + 1):
            for j2 in range(1, M + 1):
                acc += abs(d[j1, k] * mp.conj(d[j2, k])) ** 2
        f2 += acc / M**2
    f2 /= N
    bias = sum(abs(d[j, k]) ** 2 * abs(d[j, k - 1]) ** 2 for k in range(1, K + 1) for j in range(1, M + 1)) / (N * M)
    var = mp.mpf(0)
    for k in range(1, K + 1):
        inner = sum(abs(d[j, k] * mp.conj(d[j, k - 1])) ** 2 for j in range(1, M + 1)) / M
        var += inner**2
    var *= 16 * mp.pi**2 / N
    m_scaled = 4 * mp.pi * (f1 - f2 + mp.mpf(N) / T * bias)
    m_literal = 4 * mp.pi * (f1 - f2 + bias)
    return f1, f2, bias, var, m_scaled, m_literal


Phi = lambda z: mp.ncdf(z)
q = lambda p: mp.sqrt(2) * mp.erfinv(2 * p - 1)

if __name__ == "__main__":
    x = [mp.mpf(v) for v in range(1, 9)]
    names = ["f1", "f2", "bias", "var_h0", "m_scaled", "m_literal"]
    for n, v in zip(names, parts(x, 8, 2)):
        print(f"ramp T=8 M=2 {n} = {mp.nstr(v, 20)}")
    print("Phi(-1) =", mp.nstr(1 - Phi(1), 20))
    u95 = q(mp.mpf("0.95"))
    print("u_0.95 =", mp.nstr(u95, 20))
    print("power(0.05,0.2,0.2,400,0.05) =", mp.nstr(Phi(u95 - mp.sqrt(400) * mp.mpf("0.05") / mp.mpf("0.2")), 20))
    u975 = q(mp.mpf("0.975"))
    h = mp.mpf("0.5") * u975 / 10
    print("ci(0.1,0.5,100,0.05) =", mp.nstr(mp.mpf("0.1") - h, 20), mp.nstr(mp.mpf("0.1") + h, 20))
    print("kappa_V(T/4) =", mp.nstr(mp.mpf("1.8") * mp.cos(mp.mpf("2.5")), 20))
    print("1/(4pi) =", mp.nstr(1 / (4 * mp.pi), 20), " 1/(2pi^2) =", mp.nstr(1 / (2 * mp.pi**2), 20))
    s = sum(mp.exp(mp.mpf(l - 1) / 5) for l in range(1, 16))
    print("nu_h0 model I =", mp.nstr(s**2 / (2 * mp.pi**2), 20))
    print("(8pi)^-1/2 =", mp.nstr(1 / mp.sqrt(8 * mp.pi), 20))
