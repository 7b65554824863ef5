"""Pure-Python Montgomery kernels, used when the compiled extension is absent.

Works for any R = 2**k, not only limb-aligned k.
"""

LIMB_BITS = None


def mont_mul(a, b, N, n_prime, k):
    mask = (1 << k) - 1
    t = a * b
    m = ((t & mask) * n_prime) & mask
    t = (t + m * N) >> k
    return t - N if t >= N else t


def mont_pow(x, e, N, n_prime, r2, k):
    mask = (1 << k) - 1

    def redc(t):
        m = ((t & mask) * n_prime) & mask
        t = (t + m * N) >> k
        return t - N if t >= N else t

    base = redc(x * r2)
    acc = redc(r2)
    while e:
        if e & 1:
            acc = redc(acc * base)
        e >>= 1
        if e:
            base = redc(base * base)
    return redc(acc)
