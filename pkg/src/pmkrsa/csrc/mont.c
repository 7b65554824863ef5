/*
 * Montgomery multiplication (CIOS) and right-to-left binary exponentiation
 * over little-endian arrays of 64-bit limbs. Not constant time.
 *
 * All operands are s limbs, reduced below n, with R = 2^(64 s) and
 * n0 = -n^-1 mod 2^64.
 */
#include <string.h>

#include "mont.h"

typedef unsigned __int128 u128;

/* t holds s + 1 significant limbs and is < 2n; write t mod n to out. */
static void final_subtract(uint64_t *out, const uint64_t *t,
                           const uint64_t *n, size_t s)
{
    int ge = t[s] != 0;
    if (!ge) {
        ge = 1;
        for (size_t j = s; j-- > 0;) {
            if (t[j] != n[j]) {
                ge = t[j] > n[j];
                break;
            }
        }
    }
    if (!ge) {
        memcpy(out, t, s * sizeof(uint64_t));
        return;
    }
    uint64_t borrow = 0;
    for (size_t j = 0; j < s; j++) {
        u128 d = (u128)t[j] - n[j] - borrow;
        out[j] = (uint64_t)d;
        borrow = (uint64_t)(d >> 64) & 1;
    }
}

/* Interleaved reduction step shared by mul and sqr: t += m n, t >>= 64. */
static inline void reduce_step(uint64_t *t, const uint64_t *n, uint64_t n0,
                               size_t s)
{
    uint64_t m = t[0] * n0;
    u128 acc = (u128)m * n[0] + t[0];
    uint64_t c = (uint64_t)(acc >> 64);
    for (size_t j = 1; j < s; j++) {
        acc = (u128)m * n[j] + t[j] + c;
        t[j - 1] = (uint64_t)acc;
        c = (uint64_t)(acc >> 64);
    }
    acc = (u128)t[s] + c;
    t[s - 1] = (uint64_t)acc;
    t[s] = t[s + 1] + (uint64_t)(acc >> 64);
}

void pmk_mont_mul(uint64_t *out, const uint64_t *a, const uint64_t *b,
                  const uint64_t *n, uint64_t n0, size_t s, uint64_t *t)
{
    memset(t, 0, (s + 2) * sizeof(uint64_t));
    for (size_t i = 0; i < s; i++) {
        uint64_t bi = b[i];
        uint64_t c = 0;
        for (size_t j = 0; j < s; j++) {
            u128 acc = (u128)a[j] * bi + t[j] + c;
            t[j] = (uint64_t)acc;
            c = (uint64_t)(acc >> 64);
        }
        u128 acc = (u128)t[s] + c;
        t[s] = (uint64_t)acc;
        t[s + 1] = (uint64_t)(acc >> 64);
        reduce_step(t, n, n0, s);
    }
    final_subtract(out, t, n, s);
}

/*
 * Squaring: full 2s-limb square with doubled cross products, then s
 * word-by-word reductions. t needs 2 s + 2 limbs.
 */
void pmk_mont_sqr(uint64_t *out, const uint64_t *a, const uint64_t *n,
                  uint64_t n0, size_t s, uint64_t *t)
{
    memset(t, 0, (2 * s + 2) * sizeof(uint64_t));
    for (size_t i = 0; i + 1 < s; i++) {
        uint64_t ai = a[i];
        uint64_t c = 0;
        for (size_t j = i + 1; j < s; j++) {
            u128 acc = (u128)ai * a[j] + t[i + j] + c;
            t[i + j] = (uint64_t)acc;
            c = (uint64_t)(acc >> 64);
        }
        t[i + s] = c;
    }
    uint64_t top = 0;
    for (size_t j = 0; j < 2 * s; j++) {
        uint64_t v = t[j];
        t[j] = (v << 1) | top;
        top = v >> 63;
    }
    uint64_t c = 0;
    for (size_t i = 0; i < s; i++) {
        u128 sq = (u128)a[i] * a[i];
        u128 acc = (u128)t[2 * i] + (uint64_t)sq + c;
        t[2 * i] = (uint64_t)acc;
        acc = (u128)t[2 * i + 1] + (uint64_t)(sq >> 64) + (uint64_t)(acc >> 64);
        t[2 * i + 1] = (uint64_t)acc;
        c = (uint64_t)(acc >> 64);
    }

    uint64_t hi = 0; /* carry out of limb 2s */
    for (size_t i = 0; i < s; i++) {
        uint64_t m = t[i] * n0;
        uint64_t cc = 0;
        for (size_t j = 0; j < s; j++) {
            u128 acc = (u128)m * n[j] + t[i + j] + cc;
            t[i + j] = (uint64_t)acc;
            cc = (uint64_t)(acc >> 64);
        }
        for (size_t j = i + s; cc && j < 2 * s; j++) {
            u128 acc = (u128)t[j] + cc;
            t[j] = (uint64_t)acc;
            cc = (uint64_t)(acc >> 64);
        }
        hi += cc;
    }
    t[2 * s] = hi;
    final_subtract(out, t + s, n, s);
}

void pmk_mont_pow(uint64_t *out, const uint64_t *x, const uint64_t *e,
                  size_t ebits, const uint64_t *n, const uint64_t *r2,
                  uint64_t n0, size_t s, uint64_t *work)
{
    uint64_t *base = work;
    uint64_t *acc = work + s;
    uint64_t *one = work + 2 * s;
    uint64_t *t = work + 3 * s;

    memset(one, 0, s * sizeof(uint64_t));
    one[0] = 1;
    pmk_mont_mul(base, x, r2, n, n0, s, t);
    pmk_mont_mul(acc, one, r2, n, n0, s, t);

    for (size_t i = 0; i < ebits; i++) {
        if ((e[i >> 6] >> (i & 63)) & 1)
            pmk_mont_mul(acc, acc, base, n, n0, s, t);
        if (i + 1 < ebits)
            pmk_mont_sqr(base, base, n, n0, s, t);
    }
    pmk_mont_mul(out, acc, one, n, n0, s, t);
}
