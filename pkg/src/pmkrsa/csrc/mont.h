#ifndef PMK_MONT_H
#define PMK_MONT_H

#include <stddef.h>
#include <stdint.h>

/* Scratch sizes, in 64-bit limbs, for an s-limb modulus. */
#define PMK_MUL_SCRATCH(s) ((s) + 2)
#define PMK_MUL_SCRATCH_SQR(s) (2 * (s) + 2)
#define PMK_POW_SCRATCH(s) (5 * (s) + 2)

void pmk_mont_mul(uint64_t *out, const uint64_t *a, const uint64_t *b,
                  const uint64_t *n, uint64_t n0, size_t s, uint64_t *t);

void pmk_mont_sqr(uint64_t *out, const uint64_t *a, const uint64_t *n,
                  uint64_t n0, size_t s, uint64_t *t);

void pmk_mont_pow(uint64_t *out, const uint64_t *x, const uint64_t *e,
                  size_t ebits, const uint64_t *n, const uint64_t *r2,
                  uint64_t n0, size_t s, uint64_t *work);

#endif
