/* Branch-free exp for non-positive arguments, written so that the
 * compiler can auto-vectorise the array loop.  Accurate to a few ulp;
 * arguments below -708 flush to zero. */
#ifndef MYOSUB_VEXP_H
#define MYOSUB_VEXP_H

#include <stdint.h>
#include <string.h>

static inline double myosub_exp_nonpos(double x)
{
    const double log2e = 1.4426950408889634;
    const double ln2_hi = 6.93147180369123816490e-01;
    const double ln2_lo = 1.90821492927058770002e-10;
    const double shifter = 6755399441055744.0; /* 0x1.8p52 */
    double xc = x < -708.0 ? -708.0 : x;
    double t = xc * log2e + shifter;
    double nf = t - shifter;
    double r = (xc - nf * ln2_hi) - nf * ln2_lo;
    double p = 1.0 / 6227020800.0;
    p = p * r + 1.0 / 479001600.0;
    p = p * r + 1.0 / 39916800.0;
    p = p * r + 1.0 / 3628800.0;
    p = p * r + 1.0 / 362880.0;
    p = p * r + 1.0 / 40320.0;
    p = p * r + 1.0 / 5040.0;
    p = p * r + 1.0 / 720.0;
    p = p * r + 1.0 / 120.0;
    p = p * r + 1.0 / 24.0;
    p = p * r + 1.0 / 6.0;
    p = p * r + 0.5;
    p = p * r + 1.0;
    p = p * r + 1.0;
    /* low mantissa bits of t hold the integer n; build 2^n directly */
    uint64_t tb;
    memcpy(&tb, &t, sizeof tb);
    uint64_t sb = (tb + 1023u) << 52;
    double scale;
    memcpy(&scale, &sb, sizeof scale);
    double out = p * scale;
    return x < -708.0 ? 0.0 : out;
}

static inline void myosub_vexp(double *restrict buf, long n, double scale)
{
    for (long j = 0; j < n; j++)
        buf[j] = myosub_exp_nonpos(buf[j] * scale);
}

#endif
