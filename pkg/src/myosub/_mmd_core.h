/* Fused Gaussian-kernel sums and gradients for the MMD^2 estimator.
 *
 * Inputs are feature-major (p x n) so the inner loops over samples are
 * contiguous and vectorise.  Reductions stay sequential, which keeps the
 * results bitwise stable.
 */
#ifndef MYOSUB_MMD_CORE_H
#define MYOSUB_MMD_CORE_H

#include "_vexp.h"

/* Sum of k(x_i, x_j) over ordered pairs i != j.  When g is non-NULL,
 * g_i += coef * sum_j k_ij (x_j - x_i), feature-major like x. */
static double myosub_within(const double *restrict x, long n, long p,
                            double scale, double coef, double *restrict g,
                            double *restrict buf)
{
    double s = 0.0;
    for (long i = 0; i + 1 < n; i++) {
        long cnt = n - i - 1;
        for (long j = 0; j < cnt; j++)
            buf[j] = 0.0;
        for (long k = 0; k < p; k++) {
            const double *xk = x + k * n + i + 1;
            double xik = x[k * n + i];
            for (long j = 0; j < cnt; j++) {
                double t = xk[j] - xik;
                buf[j] += t * t;
            }
        }
        myosub_vexp(buf, cnt, scale);
        double row = 0.0;
        for (long j = 0; j < cnt; j++)
            row += buf[j];
        s += row;
        if (g) {
            for (long j = 0; j < cnt; j++)
                buf[j] *= coef;
            for (long k = 0; k < p; k++) {
                const double *xk = x + k * n + i + 1;
                double *gk = g + k * n + i + 1;
                double xik = x[k * n + i];
                double acc = 0.0;
                for (long j = 0; j < cnt; j++) {
                    double t = buf[j] * (xk[j] - xik);
                    acc += t;
                    gk[j] -= t;
                }
                g[k * n + i] += acc;
            }
        }
    }
    return 2.0 * s;
}

/* Sum of k(a_i, b_j) over all pairs (skipping i == j when offdiag).  When
 * ga is non-NULL, ga_i += coef * sum_j k_ij (b_j - a_i) and
 * gb_j += coef * sum_i k_ij (a_i - b_j). */
static double myosub_cross(const double *restrict a, long n,
                           const double *restrict b, long m, long p,
                           double scale, double coef, int offdiag,
                           double *restrict ga, double *restrict gb,
                           double *restrict buf)
{
    double s = 0.0;
    for (long i = 0; i < n; i++) {
        for (long j = 0; j < m; j++)
            buf[j] = 0.0;
        for (long k = 0; k < p; k++) {
            const double *bk = b + k * m;
            double aik = a[k * n + i];
            for (long j = 0; j < m; j++) {
                double t = bk[j] - aik;
                buf[j] += t * t;
            }
        }
        myosub_vexp(buf, m, scale);
        if (offdiag && i < m)
            buf[i] = 0.0;
        double row = 0.0;
        for (long j = 0; j < m; j++)
            row += buf[j];
        s += row;
        if (ga) {
            for (long j = 0; j < m; j++)
                buf[j] *= coef;
            for (long k = 0; k < p; k++) {
                const double *bk = b + k * m;
                double *gbk = gb + k * m;
                double aik = a[k * n + i];
                double acc = 0.0;
                for (long j = 0; j < m; j++) {
                    double t = buf[j] * (bk[j] - aik);
                    acc += t;
                    gbk[j] -= t;
                }
                ga[k * n + i] += acc;
            }
        }
    }
    return s;
}

#endif
