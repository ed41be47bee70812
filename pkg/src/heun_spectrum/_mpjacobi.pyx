# cython: language_level=3, boundscheck=False, wraparound=False
"""Cyclic Jacobi eigensolver on MPFR numbers (compiled kernel).

Numbers cross the boundary as ``(mantissa, exponent)`` pairs of Python ints,
value = mantissa * 2**exponent, which is exactly mpmath's internal layout.
"""
from libc.stdlib cimport malloc, free


cdef extern from "gmp.h":
    ctypedef struct __mpz_struct:
        pass
    ctypedef __mpz_struct mpz_t[1]
    void mpz_init(mpz_t)
    void mpz_clear(mpz_t)
    void mpz_neg(mpz_t, const mpz_t)
    int mpz_sgn(const mpz_t)
    void mpz_abs(mpz_t, const mpz_t)
    size_t mpz_sizeinbase(const mpz_t, int)
    void mpz_import(mpz_t, size_t, int, size_t, int, size_t, const void *)
    void *mpz_export(void *, size_t *, int, size_t, int, size_t, const mpz_t)


cdef extern from "mpfr.h":
    ctypedef struct __mpfr_struct:
        pass
    ctypedef __mpfr_struct *mpfr_ptr
    ctypedef long mpfr_prec_t
    ctypedef long mpfr_exp_t
    ctypedef enum mpfr_rnd_t:
        MPFR_RNDN
    void mpfr_init2(mpfr_ptr, mpfr_prec_t)
    void mpfr_clear(mpfr_ptr)
    int mpfr_set(mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_set_ui(mpfr_ptr, unsigned long, mpfr_rnd_t)
    int mpfr_set_z_2exp(mpfr_ptr, const mpz_t, mpfr_exp_t, mpfr_rnd_t)
    mpfr_exp_t mpfr_get_z_2exp(mpz_t, mpfr_ptr)
    int mpfr_add(mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_sub(mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_mul(mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_div(mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_sqr(mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_sqrt(mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_abs(mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_neg(mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_add_ui(mpfr_ptr, mpfr_ptr, unsigned long, mpfr_rnd_t)
    int mpfr_ui_div(mpfr_ptr, unsigned long, mpfr_ptr, mpfr_rnd_t)
    int mpfr_mul_2si(mpfr_ptr, mpfr_ptr, long, mpfr_rnd_t)
    int mpfr_cmp(mpfr_ptr, mpfr_ptr)
    int mpfr_sgn(mpfr_ptr)
    int mpfr_zero_p(mpfr_ptr)


cdef void _set_from_py(mpfr_ptr x, object pair, mpz_t z):
    man, exp = pair
    neg = man < 0
    if neg:
        man = -man
    cdef bytes raw = man.to_bytes((man.bit_length() + 7) // 8 or 1, "big")
    mpz_import(z, len(raw), 1, 1, 1, 0, <const char *>raw)
    if neg:
        mpz_neg(z, z)
    mpfr_set_z_2exp(x, z, exp, MPFR_RNDN)


cdef object _to_py(mpfr_ptr x, mpz_t z):
    cdef size_t count = 0
    cdef size_t nbytes
    cdef char *buf
    if mpfr_zero_p(x):
        return (0, 0)
    cdef mpfr_exp_t exp = mpfr_get_z_2exp(z, x)
    sign = mpz_sgn(z)
    nbytes = (mpz_sizeinbase(z, 2) + 7) // 8
    buf = <char *>malloc(nbytes)
    try:
        mpz_export(buf, &count, 1, 1, 1, 0, z)
        man = int.from_bytes(buf[:count], "big")
    finally:
        free(buf)
    return (-man if sign < 0 else man, exp)


cdef inline mpfr_ptr _at(__mpfr_struct *m, Py_ssize_t n, Py_ssize_t i, Py_ssize_t j):
    return &m[i * n + j]


cdef inline void _rotate(mpfr_ptr xp, mpfr_ptr xq, mpfr_ptr s, mpfr_ptr tau, mpfr_ptr w1, mpfr_ptr w2) noexcept:
    # xp' = xp - s (xq + tau xp);  xq' = xq + s (xp - tau xq)
    mpfr_mul(w1, tau, xp, MPFR_RNDN)
    mpfr_add(w1, w1, xq, MPFR_RNDN)
    mpfr_mul(w1, w1, s, MPFR_RNDN)
    mpfr_mul(w2, tau, xq, MPFR_RNDN)
    mpfr_sub(w2, xp, w2, MPFR_RNDN)
    mpfr_mul(w2, w2, s, MPFR_RNDN)
    mpfr_sub(xp, xp, w1, MPFR_RNDN)
    mpfr_add(xq, xq, w2, MPFR_RNDN)


def jacobi_eigh(entries, Py_ssize_t n, long prec, bint want_vectors=True, int max_sweeps=60):
    """Eigen-decompose the symmetric n x n matrix given row-major as (man, exp) pairs.

    Returns (values, vectors) in diagonal order (unsorted); ``vectors[k]`` is the
    eigenvector column of ``values[k]``, or ``None`` when ``want_vectors`` is false.
    """
    if len(entries) != n * n:
        raise ValueError("entries must hold n*n values")
    cdef __mpfr_struct *a = <__mpfr_struct *>malloc(n * n * sizeof(__mpfr_struct))
    cdef __mpfr_struct *v = <__mpfr_struct *>malloc(n * n * sizeof(__mpfr_struct))
    cdef __mpfr_struct tmp[12]
    cdef mpz_t z
    cdef Py_ssize_t i, j, p, q, r, sweep
    cdef mpfr_ptr theta, t, c, s, tau, apq, arp, arq, off, scale, thresh, skip, w1, w2
    if a == NULL or v == NULL:
        free(a)
        free(v)
        raise MemoryError()
    mpz_init(z)
    for i in range(n * n):
        mpfr_init2(&a[i], prec)
        mpfr_init2(&v[i], prec)
        mpfr_set_ui(&v[i], 0, MPFR_RNDN)
    for i in range(12):
        mpfr_init2(&tmp[i], prec)
    theta, t, c, s, tau, apq = &tmp[0], &tmp[1], &tmp[2], &tmp[3], &tmp[4], &tmp[5]
    off, scale, thresh, skip, w1, w2 = &tmp[6], &tmp[7], &tmp[8], &tmp[9], &tmp[10], &tmp[11]
    converged = False
    try:
        for i in range(n * n):
            _set_from_py(&a[i], entries[i], z)
        for i in range(n):
            mpfr_set_ui(_at(v, n, i, i), 1, MPFR_RNDN)
        # scale = ||A||_F, thresh = 2^-prec * scale, skip = thresh / 1024
        mpfr_set_ui(scale, 0, MPFR_RNDN)
        for i in range(n * n):
            mpfr_sqr(w1, &a[i], MPFR_RNDN)
            mpfr_add(scale, scale, w1, MPFR_RNDN)
        mpfr_sqrt(scale, scale, MPFR_RNDN)
        if mpfr_zero_p(scale):
            mpfr_set_ui(scale, 1, MPFR_RNDN)
        mpfr_mul_2si(thresh, scale, -prec, MPFR_RNDN)
        mpfr_mul_2si(skip, thresh, -10, MPFR_RNDN)
        for sweep in range(max_sweeps + 1):
            mpfr_set_ui(off, 0, MPFR_RNDN)
            for p in range(n):
                for q in range(p + 1, n):
                    mpfr_sqr(w1, _at(a, n, p, q), MPFR_RNDN)
                    mpfr_add(off, off, w1, MPFR_RNDN)
            mpfr_sqrt(off, off, MPFR_RNDN)
            if mpfr_cmp(off, thresh) <= 0:
                converged = True
                break
            if sweep == max_sweeps:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    mpfr_set(apq, _at(a, n, p, q), MPFR_RNDN)
                    mpfr_abs(w1, apq, MPFR_RNDN)
                    if mpfr_cmp(w1, skip) <= 0:
                        continue
                    # theta = (a_qq - a_pp) / (2 a_pq)
                    mpfr_sub(theta, _at(a, n, q, q), _at(a, n, p, p), MPFR_RNDN)
                    mpfr_mul_2si(w1, apq, 1, MPFR_RNDN)
                    mpfr_div(theta, theta, w1, MPFR_RNDN)
                    # t = sign(theta) / (|theta| + sqrt(theta^2 + 1))
                    mpfr_sqr(w1, theta, MPFR_RNDN)
                    mpfr_add_ui(w1, w1, 1, MPFR_RNDN)
                    mpfr_sqrt(w1, w1, MPFR_RNDN)
                    mpfr_abs(w2, theta, MPFR_RNDN)
                    mpfr_add(w1, w1, w2, MPFR_RNDN)
                    mpfr_ui_div(t, 1, w1, MPFR_RNDN)
                    if mpfr_sgn(theta) < 0:
                        mpfr_neg(t, t, MPFR_RNDN)
                    # c = 1/sqrt(t^2+1), s = t c, tau = s / (1 + c)
                    mpfr_sqr(w1, t, MPFR_RNDN)
                    mpfr_add_ui(w1, w1, 1, MPFR_RNDN)
                    mpfr_sqrt(w1, w1, MPFR_RNDN)
                    mpfr_ui_div(c, 1, w1, MPFR_RNDN)
                    mpfr_mul(s, t, c, MPFR_RNDN)
                    mpfr_add_ui(w1, c, 1, MPFR_RNDN)
                    mpfr_div(tau, s, w1, MPFR_RNDN)
                    mpfr_mul(w1, t, apq, MPFR_RNDN)
                    mpfr_sub(_at(a, n, p, p), _at(a, n, p, p), w1, MPFR_RNDN)
                    mpfr_add(_at(a, n, q, q), _at(a, n, q, q), w1, MPFR_RNDN)
                    mpfr_set_ui(_at(a, n, p, q), 0, MPFR_RNDN)
                    mpfr_set_ui(_at(a, n, q, p), 0, MPFR_RNDN)
                    for r in range(n):
                        if r != p and r != q:
                            _rotate(_at(a, n, r, p), _at(a, n, r, q), s, tau, w1, w2)
                            mpfr_set(_at(a, n, p, r), _at(a, n, r, p), MPFR_RNDN)
                            mpfr_set(_at(a, n, q, r), _at(a, n, r, q), MPFR_RNDN)
                        if want_vectors:
                            _rotate(_at(v, n, r, p), _at(v, n, r, q), s, tau, w1, w2)
        if not converged:
            raise RuntimeError("Jacobi iteration did not converge")
        values = [_to_py(_at(a, n, k, k), z) for k in range(n)]
        vectors = None
        if want_vectors:
            vectors = [[_to_py(_at(v, n, r, k), z) for r in range(n)] for k in range(n)]
    finally:
        for i in range(n * n):
            mpfr_clear(&a[i])
            mpfr_clear(&v[i])
        for i in range(12):
            mpfr_clear(&tmp[i])
        mpz_clear(z)
        free(a)
        free(v)
    return values, vectors
