# cython: language_level=3, boundscheck=False, wraparound=False
"""MPFR one-sided Jacobi SVD kernel.

Values cross the boundary as (hex mantissa, binary exponent) pairs so the
extension links against the system MPFR without sharing objects with gmpy2.
"""

from libc.stdlib cimport malloc, free

cdef extern from "gmp.h":
    ctypedef struct __mpz_struct:
        pass
    ctypedef __mpz_struct mpz_t[1]
    void mpz_init(mpz_t)
    void mpz_clear(mpz_t)
    size_t mpz_sizeinbase(mpz_t, int)
    char *mpz_get_str(char *, int, mpz_t)

cdef extern from "mpfr.h":
    ctypedef struct __mpfr_struct:
        pass
    ctypedef __mpfr_struct mpfr_t[1]
    ctypedef __mpfr_struct *mpfr_ptr
    ctypedef long mpfr_prec_t
    ctypedef long mpfr_exp_t
    ctypedef enum mpfr_rnd_t:
        MPFR_RNDN
    void mpfr_init2(mpfr_ptr, mpfr_prec_t)
    void mpfr_clear(mpfr_ptr)
    int mpfr_set(mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_set_ui(mpfr_ptr, unsigned long, mpfr_rnd_t)
    int mpfr_set_str(mpfr_ptr, const char *, int, mpfr_rnd_t)
    int mpfr_add(mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_sub(mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_mul(mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_div(mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_ui_div(mpfr_ptr, unsigned long, mpfr_ptr, mpfr_rnd_t)
    int mpfr_sqrt(mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_sqr(mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_hypot(mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_fma(mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_fms(mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_neg(mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_abs(mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_mul_2si(mpfr_ptr, mpfr_ptr, long, mpfr_rnd_t)
    int mpfr_cmp(mpfr_ptr, mpfr_ptr)
    int mpfr_sgn(mpfr_ptr)
    int mpfr_zero_p(mpfr_ptr)
    mpfr_exp_t mpfr_get_z_2exp(mpz_t, mpfr_ptr)


cdef __mpfr_struct* _alloc(Py_ssize_t count, mpfr_prec_t prec) except NULL:
    cdef __mpfr_struct* arr = <__mpfr_struct*> malloc(count * sizeof(__mpfr_struct))
    if arr == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    for i in range(count):
        mpfr_init2(&arr[i], prec)
    return arr


cdef void _release(__mpfr_struct* arr, Py_ssize_t count):
    cdef Py_ssize_t i
    if arr == NULL:
        return
    for i in range(count):
        mpfr_clear(&arr[i])
    free(arr)


cdef int _load(mpfr_ptr dst, str text) except -1:
    cdef bytes b = text.encode("ascii")
    if mpfr_set_str(dst, b, 16, MPFR_RNDN) != 0:
        raise ValueError("bad hexadecimal float " + text)
    return 0


cdef tuple _dump(mpfr_ptr src):
    cdef mpz_t z
    cdef mpfr_exp_t e
    cdef size_t size
    cdef char* buf
    if mpfr_zero_p(src):
        return ("0", 0)
    mpz_init(z)
    e = mpfr_get_z_2exp(z, src)
    size = mpz_sizeinbase(z, 16) + 2
    buf = <char*> malloc(size + 1)
    try:
        mpz_get_str(buf, 16, z)
        out = (buf.decode("ascii"), <long> e)
    finally:
        free(buf)
        mpz_clear(z)
    return out


def jacobi_svd(list re, list im, int m, int n, int prec, bint want_v, int max_sweeps=80):
    """Column-major hex inputs; returns (cols_re, cols_im, v_re, v_im, sweeps)."""
    cdef Py_ssize_t size = <Py_ssize_t> m * n
    cdef Py_ssize_t i, j, k, p, q
    cdef __mpfr_struct* ar = _alloc(size, prec)
    cdef __mpfr_struct* ai = _alloc(size, prec)
    cdef __mpfr_struct* vr = _alloc(<Py_ssize_t> n * n, prec)
    cdef __mpfr_struct* vi = _alloc(<Py_ssize_t> n * n, prec)
    cdef __mpfr_struct* nrm = _alloc(n, prec)
    cdef __mpfr_struct* tmp = _alloc(16, prec)
    cdef mpfr_ptr gr = &tmp[0]
    cdef mpfr_ptr gi = &tmp[1]
    cdef mpfr_ptr ag = &tmp[2]
    cdef mpfr_ptr zeta = &tmp[3]
    cdef mpfr_ptr t = &tmp[4]
    cdef mpfr_ptr c = &tmp[5]
    cdef mpfr_ptr s = &tmp[6]
    cdef mpfr_ptr wr = &tmp[7]
    cdef mpfr_ptr wi = &tmp[8]
    cdef mpfr_ptr x1 = &tmp[9]
    cdef mpfr_ptr x2 = &tmp[10]
    cdef mpfr_ptr x3 = &tmp[11]
    cdef mpfr_ptr x4 = &tmp[12]
    cdef mpfr_ptr eps = &tmp[13]
    cdef mpfr_ptr thr = &tmp[14]
    cdef mpfr_ptr one = &tmp[15]
    cdef int sweeps = 0
    cdef bint rotated
    cdef mpfr_ptr pr
    cdef mpfr_ptr pim
    cdef mpfr_ptr qr
    cdef mpfr_ptr qim
    try:
        for i in range(size):
            _load(&ar[i], re[i])
            _load(&ai[i], im[i])
        for i in range(n * n):
            mpfr_set_ui(&vr[i], 1 if (i // n) == (i % n) else 0, MPFR_RNDN)
            mpfr_set_ui(&vi[i], 0, MPFR_RNDN)
        mpfr_set_ui(one, 1, MPFR_RNDN)
        mpfr_mul_2si(eps, one, -(prec - 8), MPFR_RNDN)

        for sweeps in range(1, max_sweeps + 1):
            for j in range(n):
                mpfr_set_ui(&nrm[j], 0, MPFR_RNDN)
                for k in range(m):
                    mpfr_fma(&nrm[j], &ar[j * m + k], &ar[j * m + k], &nrm[j], MPFR_RNDN)
                    mpfr_fma(&nrm[j], &ai[j * m + k], &ai[j * m + k], &nrm[j], MPFR_RNDN)
            rotated = False
            for p in range(n - 1):
                for q in range(p + 1, n):
                    if mpfr_zero_p(&nrm[p]) or mpfr_zero_p(&nrm[q]):
                        continue
                    mpfr_set_ui(gr, 0, MPFR_RNDN)
                    mpfr_set_ui(gi, 0, MPFR_RNDN)
                    for k in range(m):
                        pr = &ar[p * m + k]
                        pim = &ai[p * m + k]
                        qr = &ar[q * m + k]
                        qim = &ai[q * m + k]
                        mpfr_fma(gr, pr, qr, gr, MPFR_RNDN)
                        mpfr_fma(gr, pim, qim, gr, MPFR_RNDN)
                        mpfr_fma(gi, pr, qim, gi, MPFR_RNDN)
                        mpfr_mul(x1, pim, qr, MPFR_RNDN)
                        mpfr_sub(gi, gi, x1, MPFR_RNDN)
                    mpfr_hypot(ag, gr, gi, MPFR_RNDN)
                    mpfr_mul(thr, &nrm[p], &nrm[q], MPFR_RNDN)
                    mpfr_sqrt(thr, thr, MPFR_RNDN)
                    mpfr_mul(thr, thr, eps, MPFR_RNDN)
                    if mpfr_cmp(ag, thr) <= 0:
                        continue
                    rotated = True
                    # zeta = (b - a) / (2 |g|)
                    mpfr_sub(zeta, &nrm[q], &nrm[p], MPFR_RNDN)
                    mpfr_div(zeta, zeta, ag, MPFR_RNDN)
                    mpfr_mul_2si(zeta, zeta, -1, MPFR_RNDN)
                    # t = sign(zeta) / (|zeta| + sqrt(1 + zeta^2))
                    mpfr_hypot(x1, zeta, one, MPFR_RNDN)
                    mpfr_abs(x2, zeta, MPFR_RNDN)
                    mpfr_add(x1, x1, x2, MPFR_RNDN)
                    mpfr_ui_div(t, 1, x1, MPFR_RNDN)
                    if mpfr_sgn(zeta) < 0:
                        mpfr_neg(t, t, MPFR_RNDN)
                    mpfr_hypot(x1, t, one, MPFR_RNDN)
                    mpfr_ui_div(c, 1, x1, MPFR_RNDN)
                    mpfr_mul(s, c, t, MPFR_RNDN)
                    # w = (s / |g|) * conj(g)
                    mpfr_div(x1, s, ag, MPFR_RNDN)
                    mpfr_mul(wr, x1, gr, MPFR_RNDN)
                    mpfr_mul(wi, x1, gi, MPFR_RNDN)
                    mpfr_neg(wi, wi, MPFR_RNDN)
                    _rotate(ar, ai, p * m, q * m, m, c, wr, wi, x1, x2, x3, x4)
                    if want_v:
                        _rotate(vr, vi, p * n, q * n, n, c, wr, wi, x1, x2, x3, x4)
                    # a' = a - t|g|, b' = b + t|g|
                    mpfr_mul(x1, t, ag, MPFR_RNDN)
                    mpfr_sub(&nrm[p], &nrm[p], x1, MPFR_RNDN)
                    mpfr_add(&nrm[q], &nrm[q], x1, MPFR_RNDN)
            if not rotated:
                break
        cols_re = [_dump(&ar[i]) for i in range(size)]
        cols_im = [_dump(&ai[i]) for i in range(size)]
        if want_v:
            v_re = [_dump(&vr[i]) for i in range(n * n)]
            v_im = [_dump(&vi[i]) for i in range(n * n)]
        else:
            v_re = v_im = None
        return cols_re, cols_im, v_re, v_im, sweeps
    finally:
        _release(ar, size)
        _release(ai, size)
        _release(vr, <Py_ssize_t> n * n)
        _release(vi, <Py_ssize_t> n * n)
        _release(nrm, n)
        _release(tmp, 16)


cdef void _rotate(__mpfr_struct* xr, __mpfr_struct* xi, Py_ssize_t op, Py_ssize_t oq, Py_ssize_t len_,
                  mpfr_ptr c, mpfr_ptr wr, mpfr_ptr wi,
                  mpfr_ptr t1, mpfr_ptr t2, mpfr_ptr t3, mpfr_ptr t4):
    # p' = c p - w q ;  q' = conj(w) p + c q
    cdef Py_ssize_t k
    cdef mpfr_ptr pr
    cdef mpfr_ptr pim
    cdef mpfr_ptr qr
    cdef mpfr_ptr qim
    for k in range(len_):
        pr = &xr[op + k]
        pim = &xi[op + k]
        qr = &xr[oq + k]
        qim = &xi[oq + k]
        # t1 = c pr - wr qr + wi qim
        mpfr_mul(t1, c, pr, MPFR_RNDN)
        mpfr_fms(t3, wr, qr, t1, MPFR_RNDN)
        mpfr_neg(t3, t3, MPFR_RNDN)
        mpfr_fma(t1, wi, qim, t3, MPFR_RNDN)
        # t2 = c pim - wr qim - wi qr
        mpfr_mul(t2, c, pim, MPFR_RNDN)
        mpfr_fms(t3, wr, qim, t2, MPFR_RNDN)
        mpfr_neg(t3, t3, MPFR_RNDN)
        mpfr_mul(t4, wi, qr, MPFR_RNDN)
        mpfr_sub(t2, t3, t4, MPFR_RNDN)
        # q_re' = wr pr + wi pim + c qr
        mpfr_mul(t3, c, qr, MPFR_RNDN)
        mpfr_fma(t3, wr, pr, t3, MPFR_RNDN)
        mpfr_fma(t3, wi, pim, t3, MPFR_RNDN)
        # q_im' = wr pim - wi pr + c qim
        mpfr_mul(t4, c, qim, MPFR_RNDN)
        mpfr_fma(t4, wr, pim, t4, MPFR_RNDN)
        mpfr_mul(qr, wi, pr, MPFR_RNDN)
        mpfr_sub(t4, t4, qr, MPFR_RNDN)
        mpfr_set(pr, t1, MPFR_RNDN)
        mpfr_set(pim, t2, MPFR_RNDN)
        mpfr_set(qr, t3, MPFR_RNDN)
        mpfr_set(qim, t4, MPFR_RNDN)
