# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled gate-application kernels.

Amplitudes are stored big-endian: qubit 0 is the most significant bit of the
flat index. Every kernel works in place.
"""


ctypedef double complex cplx

cdef enum:
    MAXK = 6
    MAXDIM = 64


cdef inline void _offsets(long n, long k, long* targets, long* offs, long* sorted_pos) noexcept nogil:
    cdef long s, j, off, tmp, a, b
    for j in range(k):
        sorted_pos[j] = n - 1 - targets[j]
    # insertion sort, ascending bit position
    for a in range(1, k):
        tmp = sorted_pos[a]
        b = a - 1
        while b >= 0 and sorted_pos[b] > tmp:
            sorted_pos[b + 1] = sorted_pos[b]
            b -= 1
        sorted_pos[b + 1] = tmp
    for s in range(1 << k):
        off = 0
        for j in range(k):
            # targets[0] is the most significant bit of the local index
            if (s >> (k - 1 - j)) & 1:
                off |= (<long>1) << (n - 1 - targets[j])
        offs[s] = off


cdef inline long _spread(long i, long k, long* sorted_pos) noexcept nogil:
    """Insert zero bits at the (ascending) positions in sorted_pos."""
    cdef long j, p, low
    for j in range(k):
        p = sorted_pos[j]
        low = i & (((<long>1) << p) - 1)
        i = ((i >> p) << (p + 1)) | low
    return i


cdef inline void _apply_block8(cplx* psi, long base, long* offs, cplx* m) noexcept nogil:
    cdef cplx b0, b1, b2, b3, b4, b5, b6, b7
    cdef long r
    b0 = psi[base + offs[0]]
    b1 = psi[base + offs[1]]
    b2 = psi[base + offs[2]]
    b3 = psi[base + offs[3]]
    b4 = psi[base + offs[4]]
    b5 = psi[base + offs[5]]
    b6 = psi[base + offs[6]]
    b7 = psi[base + offs[7]]
    for r in range(8):
        psi[base + offs[r]] = (m[8 * r] * b0 + m[8 * r + 1] * b1 + m[8 * r + 2] * b2
                               + m[8 * r + 3] * b3 + m[8 * r + 4] * b4 + m[8 * r + 5] * b5
                               + m[8 * r + 6] * b6 + m[8 * r + 7] * b7)


def apply_matrix(cplx[::1] psi, cplx[:, ::1] mat, long[::1] targets, long nqubits):
    """Apply a 2^k x 2^k matrix to ``targets`` of a flat 2^n amplitude vector."""
    cdef long k = targets.shape[0]
    cdef long dim = 1 << k
    cdef long n = nqubits
    cdef long nblocks, i, base, r, c
    cdef long offs[MAXDIM]
    cdef long sorted_pos[MAXK]
    cdef long tg[MAXK]
    cdef cplx buf[MAXDIM]
    cdef cplx m[MAXDIM * MAXDIM]
    cdef cplx acc
    cdef cplx* p
    if k > MAXK:
        raise ValueError("kernel supports at most %d target qubits" % MAXK)
    if mat.shape[0] != dim or mat.shape[1] != dim:
        raise ValueError("matrix shape does not match the number of targets")
    if psi.shape[0] != ((<long>1) << n):
        raise ValueError("state length does not match qubit count")
    for i in range(k):
        tg[i] = targets[i]
    for r in range(dim):
        for c in range(dim):
            m[r * dim + c] = mat[r, c]
    nblocks = (<long>1) << (n - k)
    p = &psi[0]
    with nogil:
        _offsets(n, k, tg, offs, sorted_pos)
        if dim == 8:
            for i in range(nblocks):
                _apply_block8(p, _spread(i, k, sorted_pos), offs, m)
        else:
            for i in range(nblocks):
                base = _spread(i, k, sorted_pos)
                for c in range(dim):
                    buf[c] = p[base + offs[c]]
                for r in range(dim):
                    acc = 0
                    for c in range(dim):
                        acc = acc + m[r * dim + c] * buf[c]
                    p[base + offs[r]] = acc


def apply_diagonal(cplx[::1] psi, cplx[::1] diag, long[::1] targets, long nqubits):
    """Multiply by a diagonal matrix on ``targets`` (cheaper than a dense apply)."""
    cdef long k = targets.shape[0]
    cdef long dim = 1 << k
    cdef long n = nqubits
    cdef long nblocks, i, base, r
    cdef long offs[MAXDIM]
    cdef long sorted_pos[MAXK]
    cdef long tg[MAXK]
    if k > MAXK:
        raise ValueError("kernel supports at most %d target qubits" % MAXK)
    if diag.shape[0] != dim:
        raise ValueError("diagonal length does not match the number of targets")
    for i in range(k):
        tg[i] = targets[i]
    nblocks = (<long>1) << (n - k)
    with nogil:
        _offsets(n, k, tg, offs, sorted_pos)
        for i in range(nblocks):
            base = _spread(i, k, sorted_pos)
            for r in range(dim):
                psi[base + offs[r]] = diag[r] * psi[base + offs[r]]


cdef inline void _pair_sums(double* f, double* g, long start, long stop, long m, double* acc) noexcept nogil:
    """Accumulate the four products of entries paired by bit ``m`` in [start, stop)."""
    cdef long base, lo, hi
    cdef double pr0, pi0, pr1, pi1, qr0, qi0, qr1, qi1
    cdef double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, s5 = 0, s6 = 0, s7 = 0
    base = start
    while base < stop:
        for lo in range(base, base + m):
            hi = lo + m
            pr0 = f[2 * lo]; pi0 = f[2 * lo + 1]
            pr1 = f[2 * hi]; pi1 = f[2 * hi + 1]
            qr0 = g[2 * lo]; qi0 = g[2 * lo + 1]
            qr1 = g[2 * hi]; qi1 = g[2 * hi + 1]
            # z * conj(w) = (zr wr + zi wi) + i (zi wr - zr wi)
            s0 += pr0 * qr0 + pi0 * qi0
            s1 += pi0 * qr0 - pr0 * qi0
            s2 += pr0 * qr1 + pi0 * qi1
            s3 += pi0 * qr1 - pr0 * qi1
            s4 += pr1 * qr0 + pi1 * qi0
            s5 += pi1 * qr0 - pr1 * qi0
            s6 += pr1 * qr1 + pi1 * qi1
            s7 += pi1 * qr1 - pr1 * qi1
        base += 2 * m
    acc[0] += s0; acc[1] += s1; acc[2] += s2; acc[3] += s3
    acc[4] += s4; acc[5] += s5; acc[6] += s6; acc[7] += s7


def site_marginals(cplx[::1] phi, cplx[::1] psi, long[::1] sites, long nqubits, cplx[:, :, ::1] out):
    """Single-qubit blocks of ``|phi><psi|`` traced over all other qubits.

    ``out[j, r, c] = sum_rest phi[rest, r] * conj(psi[rest, c])`` at qubit
    ``sites[j]``.  Sites whose bit is low enough are handled together while a
    cache-sized chunk of both vectors is resident; the rest get one streaming
    pass each.  Fastest when the requested sites are the low-order qubits.
    """
    cdef long n = nqubits
    cdef long ns = sites.shape[0]
    cdef long size = (<long>1) << n
    cdef long chunk = (<long>1) << 13
    cdef long j, k, c0
    cdef long masks[64]
    cdef double acc[64][8]
    cdef double* f = <double*> &phi[0]
    cdef double* g = <double*> &psi[0]
    if phi.shape[0] != size or psi.shape[0] != size:
        raise ValueError("vector length does not match qubit count")
    if ns > 64:
        raise ValueError("at most 64 sites")
    if out.shape[0] != ns or out.shape[1] != 2 or out.shape[2] != 2:
        raise ValueError("output buffer has the wrong shape")
    for j in range(ns):
        if sites[j] < 0 or sites[j] >= n:
            raise ValueError("site out of range")
        masks[j] = (<long>1) << (n - 1 - sites[j])
        for k in range(8):
            acc[j][k] = 0.0
    if chunk > size:
        chunk = size
    with nogil:
        c0 = 0
        while c0 < size:
            for j in range(ns):
                if 2 * masks[j] <= chunk:
                    _pair_sums(f, g, c0, c0 + chunk, masks[j], acc[j])
            c0 += chunk
        for j in range(ns):
            if 2 * masks[j] > chunk:
                _pair_sums(f, g, 0, size, masks[j], acc[j])
    for j in range(ns):
        out[j, 0, 0] = acc[j][0] + 1j * acc[j][1]
        out[j, 0, 1] = acc[j][2] + 1j * acc[j][3]
        out[j, 1, 0] = acc[j][4] + 1j * acc[j][5]
        out[j, 1, 1] = acc[j][6] + 1j * acc[j][7]
