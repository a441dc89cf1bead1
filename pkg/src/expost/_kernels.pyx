# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled loops over pure-strategy profiles of the induced normal form.

Pure strategies are rows of a digit table ``digits[k, type] = action``. Both
kernels match the numpy versions in ``_fallback`` to the last bit up to
summation order.
"""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def induced_payoff_matrix(const double[:, ::1] joint, const double[:, ::1] payoff,
                          const long[:, ::1] digits_a, const long[:, ::1] digits_b):
    cdef Py_ssize_t n_a = joint.shape[0], n_b = joint.shape[1]
    cdef Py_ssize_t m_b = payoff.shape[1]
    cdef Py_ssize_t k_a = digits_a.shape[0], k_b = digits_b.shape[0]
    cdef Py_ssize_t k, l, sa, sb, xb
    cdef double acc
    out_arr = np.empty((k_a, k_b), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    reduced_arr = np.empty((n_b, m_b), dtype=np.float64)
    cdef double[:, ::1] reduced = reduced_arr
    for k in range(k_a):
        # reduced[sB, xB] = sum_sA joint[sA, sB] * payoff[k(sA), xB]
        for sb in range(n_b):
            for xb in range(m_b):
                acc = 0.0
                for sa in range(n_a):
                    acc = acc + joint[sa, sb] * payoff[digits_a[k, sa], xb]
                reduced[sb, xb] = acc
        for l in range(k_b):
            acc = 0.0
            for sb in range(n_b):
                acc = acc + reduced[sb, digits_b[l, sb]]
            out[k, l] = acc
    return out_arr


cdef void _regret_table(const double[:, ::1] cond, const double[:, ::1] own_payoff,
                        const long[:, ::1] opp_digits, Py_ssize_t row,
                        double[:, ::1] regret) noexcept nogil:
    # regret[t, x] = max_x' I[t, x'] - I[t, x] with I the interim payoff table
    cdef Py_ssize_t n_own = cond.shape[0], n_opp = cond.shape[1]
    cdef Py_ssize_t m_own = own_payoff.shape[0]
    cdef Py_ssize_t t, x, s
    cdef double acc, best
    for t in range(n_own):
        best = -1e308
        for x in range(m_own):
            acc = 0.0
            for s in range(n_opp):
                acc = acc + cond[t, s] * own_payoff[x, opp_digits[row, s]]
            regret[t, x] = acc
            if acc > best:
                best = acc
        for x in range(m_own):
            regret[t, x] = best - regret[t, x]


def pure_profile_regrets(const double[:, ::1] cond_a, const double[:, ::1] cond_b,
                         const double[:, ::1] payoff_a, const double[:, ::1] payoff_b,
                         const long[:, ::1] digits_a, const long[:, ::1] digits_b):
    """Worst regret of each player for every pure profile ``(k, l)``.

    ``payoff_a[xA, xB]`` and ``payoff_b[xB, xA]`` are own-action-major.
    """
    cdef Py_ssize_t n_a = cond_a.shape[0], n_b = cond_b.shape[0]
    cdef Py_ssize_t m_a = payoff_a.shape[0], m_b = payoff_b.shape[0]
    cdef Py_ssize_t k_a = digits_a.shape[0], k_b = digits_b.shape[0]
    cdef Py_ssize_t k, l, t
    cdef double worst, r
    reg_a_arr = np.empty((k_a, k_b), dtype=np.float64)
    reg_b_arr = np.empty((k_a, k_b), dtype=np.float64)
    cdef double[:, ::1] reg_a = reg_a_arr
    cdef double[:, ::1] reg_b = reg_b_arr
    table_a_arr = np.empty((n_a, m_a), dtype=np.float64)
    cdef double[:, ::1] table_a = table_a_arr
    tables_b_arr = np.empty((k_a, n_b, m_b), dtype=np.float64)
    cdef double[:, :, ::1] tables_b = tables_b_arr
    with nogil:
        for k in range(k_a):
            _regret_table(cond_b, payoff_b, digits_a, k, tables_b[k])
        for l in range(k_b):
            _regret_table(cond_a, payoff_a, digits_b, l, table_a)
            for k in range(k_a):
                worst = 0.0
                for t in range(n_a):
                    r = table_a[t, digits_a[k, t]]
                    if r > worst:
                        worst = r
                reg_a[k, l] = worst
                worst = 0.0
                for t in range(n_b):
                    r = tables_b[k, t, digits_b[l, t]]
                    if r > worst:
                        worst = r
                reg_b[k, l] = worst
    return reg_a_arr, reg_b_arr
