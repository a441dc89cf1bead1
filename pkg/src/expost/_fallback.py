"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``."""
import numpy as np


def induced_payoff_matrix(joint, payoff, digits_a, digits_b):
    n_a, n_b = joint.shape
    # reduced[k, sB, xB] = sum_sA joint[sA, sB] * payoff[k(sA), xB]
    reduced = np.einsum("ab,kay->kby", joint, payoff[digits_a])
    gathered = reduced[:, np.arange(n_b)[None, :], digits_b]  # (kA, kB, nB)
    return gathered.sum(axis=2)


def _regret_tables(cond, own_payoff, opp_digits):
    # interim[r, t, x] = sum_s cond[t, s] * own_payoff[x, opp_digits[r, s]]
    interim = np.einsum("ts,rsx->rtx", cond, own_payoff.T[opp_digits])
    return interim.max(axis=2, keepdims=True) - interim


def pure_profile_regrets(cond_a, cond_b, payoff_a, payoff_b, digits_a, digits_b):
    n_a, n_b = cond_a.shape[0], cond_b.shape[0]
    tables_a = _regret_tables(cond_a, payoff_a, digits_b)  # (kB, nA, mA)
    tables_b = _regret_tables(cond_b, payoff_b, digits_a)  # (kA, nB, mB)
    reg_a = tables_a[:, np.arange(n_a)[None, :], digits_a].max(axis=2).T
    reg_b = tables_b[:, np.arange(n_b)[None, :], digits_b].max(axis=2)
    return np.ascontiguousarray(reg_a), np.ascontiguousarray(reg_b)
