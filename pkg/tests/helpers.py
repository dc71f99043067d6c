"""Independent oracles shared by the test modules.

Everything here recomputes expected values from first principles (brute
force, enumeration, finite differences) without touching the production
code paths under test.
"""

import itertools

import numpy as np


def brute_firm_binary(scores, fvals, probs=None):
    """Signed binary importance straight from the definition.

    Splits the support on the two feature values, takes probability
    weighted conditional mean scores, and returns
    (q_hi - q_lo) * sqrt(p_hi * p_lo) with hi the larger feature value.
    """
    scores = np.asarray(scores, dtype=float)
    fvals = np.asarray(fvals, dtype=float)
    if probs is None:
        probs = np.full(len(scores), 1.0 / len(scores))
    probs = np.asarray(probs, dtype=float)
    vals = np.unique(fvals)
    assert len(vals) == 2, "oracle needs a binary feature"
    lo, hi = vals
    m_hi = fvals == hi
    p_hi = probs[m_hi].sum()
    p_lo = probs[~m_hi].sum()
    q_hi = (probs[m_hi] * scores[m_hi]).sum() / p_hi
    q_lo = (probs[~m_hi] * scores[~m_hi]).sum() / p_lo
    return (q_hi - q_lo) * np.sqrt(p_hi * p_lo)


def central_difference_gradient(fun, x, step=1e-5):
    """Central finite differences of a scalar function of a vector."""
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    for j in range(x.size):
        up = x.copy()
        dn = x.copy()
        up[j] += step
        dn[j] -= step
        g[j] = (fun(up) - fun(dn)) / (2 * step)
    return g


def enumerate_sequences(alphabet, length):
    """All |alphabet|^length sequences as strings."""
    return ["".join(t) for t in itertools.product(alphabet, repeat=length)]


def enum_expected_score(score_fun, alphabet, length, letter_prob):
    """E[score] by exhaustive enumeration under independent letters."""
    total = 0.0
    for seq in enumerate_sequences(alphabet, length):
        p = 1.0
        for ch in seq:
            p *= letter_prob[ch]
        total += p * score_fun(seq)
    return total


def enum_conditional_score(score_fun, alphabet, length, letter_prob, z, j):
    """E[score | substring z at j] by exhaustive enumeration."""
    num = 0.0
    den = 0.0
    for seq in enumerate_sequences(alphabet, length):
        if seq[j:j + len(z)] != z:
            continue
        p = 1.0
        for ch in seq:
            p *= letter_prob[ch]
        num += p * score_fun(seq)
        den += p
    return num / den


def all_pm1_rows(d):
    """The full 2^d enumeration of ±1 points, one per row."""
    return np.array(list(itertools.product([-1.0, 1.0], repeat=d)))
