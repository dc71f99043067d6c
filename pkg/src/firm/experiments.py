"""The three simulation studies, as pure artifact-producing functions.

Each function computes its complete result set and returns a dict mapping
artifact file names to text content, plus a structured summary that tests
can inspect directly. All randomness flows from the single seed argument.
"""

from __future__ import annotations

import itertools

import numpy as np

from . import _emit
from .binary import PointDistribution, firm_binary_exact
from .dataset import DNA_ALPHABET, SequenceDataset, TabularDataset
from .errors import FirmError
from .empirical import conditional_curve, default_bins, firm_slope, slope_stderr
from .features import SignedConjunction
from .scoring import (KernelSpec, LabelOracleScorer, score_many,
                      train_kernel_ridge, train_least_squares,
                      train_positional_kmer)
from .sequence import MarkovBackground, hamming_ball, poim, ranked_oligomers

BOOLEAN_LAMBDA = 0.1
GAUSSIAN_CLASS_MEANS = (0.5, 1.5, 0.0)
MOTIF = "GATTACA"


# ---------------------------------------------------------------------------
# boolean formula on the ±1 truth table
# ---------------------------------------------------------------------------

def boolean_truth_table() -> TabularDataset:
    """All 8 points of {-1,+1}^3 labeled by x1 OR (NOT x1 AND NOT x2)."""
    rows = np.array(list(itertools.product([-1.0, 1.0], repeat=3)))
    y = np.array([1.0 if (r[0] > 0 or r[1] < 0) else -1.0 for r in rows])
    return TabularDataset(X=rows, y=y, names=("x1", "x2", "x3"))


def boolean_single_features():
    return [SignedConjunction(literals=((j, s),)) for j in range(3) for s in (1, -1)]


def boolean_pair_features():
    feats = []
    for j, k in [(0, 1), (0, 2), (1, 2)]:
        for sj, sk in [(1, 1), (1, -1), (-1, 1), (-1, -1)]:
            feats.append(SignedConjunction(literals=((j, sj), (k, sk))))
    return feats


def boolean_experiment(lam: float = BOOLEAN_LAMBDA):
    data = boolean_truth_table()
    dist = PointDistribution.from_dataset(data)
    scorers = {
        "labels": LabelOracleScorer.from_dataset(data),
        "trained": train_kernel_ridge(data, KernelSpec.polynomial(2, 1.0), lam),
    }
    singles = boolean_single_features()
    pairs = boolean_pair_features()
    results = {tag: {"single": [firm_binary_exact(sc, f, dist) for f in singles],
                     "pairs": [firm_binary_exact(sc, f, dist) for f in pairs]}
               for tag, sc in scorers.items()}

    artifacts = {}
    flat_rows = []
    for tag in ("labels", "trained"):
        for r in results[tag]["single"] + results[tag]["pairs"]:
            flat_rows.append([tag, r.feature, r.q_signed, r.q_abs])
    artifacts["firm_boolean.tsv"] = _emit.tsv(
        ["scorer", "feature", "q_signed", "q_abs"], flat_rows)

    # heat-map style grids: polarity rows x variable (or pair) columns
    for tag in ("labels", "trained"):
        single_q = {r.feature: r.q_signed for r in results[tag]["single"]}
        rows = [[label] + [single_q[f"and({sign}{j + 1})"] for j in range(3)]
                for sign, label in (("+", "pos"), ("-", "neg"))]
        artifacts[f"grid_single_{tag}.tsv"] = _emit.tsv(
            ["polarity", "x1", "x2", "x3"], rows)
        pair_q = {r.feature: r.q_signed for r in results[tag]["pairs"]}
        cols = [(1, 2), (1, 3), (2, 3)]
        rows = []
        for s1, s2 in [("+", "+"), ("+", "-"), ("-", "+"), ("-", "-")]:
            rows.append([f"{s1}{s2}"] + [pair_q[f"and({s1}{a},{s2}{b})"]
                                         for a, b in cols])
        artifacts[f"grid_pairs_{tag}.tsv"] = _emit.tsv(
            ["signs", "x1^x2", "x1^x3", "x2^x3"], rows)

    artifacts["run.json"] = _emit.run_metadata(
        "experiment-boolean", {"lambda": lam, "kernel": "polynomial:2:1"})
    return artifacts, results


# ---------------------------------------------------------------------------
# two 3-d normal classes
# ---------------------------------------------------------------------------

def gaussian_experiment(seed: int = 42, n_per_class: int = 1000,
                        bins: int | None = None):
    """Linear classifier on two normal classes; dimension 2 is the most
    informative, dimension 3 pure noise."""
    rng = np.random.default_rng(seed)
    means = np.array(GAUSSIAN_CLASS_MEANS)
    X_pos = rng.normal(size=(n_per_class, 3)) + means
    X_neg = rng.normal(size=(n_per_class, 3)) - means
    X = np.vstack([X_pos, X_neg])
    y = np.concatenate([np.ones(n_per_class), -np.ones(n_per_class)])
    data = TabularDataset(X=X, y=y, names=("x1", "x2", "x3"))
    scorer = train_least_squares(data)
    scores = score_many(scorer, X)

    results = []
    stderrs = []
    artifacts = {}
    nbins = bins if bins is not None else default_bins(data.n)
    for j in range(3):
        results.append(firm_slope(scores, X[:, j], feature=data.names[j]))
        stderrs.append(slope_stderr(scores, X[:, j]))
        curve = conditional_curve(scores, X[:, j], nbins)
        artifacts[f"curves/{data.names[j]}.tsv"] = _emit.curve_tsv(curve)

    rows = [[r.feature, r.q_signed, r.q_abs, se]
            for r, se in zip(results, stderrs)]
    artifacts["firm.tsv"] = _emit.tsv(["feature", "q_signed", "q_abs", "stderr"], rows)
    artifacts["run.json"] = _emit.run_metadata("experiment-gaussian", {
        "seed": seed, "n_per_class": n_per_class, "bins": nbins,
        "class_means": list(means), "class_covariance": "identity",
        "scorer": "train:least_squares"})
    return artifacts, {"results": results, "stderrs": stderrs, "scorer": scorer}


# ---------------------------------------------------------------------------
# planted-motif sequence classification
# ---------------------------------------------------------------------------

def generate_motif_dataset(rng, n_per_class: int = 500, seq_len: int = 50,
                           center: int = 25, sd: float = 7.0,
                           motif: str = MOTIF) -> SequenceDataset:
    """Random DNA; positives carry the motif planted at a normal-rounded
    position (clamped to fit) with exactly one position mutated to a
    uniformly random letter (so about a quarter of plants stay intact)."""
    alphabet = DNA_ALPHABET
    seqs = []
    ys = []
    sym = {a: i for i, a in enumerate(alphabet)}
    for klass in (1.0, -1.0):
        for _ in range(n_per_class):
            s = rng.integers(0, len(alphabet), size=seq_len)
            if klass > 0:
                pos = int(np.clip(round(rng.normal(center, sd)), 0,
                                  seq_len - len(motif)))
                planted = [sym[c] for c in motif]
                planted[rng.integers(0, len(motif))] = rng.integers(0, len(alphabet))
                s[pos:pos + len(motif)] = planted
            seqs.append("".join(alphabet[i] for i in s))
            ys.append(klass)
    return SequenceDataset(sequences=tuple(seqs), y=np.array(ys), alphabet=alphabet)


def weight_importance(scorer, z: str, j: int) -> float:
    """Raw-weight stand-in for the importance of string z at position j:
    the largest |w| among the scorer's substrings of z at matching spots."""
    best = 0.0
    for k in range(1, scorer.max_degree + 1):
        for o in range(len(z) - k + 1):
            w = scorer.weights.get((j + o, z[o:o + k]), 0.0)
            if abs(w) > best:
                best = abs(w)
    return best


def sequence_experiment(seed: int = 42, n_per_class: int = 500, seq_len: int = 50,
                        degree: int = 3, lam: float = 0.1, k: int = 7,
                        top: int = 20, n_irrelevant: int = 300,
                        center: int = 25, sd: float = 7.0):
    if k != len(MOTIF):
        raise FirmError(f"the motif-graded series need k = {len(MOTIF)}")
    rng = np.random.default_rng(seed)
    data = generate_motif_dataset(rng, n_per_class=n_per_class, seq_len=seq_len,
                                  center=center, sd=sd)
    scorer = train_positional_kmer(data, K=degree, lam=lam)
    bg = MarkovBackground.uniform(data.alphabet)
    table = poim(scorer, bg, k=k)
    npos = table.positions

    motif = MOTIF
    ed1 = hamming_ball(motif, 1, data.alphabet)
    ed2 = hamming_ball(motif, 2, data.alphabet)
    # strings disagreeing with the motif at every position
    others = [[a for a in data.alphabet if a != c] for c in motif]
    irrelevant = ["".join(rng.choice(choices) for choices in others)
                  for _ in range(n_irrelevant)]

    def firm_series(strings):
        idx = [table.oligomer_index(z) for z in strings]
        return table.firm_values[idx, :]

    def weight_series(strings):
        return np.array([[weight_importance(scorer, z, j) for j in range(npos)]
                         for z in strings])

    series = {}
    for tag, importance in (("poim", firm_series), ("weight", weight_series)):
        exact = importance([motif])[0]
        ed1_mean = importance(ed1).mean(axis=0)
        ed2_mean = importance(ed2).mean(axis=0)
        irr = importance(irrelevant)
        series[tag] = {
            "exact": exact, "ed1_mean": ed1_mean, "ed2_mean": ed2_mean,
            "irrelevant_mean": irr.mean(axis=0), "irrelevant_sd": irr.std(axis=0),
        }

    artifacts = {}
    for tag in ("poim", "weight"):
        s = series[tag]
        rows = [[j, s["exact"][j], s["ed1_mean"][j], s["ed2_mean"][j],
                 s["irrelevant_mean"][j], s["irrelevant_sd"][j]]
                for j in range(npos)]
        artifacts[f"{tag}_series.tsv"] = _emit.tsv(
            ["position", "exact_motif", "ed1_mean", "ed2_mean",
             "irrelevant_mean", "irrelevant_sd"], rows)

    max_w = [max((abs(w) for (i, _), w in scorer.weights.items() if i == pos),
                 default=0.0) for pos in range(seq_len)]
    artifacts["weight_by_position.tsv"] = _emit.tsv(
        ["position", "max_abs_w"], [[i, v] for i, v in enumerate(max_w)])

    absq = np.abs(table.firm_values)
    artifacts["poim_summary.tsv"] = _emit.tsv(
        ["position", "max_abs_q", "mean_abs_q"],
        [[j, absq[:, j].max(), absq[:, j].mean()] for j in range(npos)])

    ranked = ranked_oligomers(table, top=top)
    artifacts["poim_top.tsv"] = _emit.tsv(
        ["rank", "oligomer", "position", "q"],
        [[r + 1, z, j, q] for r, (z, j, q) in enumerate(ranked)])

    artifacts["run.json"] = _emit.run_metadata("experiment-sequence", {
        "seed": seed, "n_per_class": n_per_class, "seq_len": seq_len,
        "degree": degree, "lambda": lam, "k": k, "top": top,
        "n_irrelevant": n_irrelevant, "motif": motif,
        "plant_center": center, "plant_sd": sd,
        "mutations_per_plant": 1, "background": "uniform"})
    return artifacts, {"series": series, "table": table, "scorer": scorer,
                       "ranked": ranked, "data": data}
