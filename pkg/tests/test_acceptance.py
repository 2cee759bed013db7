"""Acceptance checks. Each criterion prints one PASS/FAIL line.

Run with pytest, or directly: ``python tests/test_acceptance.py``.
"""
import itertools
import random
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest
import statsmodels.api as sm

sys.path.insert(0, str(Path(__file__).resolve().parent))

from helpers import DATA, TermGen, expected_table, tree  # noqa: E402
from ud2lf.analytics import (attachment_agreement, conversion_rates, label_counts,  # noqa: E402
                             longitudinal_trends, ols)
from ud2lf.cli import main  # noqa: E402
from ud2lf.lam import (alpha_equivalent, beta_reduce, canonical, is_normal, is_redex,  # noqa: E402
                       parse_lf, rename_bound, size, subterms, type_of)
from ud2lf.transducer import convert_corpus, default_converter  # noqa: E402
from ud2lf.treebank import Session, Token, read_conllu, with_tokens  # noqa: E402

FIXTURES = Path(__file__).resolve().parent / "fixtures"


def _matches(outcome, expected):
    if expected.startswith("!"):
        return outcome.failure == expected[1:]
    return outcome.ok and alpha_equivalent(outcome.lf, parse_lf(expected), typed_constants=False)


def golden():
    conv = default_converter("en")
    table = expected_table()
    trees = read_conllu(DATA / "golden.conllu")
    start = time.perf_counter()
    outcomes = [conv.convert(t) for t in trees]
    elapsed = time.perf_counter() - start
    good = sum(_matches(o, table[o.sentence_id]) for o in outcomes)
    return good == len(trees) == 38 and elapsed < 1.0, \
        f"{good}/{len(trees)} alpha-equivalent in {elapsed:.3f}s"


def limitations():
    conv = default_converter("en")
    table = expected_table()
    trees = read_conllu(DATA / "limitations.conllu")
    good = sum(_matches(conv.convert(t), table[t.sentence_id]) for t in trees)
    return good == len(trees) == 6, f"{good}/{len(trees)} as documented"


def _hand_rates():
    rows = {}
    for line in (FIXTURES / "conversion_rates.tsv").read_text().splitlines():
        if not line.startswith("#"):
            lab, total, conv = line.split("\t")
            rows[lab] = int(conv) / int(total)
    return rows


def conversion_rate():
    trees = read_conllu(DATA / "corpus.conllu")
    outcomes, summary = convert_corpus(trees, default_converter("en"))
    rates = conversion_rates(label_counts(trees), outcomes)
    hand = _hand_rates()
    got = {r.label: r.rate for r in rates.rates}
    return summary.rate == 0.8 and len(trees) == 50 and got == hand, \
        f"rate {summary.rate} on {len(trees)} sentences; {len(hand)} label rates vs hand table " \
        f"{'equal' if got == hand else 'DIFFER'}"


def _perturb(trees, k, rng):
    slots = [(i, j) for i, t in enumerate(trees) for j in range(len(t))]
    chosen = set(rng.sample(slots, k))
    out = []
    for i, t in enumerate(trees):
        toks = list(t.tokens)
        for j, tok in enumerate(toks):
            if (i, j) in chosen:
                heads = [h for h in range(len(toks) + 1) if h not in (tok.head, tok.id)]
                toks[j] = Token(tok.id, tok.form, tok.lemma, tok.upos, head=rng.choice(heads),
                                deprel=tok.deprel)
        out.append(with_tokens(t, toks))
    return out


def agreement():
    trees = read_conllu(DATA / "golden.conllu")
    same = attachment_agreement(trees, trees)
    flip = attachment_agreement(read_conllu(FIXTURES / "flip_a.conllu"),
                                read_conllu(FIXTURES / "flip_b.conllu"))
    n = same.tokens
    rng = random.Random(7)
    bad = 0
    for _ in range(50):
        k = rng.randrange(n + 1)
        if attachment_agreement(trees, _perturb(trees, k, rng)).uas != (n - k) / n:
            bad += 1
    ok = (same.las, same.uas) == (1.0, 1.0) and (flip.las, flip.uas) == (0.75, 1.0) and bad == 0
    return ok, f"self {same.las}/{same.uas}, flip {flip.las}/{flip.uas}, " \
               f"perturbation mismatches {bad}/50"


def trends():
    sessions = []
    for s, (age, k) in enumerate([(20, 1), (21, 2), (22, 3)]):
        trees = [tree("a a VERB 0 root\nb b NOUN 1 dobj" if i < k else "a a NOUN 0 root",
                      sid=f"{s}-{i}") for i in range(10)]
        sessions.append(Session(f"s{s}", age, trees))
    line = longitudinal_trends(sessions)["dobj"].fit
    line_ok = abs(line.slope - 0.1) <= 1e-12 and line.p < 1e-6
    rng = random.Random(2024)
    worst, flags = 0.0, 0
    for _ in range(200):
        n = rng.randrange(3, 40)
        x = [rng.uniform(12, 60) for _ in range(n)]
        slope = rng.choice([0.0, rng.uniform(-0.02, 0.02)])
        y = [0.3 + slope * a + rng.gauss(0, rng.uniform(0.001, 0.2)) for a in x]
        fit = ols(x, y)
        res = sm.OLS(np.asarray(y), sm.add_constant(np.asarray(x))).fit()
        worst = max(worst, abs(fit.slope - res.params[1]), abs(fit.p - res.pvalues[1]),
                    abs(fit.t - res.tvalues[1]) / max(1.0, abs(res.tvalues[1])))
        flags += fit.significant == (res.pvalues[1] < 0.01)
    ok = line_ok and worst <= 1e-9 and flags == 200
    return ok, f"line slope {line.slope!r} p {line.p:.3g}; 200 series max err {worst:.2e}, " \
               f"flag agreement {flags}/200"


def lambda_properties():
    start = time.perf_counter()
    failures = {"subject": 0, "normal": 0, "canonical": 0, "alpha": 0, "confluence": 0}
    small = 0
    for seed in range(10_000):
        t = TermGen(seed).term()
        nf = beta_reduce(t)
        if type_of(nf) != type_of(t):
            failures["subject"] += 1
        if not is_normal(nf) or any(is_redex(s) for s in subterms(nf)):
            failures["normal"] += 1
        c = canonical(t)
        if canonical(c) != c:
            failures["canonical"] += 1
        counter = itertools.count()
        if not alpha_equivalent(t, rename_bound(t, lambda v: f"u{next(counter)}")):
            failures["alpha"] += 1
        if size(t) <= 30:
            small += 1
            if not alpha_equivalent(nf, beta_reduce(t, strategy="innermost")):
                failures["confluence"] += 1
    elapsed = time.perf_counter() - start
    ok = not any(failures.values()) and elapsed < 30
    bad = ", ".join(f"{k}={v}" for k, v in failures.items() if v) or "no violations"
    return ok, f"10000 terms ({small} checked for confluence) in {elapsed:.1f}s, {bad}"


def determinism():
    with tempfile.TemporaryDirectory() as tmp:
        outs = []
        for jobs in ("1", "8"):
            out = Path(tmp) / f"j{jobs}"
            rc = main(["convert", "--in", str(DATA / "corpus.conllu"), "--jobs", jobs,
                       "--out", str(out)])
            outs.append((rc, {p.name: p.read_bytes() for p in sorted(out.iterdir())}))
    (rc1, a), (rc8, b) = outs
    return rc1 == rc8 == 0 and a == b and len(a) == 3, \
        f"{len(a)} output files {'byte-identical' if a == b else 'DIFFER'}"


CRITERIA = [
    ("golden", golden),
    ("limitations", limitations),
    ("conversion-rate", conversion_rate),
    ("agreement", agreement),
    ("trends", trends),
    ("lambda-properties", lambda_properties),
    ("determinism", determinism),
]


def report(name, fn):
    ok, detail = fn()
    print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return ok


@pytest.mark.parametrize("name,fn", CRITERIA, ids=[c[0] for c in CRITERIA])
def test_criterion(name, fn, capsys):
    with capsys.disabled():
        print()
        ok = report(name, fn)
    assert ok


if __name__ == "__main__":
    results = [report(name, fn) for name, fn in CRITERIA]
    sys.exit(0 if all(results) else 1)
