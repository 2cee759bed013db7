"""Corpus statistics: label counts, conversion rates, attachment agreement,
cross-corpus comparison and longitudinal trends.

Every report can be rendered as TSV (one row per label) and as JSON.
"""
from __future__ import annotations

import json
import logging
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy.special import betainc

from .treebank import Session

log = logging.getLogger(__name__)

SIGNIFICANCE = 0.01
DEFAULT_THRESHOLD = 0.005
DEFAULT_SMOOTH = 5


class AnalyticsError(ValueError):
    """Inputs that cannot support the requested statistic."""


class ConsistencyError(AnalyticsError):
    pass


class AgreementError(AnalyticsError):
    pass


class InsufficientDataError(AnalyticsError):
    pass


def _trees(items):
    out = []
    for item in items:
        if isinstance(item, Session):
            out.extend(item.trees)
        else:
            out.append(item)
    return out


def _num(x):
    """Stable text for a TSV cell."""
    if x is None:
        return "n/a"
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x)
    return str(x)


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return _num(x)
    return x


def render_tsv(header, rows):
    lines = ["\t".join(header)]
    lines.extend("\t".join(_num(c) for c in row) for row in rows)
    return "\n".join(lines) + "\n"


def render_json(doc):
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------- label counts

@dataclass(frozen=True)
class LabelStats:
    counts: dict          # deprel -> occurrences (subtypes kept distinct)
    presence: dict        # deprel -> number of sentences containing it
    tokens: int
    sentences: int
    sentence_labels: tuple = field(default=(), repr=False)  # ((sentence_id, Counter), ...)

    @property
    def labels(self):
        return sorted(self.counts)

    @property
    def edges(self):
        return sum(self.counts.values())

    @property
    def mean_length(self):
        return self.tokens / self.sentences if self.sentences else 0.0

    def frequency(self, label):
        """Occurrences per token."""
        return self.counts.get(label, 0) / self.tokens if self.tokens else 0.0

    def presence_proportion(self, label):
        return self.presence.get(label, 0) / self.sentences if self.sentences else 0.0

    def rows(self):
        return [(lab, self.counts[lab], self.frequency(lab), self.presence_proportion(lab))
                for lab in self.labels]

    def to_tsv(self):
        return render_tsv(("label", "count", "per_token", "sentence_proportion"), self.rows())

    def to_json(self):
        return render_json({
            "tokens": self.tokens, "sentences": self.sentences,
            "mean_tokens_per_sentence": self.mean_length,
            "labels": {lab: {"count": c, "per_token": f, "sentence_proportion": p}
                       for lab, c, f, p in self.rows()},
        })


def label_counts(items):
    """Count dependency labels over trees or Sessions."""
    counts, presence = Counter(), Counter()
    per_sentence = []
    tokens = 0
    trees = _trees(items)
    for tree in trees:
        c = Counter(t.deprel for t in tree.tokens)
        counts.update(c)
        presence.update(c.keys())
        tokens += len(tree.tokens)
        per_sentence.append((tree.sentence_id, c))
    return LabelStats(dict(counts), dict(presence), tokens, len(trees), tuple(per_sentence))


# ---------------------------------------------------------------- conversion rates

@dataclass(frozen=True)
class LabelRate:
    label: str
    count: int
    converted: int

    @property
    def rate(self):
        return self.converted / self.count if self.count else None


@dataclass(frozen=True)
class ConversionRates:
    rates: tuple  # LabelRate sorted by label
    sentences: int
    converted_sentences: int

    def __getitem__(self, label):
        for r in self.rates:
            if r.label == label:
                return r
        raise KeyError(label)

    @property
    def overall(self):
        return self.converted_sentences / self.sentences if self.sentences else None

    def to_tsv(self):
        return render_tsv(("label", "count", "converted", "rate"),
                          [(r.label, r.count, r.converted, r.rate) for r in self.rates])

    def to_json(self):
        return render_json({
            "sentences": self.sentences, "converted": self.converted_sentences,
            "rate": self.overall if self.overall is not None else "n/a",
            "labels": {r.label: {"count": r.count, "converted": r.converted, "rate": r.rate}
                       for r in self.rates},
        })


def conversion_rates(stats, outcomes):
    """Share of each label's occurrences that sit in converted sentences.

    A label occurrence counts as not converted when its sentence failed.
    """
    ids = [sid for sid, _ in stats.sentence_labels]
    if len(set(ids)) != len(ids):
        dup = sorted(k for k, v in Counter(ids).items() if v > 1)
        raise ConsistencyError(f"duplicate sentence ids in statistics: {', '.join(dup[:5])}")
    status = {}
    for o in outcomes:
        if o.sentence_id in status:
            raise ConsistencyError(f"duplicate outcome for sentence {o.sentence_id}")
        status[o.sentence_id] = o.ok
    missing = sorted(set(ids) - set(status))
    extra = sorted(set(status) - set(ids))
    if missing or extra:
        raise ConsistencyError(
            f"sentence ids differ: {len(missing)} without outcome {missing[:5]}, "
            f"{len(extra)} outcomes for unknown sentences {extra[:5]}")
    converted = Counter()
    for sid, c in stats.sentence_labels:
        if status[sid]:
            converted.update(c)
    rates = tuple(LabelRate(lab, stats.counts[lab], converted.get(lab, 0)) for lab in stats.labels)
    return ConversionRates(rates, len(ids), sum(status.values()))


# ---------------------------------------------------------------- agreement

@dataclass(frozen=True)
class AgreementReport:
    tokens: int
    labeled: int      # tokens with matching head and deprel
    unlabeled: int    # tokens with matching head
    sentences: int
    skipped: tuple    # sentence ids not compared
    confusion: dict   # (deprel_a, deprel_b) -> count

    @property
    def las(self):
        return self.labeled / self.tokens

    @property
    def uas(self):
        return self.unlabeled / self.tokens

    def label_rows(self):
        """Per label of side A: tokens, label matches, and confusions."""
        rows = []
        for lab in sorted({a for a, _ in self.confusion}):
            total = sum(n for (a, _), n in self.confusion.items() if a == lab)
            same = self.confusion.get((lab, lab), 0)
            rows.append((lab, total, same, same / total))
        return rows

    def to_tsv(self):
        lines = [f"# tokens={self.tokens} sentences={self.sentences} "
                 f"LAS={_num(self.las)} UAS={_num(self.uas)}"]
        body = render_tsv(("label_a", "label_b", "count"),
                          [(a, b, n) for (a, b), n in sorted(self.confusion.items())])
        return "\n".join(lines) + "\n" + body

    def to_json(self):
        return render_json({
            "tokens": self.tokens, "sentences": self.sentences, "skipped": list(self.skipped),
            "las": self.las, "uas": self.uas,
            "confusion": [{"a": a, "b": b, "count": n}
                          for (a, b), n in sorted(self.confusion.items())],
        })


def attachment_agreement(trees_a, trees_b, exclude_punct=False):
    """LAS/UAS between two annotations of the same sentences.

    Sentences are paired by id; pairs whose token forms differ are skipped
    with a warning.  Punctuation is included unless ``exclude_punct``.
    """
    a_by_id = {t.sentence_id: t for t in _trees(trees_a)}
    b_by_id = {t.sentence_id: t for t in _trees(trees_b)}
    skipped = []
    tokens = labeled = unlabeled = sentences = 0
    confusion = Counter()
    for sid, ta in a_by_id.items():
        tb = b_by_id.get(sid)
        if tb is None:
            log.warning("sentence %s missing from the second treebank", sid)
            skipped.append(sid)
            continue
        if ta.forms != tb.forms:
            log.warning("sentence %s: tokenization differs, skipped", sid)
            skipped.append(sid)
            continue
        sentences += 1
        for x, y in zip(ta.tokens, tb.tokens):
            if exclude_punct and (x.upos == "PUNCT" or x.deprel == "punct"):
                continue
            tokens += 1
            confusion[(x.deprel, y.deprel)] += 1
            if x.head == y.head:
                unlabeled += 1
                if x.deprel == y.deprel:
                    labeled += 1
    for sid in b_by_id:
        if sid not in a_by_id:
            log.warning("sentence %s missing from the first treebank", sid)
            skipped.append(sid)
    if tokens == 0:
        raise AgreementError("no comparable sentences")
    return AgreementReport(tokens, labeled, unlabeled, sentences, tuple(skipped), dict(confusion))


# ---------------------------------------------------------------- comparison

@dataclass(frozen=True)
class DiffRow:
    label: str
    freq_a: float
    freq_b: float

    @property
    def diff(self):
        return self.freq_a - self.freq_b

    @property
    def higher(self):
        return "A" if self.diff > 0 else "B" if self.diff < 0 else "="


@dataclass(frozen=True)
class Comparison:
    threshold: float
    rows: tuple     # DiffRow with |diff| > threshold, largest signed difference first
    equal: tuple    # labels with identical per-token frequency

    @property
    def labels(self):
        return [r.label for r in self.rows]

    def to_tsv(self):
        return render_tsv(("label", "per_token_a", "per_token_b", "difference", "higher"),
                          [(r.label, r.freq_a, r.freq_b, r.diff, r.higher) for r in self.rows])

    def to_json(self):
        return render_json({
            "threshold": self.threshold,
            "rows": [{"label": r.label, "per_token_a": r.freq_a, "per_token_b": r.freq_b,
                      "difference": r.diff, "higher": r.higher} for r in self.rows],
        })


def compare_corpora(stats_a, stats_b, threshold=DEFAULT_THRESHOLD):
    """Labels whose count per token differs by more than ``threshold``."""
    rows, equal = [], []
    for lab in sorted(set(stats_a.counts) | set(stats_b.counts)):
        row = DiffRow(lab, stats_a.frequency(lab), stats_b.frequency(lab))
        if row.diff == 0:
            equal.append(lab)
        if abs(row.diff) > threshold:
            rows.append(row)
    rows.sort(key=lambda r: (-r.diff, r.label))
    return Comparison(threshold, tuple(rows), tuple(equal))


# ---------------------------------------------------------------- trends

@dataclass(frozen=True)
class Fit:
    slope: float
    intercept: float
    t: float
    p: float
    n: int

    @property
    def significant(self):
        return self.p < SIGNIFICANCE


def t_pvalue(t, df):
    """Two-sided p-value of a t statistic."""
    if math.isinf(t):
        return 0.0
    if math.isnan(t):
        return float("nan")
    return float(betainc(df / 2.0, 0.5, df / (df + t * t)))


def ols(x, y):
    """Least-squares line of y on x with the slope's t test (df = n - 2)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(x)
    if n < 3:
        raise InsufficientDataError(f"need at least 3 points, got {n}")
    xm, ym = x.mean(), y.mean()
    dx = x - xm
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise InsufficientDataError("ages have zero variance")
    slope = float(dx @ (y - ym)) / sxx
    intercept = float(ym - slope * xm)
    resid = y - (intercept + slope * x)
    sse = float(resid @ resid)
    df = n - 2
    se = math.sqrt(sse / df / sxx)
    if se == 0.0:
        # exact fit: infinite t unless the line is flat
        t = math.copysign(math.inf, slope) if slope else 0.0
    else:
        t = slope / se
    return Fit(slope, intercept, t, t_pvalue(t, df), n)


def moving_average(values, window=DEFAULT_SMOOTH):
    """Centered moving average; the window shrinks at the ends of the series."""
    if window <= 1:
        return [float(v) for v in values]
    half = window // 2
    n = len(values)
    out = []
    for i in range(n):
        lo, hi = max(0, i - half), min(n, i + half + 1)
        out.append(float(sum(values[lo:hi])) / (hi - lo))
    return out


@dataclass(frozen=True)
class LabelTrend:
    label: str
    ages: tuple
    proportions: tuple
    fit: Fit | None = None
    error: str | None = None

    @property
    def significant(self):
        return self.fit is not None and self.fit.significant


@dataclass(frozen=True)
class TrendReport:
    trends: tuple   # LabelTrend sorted by label
    sessions: tuple  # session ids in age order
    smooth: int = DEFAULT_SMOOTH

    def __getitem__(self, label):
        for tr in self.trends:
            if tr.label == label:
                return tr
        raise KeyError(label)

    @property
    def significant(self):
        return [tr.label for tr in self.trends if tr.significant]

    def to_tsv(self):
        rows = []
        for tr in self.trends:
            f = tr.fit
            if f is None:
                rows.append((tr.label, None, None, None, None, None, len(tr.ages), tr.error))
            else:
                rows.append((tr.label, f.slope, f.intercept, f.t, f.p,
                             "yes" if f.significant else "no", f.n, ""))
        return render_tsv(("label", "slope", "intercept", "t", "p", "significant", "sessions",
                           "error"), rows)

    def points_tsv(self):
        """Plot-ready points: raw and smoothed proportion per session."""
        rows = []
        for tr in self.trends:
            smoothed = moving_average(list(tr.proportions), self.smooth)
            for sid, age, p, s in zip(self.sessions, tr.ages, tr.proportions, smoothed):
                rows.append((tr.label, sid, age, p, s))
        return render_tsv(("label", "session", "age_months", "proportion", "smoothed"), rows)

    def to_json(self):
        labels = {}
        for tr in self.trends:
            entry = {"ages": list(tr.ages), "proportions": list(tr.proportions),
                     "smoothed": moving_average(list(tr.proportions), self.smooth)}
            if tr.fit is None:
                entry["error"] = tr.error
            else:
                f = tr.fit
                entry.update(slope=f.slope, intercept=f.intercept, t=_jsonable(f.t),
                             p=_jsonable(f.p), significant=f.significant)
            labels[tr.label] = entry
        return render_json({
            "alpha": SIGNIFICANCE, "multiple_comparison_correction": "none",
            "smoothing_window": self.smooth, "sessions": list(self.sessions),
            "labels": labels,
        })


def session_proportions(sessions):
    """label -> per-session proportion of sentences containing the label."""
    labels = sorted({t.deprel for s in sessions for tree in s.trees for t in tree.tokens})
    table = {lab: [] for lab in labels}
    for s in sessions:
        n = len(s.trees)
        present = Counter()
        for tree in s.trees:
            present.update({t.deprel for t in tree.tokens})
        for lab in labels:
            table[lab].append(present[lab] / n if n else 0.0)
    return table


def longitudinal_trends(sessions, smooth=DEFAULT_SMOOTH):
    """Regress each label's per-session sentence proportion on child age.

    The regression uses the raw points; ``smooth`` only affects plot data.
    Labels that cannot be fitted carry an ``insufficient-data`` error.
    """
    sessions = sorted(sessions, key=lambda s: s.child_age_months)
    ages = tuple(float(s.child_age_months) for s in sessions)
    trends = []
    for lab, props in session_proportions(sessions).items():
        try:
            fit = ols(ages, props)
            trends.append(LabelTrend(lab, ages, tuple(props), fit))
        except InsufficientDataError as exc:
            trends.append(LabelTrend(lab, ages, tuple(props), None, f"insufficient-data: {exc}"))
    return TrendReport(tuple(trends), tuple(s.session_id for s in sessions), smooth)
