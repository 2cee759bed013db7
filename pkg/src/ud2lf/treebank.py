"""CoNLL-U reading, writing and validation.

Column mapping: ID FORM LEMMA UPOS XPOS FEATS HEAD DEPREL DEPS MISC, where
XPOS carries the opaque morphological atom (e.g. ``verb|find-past``).
FEATS, DEPS and MISC are kept verbatim for round-tripping.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field, replace

log = logging.getLogger(__name__)

UPOS_TAGS = frozenset(
    "VERB NOUN PRON ADJ ADV DET ADP AUX NUM PART PROPN INTJ CONJ CCONJ SCONJ PUNCT SYM X".split()
)

# UD v1 relations
BASE_DEPRELS = frozenset("""
acl advcl advmod amod appos aux auxpass case cc ccomp compound conj cop csubj
csubjpass dep det discourse dislocated dobj expl foreign goeswith iobj list
mark mwe name neg nmod nsubj nsubjpass nummod parataxis punct remnant
reparandum root vocative xcomp
""".split())

CORE_DEPRELS = frozenset("nsubj nsubjpass csubj csubjpass dobj iobj ccomp xcomp".split())


class ConlluError(ValueError):
    def __init__(self, message, line=None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


class StructureError(ValueError):
    def __init__(self, message, sentence_id=None):
        super().__init__(f"sentence {sentence_id}: {message}")
        self.sentence_id = sentence_id


@dataclass(frozen=True)
class Token:
    id: int
    form: str
    lemma: str
    upos: str
    morph: str = "_"
    head: int = 0
    deprel: str = "root"
    feats: str = "_"
    deps: str = "_"
    misc: str = "_"

    @property
    def base_deprel(self):
        return self.deprel.split(":", 1)[0]


@dataclass(frozen=True)
class DepTree:
    tokens: tuple
    sentence_id: str
    text: str | None = None
    comments: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "comments", tuple(self.comments))

    def __len__(self):
        return len(self.tokens)

    def token(self, tid):
        return self.tokens[tid - 1]

    def root(self):
        for t in self.tokens:
            if t.head == 0:
                return t
        raise StructureError("no root", self.sentence_id)

    def children(self, tid):
        return [t for t in self.tokens if t.head == tid]

    def meta(self, key, default=None):
        """Value of a ``# key = value`` comment line."""
        for line in self.comments:
            k, sep, v = line.partition("=")
            if sep and k.strip() == key:
                return v.strip()
        return default

    @property
    def forms(self):
        return tuple(t.form for t in self.tokens)


@dataclass(frozen=True)
class Session:
    session_id: str
    child_age_months: float
    trees: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "trees", tuple(self.trees))


def normalize_deprel(label):
    """acl:relcl_subj -> acl:relcl:subj"""
    return label.replace("_", ":")


# ---------------------------------------------------------------- parsing

def _int(value, what, lineno):
    try:
        return int(value)
    except ValueError:
        raise ConlluError(f"non-integer {what} {value!r}", lineno) from None


def parse_conllu(text, drop_incomplete=False):
    """Parse a CoNLL-U document into DepTrees.

    Multiword-token ranges and empty nodes are skipped with a warning.
    Raises ConlluError for malformed lines and StructureError for heads that
    are out of range or cyclic.
    """
    trees = []
    block, comments, start = [], [], None
    lines = text.split("\n")
    for lineno, raw in enumerate(lines + [""], start=1):
        line = raw.rstrip("\r")
        if not line.strip():
            if block or comments:
                if block:
                    trees.append(_build(block, comments, len(trees) + 1, start))
                block, comments, start = [], [], None
            continue
        if start is None:
            start = lineno
        if line.startswith("#"):
            comments.append(line[1:].strip())
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise ConlluError(f"expected 10 tab-separated columns, got {len(cols)}", lineno)
        if "-" in cols[0] or "." in cols[0]:
            log.warning("line %d: skipping %s node %s", lineno,
                        "multiword" if "-" in cols[0] else "empty", cols[0])
            continue
        tid = _int(cols[0], "id", lineno)
        head = _int(cols[6], "head", lineno)
        block.append((lineno, Token(
            id=tid, form=cols[1], lemma=cols[2], upos=cols[3], morph=cols[4],
            feats=cols[5], head=head, deprel=normalize_deprel(cols[7]),
            deps=cols[8], misc=cols[9])))
    if drop_incomplete:
        kept = [t for t in trees if not is_incomplete(t)]
        if len(kept) != len(trees):
            log.info("dropped %d incomplete utterances", len(trees) - len(kept))
        trees = kept
    return trees


def _build(block, comments, index, start):
    sid, text, rest = None, None, []
    for c in comments:
        key, sep, value = c.partition("=")
        if sep and key.strip() == "sent_id":
            sid = value.strip()
        elif sep and key.strip() == "text":
            text = value.strip()
        else:
            rest.append(c)
    sid = sid or f"s{index}"
    tokens = [tok for _, tok in block]
    for expected, (lineno, tok) in enumerate(block, start=1):
        if tok.id != expected:
            raise ConlluError(f"token id {tok.id} out of sequence (expected {expected})", lineno)
    n = len(tokens)
    for tok in tokens:
        if tok.head < 0 or tok.head > n:
            raise StructureError(f"token {tok.id} has head {tok.head} outside 0..{n}", sid)
        if tok.head == tok.id:
            raise StructureError(f"token {tok.id} is its own head", sid)
    if _cyclic(tokens):
        raise StructureError("head references contain a cycle", sid)
    return DepTree(tuple(tokens), sid, text, tuple(rest))


def _cyclic(tokens):
    heads = {t.id: t.head for t in tokens}
    for start in heads:
        seen = set()
        cur = start
        while cur != 0:
            if cur in seen:
                return True
            seen.add(cur)
            cur = heads.get(cur, 0)
    return False


def is_incomplete(tree):
    """CHILDES marks interrupted utterances with a trailing ``+...``."""
    if tree.text and tree.text.rstrip().endswith("+..."):
        return True
    return any(t.form == "+..." for t in tree.tokens)


def read_conllu(path, drop_incomplete=False):
    with open(path, encoding="utf-8") as f:
        return parse_conllu(f.read(), drop_incomplete=drop_incomplete)


# ---------------------------------------------------------------- writing

def serialize_conllu(tree):
    lines = [f"# sent_id = {tree.sentence_id}"]
    if tree.text is not None:
        lines.append(f"# text = {tree.text}")
    lines.extend(f"# {c}" for c in tree.comments)
    for t in tree.tokens:
        lines.append("\t".join([
            str(t.id), t.form, t.lemma, t.upos, t.morph, t.feats,
            str(t.head), t.deprel, t.deps, t.misc]))
    return "\n".join(lines) + "\n"


def serialize_corpus(trees):
    return "".join(serialize_conllu(t) + "\n" for t in trees)


# ---------------------------------------------------------------- validation

@dataclass(frozen=True)
class Violation:
    kind: str
    token_id: int | None
    message: str


@dataclass(frozen=True)
class ValidationReport:
    sentence_id: str
    violations: tuple = ()

    def __bool__(self):
        # truthy when there is something to report
        return bool(self.violations)

    @property
    def ok(self):
        return not self.violations

    def kinds(self):
        return [v.kind for v in self.violations]


def validate_tree(tree):
    """Check upos/deprel vocabulary and tree shape.  Never raises."""
    out = []
    n = len(tree.tokens)
    for i, t in enumerate(tree.tokens, start=1):
        if t.id != i:
            out.append(Violation("non-contiguous-ids", t.id, f"expected id {i}"))
        if t.upos.split("-", 1)[0] not in UPOS_TAGS:
            out.append(Violation("unknown-upos", t.id, f"unknown POS tag {t.upos!r}"))
        if t.base_deprel not in BASE_DEPRELS:
            out.append(Violation("unknown-deprel", t.id, f"unknown relation {t.deprel!r}"))
        if not 0 <= t.head <= n or t.head == t.id:
            out.append(Violation("bad-head", t.id, f"head {t.head} invalid"))
        if t.head == 0 and t.base_deprel != "root":
            out.append(Violation("root-label", t.id, f"root attached as {t.deprel!r}"))
    roots = [t.id for t in tree.tokens if t.head == 0]
    if n and not roots:
        out.append(Violation("no-root", None, "no token attached to 0"))
    if len(roots) > 1:
        out.append(Violation("multiple-roots", roots[1], f"roots at {roots}"))
    if roots:
        reach = set()
        kids = {}
        for t in tree.tokens:
            kids.setdefault(t.head, []).append(t.id)
        q = deque([0])
        while q:
            for c in kids.get(q.popleft(), ()):
                if c not in reach:
                    reach.add(c)
                    q.append(c)
        for t in tree.tokens:
            if t.id not in reach:
                out.append(Violation("unreachable", t.id, "not reachable from the root"))
    return ValidationReport(tree.sentence_id, tuple(out))


# ---------------------------------------------------------------- sessions

def group_sessions(trees):
    """Group trees into Sessions using ``session_id`` / ``child_age_months``
    comments.  A sentence without ``session_id`` belongs to the most recent
    session; with no metadata at all everything lands in one anonymous
    session at age 0.
    """
    sessions = {}
    order = []
    current = None
    for tree in trees:
        sid = tree.meta("session_id")
        if sid is not None:
            current = sid
            if sid not in sessions:
                age = tree.meta("child_age_months")
                sessions[sid] = [float(age) if age is not None else None, []]
                order.append(sid)
            elif sessions[sid][0] is None and tree.meta("child_age_months") is not None:
                sessions[sid][0] = float(tree.meta("child_age_months"))
        if current is None:
            current = ""
            sessions[current] = [None, []]
            order.append(current)
        sessions[current][1].append(tree)
    if order == [""] or any(sessions[k][0] is None for k in order):
        if trees:
            log.warning("missing session metadata; unlabelled sentences form an anonymous session at age 0")
    result = [Session(k or "anonymous", sessions[k][0] or 0.0, sessions[k][1]) for k in order]
    return sorted(result, key=lambda s: s.child_age_months)


def with_tokens(tree, tokens):
    return replace(tree, tokens=tuple(tokens))
