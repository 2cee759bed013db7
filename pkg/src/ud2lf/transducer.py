"""Dependency tree -> logical form conversion.

The pipeline is: rewrite the tree (patterns.apply_rules), give every node
and every edge a lambda term (assign_lfs), fix the order in which each head
absorbs its dependents (binarize), then fold: at every step the edge term is
applied to the head term and the result to the dependent term, followed by
beta-reduction.

LF rule files hold one rule per line::

    priority | name | selector | template [| bind=SIDE:KIND]

A selector is ``(node ...)`` or ``(edge ...)`` in the pattern syntax of
:mod:`ud2lf.patterns`; for an edge the pattern is evaluated at the
dependent, so ``(deprel ..)`` is the edge label and ``(parent ..)`` is the
head.  Selectors may not mention lemmas or forms.

Templates are LF text in which ``$lemma`` is replaced with the node's lemma
(typed by its use or by an annotation such as ``$lemma:<t,<r,t>>``) and
``%wh:TYPE`` with a variable that is abstracted at the top of the sentence.
Built-ins: ``@apply`` (head applied to dependent), ``@revapply`` (dependent
applied to head), ``@skip`` (dependent ignored), ``@id`` (root edge that
adds nothing), ``@frame`` (predicate frame built from the node's argument
dependents), and ``!reason`` which fails the sentence.

``bind=dep:subj`` abstracts the dependent's subject gap before the edge
applies (controlled clauses, participial modifiers); ``dep:obj``,
``head:subj`` and ``head:obj`` work the same way.
"""
from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

from . import lam
from .lam import (NOUN, R, V, Abs, App, Const, LfTypeError, ReductionLimitError, Var,
                  apply, beta_reduce, fn, parse_lf, to_text, type_of)
from .patterns import (RuleApplicationError, RuleSet, RuleSyntaxError, TreeView, _sexp, _pattern,
                       apply_rules, load_rules, match, parse_rules)
from .treebank import DepTree, Session, validate_tree

log = logging.getLogger(__name__)

INVALID_TREE = "invalid-tree"
REWRITE_FAILURE = "rewrite-failure"
NO_RULE_NODE = "no-rule-for-node"
NO_RULE_EDGE = "no-rule-for-edge"
TYPING_FAILURE = "typing-failure"
UNSUPPORTED = "unsupported-construction"
RESIDUAL = "residual-X/dep"
REDUCTION_LIMIT = "reduction-limit"
FAILURE_REASONS = (INVALID_TREE, REWRITE_FAILURE, NO_RULE_NODE, NO_RULE_EDGE,
                   TYPING_FAILURE, UNSUPPORTED, RESIDUAL, REDUCTION_LIMIT)

BUILTINS = ("@apply", "@revapply", "@skip", "@id", "@frame")

YOU = Const("you", V)
BLANK = Const("_", V)
BARE = Const("BARE", lam.QUANT)

# dependents that fill argument slots of a predicate frame
ARG_RELS = frozenset("nsubj csubj nsubjpass csubjpass dobj iobj ccomp xcomp".split())
# incoming relations whose clause gets its subject from outside
SUBJ_GAP_RELS = frozenset("xcomp acl acl:inf acl:relcl:subj".split())


class ConversionFailure(Exception):
    def __init__(self, reason, tokens=(), detail=""):
        super().__init__(f"{reason}: {detail}" if detail else reason)
        self.reason = reason
        self.tokens = tuple(tokens)
        self.detail = detail


# ---------------------------------------------------------------- rules

@dataclass(frozen=True)
class LfAssignmentRule:
    name: str
    priority: int
    kind: str  # "node" | "edge"
    selector: object  # TreePattern, evaluated at the node / the edge's dependent
    template: object  # Term, builtin name or "!reason"
    bind: tuple | None = None  # (side, kind)
    order: int = 0

    def instantiate(self, tree, tid):
        if not isinstance(self.template, lam.Term):
            return self.template
        return _fill(self.template, tree.token(tid).lemma, tid)


def _fill(t, lemma, tid):
    if isinstance(t, Const):
        if t.name == "$lemma":
            return Const(lemma, t.type)
        if t.name == "%wh":
            return Var(f"_wh{tid}", t.type)
        return t
    if isinstance(t, App):
        return App(_fill(t.fn, lemma, tid), _fill(t.arg, lemma, tid))
    if isinstance(t, Abs):
        return Abs(t.var, _fill(t.body, lemma, tid))
    return t


@dataclass(frozen=True)
class LfRuleSet:
    node_rules: tuple
    edge_rules: tuple

    def _first(self, rules, view, n):
        for r in rules:
            if match(r.selector, view, n) is not None:
                return r
        return None

    def node_rule(self, view, n):
        return self._first(self.node_rules, view, n)

    def edge_rule(self, view, n):
        return self._first(self.edge_rules, view, n)

    def __len__(self):
        return len(self.node_rules) + len(self.edge_rules)


def _template(text, lineno):
    if text.startswith("@"):
        if text not in BUILTINS:
            raise RuleSyntaxError(f"unknown built-in {text}", lineno)
        return text
    if text.startswith("!"):
        if text[1:] not in FAILURE_REASONS:
            raise RuleSyntaxError(f"unknown failure reason {text[1:]!r}", lineno)
        return text
    try:
        term = parse_lf(text)
        type_of(term)
    except (lam.LfSyntaxError, LfTypeError) as exc:
        raise RuleSyntaxError(f"bad template: {exc}", lineno) from None
    return term


def parse_lf_rules(text):
    node_rules, edge_rules, names = [], [], set()
    for order, (lineno, raw) in enumerate(enumerate(text.splitlines(), start=1)):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split("|")]
        if len(parts) not in (4, 5):
            raise RuleSyntaxError("expected 'priority | name | selector | template [| bind=..]'",
                                  lineno)
        try:
            priority = int(parts[0])
        except ValueError:
            raise RuleSyntaxError(f"priority {parts[0]!r} is not an integer", lineno) from None
        name = parts[1]
        expr = _sexp(parts[2], lineno)
        if not isinstance(expr, list) or not expr or expr[0] not in ("node", "edge"):
            raise RuleSyntaxError("selector must start with (node ...) or (edge ...)", lineno)
        # node and edge rules live in separate namespaces
        if (expr[0], name) in names:
            raise RuleSyntaxError(f"duplicate {expr[0]} rule name {name!r}", lineno)
        names.add((expr[0], name))
        selector = _pattern(expr[1:], {}, lineno)
        if selector.lexicalized:
            raise RuleSyntaxError("LF assignment rules may not mention lemmas or forms", lineno)
        bind = None
        if len(parts) == 5:
            key, _, value = parts[4].partition("=")
            side, _, kind = value.partition(":")
            if key != "bind" or side not in ("dep", "head") or kind not in ("subj", "obj"):
                raise RuleSyntaxError(f"bad option {parts[4]!r}", lineno)
            bind = (side, kind)
        rule = LfAssignmentRule(name, priority, expr[0], selector,
                                _template(parts[3], lineno), bind, order)
        (node_rules if expr[0] == "node" else edge_rules).append(rule)

    def key(r):
        return (r.priority, r.order)
    return LfRuleSet(tuple(sorted(node_rules, key=key)), tuple(sorted(edge_rules, key=key)))


def load_lf_rules(path):
    with open(path, encoding="utf-8") as f:
        return parse_lf_rules(f.read())


@dataclass(frozen=True)
class PriorityList:
    """Composition order of a head's dependents, earliest first.

    A label is looked up exactly, then by its base (``acl:relcl`` -> ``acl``);
    labels in neither position come last, alphabetically.
    """
    labels: tuple

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(self.labels)})

    def rank(self, label):
        index = self._index
        if label in index:
            return (index[label], "")
        base = label.split(":", 1)[0]
        if base in index:
            return (index[base], "")
        return (len(self.labels), label)

    def order(self, tree, head, deps):
        """Dependents of ``head`` in composition order; ties go to the token
        closest to the head, then the leftmost."""
        return sorted(deps, key=lambda d: (self.rank(tree.token(d).deprel), abs(d - head), d))


def parse_priorities(text):
    labels = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            labels.extend(line.split())
    if len(set(labels)) != len(labels):
        raise RuleSyntaxError("priority list repeats a label")
    return PriorityList(tuple(labels))


def load_priorities(path):
    with open(path, encoding="utf-8") as f:
        return parse_priorities(f.read())


# ---------------------------------------------------------------- derivation

@dataclass(frozen=True)
class Step:
    head: int  # 0 for the root step
    dep: int
    deprel: str


@dataclass
class StepResult:
    step: Step
    edge: object
    head: lam.Term | None
    dep: lam.Term
    result: lam.Term


@dataclass
class Derivation:
    tree: DepTree
    node_lfs: dict = field(default_factory=dict)
    edge_lfs: dict = field(default_factory=dict)
    node_rules: dict = field(default_factory=dict)
    edge_rules: dict = field(default_factory=dict)
    plan: tuple = ()
    results: list = field(default_factory=list)
    lf: lam.Term | None = None

    def dump(self):
        lines = [f"# sentence {self.tree.sentence_id}"]
        for t in self.tree.tokens:
            node = self.node_lfs.get(t.id)
            edge = self.edge_lfs.get(t.id)
            lines.append(f"node {t.id} {t.form} {t.upos}: {_show(node)}")
            lines.append(f"edge {t.head}->{t.id} {t.deprel}: {_show(edge)}")
        for i, r in enumerate(self.results, start=1):
            lines.append(f"step {i} {r.step.deprel} {r.step.head}->{r.step.dep}: {_show(r.result)}")
        lines.append(f"lf: {_show(self.lf)}")
        return "\n".join(lines) + "\n"


def _show(x):
    if x is None:
        return "-"
    if isinstance(x, lam.Term):
        return to_text(x)
    return str(x)


def _children(tree):
    kids = {t.id: [] for t in tree.tokens}
    for t in tree.tokens:
        if t.head:
            kids[t.head].append(t.id)
    return kids


def binarize(tree, priorities):
    """Composition plan: each dependent's subtree is completed before the
    head absorbs its dependents in priority order; the root step is last."""
    kids = _children(tree)
    plan = []

    def visit(n):
        order = priorities.order(tree, n, kids[n])
        for d in order:
            visit(d)
        plan.extend(Step(n, d, tree.token(d).deprel) for d in order)

    root = tree.root().id
    visit(root)
    plan.append(Step(0, root, tree.token(root).deprel))
    return tuple(plan)


def assign_lfs(tree, rules):
    """Node and edge LFs for a transformed tree.

    Raises ConversionFailure when a node or edge has no rule or its rule
    is a failure template.
    """
    view = TreeView(tree)
    der = Derivation(tree)
    for t in tree.tokens:
        rule = rules.node_rule(view, t.id)
        if rule is None:
            raise ConversionFailure(NO_RULE_NODE, [t.id], f"no LF rule for node {t.upos}")
        _check_failure(rule, t)
        der.node_rules[t.id] = rule
        der.node_lfs[t.id] = rule.instantiate(tree, t.id)
        rule = rules.edge_rule(view, t.id)
        if rule is None:
            raise ConversionFailure(NO_RULE_EDGE, [t.id], f"no LF rule for edge {t.deprel}")
        _check_failure(rule, t)
        der.edge_rules[t.id] = rule
        der.edge_lfs[t.id] = rule.instantiate(tree, t.id)
    return der


def _check_failure(rule, tok):
    if isinstance(rule.template, str) and rule.template.startswith("!"):
        raise ConversionFailure(rule.template[1:], [tok.id],
                                f"rule {rule.name} rejects {tok.form}/{tok.upos}/{tok.deprel}")


def bare(term):
    """Supply the BARE determiner for a determinerless nominal of type <v,t>."""
    if not (isinstance(term, Abs) and term.var.type == V):
        x = Var("x", V)
        term = Abs(x, App(term, x))
    return App(BARE, term)


class _Composer:
    def __init__(self, der, priorities, max_steps):
        self.der = der
        self.tree = der.tree
        self.max_steps = max_steps
        kids = _children(self.tree)
        self.kids = {n: priorities.order(self.tree, n, ds) for n, ds in kids.items()}
        self.composed = {}
        self._slots = {}
        self.frames = {n for n, lf in der.node_lfs.items() if lf == "@frame"}

    # -- helpers
    def tok(self, n):
        return self.tree.token(n)

    def is_frame(self, n):
        return n in self.frames

    def gap(self, n, kind):
        return Var(f"_{kind}{n}", V)

    def app(self, f, a, where):
        try:
            ft = type_of(f)
            at = type_of(a)
        except LfTypeError as exc:
            raise ConversionFailure(TYPING_FAILURE, where, str(exc)) from None
        if not isinstance(ft, lam.Fn):
            raise ConversionFailure(TYPING_FAILURE, where, f"cannot apply {ft} to {at}")
        if ft.arg == V and at == NOUN:
            a, at = bare(a), V
        if ft.arg != at:
            raise ConversionFailure(TYPING_FAILURE, where, f"expected {ft.arg}, got {at}")
        return App(f, a)

    def reduce(self, term, where):
        try:
            return beta_reduce(term, self.max_steps)
        except ReductionLimitError as exc:
            raise ConversionFailure(REDUCTION_LIMIT, where, str(exc)) from None

    def dep_value(self, d):
        """The dependent's LF as the edge sees it (gap bound if requested)."""
        value = self.compose(d)
        rule = self.der.edge_rules[d]
        if rule.bind and rule.bind[0] == "dep":
            value = Abs(self.gap(d, rule.bind[1]), value)
        return value

    def arg_value(self, d):
        value = self.dep_value(d)
        if type_of(value) == NOUN:
            value = bare(value)
        return value

    # -- predicate frames
    def slots(self, n):
        """Slot fillers of predicate ``n``: subj/obj/iobj map to None,
        ("param", dep), ("term", Term) or ("xcomp", dep, inner)."""
        if n in self._slots:
            return self._slots[n]
        tok = self.tok(n)
        rel = {}
        for d in self.kids[n]:
            rel.setdefault(self.tok(d).deprel, d)
        P = lambda lab: ("param", rel[lab])  # noqa: E731
        inc = tok.deprel
        conj = inc == "conj" and self.is_frame(tok.head)
        s = o = i = None
        if "nsubj" in rel:
            s = P("nsubj")
        elif "csubj" in rel:
            s = P("csubj")
        elif "nsubjpass" in rel or "csubjpass" in rel:
            s = ("term", BLANK)
            o = P("nsubjpass" if "nsubjpass" in rel else "csubjpass")
        elif "nsubj:comp" in rel or "csubj:comp" in rel:
            s = ("term", self.gap(n, "subj"))
        elif tok.upos == "VERB-DO":
            s = ("term", YOU)
        elif inc in SUBJ_GAP_RELS:
            s = ("term", self.gap(n, "subj"))
        elif conj:
            s = self.shared(tok.head, "subj") or ("term", YOU)
        else:
            s = ("term", YOU)
        if "xcomp" in rel:
            if "dobj" in rel:
                inner = P("dobj")
            elif tok.upos.endswith("-PRED"):
                inner = s
            else:
                inner = ("term", BLANK)
            o = ("xcomp", rel["xcomp"], inner)
        elif "dobj" in rel and "ccomp" in rel:
            o, i = P("ccomp"), P("dobj")
        elif "dobj" in rel:
            o = P("dobj")
        elif "ccomp" in rel:
            o = P("ccomp")
        elif o is None:
            if inc == "acl:relcl:obj" or "dobj:comp" in rel or "ccomp:comp" in rel:
                o = ("term", self.gap(n, "obj"))
            elif conj:
                o = self.shared(tok.head, "obj")
        if "iobj" in rel:
            if i is not None:
                raise ConversionFailure(UNSUPPORTED, [n, rel["iobj"]], "too many objects")
            i = P("iobj")
        elif i is None and conj:
            i = self.shared(tok.head, "iobj")
        out = {"subj": s, "obj": o, "iobj": i}
        self._slots[n] = out
        return out

    def shared(self, head, role):
        """The head conjunct's filler for ``role`` as a concrete term."""
        entry = self.slots(head)[role]
        if entry is None or entry[0] == "xcomp":
            return None
        if entry[0] == "param":
            return ("term", self.arg_value(entry[1]))
        if entry[1] == BLANK and role != "subj":
            return None
        return entry

    def frame(self, n):
        tok = self.tok(n)
        args = [d for d in self.kids[n] if self.tok(d).deprel in ARG_RELS]
        slots = self.slots(n)
        params = {d: Var(f"a{d}", type_of(self.arg_value(d))) for d in args}
        used = set()

        def term(entry):
            if entry is None:
                return None
            if entry[0] == "param":
                used.add(entry[1])
                return params[entry[1]]
            if entry[0] == "term":
                return entry[1]
            used.add(entry[1])
            return App(params[entry[1]], term(entry[2]))

        terms = [term(slots[k]) for k in ("subj", "obj", "iobj")]
        while terms and terms[-1] is None:
            terms.pop()
        terms = [BLANK if t is None else t for t in terms]
        unused = [d for d in args if d not in used]
        if unused:
            raise ConversionFailure(UNSUPPORTED, [n] + unused,
                                    f"no argument slot for {self.tok(unused[0]).deprel}")
        try:
            pred = Const(tok.lemma, fn(*[type_of(t) for t in terms], R, lam.T))
        except LfTypeError as exc:
            raise ConversionFailure(TYPING_FAILURE, [n], str(exc)) from None
        e = Var("e", R)
        body = Abs(e, apply(pred, *terms, e))
        for d in reversed(args):
            body = Abs(params[d], body)
        try:
            type_of(body)
        except LfTypeError as exc:
            raise ConversionFailure(TYPING_FAILURE, [n] + args, str(exc)) from None
        return body

    # -- composition
    def node_lf(self, n):
        lf = self.der.node_lfs[n]
        if lf == "@frame":
            lf = self.frame(n)
            self.der.node_lfs[n] = lf
        elif isinstance(lf, str):
            raise ConversionFailure(UNSUPPORTED, [n], f"built-in {lf} used as a node LF")
        return lf

    def compose(self, n):
        if n in self.composed:
            return self.composed[n]
        # dependents are composed on demand: frame arguments while building
        # the frame, the rest when their edge applies (never under @skip)
        head = self.node_lf(n)
        for d in self.kids[n]:
            head = self.combine(n, d, head)
        self.composed[n] = head
        return head

    def combine(self, n, d, head):
        rule = self.der.edge_rules[d]
        edge = self.der.edge_lfs[d]
        where = [n, d]
        dep = None if edge == "@skip" else self.dep_value(d)
        if rule.bind and rule.bind[0] == "head":
            head = Abs(self.gap(n, rule.bind[1]), head)
        if edge == "@skip":
            out = head
        elif edge == "@apply":
            out = self.app(head, dep, where)
        elif edge == "@revapply":
            out = self.app(dep, head, where)
        elif isinstance(edge, str):
            raise ConversionFailure(UNSUPPORTED, where, f"built-in {edge} used on edge {rule.name}")
        else:
            out = self.app(self.app(edge, head, where), dep, where)
        out = self.reduce(out, where)
        self.der.results.append(StepResult(Step(n, d, self.tok(d).deprel), edge, head, dep, out))
        return out

    def run(self):
        root = self.tree.root().id
        lf = self.compose(root)
        edge = self.der.edge_lfs[root]
        dep = self.dep_value(root)
        if edge in ("@id", "@skip", "@apply", "@revapply"):
            out = dep
        elif isinstance(edge, str):
            raise ConversionFailure(UNSUPPORTED, [root], f"built-in {edge} on the root edge")
        else:
            out = self.reduce(self.app(edge, dep, [root]), [root])
        if type_of(out) == NOUN:
            out = bare(out)
        elif type_of(out) == lam.CLAUSE and not isinstance(out, Abs):
            # eta-expand so every clause LF shows its event binder
            e = Var(lam.fresh_name("e", {v.name for v in out.fv}), R)
            out = Abs(e, App(out, e))
        self.der.results.append(StepResult(Step(0, root, self.tok(root).deprel), edge, None, lf, out))
        # wh variables become the outermost abstractions, leftmost outermost
        whs = sorted((v for v in out.fv if v.name.startswith("_wh")), key=lambda v: int(v.name[3:]))
        for v in reversed(whs):
            out = Abs(v, out)
        if out.fv:
            names = sorted(v.name for v in out.fv)
            ids = sorted({int("".join(ch for ch in nm if ch.isdigit()) or 0) for nm in names})
            raise ConversionFailure(UNSUPPORTED, ids, "unbound gap: " + ", ".join(names))
        try:
            type_of(out)
        except LfTypeError as exc:
            raise ConversionFailure(TYPING_FAILURE, [root], str(exc)) from None
        self.der.lf = out
        return out


# ---------------------------------------------------------------- conversion

@dataclass(frozen=True)
class ConversionOutcome:
    sentence_id: str
    lf: lam.Term | None = None
    failure: str | None = None
    tokens: tuple = ()
    detail: str = ""
    derivation: Derivation | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if (self.lf is None) == (self.failure is None):
            raise ValueError("exactly one of lf / failure must be set")

    @property
    def ok(self):
        return self.lf is not None

    def to_record(self):
        if self.ok:
            return {"sentence_id": self.sentence_id, "status": "ok", "lf": to_text(self.lf)}
        return {"sentence_id": self.sentence_id, "status": "failed", "reason": self.failure,
                "tokens": list(self.tokens), "detail": self.detail}

    def to_json(self):
        return json.dumps(self.to_record(), ensure_ascii=False, sort_keys=True)


@dataclass(frozen=True)
class Converter:
    rewrite_rules: RuleSet
    lf_rules: LfRuleSet
    priorities: PriorityList
    max_steps: int = lam.DEFAULT_MAX_STEPS

    def transform(self, tree):
        return apply_rules(self.rewrite_rules, tree)

    def convert(self, tree, keep_derivation=False):
        der = None
        try:
            report = validate_tree(tree)
            if not report.ok:
                v = report.violations[0]
                raise ConversionFailure(INVALID_TREE, [v.token_id] if v.token_id else [],
                                        v.message)
            try:
                transformed = self.transform(tree)
            except RuleApplicationError as exc:
                raise ConversionFailure(REWRITE_FAILURE, [], str(exc)) from None
            der = assign_lfs(transformed, self.lf_rules)
            der.plan = binarize(transformed, self.priorities)
            lf = _Composer(der, self.priorities, self.max_steps).run()
            return ConversionOutcome(tree.sentence_id, lf=lf,
                                     derivation=der if keep_derivation else None)
        except ConversionFailure as exc:
            return ConversionOutcome(tree.sentence_id, failure=exc.reason, tokens=exc.tokens,
                                     detail=exc.detail,
                                     derivation=der if keep_derivation else None)


def convert(tree, rewrite_rules, lf_rules, priorities, max_steps=lam.DEFAULT_MAX_STEPS):
    return Converter(rewrite_rules, lf_rules, priorities, max_steps).convert(tree)


# ---------------------------------------------------------------- languages

LANGUAGES = ("en", "he")


def data_path(name):
    return resources.files("ud2lf") / "data" / name


def wh_lexicon(lang):
    if lang not in LANGUAGES:
        raise ValueError(f"unknown language {lang!r}; expected one of {', '.join(LANGUAGES)}")
    text = data_path(f"wh-{lang}.txt").read_text(encoding="utf-8")
    return tuple(w for line in text.splitlines()
                 for w in line.split("#", 1)[0].split())


def default_converter(lang="en", rewrite=None, lf=None, priorities=None,
                      max_steps=lam.DEFAULT_MAX_STEPS):
    """Converter from the packaged rule files, each replaceable by a path."""
    lexicons = {"wh": wh_lexicon(lang)}
    if rewrite is None:
        rw = parse_rules(data_path("rewrite.rules").read_text(encoding="utf-8"), lexicons)
    else:
        rw = load_rules(rewrite, lexicons)
    lfr = (parse_lf_rules(data_path("lf.rules").read_text(encoding="utf-8"))
           if lf is None else load_lf_rules(lf))
    pri = (parse_priorities(data_path("priorities.txt").read_text(encoding="utf-8"))
           if priorities is None else load_priorities(priorities))
    return Converter(rw, lfr, pri, max_steps)


# ---------------------------------------------------------------- corpora

@dataclass(frozen=True)
class CorpusSummary:
    total: int
    converted: int
    failures: tuple  # (reason, count) sorted by reason

    @property
    def rate(self):
        return self.converted / self.total if self.total else None

    def to_record(self):
        return {"total": self.total, "converted": self.converted,
                "rate": self.rate if self.rate is not None else "n/a",
                "failures": dict(self.failures)}


def summarize(outcomes):
    counts = {}
    for o in outcomes:
        if not o.ok:
            counts[o.failure] = counts.get(o.failure, 0) + 1
    return CorpusSummary(len(outcomes), sum(o.ok for o in outcomes), tuple(sorted(counts.items())))


_WORKER = None


def _init_worker(converter):
    global _WORKER
    _WORKER = converter


def _convert_chunk(trees):
    return [_WORKER.convert(t) for t in trees]


def convert_corpus(items, converter, jobs=1, chunk_size=16):
    """Convert trees (or Sessions) in order; returns (outcomes, summary).

    With ``jobs > 1`` sentences are converted in worker processes; results
    come back in input order so the output does not depend on ``jobs``.
    """
    trees = []
    for item in items:
        if isinstance(item, Session):
            trees.extend(item.trees)
        else:
            trees.append(item)
    if jobs <= 1 or len(trees) <= chunk_size:
        outcomes = [converter.convert(t) for t in trees]
    else:
        chunks = [trees[i:i + chunk_size] for i in range(0, len(trees), chunk_size)]
        with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker,
                                 initargs=(converter,)) as pool:
            outcomes = [o for chunk in pool.map(_convert_chunk, chunks) for o in chunk]
    return outcomes, summarize(outcomes)
