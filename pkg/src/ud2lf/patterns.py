"""Tree patterns and prioritized first-match rewriting over DepTrees.

Rule files hold one rule per line::

    priority | name | pattern | action [; action ...]

``#`` starts a comment and ``%pass`` starts a new pass; each pass is one
breadth-first sweep from the root in which at most one rule fires per node.
Patterns are s-expressions::

    (node (upos VERB*) (child (deprel dobj ccomp xcomp)) (nochild (deprel nsubj iobj)))

Field constraints: ``upos``, ``lemma``, ``form``, ``deprel``; values are
shell-style globs, ``@name`` expands a lexicon, a leading ``!`` negates the
field.  Structural requirements: ``child``/``nochild``, ``desc``/``nodesc``
(any depth), ``parent``/``noparent`` (each taking nested constraints) and
``(adjacent)`` (no token between the node and its head).

Actions: ``set_upos X``, ``set_deprel X`` (``{upos}``/``{deprel}`` expand to
the current values), ``delete_node``, ``merge_into_head [sep]``,
``merge_into_dependent [sep]`` and ``promote`` (the node replaces its head,
which is dropped).
"""
from __future__ import annotations

import fnmatch
import re
from collections import deque
from dataclasses import dataclass, field

from .treebank import DepTree, Token


class RuleSyntaxError(ValueError):
    def __init__(self, message, line=None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


class RuleApplicationError(RuntimeError):
    def __init__(self, rule, message):
        super().__init__(f"rule {rule}: {message}")
        self.rule = rule


# ---------------------------------------------------------------- data model

@dataclass(frozen=True)
class ValueSet:
    values: tuple
    negated: bool = False

    def test(self, value):
        hit = any(fnmatch.fnmatchcase(value, pat) for pat in self.values)
        return hit != self.negated


@dataclass(frozen=True)
class NodeConstraint:
    upos: ValueSet | None = None
    lemma: ValueSet | None = None
    deprel: ValueSet | None = None
    form: ValueSet | None = None
    negated: bool = False

    def test(self, view, node):
        ok = all(fs is None or fs.test(getattr(view, name)(node))
                 for name, fs in (("upos", self.upos), ("lemma", self.lemma),
                                  ("deprel", self.deprel), ("form", self.form)))
        return ok != self.negated

    @property
    def lexicalized(self):
        return self.lemma is not None or self.form is not None


@dataclass(frozen=True)
class Requirement:
    kind: str  # "child" | "desc" | "parent"
    pattern: "TreePattern"
    required: bool = True


@dataclass(frozen=True)
class TreePattern:
    target: NodeConstraint = field(default_factory=NodeConstraint)
    requirements: tuple = ()
    adjacent: bool = False

    @property
    def child_requirements(self):
        return tuple(r for r in self.requirements if r.kind != "parent")

    @property
    def parent_requirement(self):
        for r in self.requirements:
            if r.kind == "parent":
                return r
        return None

    @property
    def lexicalized(self):
        return self.target.lexicalized or any(r.pattern.lexicalized for r in self.requirements)


@dataclass(frozen=True)
class RewriteAction:
    kind: str
    argument: str | None = None


ACTION_KINDS = ("set_upos", "set_deprel", "delete_node", "merge_into_head",
                "merge_into_dependent", "promote")


@dataclass(frozen=True)
class RewriteRule:
    name: str
    priority: int
    pattern: TreePattern
    actions: tuple
    order: int = 0  # file position, breaks priority ties

    @property
    def lexicalized(self):
        return self.pattern.lexicalized


@dataclass(frozen=True)
class RuleSet:
    passes: tuple  # tuple of tuples of RewriteRule, each sorted

    @property
    def rules(self):
        return tuple(r for p in self.passes for r in p)

    def __len__(self):
        return sum(len(p) for p in self.passes)


def ruleset(rules):
    """Wrap a plain list of rules as a single-pass RuleSet."""
    if isinstance(rules, RuleSet):
        return rules
    rules = list(rules)
    return RuleSet((tuple(sorted(rules, key=lambda r: (r.priority, r.order))),))


# ---------------------------------------------------------------- views

class TreeView:
    """Read access used by matching; node ids are token ids."""

    def __init__(self, tree):
        self.tree = tree
        self._kids = {}
        for t in tree.tokens:
            self._kids.setdefault(t.head, []).append(t.id)

    def upos(self, n):
        return self.tree.token(n).upos

    def lemma(self, n):
        return self.tree.token(n).lemma

    def form(self, n):
        return self.tree.token(n).form

    def deprel(self, n):
        return self.tree.token(n).deprel

    def parent(self, n):
        h = self.tree.token(n).head
        return h or None

    def children(self, n):
        return list(self._kids.get(n, ()))

    def position(self, n):
        return n

    def between(self, a, b):
        return abs(a - b) - 1


class _Work:
    """Mutable working copy used while rewriting; node ids are original ids."""

    def __init__(self, tree):
        self.sentence_id = tree.sentence_id
        self.nodes = {t.id: dict(form=t.form, lemma=t.lemma, upos=t.upos, morph=t.morph,
                                 head=t.head, deprel=t.deprel, feats=t.feats, deps=t.deps,
                                 misc=t.misc)
                      for t in tree.tokens}

    def upos(self, n):
        return self.nodes[n]["upos"]

    def lemma(self, n):
        return self.nodes[n]["lemma"]

    def form(self, n):
        return self.nodes[n]["form"]

    def deprel(self, n):
        return self.nodes[n]["deprel"]

    def parent(self, n):
        return self.nodes[n]["head"] or None

    def children(self, n):
        return sorted(k for k, v in self.nodes.items() if v["head"] == n)

    def position(self, n):
        return n

    def between(self, a, b):
        lo, hi = sorted((a, b))
        return sum(1 for k in self.nodes if lo < k < hi)

    def roots(self):
        return sorted(k for k, v in self.nodes.items() if v["head"] == 0)

    def alive(self, n):
        return n in self.nodes

    def to_tree(self, template):
        ids = sorted(self.nodes)
        renum = {old: i for i, old in enumerate(ids, start=1)}
        renum[0] = 0
        toks = []
        for old in ids:
            d = self.nodes[old]
            toks.append(Token(id=renum[old], form=d["form"], lemma=d["lemma"], upos=d["upos"],
                              morph=d["morph"], head=renum[d["head"]], deprel=d["deprel"],
                              feats=d["feats"], deps=d["deps"], misc=d["misc"]))
        return DepTree(tuple(toks), template.sentence_id, template.text, template.comments)


# ---------------------------------------------------------------- matching

def _descendants(view, n):
    out = []
    q = deque(view.children(n))
    while q:
        c = q.popleft()
        out.append(c)
        q.extend(view.children(c))
    return out


def _match(pattern, view, n, bindings, prefix):
    if not pattern.target.test(view, n):
        return False
    if pattern.adjacent:
        p = view.parent(n)
        if p is None or view.between(n, p) != 0:
            return False
    for i, req in enumerate(pattern.requirements):
        slot = f"{prefix}{req.kind}{i}"
        if req.kind == "parent":
            p = view.parent(n)
            cands = [] if p is None else [p]
        elif req.kind == "child":
            cands = view.children(n)
        else:
            cands = _descendants(view, n)
        found = None
        for c in cands:
            sub = {}
            if _match(req.pattern, view, c, sub, slot + "."):
                found = (c, sub)
                break
        if req.required:
            if found is None:
                return False
            bindings[slot] = found[0]
            bindings.update(found[1])
        elif found is not None:
            return False
    return True


def match(pattern, tree, node_id):
    """Bindings {slot: token id} if ``pattern`` matches at ``node_id``, else None."""
    view = tree if not isinstance(tree, DepTree) else TreeView(tree)
    bindings = {}
    if _match(pattern, view, node_id, bindings, ""):
        bindings["target"] = node_id
        return bindings
    return None


# ---------------------------------------------------------------- rewriting

def _join(a, b, sep):
    if a in ("_", "") and b in ("_", ""):
        return a
    return f"{a}{sep}{b}"


def _apply_action(work, rule, action, n):
    d = work.nodes[n]
    kind, arg = action.kind, action.argument
    if kind == "set_upos":
        d["upos"] = arg.format(upos=d["upos"], deprel=d["deprel"])
        return n
    if kind == "set_deprel":
        d["deprel"] = arg.format(upos=d["upos"], deprel=d["deprel"])
        return n
    head = d["head"]
    if kind == "delete_node":
        if head == 0:
            raise RuleApplicationError(rule.name, "deleting the root would orphan its dependents")
        for c in work.children(n):
            work.nodes[c]["head"] = head
        del work.nodes[n]
        return None
    if head == 0:
        raise RuleApplicationError(rule.name, f"{kind} needs a head but the node is the root")
    h = work.nodes[head]
    sep = arg if arg is not None else "_"
    first, second = (d, h) if n < head else (h, d)
    if kind == "merge_into_head":
        for key in ("lemma", "form", "morph"):
            h[key] = _join(first[key], second[key], sep)
        for c in work.children(n):
            work.nodes[c]["head"] = head
        del work.nodes[n]
        return None
    # merge_into_dependent / promote: n takes the head's place
    if kind == "merge_into_dependent":
        merged = {key: _join(first[key], second[key], sep) for key in ("lemma", "form", "morph")}
        d.update(merged)
    for c in work.children(head):
        if c != n:
            work.nodes[c]["head"] = n
    d["head"], d["deprel"] = h["head"], h["deprel"]
    del work.nodes[head]
    return n


def apply_rules(rules, tree, trace=None):
    """Rewrite ``tree`` with ``rules`` (a RuleSet or a list forming one pass).

    Each pass visits nodes breadth-first from the root, siblings in surface
    order; at every node the first matching rule by (priority, file order)
    fires and no other.  ``trace`` (a list) receives ``(pass, node, rule)``
    for every firing.  Returns a new tree with contiguous ids.
    """
    rs = ruleset(rules)
    work = _Work(tree)
    for pno, pass_rules in enumerate(rs.passes):
        if not pass_rules:
            continue
        queue = deque(work.roots())
        visited = set()
        while queue:
            n = queue.popleft()
            if n in visited or not work.alive(n):
                continue
            visited.add(n)
            kids_before = work.children(n)
            for rule in pass_rules:
                if match(rule.pattern, work, n) is None:
                    continue
                if trace is not None:
                    trace.append((pno, n, rule.name))
                cur = n
                for action in rule.actions:
                    if cur is None:
                        break
                    cur = _apply_action(work, rule, action, cur)
                break
            if work.alive(n):
                queue.extend(c for c in work.children(n) if c not in visited)
            else:
                queue.extend(c for c in kids_before if work.alive(c) and c not in visited)
    return work.to_tree(tree)


# ---------------------------------------------------------------- rule files

_SEXP = re.compile(r"\s*(\(|\)|[^\s()]+)")


def _sexp(text, lineno):
    tokens = _SEXP.findall(text)
    pos = 0

    def read():
        nonlocal pos
        if pos >= len(tokens):
            raise RuleSyntaxError("unbalanced parentheses in pattern", lineno)
        tok = tokens[pos]
        pos += 1
        if tok == "(":
            out = []
            while pos < len(tokens) and tokens[pos] != ")":
                out.append(read())
            if pos >= len(tokens):
                raise RuleSyntaxError("missing ')' in pattern", lineno)
            pos += 1
            return out
        if tok == ")":
            raise RuleSyntaxError("unexpected ')' in pattern", lineno)
        return tok

    expr = read()
    if pos != len(tokens):
        raise RuleSyntaxError("trailing text after pattern", lineno)
    return expr


_FIELDS = ("upos", "lemma", "deprel", "form")
_REQS = {"child": ("child", True), "nochild": ("child", False),
         "desc": ("desc", True), "nodesc": ("desc", False),
         "parent": ("parent", True), "noparent": ("parent", False)}


def _values(items, lexicons, lineno):
    negated = bool(items) and items[0] == "!"
    if negated:
        items = items[1:]
    if not items:
        raise RuleSyntaxError("empty value list", lineno)
    out = []
    for v in items:
        if v.startswith("@"):
            if v[1:] not in lexicons:
                raise RuleSyntaxError(f"unknown lexicon {v}", lineno)
            out.extend(lexicons[v[1:]])
        else:
            out.append(v)
    return ValueSet(tuple(out), negated)


def _pattern(items, lexicons, lineno):
    fields, reqs, adjacent = {}, [], False
    for item in items:
        if not isinstance(item, list) or not item or isinstance(item[0], list):
            raise RuleSyntaxError(f"bad pattern element {item!r}", lineno)
        head, rest = item[0], item[1:]
        if head in _FIELDS:
            fields[head] = _values(rest, lexicons, lineno)
        elif head in _REQS:
            kind, required = _REQS[head]
            reqs.append(Requirement(kind, _pattern(rest, lexicons, lineno), required))
        elif head == "adjacent":
            adjacent = True
        else:
            raise RuleSyntaxError(f"unknown pattern element {head!r}", lineno)
    return TreePattern(NodeConstraint(**fields), tuple(reqs), adjacent)


def parse_pattern(text, lexicons=None, lineno=None):
    expr = _sexp(text, lineno)
    if not isinstance(expr, list) or not expr or expr[0] != "node":
        raise RuleSyntaxError("pattern must start with (node ...)", lineno)
    pat = _pattern(expr[1:], lexicons or {}, lineno)
    if not any((pat.target.upos, pat.target.lemma, pat.target.deprel, pat.target.form)):
        raise RuleSyntaxError("target constraint must set at least one field", lineno)
    return pat


def _action(text, lineno):
    parts = text.split()
    if not parts or parts[0] not in ACTION_KINDS:
        raise RuleSyntaxError(f"unknown action {text!r}", lineno)
    kind = parts[0]
    if kind in ("set_upos", "set_deprel") and len(parts) != 2:
        raise RuleSyntaxError(f"{kind} takes exactly one argument", lineno)
    if kind in ("delete_node", "promote") and len(parts) != 1:
        raise RuleSyntaxError(f"{kind} takes no argument", lineno)
    return RewriteAction(kind, parts[1] if len(parts) > 1 else None)


def parse_rules(text, lexicons=None):
    """Parse rule-file text into a RuleSet."""
    passes, current, names = [], [], set()
    order = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "%pass":
            if current:
                passes.append(current)
            current = []
            continue
        parts = [p.strip() for p in line.split("|")]
        if len(parts) != 4:
            raise RuleSyntaxError("expected 'priority | name | pattern | actions'", lineno)
        prio, name, pat, acts = parts
        try:
            priority = int(prio)
        except ValueError:
            raise RuleSyntaxError(f"priority {prio!r} is not an integer", lineno) from None
        if name in names:
            raise RuleSyntaxError(f"duplicate rule name {name!r}", lineno)
        names.add(name)
        actions = tuple(_action(a.strip(), lineno) for a in acts.split(";") if a.strip())
        if not actions:
            raise RuleSyntaxError("rule has no actions", lineno)
        current.append(RewriteRule(name, priority, parse_pattern(pat, lexicons, lineno),
                                   actions, order))
        order += 1
    if current:
        passes.append(current)
    return RuleSet(tuple(tuple(sorted(p, key=lambda r: (r.priority, r.order))) for p in passes))


def load_rules(path, lexicons=None):
    with open(path, encoding="utf-8") as f:
        return parse_rules(f.read(), lexicons)
