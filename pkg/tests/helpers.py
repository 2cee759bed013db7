"""Shared test helpers: compact tree construction and random typed terms."""
import random
from pathlib import Path

from ud2lf.lam import CLAUSE, NOUN, QUANT, R, T, V, Abs, App, Const, Fn, Var
from ud2lf.treebank import DepTree, Token

DATA = Path(__file__).resolve().parent.parent / "src" / "ud2lf" / "data" / "corpus"


def tree(rows, sid="t1", text=None, comments=()):
    """Build a DepTree from 'form lemma upos head deprel' rows."""
    toks = []
    for i, row in enumerate(r for r in rows.strip().splitlines() if r.strip()):
        form, lemma, upos, head, deprel = row.split()[:5]
        toks.append(Token(i + 1, form, lemma, upos, head=int(head), deprel=deprel))
    if text is None:
        text = " ".join(t.form for t in toks)
    return DepTree(tuple(toks), sid, text, tuple(comments))


def expected_table():
    out = {}
    for line in (DATA / "expected.tsv").read_text(encoding="utf-8").splitlines():
        if line and not line.startswith("#"):
            sid, lf = line.split("\t")
            out[sid] = lf
    return out


# ---------------------------------------------------------------- random terms

SMALL_TYPES = [T, V, R, NOUN, CLAUSE, Fn(V, T), Fn(T, T), Fn(V, Fn(V, T)), QUANT]


class TermGen:
    """Random well-typed terms; redexes are introduced on purpose."""

    def __init__(self, seed, max_depth=6):
        self.rng = random.Random(seed)
        self.max_depth = max_depth

    def fresh(self, ty):
        # reuse a few names so shadowing and capture situations occur
        name = self.rng.choice("xyzw") + str(self.rng.randrange(3))
        return Var(name, ty)

    def term(self, ty=None):
        if ty is None:
            ty = self.rng.choice(SMALL_TYPES)
        return self.gen(ty, 0, [])

    def gen(self, ty, depth, ctx):
        rng = self.rng
        choices = ["const"]
        matching = [v for v in ctx if v.type == ty]
        if matching:
            choices += ["var"] * 3
        if depth < self.max_depth:
            choices += ["app", "redex"]
            if isinstance(ty, Fn):
                choices += ["abs"] * 2
        kind = rng.choice(choices)
        if kind == "var":
            # innermost binding of a name wins, so pick among visible vars
            v = rng.choice(matching)
            visible = [u for u in ctx if u.name == v.name]
            return v if visible[-1] == v else Const("k", ty)
        if kind == "const":
            return Const(rng.choice("abcd"), ty)
        if kind == "abs":
            v = self.fresh(ty.arg)
            return Abs(v, self.gen(ty.res, depth + 1, ctx + [v]))
        arg_ty = rng.choice([T, V, R, Fn(V, T)])
        if kind == "redex":
            v = self.fresh(arg_ty)
            fn = Abs(v, self.gen(ty, depth + 1, ctx + [v]))
        else:
            fn = self.gen(Fn(arg_ty, ty), depth + 1, ctx)
        return App(fn, self.gen(arg_ty, depth + 1, ctx))
