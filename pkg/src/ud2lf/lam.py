"""Typed lambda calculus used for logical forms.

Three base types: ``t`` (truth), ``v`` (individual) and ``r`` (event).
Terms are immutable; hashes and free-variable sets are computed once at
construction so that substitution and equality stay cheap on deep terms.

Text format (closed terms)::

    term    := 'lambda' ident ':' type '.' term | app
    app     := primary { '(' term {',' term} ')' }
    primary := '(' term ')' | atom
    atom    := ['?'] symbol [':' type]
    type    := 't' | 'v' | 'r' | '<' type ',' type '>'

``q(x, body)`` where ``x`` looks like an individual variable (``x``, ``y2``,
``z'``) and is not already bound is read as the quantifier form
``q(lambda x:v. body)``.  Free variables are written with a ``?`` prefix.
"""
from __future__ import annotations

import re
from dataclasses import dataclass


class LfTypeError(TypeError):
    def __init__(self, message, path=()):
        super().__init__(f"{message} at {'/'.join(path) or '<top>'}")
        self.path = tuple(path)


class ReductionLimitError(RuntimeError):
    pass


class LfSyntaxError(ValueError):
    pass


# ---------------------------------------------------------------- types

@dataclass(frozen=True)
class Base:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Fn:
    arg: "SemType"
    res: "SemType"

    def __str__(self):
        return f"<{self.arg},{self.res}>"


SemType = Base | Fn

T = Base("t")
V = Base("v")
R = Base("r")
_BASES = {"t": T, "v": V, "r": R}


def fn(*types):
    """fn(a, b, c) == <a,<b,c>>"""
    out = types[-1]
    for ty in reversed(types[:-1]):
        out = Fn(ty, out)
    return out


CLAUSE = Fn(R, T)
NOUN = Fn(V, T)
QUANT = Fn(NOUN, V)


def arity(ty):
    n = 0
    while isinstance(ty, Fn):
        n += 1
        ty = ty.res
    return n


# ---------------------------------------------------------------- terms

class Term:
    # cached hashes are per process, so terms pickle by constructor arguments
    __slots__ = ()

    def __repr__(self):
        return f"<{type(self).__name__} {to_text(self, canonical=False)}>"

    def __str__(self):
        return to_text(self)


class Var(Term):
    __slots__ = ("name", "type", "fv", "_hash")

    def __init__(self, name, type):
        self.name = name
        self.type = type
        self._hash = hash(("Var", name, type))
        self.fv = frozenset((self,))

    def __eq__(self, other):
        return (isinstance(other, Var) and self._hash == other._hash
                and self.name == other.name and self.type == other.type)

    def __hash__(self):
        return self._hash

    def __reduce__(self):
        return (Var, (self.name, self.type))


_EMPTY = frozenset()


class Const(Term):
    __slots__ = ("name", "type", "_hash")
    fv = _EMPTY

    def __init__(self, name, type):
        self.name = name
        self.type = type
        self._hash = hash(("Const", name, type))

    def __eq__(self, other):
        return (isinstance(other, Const) and self._hash == other._hash
                and self.name == other.name and self.type == other.type)

    def __hash__(self):
        return self._hash

    def __reduce__(self):
        return (Const, (self.name, self.type))


class Abs(Term):
    __slots__ = ("var", "body", "fv", "_hash")

    def __init__(self, var, body):
        self.var = var
        self.body = body
        self.fv = body.fv - {var} if var in body.fv else body.fv
        self._hash = hash(("Abs", var, body))

    def __eq__(self, other):
        return (isinstance(other, Abs) and self._hash == other._hash
                and self.var == other.var and self.body == other.body)

    def __hash__(self):
        return self._hash

    def __reduce__(self):
        return (Abs, (self.var, self.body))


class App(Term):
    __slots__ = ("fn", "arg", "fv", "_hash")

    def __init__(self, fn, arg):
        self.fn = fn
        self.arg = arg
        self.fv = fn.fv | arg.fv
        self._hash = hash(("App", fn, arg))

    def __eq__(self, other):
        return (isinstance(other, App) and self._hash == other._hash
                and self.fn == other.fn and self.arg == other.arg)

    def __hash__(self):
        return self._hash

    def __reduce__(self):
        return (App, (self.fn, self.arg))


def apply(f, *args):
    for a in args:
        f = App(f, a)
    return f


def lam(var, *more_and_body):
    *more, body = more_and_body
    for v in reversed(more):
        body = Abs(v, body)
    return Abs(var, body)


def spine(term):
    """Split an application into (head, [args])."""
    args = []
    while isinstance(term, App):
        args.append(term.arg)
        term = term.fn
    args.reverse()
    return term, args


def size(term):
    if isinstance(term, App):
        return 1 + size(term.fn) + size(term.arg)
    if isinstance(term, Abs):
        return 1 + size(term.body)
    return 1


def subterms(term):
    yield term
    if isinstance(term, App):
        yield from subterms(term.fn)
        yield from subterms(term.arg)
    elif isinstance(term, Abs):
        yield from subterms(term.body)


def free_vars(term):
    return term.fv


# ---------------------------------------------------------------- typing

def type_of(term):
    """Type of ``term``; raises LfTypeError naming the ill-typed subterm."""
    return _type(term, {}, ())


def _type(term, ctx, path):
    if isinstance(term, Var):
        bound = ctx.get(term.name)
        if bound is not None and bound != term.type:
            raise LfTypeError(f"variable {term.name} used as {term.type}, bound as {bound}", path)
        return term.type
    if isinstance(term, Const):
        return term.type
    if isinstance(term, Abs):
        inner = dict(ctx)
        inner[term.var.name] = term.var.type
        return Fn(term.var.type, _type(term.body, inner, path + ("body",)))
    ft = _type(term.fn, ctx, path + ("fn",))
    at = _type(term.arg, ctx, path + ("arg",))
    if not isinstance(ft, Fn):
        raise LfTypeError(f"cannot apply {ft} to {at}", path)
    if ft.arg != at:
        raise LfTypeError(f"argument of type {at} where {ft.arg} expected", path)
    return ft.res


def well_typed(term):
    try:
        type_of(term)
    except LfTypeError:
        return False
    return True


# ---------------------------------------------------------------- substitution

def fresh_name(base, avoid):
    name = base + "'"
    while name in avoid:
        name += "'"
    return name


def _names(vars_):
    return {v.name for v in vars_}


def substitute(body, var, value):
    """Capture-avoiding ``body[var := value]``."""
    vt = type_of(value)
    if vt != var.type:
        raise LfTypeError(f"cannot substitute {vt} for {var.name}:{var.type}")
    return _subst(body, var, value, _names(value.fv))


def _subst(t, var, value, value_names):
    if var not in t.fv:
        return t
    if isinstance(t, Var):
        return value
    if isinstance(t, App):
        return App(_subst(t.fn, var, value, value_names),
                   _subst(t.arg, var, value, value_names))
    # Abs; binder cannot equal var here because var is free in t
    binder, body = t.var, t.body
    if binder.name in value_names:
        new = Var(fresh_name(binder.name, value_names | _names(body.fv) | {var.name}),
                  binder.type)
        body = _subst(body, binder, new, {new.name})
        binder = new
    return Abs(binder, _subst(body, var, value, value_names))


def rename_bound(term, namer):
    """Rename every binder with ``namer(var) -> new name``; no capture checks."""
    return _rename(term, {}, namer)


def _rename(t, env, namer):
    if isinstance(t, Var):
        return env.get(t.name, t)
    if isinstance(t, Const):
        return t
    if isinstance(t, App):
        return App(_rename(t.fn, env, namer), _rename(t.arg, env, namer))
    new = Var(namer(t.var), t.var.type)
    inner = dict(env)
    inner[t.var.name] = new
    return Abs(new, _rename(t.body, inner, namer))


# ---------------------------------------------------------------- reduction

def is_redex(t):
    return isinstance(t, App) and isinstance(t.fn, Abs)


def is_normal(term):
    return not any(is_redex(s) for s in subterms(term))


def _contract(t):
    f = t.fn
    return _subst(f.body, f.var, t.arg, _names(t.arg.fv))


def _step_outer(t):
    if isinstance(t, App):
        if isinstance(t.fn, Abs):
            return _contract(t)
        r = _step_outer(t.fn)
        if r is not None:
            return App(r, t.arg)
        r = _step_outer(t.arg)
        if r is not None:
            return App(t.fn, r)
    elif isinstance(t, Abs):
        r = _step_outer(t.body)
        if r is not None:
            return Abs(t.var, r)
    return None


def _step_inner(t):
    if isinstance(t, App):
        r = _step_inner(t.fn)
        if r is not None:
            return App(r, t.arg)
        r = _step_inner(t.arg)
        if r is not None:
            return App(t.fn, r)
        if isinstance(t.fn, Abs):
            return _contract(t)
    elif isinstance(t, Abs):
        r = _step_inner(t.body)
        if r is not None:
            return Abs(t.var, r)
    return None


DEFAULT_MAX_STEPS = 10_000


def beta_reduce(term, max_steps=DEFAULT_MAX_STEPS, strategy="normal"):
    """Reduce to beta-normal form.

    ``strategy`` is ``"normal"`` (leftmost-outermost) or ``"innermost"``
    (leftmost-innermost).  Raises ReductionLimitError when more than
    ``max_steps`` contractions would be needed.
    """
    step = {"normal": _step_outer, "innermost": _step_inner}[strategy]
    steps = 0
    while True:
        nxt = step(term)
        if nxt is None:
            return term
        steps += 1
        if steps > max_steps:
            raise ReductionLimitError(f"no normal form within {max_steps} steps")
        term = nxt


# ---------------------------------------------------------------- alpha equivalence

def canonical(term):
    """Rename binders to ``.0, .1, ...`` in preorder; free variables untouched."""
    counter = iter(range(1 << 30))
    # '.' never occurs in parsed identifiers, so these cannot clash
    return _rename(term, {}, lambda v: f".{next(counter)}")


def _erase_const_types(t):
    if isinstance(t, Const):
        return Const(t.name, T)
    if isinstance(t, App):
        return App(_erase_const_types(t.fn), _erase_const_types(t.arg))
    if isinstance(t, Abs):
        return Abs(t.var, _erase_const_types(t.body))
    return t


def alpha_equivalent(a, b, typed_constants=True):
    """True iff ``a`` and ``b`` differ only in the names of bound variables.

    With ``typed_constants=False`` constants compare by name only, which is
    what comparing against the (constant-untyped) text format needs.
    """
    ca, cb = canonical(a), canonical(b)
    if not typed_constants:
        ca, cb = _erase_const_types(ca), _erase_const_types(cb)
    return ca == cb


# ---------------------------------------------------------------- text format

VAR_NAME = re.compile(r"^[xyzw]\d*'*$")
_IDENT = re.compile(r"^[^\s(),.:<>\"?λ]+$")
_TOKEN = re.compile(r"""\s*(?:(?P<str>"(?:[^"\\]|\\.)*")|(?P<punct>[(),.:<>?λ])|(?P<ident>[^\s(),.:<>"?λ]+))""")


def _quote(name):
    if _IDENT.match(name) and not VAR_NAME.match(name) and name not in ("lambda", "t", "v", "r"):
        return name
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_type(ty):
    return str(ty)


def _binder_namer(avoid=frozenset()):
    counts = {}

    def namer(var):
        prefix = {V: "x", R: "e"}.get(var.type, "f")
        while True:
            counts[prefix] = counts.get(prefix, 0) + 1
            name = f"{prefix}{counts[prefix]}"
            if name not in avoid:
                return name
    return namer


def to_text(term, canonical=True, const_types=False):
    """Render ``term`` in the text format.

    ``canonical`` renames binders deterministically (x1.. for individuals,
    e1.. for events, f1.. otherwise) so equal-up-to-alpha terms print the same.
    """
    if canonical:
        term = rename_bound(term, _binder_namer(_names(term.fv)))
    return _fmt(term, frozenset(), const_types)


def _fmt(t, bound, const_types):
    if isinstance(t, Var):
        if t.name in bound:
            return t.name
        return "?" + (t.name if _IDENT.match(t.name) else _quote(t.name))
    if isinstance(t, Const):
        return _quote(t.name) + (f":{t.type}" if const_types else "")
    if isinstance(t, Abs):
        return (f"lambda {t.var.name}:{t.var.type}. "
                + _fmt(t.body, bound | {t.var.name}, const_types))
    head, args = spine(t)
    h = _fmt(head, bound, const_types)
    if isinstance(head, Abs):
        h = f"({h})"
    if (len(args) == 1 and isinstance(args[0], Abs) and args[0].var.type == V
            and VAR_NAME.match(args[0].var.name) and args[0].var.name not in bound):
        q = args[0]
        return f"{h}({q.var.name}, {_fmt(q.body, bound | {q.var.name}, const_types)})"
    return h + "(" + ", ".join(_fmt(a, bound, const_types) for a in args) + ")"


def _tokenize(text):
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise LfSyntaxError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        pos = m.end()
        if m.group("str") is not None:
            raw = m.group("str")[1:-1]
            out.append(("str", re.sub(r"\\(.)", r"\1", raw)))
        elif m.group("punct") is not None:
            out.append(("p", m.group("punct")))
        else:
            word = m.group("ident")
            out.append(("kw", word) if word == "lambda" else ("id", word))
    return out


class _Parser:
    def __init__(self, text, signature):
        self.toks = _tokenize(text)
        self.i = 0
        self.signature = signature or {}

    def peek(self, k=0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else (None, None)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            raise LfSyntaxError(f"expected {value or kind}, got {tok[1]!r} at token {self.i}")
        self.i += 1
        return tok

    def at(self, value):
        return self.peek() == ("p", value)

    def parse(self):
        term = self.term({})
        if self.peek()[0] is not None:
            raise LfSyntaxError(f"trailing input at token {self.i}: {self.peek()[1]!r}")
        return term

    def type(self):
        kind, val = self.take()
        if kind == "id" and val in _BASES:
            return _BASES[val]
        if (kind, val) == ("p", "<"):
            a = self.type()
            self.take("p", ",")
            b = self.type()
            self.take("p", ">")
            return Fn(a, b)
        raise LfSyntaxError(f"bad type token {val!r}")

    def term(self, scope):
        if self.peek() == ("kw", "lambda") or self.at("λ"):
            self.i += 1
            _, name = self.take("id")
            self.take("p", ":")
            var = Var(name, self.type())
            self.take("p", ".")
            inner = dict(scope)
            inner[name] = var
            return Abs(var, self.term(inner))
        return self.app(scope)

    def app(self, scope):
        head = self.primary(scope)
        while self.at("("):
            self.i += 1
            kind, name = self.peek()
            if (kind == "id" and VAR_NAME.match(name) and name not in scope
                    and self.peek(1) == ("p", ",")):
                self.i += 2
                var = Var(name, V)
                inner = dict(scope)
                inner[name] = var
                body = self.term(inner)
                self.take("p", ")")
                arg = Abs(var, body)
                head = self._finish(head, [arg], Fn(type_of(arg), V) if _pending(head) else None)
                continue
            args = [self.term(scope)]
            while self.at(","):
                self.i += 1
                args.append(self.term(scope))
            self.take("p", ")")
            head = self._finish(head, args, None)
        return _resolve(head)

    def _finish(self, head, args, full_type):
        if _pending(head):
            name = head[1]
            if full_type is None:
                full_type = fn(*[type_of(a) for a in args], T)
            head = Const(name, full_type)
        return apply(head, *args)

    def primary(self, scope):
        if self.at("("):
            self.i += 1
            t = self.term(scope)
            self.take("p", ")")
            return t
        free = False
        if self.at("?"):
            self.i += 1
            free = True
        kind, name = self.take()
        if kind not in ("id", "str"):
            raise LfSyntaxError(f"unexpected {name!r} at token {self.i - 1}")
        annot = None
        if self.at(":"):
            self.i += 1
            annot = self.type()
        if free:
            return Var(name, annot or V)
        if kind == "id" and name in scope and annot is None:
            return scope[name]
        if annot is not None:
            return Const(name, annot)
        if name in self.signature:
            return Const(name, self.signature[name])
        return ("pending", name)


def _pending(x):
    return isinstance(x, tuple)


def _resolve(x):
    return Const(x[1], V) if _pending(x) else x


def parse_lf(text, signature=None):
    """Parse the text format.

    Constants without a ``:type`` annotation get a type from their use: an
    atom is ``v``, a function of n arguments returns ``t`` (or ``v`` in the
    quantifier form).  ``signature`` maps constant names to fixed types.
    """
    return _Parser(text, signature).parse()


def parse_type(text):
    p = _Parser(text, None)
    ty = p.type()
    if p.peek()[0] is not None:
        raise LfSyntaxError("trailing input after type")
    return ty


# ---------------------------------------------------------------- display

def to_display(term):
    """Readable rendering close to the notation used in the literature:
    events as subscripts (``found_e1(you, it)``), quantifiers as ``a x.toy(x)``.
    """
    term = rename_bound(term, _binder_namer(_names(term.fv)))
    return _disp(term)


def _disp(t):
    if isinstance(t, (Var, Const)):
        return t.name
    if isinstance(t, Abs):
        return f"λ{t.var.name}.{_disp(t.body)}"
    head, args = spine(t)
    h = _disp(head)
    if isinstance(head, Abs):
        h = f"({h})"
    if len(args) == 1 and isinstance(args[0], Abs) and args[0].var.type == V:
        return f"{h} {args[0].var.name}.{_disp(args[0].body)}"
    if args and isinstance(args[-1], Var) and args[-1].type == R:
        h = f"{h}_{args[-1].name}"
        args = args[:-1]
        if not args:
            return h
    return h + "(" + ", ".join(_disp(a) for a in args) + ")"
