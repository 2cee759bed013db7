import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import DATA, tree
from ud2lf.patterns import (RewriteAction, RewriteRule, RuleApplicationError, RuleSyntaxError,
                            apply_rules, match, parse_pattern, parse_rules)
from ud2lf.transducer import data_path, default_converter, wh_lexicon
from ud2lf.treebank import BASE_DEPRELS, DepTree, Token, read_conllu, validate_tree

VERB_DO = parse_pattern(
    "(node (upos VERB) (child (deprel dobj ccomp xcomp)) (nochild (deprel nsubj iobj)))")

PICK_UP = tree("""
    Pick pick VERB 0 root
    up up ADP 1 compound:prt
    that that DET 5 det
    blue blue ADJ 5 amod
    pencil pencil NOUN 1 dobj
    . . PUNCT 1 punct""")


def default_rules():
    return parse_rules(data_path("rewrite.rules").read_text(encoding="utf-8"),
                       {"wh": wh_lexicon("en")})


# ---------------------------------------------------------------- matching

def test_verb_do_pattern_matches():
    t = tree("""
        Drink drink VERB 0 root
        the the DET 3 det
        juice juice NOUN 1 dobj""")
    b = match(VERB_DO, t, 1)
    assert b is not None and b["target"] == 1 and 3 in b.values()


def test_forbidden_child_blocks_match():
    t = tree("""
        You you PRON 2 nsubj
        found found VERB 0 root
        it it PRON 2 dobj""")
    assert match(VERB_DO, t, 2) is None


def test_parent_requirement_on_root():
    pat = parse_pattern("(node (upos VERB) (parent (deprel conj)))")
    assert match(pat, PICK_UP, 1) is None
    pat = parse_pattern("(node (upos VERB) (noparent (upos NOUN)))")
    assert match(pat, PICK_UP, 1) is not None


def test_globs_negation_and_lexicons():
    pat = parse_pattern("(node (lemma @wh) (deprel ! mark *:comp))", {"wh": ("what", "who")})
    t = tree("""
        What what PRON 2 dobj
        is is VERB 0 root
        who who PRON 2 dobj:comp""")
    assert match(pat, t, 1) is not None
    assert match(pat, t, 3) is None
    assert pat.lexicalized and not VERB_DO.lexicalized


def test_descendant_and_adjacency():
    pat = parse_pattern("(node (deprel root) (desc (upos ADJ)))")
    assert match(pat, PICK_UP, 1) is not None
    adj = parse_pattern("(node (deprel compound:prt) (adjacent))")
    assert match(adj, PICK_UP, 2) is not None
    t = tree("""
        It it PRON 2 nsubj
        picks picks VERB 0 root
        the the DET 4 det
        dirt dirt NOUN 2 dobj
        up up ADP 2 compound:prt""")
    assert match(adj, t, 5) is None


@pytest.mark.parametrize("text", [
    "(nod (upos X))", "(node)", "(node (colour red))", "(node (upos X)", "(node (upos))",
    "(node (lemma @nope))",
])
def test_bad_patterns(text):
    with pytest.raises(RuleSyntaxError):
        parse_pattern(text)


# ---------------------------------------------------------------- rewriting

def test_pick_up_default_rules():
    out = apply_rules(default_rules(), PICK_UP)
    assert [t.lemma for t in out.tokens] == ["pick_up", "that", "blue", "pencil"]
    assert out.token(1).upos == "VERB-DO"
    assert all(t.upos != "PUNCT" for t in out.tokens)
    assert [t.head for t in out.tokens] == [0, 4, 4, 1]
    assert validate_tree(out).ok


def test_empty_rule_list_is_identity():
    assert apply_rules([], PICK_UP) == PICK_UP


def test_non_matching_rules_are_identity():
    rules = parse_rules("1 | r | (node (upos SYM)) | delete_node")
    assert apply_rules(rules, PICK_UP) == PICK_UP


def test_lower_priority_number_wins():
    rules = parse_rules("""
        5 | late  | (node (upos NOUN)) | set_upos LATE
        1 | early | (node (upos NOUN)) | set_upos EARLY
        1 | tie   | (node (upos NOUN)) | set_upos TIE
    """)
    trace = []
    out = apply_rules(rules, PICK_UP, trace)
    assert out.token(5).upos == "EARLY"
    assert trace == [(0, 5, "early")]


def test_one_rule_per_node_per_pass():
    trace = []
    apply_rules(default_rules(), PICK_UP, trace)
    keys = [(p, n) for p, n, _ in trace]
    assert len(keys) == len(set(keys))
    # a rule that would match its own output does not fire twice
    rules = parse_rules("1 | again | (node (upos NOUN*)) | set_upos {upos}X")
    trace = []
    out = apply_rules(rules, PICK_UP, trace)
    assert out.token(5).upos == "NOUNX" and len(trace) == 1


def test_passes_run_in_order():
    rules = parse_rules("""
        1 | a | (node (upos NOUN)) | set_upos N2
        %pass
        1 | b | (node (upos N2)) | set_upos N3
    """)
    assert apply_rules(rules, PICK_UP).token(5).upos == "N3"


def test_delete_reattaches_children():
    rules = parse_rules("1 | d | (node (upos NOUN)) | delete_node")
    out = apply_rules(rules, PICK_UP)
    assert [t.form for t in out.tokens] == ["Pick", "up", "that", "blue", "."]
    assert out.token(3).head == 1 and out.token(4).head == 1
    assert validate_tree(out).ok


def test_deleting_root_is_an_error():
    rules = parse_rules("1 | killroot | (node (deprel root)) | delete_node")
    with pytest.raises(RuleApplicationError) as info:
        apply_rules(rules, PICK_UP)
    assert info.value.rule == "killroot"


def test_merge_into_dependent_and_promote():
    t = tree("""
        Go go VERB 0 root
        get get VERB 1 compound:svc
        two two NUM 4 nummod
        pennies pennies NOUN 2 dobj""")
    out = apply_rules(parse_rules("1 | p | (node (deprel compound:svc)) | promote"), t)
    assert [x.lemma for x in out.tokens] == ["get", "two", "pennies"]
    assert out.token(1).deprel == "root" and out.token(1).head == 0
    out = apply_rules(parse_rules("1 | m | (node (deprel compound:svc)) | merge_into_dependent"), t)
    assert out.token(1).lemma == "go_get" and out.token(1).deprel == "root"
    assert validate_tree(out).ok


def test_merge_morph_strings():
    t = DepTree((Token(1, "Pick", "pick", "VERB", "v|pick", 0, "root"),
                 Token(2, "up", "up", "ADP", "adv|up", 1, "compound:prt")), "m")
    out = apply_rules(default_rules(), t)
    assert out.token(1).lemma == "pick_up" and out.token(1).morph == "v|pick_adv|up"


def test_rule_file_errors():
    with pytest.raises(RuleSyntaxError):
        parse_rules("1 | a | (node (upos X))")
    with pytest.raises(RuleSyntaxError):
        parse_rules("x | a | (node (upos X)) | delete_node")
    with pytest.raises(RuleSyntaxError):
        parse_rules("1 | a | (node (upos X)) | delete_node\n2 | a | (node (upos Y)) | delete_node")
    with pytest.raises(RuleSyntaxError) as info:
        parse_rules("\n1 | a | (node (upos X)) | explode")
    assert info.value.line == 2


def test_default_rules_golden_outputs_valid():
    rules = default_rules()
    for t in read_conllu(DATA / "golden.conllu"):
        assert validate_tree(apply_rules(rules, t)).ok


def test_default_rule_set_shape():
    rs = default_rules()
    assert len(rs.passes) == 3
    lexicalized = [r.name for r in rs.rules if r.lexicalized]
    assert lexicalized == ["question-word", "polar-question"]


def test_converter_hebrew_lexicon():
    conv = default_converter("he")
    t = tree("""
        ma ma PRON 3 dobj
        ata ata PRON 3 nsubj
        roce roce VERB 0 root""")
    assert conv.transform(t).token(1).upos == "PRON-WH"


# ---------------------------------------------------------------- properties

UPOS = ["NOUN", "VERB", "ADJ", "PRON", "DET"]


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(UPOS),
       st.lists(st.tuples(st.integers(0, 5), st.lists(st.sampled_from(UPOS), min_size=1,
                                                      max_size=3, unique=True)),
                min_size=1, max_size=6))
def test_first_match_against_single_node_oracle(upos, specs):
    t = DepTree((Token(1, "w", "w", upos, head=0, deprel="root"),), "one")
    rules = [RewriteRule(f"r{i}", prio, parse_pattern(f"(node (upos {' '.join(ups)}))"),
                         (RewriteAction("set_upos", f"R{i}"),), i)
             for i, (prio, ups) in enumerate(specs)]
    # oracle: scan every rule, keep the matching one with the smallest (priority, position)
    best = None
    for i, (prio, ups) in enumerate(specs):
        if upos in ups and (best is None or (prio, i) < best[0]):
            best = ((prio, i), f"R{i}")
    expected = best[1] if best else upos
    assert apply_rules(rules, t).token(1).upos == expected


DEPRELS = sorted(BASE_DEPRELS - {"root"}) + ["compound:prt", "acl:relcl:obj", "nmod:poss"]
ALL_UPOS = ["NOUN", "VERB", "ADJ", "PRON", "DET", "ADP", "AUX", "PART", "PUNCT", "ADV",
            "CONJ", "NUM", "PROPN", "INTJ", "X"]


@st.composite
def random_trees(draw):
    n = draw(st.integers(1, 9))
    toks = []
    for i in range(1, n + 1):
        head = 0 if i == 1 else draw(st.integers(1, i - 1))
        upos = draw(st.sampled_from(ALL_UPOS if i > 1 else ALL_UPOS[:-7]))
        deprel = "root" if i == 1 else draw(st.sampled_from(DEPRELS))
        lemma = draw(st.sampled_from(["what", "the", "?", "up", "go", "it"]))
        toks.append(Token(i, lemma, lemma, upos, head=head, deprel=deprel))
    # shuffle surface order while keeping a tree
    perm = draw(st.permutations(list(range(1, n + 1))))
    pos = {old: new for new, old in enumerate(perm, start=1)}
    moved = sorted((Token(pos[t.id], t.form, t.lemma, t.upos, head=pos.get(t.head, 0),
                          deprel=t.deprel) for t in toks), key=lambda t: t.id)
    return DepTree(tuple(moved), "rand")


@settings(max_examples=300, deadline=None)
@given(random_trees())
def test_output_is_valid_and_deterministic(t):
    rules = default_rules()
    trace = []
    try:
        out = apply_rules(rules, t, trace)
    except RuleApplicationError:
        return
    assert validate_tree(out).ok, validate_tree(out).kinds()
    assert apply_rules(rules, t) == out
    keys = [(p, n) for p, n, _ in trace]
    assert len(keys) == len(set(keys))
