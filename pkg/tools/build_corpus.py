"""Regenerate the bundled hand-annotated trees under src/ud2lf/data/corpus.

Trees are written compactly here as ``form lemma upos head deprel`` rows;
the output files are the source of truth once generated.
Run from the repository root:  python3 tools/build_corpus.py
"""
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "ud2lf" / "data" / "corpus"

# id, text, expected LF (None for an expected failure: reason instead), rows
GOLDEN = [
    ("g01", "You found it", "lambda e:r. found(you, it, e)", """
        You you PRON 2 nsubj pro|you
        found found VERB 0 root v|find&PAST
        it it PRON 2 dobj pro|it"""),
    ("g02", "It is a raccoon", "lambda e:r. a(it, raccoon(it, e))", """
        It it PRON 4 nsubj
        is be AUX 4 cop
        a a DET 4 det
        raccoon raccoon NOUN 0 root"""),
    ("g03", "My pet is a raccoon", "lambda e:r. a(my(x, pet(x)), raccoon(my(y, pet(y)), e))", """
        My my PRON 2 nmod:poss
        pet pet NOUN 5 nsubj
        is be AUX 5 cop
        a a DET 5 det
        raccoon raccoon NOUN 0 root"""),
    ("g04", "Show me a space boat", "lambda e:r. show(you, a(x, and_comp(space(x), boat(x))), me, e)", """
        Show show VERB 0 root
        me me PRON 1 iobj
        a a DET 5 det
        space space NOUN 5 compound
        boat boat NOUN 1 dobj"""),
    ("g05", "This carpenter was nice", "lambda e:r. nice(this(x, carpenter(x)), e)", """
        This this DET 2 det
        carpenter carpenter NOUN 4 nsubj
        was be AUX 4 cop
        nice nice ADJ 0 root"""),
    ("g06", "I am sorry to go", "lambda e:r. sorry(I, lambda e2:r. go(I, e2), e)", """
        I I PRON 3 nsubj
        am be AUX 3 cop
        sorry sorry ADJ 0 root
        to to PART 5 mark
        go go VERB 3 xcomp"""),
    ("g07", "You gave Ursula the box", "lambda e:r. gave(you, the(x, box(x)), Ursula, e)", """
        You you PRON 2 nsubj
        gave gave VERB 0 root
        Ursula Ursula PROPN 2 iobj
        the the DET 5 det
        box box NOUN 2 dobj"""),
    ("g08", "Mommy heard it", "lambda e:r. heard(Mommy, it, e)", """
        Mommy Mommy PROPN 2 nsubj
        heard heard VERB 0 root
        it it PRON 2 dobj"""),
    ("g09", "Daddy said to return the pen",
     "lambda e:r. said(Daddy, lambda e2:r. return(_, the(x, pen(x)), e2), e)", """
        Daddy Daddy PROPN 2 nsubj
        said said VERB 0 root
        to to PART 4 mark
        return return VERB 2 xcomp
        the the DET 6 det
        pen pen NOUN 4 dobj"""),
    ("g10", "Drink the juice", "lambda e:r. drink(you, the(x, juice(x)), e)", """
        Drink drink VERB 0 root
        the the DET 3 det
        juice juice NOUN 1 dobj"""),
    ("g11", "He can write", "lambda e:r. can(write(he, e), e)", """
        He he PRON 3 nsubj
        can can AUX 3 aux
        write write VERB 0 root"""),
    ("g12", "He could be writing", "lambda e:r. could(be(writing(he, e), e), e)", """
        He he PRON 4 nsubj
        could could AUX 4 aux
        be be AUX 4 aux
        writing writing VERB 0 root"""),
    ("g13", "The paint came off", "lambda e:r. came_off(the(x, paint(x)), e)", """
        The the DET 2 det
        paint paint NOUN 3 nsubj
        came came VERB 0 root
        off off ADP 3 compound:prt"""),
    ("g14", "It picks the dirt up", "lambda e:r. and(picks(it, the(x, dirt(x)), e), up(e))", """
        It it PRON 2 nsubj
        picks picks VERB 0 root
        the the DET 4 det
        dirt dirt NOUN 2 dobj
        up up ADP 2 compound:prt"""),
    ("g15", "Go get two pennies", "lambda e:r. get(you, two(x, pennies(x)), e)", """
        Go go VERB 0 root
        get get VERB 1 compound:svc
        two two NUM 4 nummod
        pennies pennies NOUN 2 dobj"""),
    ("g16", "She tried again", "lambda e:r. and(tried(she, e), again(e))", """
        She she PRON 2 nsubj
        tried tried VERB 0 root
        again again ADV 2 advmod"""),
    ("g17", "a very kind boy", "a(x, and(very(kind(x)), boy(x)))", """
        a a DET 4 det
        very very ADV 3 advmod
        kind kind ADJ 4 amod
        boy boy NOUN 0 root"""),
    ("g18", "He played with Paul", "lambda e:r. and(played(he, e), with(Paul, e))", """
        He he PRON 2 nsubj
        played played VERB 0 root
        with with ADP 4 case
        Paul Paul PROPN 2 nmod"""),
    ("g19", "the juice on your shirt", "the(x, att(juice(x), on(your(y, shirt(y)))))", """
        the the DET 2 det
        juice juice NOUN 0 root
        on on ADP 5 case
        your your PRON 5 nmod:poss
        shirt shirt NOUN 2 nmod"""),
    ("g20", "That is from Pinocchio", "lambda e:r. from(Pinocchio, that, e)", """
        That that PRON 4 nsubj
        is be AUX 4 cop
        from from ADP 4 case
        Pinocchio Pinocchio PROPN 0 root"""),
    ("g21", "We saw those mirrors that you liked",
     "lambda e:r. saw(we, those(x, and(mirrors(x), lambda e2:r. liked(you, x, e2))), e)", """
        We we PRON 2 nsubj
        saw saw VERB 0 root
        those those DET 4 det
        mirrors mirrors NOUN 2 dobj
        that that PRON 7 dobj
        you you PRON 7 nsubj
        liked liked VERB 4 acl:relcl:obj"""),
    ("g22", "the drum you were playing",
     "the(x, and(drum(x), lambda e:r. were(playing(you, x, e), e)))", """
        the the DET 2 det
        drum drum NOUN 0 root
        you you PRON 5 nsubj
        were were AUX 5 aux
        playing playing VERB 2 acl:relcl:obj"""),
    ("g23", "You heard what I said .",
     "lambda e:r. heard(you, what(x, lambda e2:r. said(I, x, e2)), e)", """
        You you PRON 2 nsubj
        heard heard VERB 0 root
        what what PRON 5 dobj:comp
        I I PRON 5 nsubj
        said said VERB 2 ccomp
        . . PUNCT 2 punct"""),
    ("g24", "I think that he can talk",
     "lambda e:r. think(I, lambda e2:r. can(talk(he, e2), e2), e)", """
        I I PRON 2 nsubj
        think think VERB 0 root
        that that SCONJ 6 mark
        he he PRON 6 nsubj
        can can AUX 6 aux
        talk talk VERB 2 ccomp"""),
    ("g25", "He wants you to take a nap",
     "lambda e:r. wants(he, lambda e2:r. take(you, a(x, nap(x)), e2), e)", """
        He he PRON 2 nsubj
        wants wants VERB 0 root
        you you PRON 2 dobj
        to to PART 5 mark
        take take VERB 2 xcomp
        a a DET 7 det
        nap nap NOUN 5 dobj"""),
    ("g26", "She sings when she is happy",
     "lambda e:r. when(happy(she, e), sings(she, e))", """
        She she PRON 2 nsubj
        sings sings VERB 0 root
        when when SCONJ 6 mark
        she she PRON 6 nsubj
        is be AUX 6 cop
        happy happy ADJ 2 advcl"""),
    ("g27", "You saw a tree dancing",
     "lambda e:r. saw(you, a(x, and(tree(x), lambda e2:r. dancing(x, e2))), e)", """
        You you PRON 2 nsubj
        saw saw VERB 0 root
        a a DET 4 det
        tree tree NOUN 2 dobj
        dancing dancing VERB 4 acl"""),
    ("g28", "You showed me the way to play the game",
     "lambda e:r. showed(you, me, the(x, rel(way(x), lambda e2:r. play(_, the(y, game(y)), e2))), e)", """
        You you PRON 2 nsubj
        showed showed VERB 0 root
        me me PRON 2 dobj
        the the DET 5 det
        way way NOUN 2 iobj
        to to PART 7 mark
        play play VERB 5 acl
        the the DET 9 det
        game game NOUN 7 dobj"""),
    ("g29", "I do n't have any sugar",
     "lambda e:r. not(do(have(I, any(x, sugar(x)), e), e), e)", """
        I I PRON 4 nsubj
        do do AUX 4 aux
        n't not PART 4 neg
        have have VERB 0 root
        any any DET 6 det
        sugar sugar NOUN 4 dobj"""),
    ("g30", "I 'm no clown", "lambda e:r. no(I, clown(I, e))", """
        I I PRON 4 nsubj
        'm be AUX 4 cop
        no no DET 4 det
        clown clown NOUN 0 root"""),
    ("g31", "Do you have a doll ?", "lambda e:r. Q(do(have(you, a(x, doll(x)), e), e))", """
        Do do AUX 3 aux
        you you PRON 3 nsubj
        have have VERB 0 root
        a a DET 5 det
        doll doll NOUN 3 dobj
        ? ? PUNCT 3 punct"""),
    ("g32", "What did you take ?", "lambda x:v. lambda e:r. did(take(you, x, e), e)", """
        What what PRON 4 dobj
        did did AUX 4 aux
        you you PRON 4 nsubj
        take take VERB 0 root
        ? ? PUNCT 4 punct"""),
    ("g33", "Whose name are you writing ?",
     "lambda f:<<v,t>,v>. lambda e:r. are(writing(you, f(y, name(y)), e), e)", """
        Whose whose PRON 2 nmod:poss
        name name NOUN 5 dobj
        are are AUX 5 aux
        you you PRON 5 nsubj
        writing writing VERB 0 root
        ? ? PUNCT 5 punct"""),
    ("g34", "He had a fever or a cold",
     "lambda e:r. had(he, or(a(x, fever(x)), a(y, cold(y))), e)", """
        He he PRON 2 nsubj
        had had VERB 0 root
        a a DET 4 det
        fever fever NOUN 2 dobj
        or or CONJ 7 cc
        a a DET 7 det
        cold cold NOUN 4 conj"""),
    ("g35", "Get a kleenex and wipe your mouth",
     "lambda e:r. and(get(you, a(x, kleenex(x)), e), wipe(you, your(y, mouth(y)), e))", """
        Get get VERB 0 root
        a a DET 3 det
        kleenex kleenex NOUN 1 dobj
        and and CONJ 5 cc
        wipe wipe VERB 1 conj
        your your PRON 7 nmod:poss
        mouth mouth NOUN 5 dobj"""),
    ("g36", "You find and bring it", "lambda e:r. and(find(you, it, e), bring(you, it, e))", """
        You you PRON 2 nsubj
        find find VERB 0 root
        and and CONJ 4 cc
        bring bring VERB 2 conj
        it it PRON 2 dobj"""),
    ("g37", "Wait , we forgot your snack",
     "lambda e:r. and(wait(you, e), forgot(we, your(x, snack(x)), e))", """
        Wait wait VERB 0 root
        , , PUNCT 1 punct
        we we PRON 4 nsubj
        forgot forgot VERB 1 parataxis
        your your PRON 6 nmod:poss
        snack snack NOUN 4 dobj"""),
    ("g38", "Pick up that blue pencil .",
     "lambda e:r. pick_up(you, that(x, and(blue(x), pencil(x))), e)", """
        Pick pick VERB 0 root
        up up ADP 1 compound:prt
        that that DET 5 det
        blue blue ADJ 5 amod
        pencil pencil NOUN 1 dobj
        . . PUNCT 1 punct"""),
]

LIMITATIONS = [
    ("l01", "You saw a clown and ran",
     "lambda e:r. and(saw(you, a(x, clown(x)), e), ran(you, a(y, clown(y)), e))", """
        You you PRON 2 nsubj
        saw saw VERB 0 root
        a a DET 4 det
        clown clown NOUN 2 dobj
        and and CONJ 6 cc
        ran ran VERB 2 conj"""),
    ("l02", "Maybe somebody will stop", "lambda e:r. will(and(stop(somebody, e), maybe(e)), e)", """
        Maybe maybe ADV 4 advmod
        somebody somebody PRON 4 nsubj
        will will AUX 4 aux
        stop stop VERB 0 root"""),
    ("l03", "You got chocolate eggs and bunnies",
     "lambda e:r. got(you, and(BARE(x, and(chocolate(x), eggs(x))), BARE(y, bunnies(y))), e)", """
        You you PRON 2 nsubj
        got got VERB 0 root
        chocolate chocolate ADJ 4 amod
        eggs eggs NOUN 2 dobj
        and and CONJ 6 cc
        bunnies bunnies NOUN 4 conj"""),
    ("l04", "Mommy asked you to come", "lambda e:r. asked(Mommy, lambda e2:r. come(you, e2), e)", """
        Mommy Mommy PROPN 2 nsubj
        asked asked VERB 0 root
        you you PRON 2 dobj
        to to PART 5 mark
        come come VERB 2 xcomp"""),
    ("l05", "See you later", "lambda e:r. and(see(you, you, e), later(e))", """
        See see VERB 0 root
        you you PRON 1 dobj
        later later ADV 1 advmod"""),
    ("l06", "the spot they landed on", "!unsupported-construction", """
        the the DET 2 det
        spot spot NOUN 0 root
        they they PRON 4 nsubj
        landed landed VERB 2 acl:relcl
        on on ADP 4 case"""),
]

EXTRAS = [
    ("x01", "She ate and drunk again", "lambda e:r. and(and(ate(she, e), drunk(she, e)), again(e))", """
        She she PRON 2 nsubj
        ate ate VERB 0 root
        and and CONJ 4 cc
        drunk drunk VERB 2 conj
        again again ADV 2 advmod"""),
    ("x02", "Somebody will stop suddenly", "lambda e:r. will(and(stop(somebody, e), suddenly(e)), e)", """
        Somebody somebody PRON 3 nsubj
        will will AUX 3 aux
        stop stop VERB 0 root
        suddenly suddenly ADV 3 advmod"""),
    ("x03", "You got sweet pears and lemons",
     "lambda e:r. got(you, and(BARE(x, and(sweet(x), pears(x))), BARE(y, lemon(y))), e)", """
        You you PRON 2 nsubj
        got got VERB 0 root
        sweet sweet ADJ 4 amod
        pears pears NOUN 2 dobj
        and and CONJ 6 cc
        lemons lemon NOUN 4 conj"""),
    ("x04", "all things that you find", "all(x, and(things(x), lambda e:r. find(you, x, e)))", """
        all all DET 2 det
        things things NOUN 0 root
        that that PRON 5 dobj
        you you PRON 5 nsubj
        find find VERB 2 acl:relcl:obj"""),
    ("x05", "The tree is shaped", "lambda e:r. shaped(_, the(x, tree(x)), e)", """
        The the DET 2 det
        tree tree NOUN 4 nsubjpass
        is be AUX 4 auxpass
        shaped shaped VERB 0 root"""),
    ("x06", "I saw a sign that snow will fall",
     "lambda e:r. saw(I, a(x, and(sign(x), lambda e2:r. will(fall(BARE(y, snow(y)), e2), e2))), e)", """
        I I PRON 2 nsubj
        saw saw VERB 0 root
        a a DET 4 det
        sign sign NOUN 2 dobj
        that that SCONJ 8 mark
        snow snow NOUN 8 nsubj
        will will AUX 8 aux
        fall fall VERB 4 acl"""),
    ("x07", "I like it , thank you", "lambda e:r. and(like(I, it, e), thank_you(e))", """
        I I PRON 2 nsubj
        like like VERB 0 root
        it it PRON 2 dobj
        , , PUNCT 2 punct
        thank thank INTJ 2 parataxis
        you you PRON 5 mwe"""),
    ("x08", "She certainly tried", "lambda e:r. and(tried(she, e), certainly(e))", """
        She she PRON 3 nsubj
        certainly certainly ADV 3 advmod
        tried tried VERB 0 root"""),
]

# Hebrew: repetition is represented once (parataxis:repeat contributes nothing)
HEBREW = [
    ("h01", "ṭipā , ṭipā šel māyim", "BARE(x, att(ṭipā(x), šel(BARE(y, māyim(y)))))", """
        ṭipā ṭipā NOUN 3 parataxis:repeat
        , , PUNCT 1 punct
        ṭipā ṭipā NOUN 0 root
        šel šel ADP 5 case
        māyim māyim NOUN 3 nmod"""),
    ("h02", "ma ata roce ?", "lambda x:v. lambda e:r. roce(ata, x, e)", """
        ma ma PRON 3 dobj
        ata ata PRON 3 nsubj
        roce roce VERB 0 root
        ? ? PUNCT 3 punct"""),
]

# Planted failures for the conversion-rate corpus (f10 is l06).
FAILURES = [
    ("f01", "Put it there um", "!residual-X/dep", """
        Put put VERB 0 root
        it it PRON 1 dobj
        there there ADV 1 advmod
        um um INTJ 1 dep"""),
    ("f02", "I see blick", "!residual-X/dep", """
        I I PRON 2 nsubj
        see see VERB 0 root
        blick blick X 2 dobj"""),
    ("f03", "the place we went to", "!unsupported-construction", """
        the the DET 2 det
        place place NOUN 0 root
        we we PRON 4 nsubj
        went went VERB 2 acl:relcl
        to to ADP 4 case"""),
    ("f04", "my friend Bob came", "!no-rule-for-edge", """
        my my PRON 2 nmod:poss
        friend friend NOUN 4 nsubj
        Bob Bob PROPN 2 appos
        came came VERB 0 root"""),
    ("f05", "There is a dog", "!no-rule-for-edge", """
        There there PRON 2 expl
        is is VERB 0 root
        a a DET 4 det
        dog dog NOUN 2 nsubj"""),
    ("f06", "I want go want the ball", "!no-rule-for-edge", """
        I I PRON 4 nsubj
        want want VERB 4 reparandum
        go go VERB 2 xcomp
        want want VERB 0 root
        the the DET 6 det
        ball ball NOUN 4 dobj"""),
    ("f07", "Up !", "!no-rule-for-node", """
        Up up ADV 0 root
        ! ! PUNCT 1 punct"""),
    ("f08", "You eat , sleep", "!typing-failure", """
        You you PRON 2 nsubj
        eat eat VERB 0 root
        , , PUNCT 4 punct
        sleep sleep VERB 2 conj"""),
    ("f09", "The ball , I like it", "!no-rule-for-edge", """
        The the DET 2 det
        ball ball NOUN 5 dislocated
        , , PUNCT 2 punct
        I I PRON 5 nsubj
        like like VERB 0 root
        it it PRON 5 dobj"""),
]


def block(sid, text, rows, meta=()):
    lines = [f"# sent_id = {sid}", f"# text = {text}"]
    lines.extend(f"# {k} = {v}" for k, v in meta)
    for i, row in enumerate(r for r in rows.strip().splitlines() if r.strip()):
        parts = row.split()
        form, lemma, upos, head, deprel = parts[:5]
        morph = parts[5] if len(parts) > 5 else "_"
        lines.append("\t".join([str(i + 1), form, lemma, upos, morph, "_", head, deprel, "_", "_"]))
    return "\n".join(lines) + "\n"


def write(name, items, metas=None):
    chunks = []
    for k, (sid, text, _, rows) in enumerate(items):
        chunks.append(block(sid, text, rows, metas[k] if metas else ()))
    (OUT / name).write_text("\n".join(chunks), encoding="utf-8")


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    write("golden.conllu", GOLDEN)
    write("limitations.conllu", LIMITATIONS)
    write("extras.conllu", EXTRAS)
    write("hebrew.conllu", HEBREW)
    # 38 golden + 2 convertible limitation sentences + 10 planted failures,
    # spread over five sessions of ten sentences
    lim = {s[0]: s for s in LIMITATIONS}
    items = GOLDEN + [lim["l02"], lim["l05"]] + FAILURES + [lim["l06"]]
    ages = (27.0, 28.5, 30.0, 31.5, 33.0)
    metas = []
    for k in range(len(items)):
        s = k % 5
        metas.append((("session_id", f"s{s + 1}"), ("child_age_months", ages[s])))
    order = sorted(range(len(items)), key=lambda k: (k % 5, k))
    write("corpus.conllu", [items[k] for k in order], [metas[k] for k in order])
    with open(OUT / "expected.tsv", "w", encoding="utf-8") as f:
        f.write("# sentence_id\texpected LF, or !reason for an expected failure\n")
        for sid, _, lf, _ in GOLDEN + LIMITATIONS + EXTRAS + HEBREW + FAILURES:
            f.write(f"{sid}\t{lf}\n")


if __name__ == "__main__":
    main()
