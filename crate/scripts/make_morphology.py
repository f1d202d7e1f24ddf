#!/usr/bin/env python3
"""Regenerate crates/core/data/morphology.tsv (LEMMA TAG SURFACE)."""
import pathlib

# lemma: (VBD, VBN) for irregular verbs; VBZ/VBG derived unless listed.
IRREGULAR = {
    "be": None, "have": None, "do": None, "go": ("went", "gone"),
    "arise": ("arose", "arisen"), "become": ("became", "become"), "begin": ("began", "begun"),
    "bend": ("bent", "bent"), "bind": ("bound", "bound"), "bite": ("bit", "bitten"),
    "blow": ("blew", "blown"), "break": ("broke", "broken"), "bring": ("brought", "brought"),
    "build": ("built", "built"), "burn": ("burnt", "burnt"), "buy": ("bought", "bought"),
    "catch": ("caught", "caught"), "choose": ("chose", "chosen"), "come": ("came", "come"),
    "cost": ("cost", "cost"), "cut": ("cut", "cut"), "deal": ("dealt", "dealt"),
    "dig": ("dug", "dug"), "draw": ("drew", "drawn"), "drink": ("drank", "drunk"),
    "drive": ("drove", "driven"), "eat": ("ate", "eaten"), "fall": ("fell", "fallen"),
    "feed": ("fed", "fed"), "feel": ("felt", "felt"), "fight": ("fought", "fought"),
    "find": ("found", "found"), "fly": ("flew", "flown"), "forget": ("forgot", "forgotten"),
    "freeze": ("froze", "frozen"), "get": ("got", "gotten"), "give": ("gave", "given"),
    "grow": ("grew", "grown"), "hang": ("hung", "hung"), "hear": ("heard", "heard"),
    "hide": ("hid", "hidden"), "hit": ("hit", "hit"), "hold": ("held", "held"),
    "hurt": ("hurt", "hurt"), "keep": ("kept", "kept"), "know": ("knew", "known"),
    "lay": ("laid", "laid"), "lead": ("led", "led"), "leave": ("left", "left"),
    "lend": ("lent", "lent"), "let": ("let", "let"), "lie": ("lay", "lain"),
    "lose": ("lost", "lost"), "make": ("made", "made"), "mean": ("meant", "meant"),
    "meet": ("met", "met"), "pay": ("paid", "paid"), "put": ("put", "put"),
    "quit": ("quit", "quit"), "read": ("read", "read"), "ride": ("rode", "ridden"),
    "ring": ("rang", "rung"), "rise": ("rose", "risen"), "run": ("ran", "run"),
    "say": ("said", "said"), "see": ("saw", "seen"), "seek": ("sought", "sought"),
    "sell": ("sold", "sold"), "send": ("sent", "sent"), "set": ("set", "set"),
    "shake": ("shook", "shaken"), "shine": ("shone", "shone"), "shoot": ("shot", "shot"),
    "show": ("showed", "shown"), "shut": ("shut", "shut"), "sing": ("sang", "sung"),
    "sink": ("sank", "sunk"), "sit": ("sat", "sat"), "sleep": ("slept", "slept"),
    "speak": ("spoke", "spoken"), "spend": ("spent", "spent"), "spread": ("spread", "spread"),
    "stand": ("stood", "stood"), "steal": ("stole", "stolen"), "stick": ("stuck", "stuck"),
    "strike": ("struck", "struck"), "swim": ("swam", "swum"), "take": ("took", "taken"),
    "teach": ("taught", "taught"), "tear": ("tore", "torn"), "tell": ("told", "told"),
    "think": ("thought", "thought"), "throw": ("threw", "thrown"),
    "understand": ("understood", "understood"), "wake": ("woke", "woken"),
    "wear": ("wore", "worn"), "win": ("won", "won"), "write": ("wrote", "written"),
    "bear": ("bore", "born"), "overcome": ("overcame", "overcome"), "withdraw": ("withdrew", "withdrawn"),
    "forbid": ("forbade", "forbidden"), "undertake": ("undertook", "undertaken"),
}

REGULAR = """
accept achieve act add admire agree allow announce appear apply arrive attack
base border call carry cause change claim climb close collect compose consider contain
continue create cross dance decide defeat deliver describe design destroy develop
die discover divide earn elect end enjoy enter establish explain explore fail
finish flow follow form found govern graduate happen help host include introduce
invade invent join kill last launch lie_unused like live locate look love manage
marry move name need occupy open operate order organize own paint pass perform
place plan play prefer produce promote protect prove publish rank receive record
reach reign release remain replace report represent rescue retire return rule
sail save score serve settle sign situate start stay stop study succeed suffer
support surround survive travel try turn unite use visit vote walk want watch
work
"""

SIBILANT = ("s", "x", "z", "ch", "sh", "o")
VOWELS = "aeiou"


def third_person(lemma):
    if lemma.endswith("y") and lemma[-2] not in VOWELS:
        return lemma[:-1] + "ies"
    if lemma.endswith(SIBILANT):
        return lemma + "es"
    return lemma + "s"


def past(lemma):
    if lemma.endswith("e"):
        return lemma + "d"
    if lemma.endswith("y") and lemma[-2] not in VOWELS:
        return lemma[:-1] + "ied"
    if lemma in ("plan", "stop", "ship", "drop"):
        return lemma + lemma[-1] + "ed"
    return lemma + "ed"


def gerund(lemma):
    if lemma.endswith("ie"):
        return lemma[:-2] + "ying"
    if lemma.endswith("e") and not lemma.endswith("ee") and lemma not in ("be",):
        return lemma[:-1] + "ing"
    if lemma in ("plan", "stop", "ship", "drop", "run", "swim", "sit", "win", "cut",
                 "get", "hit", "put", "set", "shut", "begin", "dig", "forget", "quit"):
        return lemma + lemma[-1] + "ing"
    return lemma + "ing"


rows = []
rows += [
    ("be", "VB", "be"), ("be", "VBP", "are"), ("be", "VBP", "am"), ("be", "VBZ", "is"),
    ("be", "VBD", "was"), ("be", "VBD", "were"), ("be", "VBN", "been"), ("be", "VBG", "being"),
    ("have", "VB", "have"), ("have", "VBP", "have"), ("have", "VBZ", "has"),
    ("have", "VBD", "had"), ("have", "VBN", "had"), ("have", "VBG", "having"),
    ("do", "VB", "do"), ("do", "VBP", "do"), ("do", "VBZ", "does"),
    ("do", "VBD", "did"), ("do", "VBN", "done"), ("do", "VBG", "doing"),
]
for lemma, forms in IRREGULAR.items():
    if forms is None:
        continue
    vbd, vbn = forms
    vbz = "goes" if lemma == "go" else third_person(lemma)
    rows += [(lemma, "VB", lemma), (lemma, "VBP", lemma), (lemma, "VBZ", vbz),
             (lemma, "VBD", vbd), (lemma, "VBN", vbn), (lemma, "VBG", gerund(lemma))]
for lemma in REGULAR.split():
    if lemma.endswith("_unused"):
        continue
    rows += [(lemma, "VB", lemma), (lemma, "VBP", lemma), (lemma, "VBZ", third_person(lemma)),
             (lemma, "VBD", past(lemma)), (lemma, "VBN", past(lemma)), (lemma, "VBG", gerund(lemma))]

out = pathlib.Path(__file__).resolve().parent.parent / "crates/core/data/morphology.tsv"
with out.open("w", encoding="utf-8") as f:
    f.write("# LEMMA\tTAG\tSURFACE\n")
    for r in rows:
        f.write("\t".join(r) + "\n")
print(f"{len(rows)} rows -> {out}")
