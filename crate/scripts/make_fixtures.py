#!/usr/bin/env python3
"""Regenerate the bundled gazetteer and the synthetic training/evaluation fixtures.

Outputs (relative to the repo root):
  crates/core/data/gazetteer.tsv            PHRASE  LAYER  LABEL
  crates/core/data/fixtures/wiki_pairs.jsonl   ~1,200 sentence/question pairs
  crates/core/data/fixtures/heldout.jsonl      held-out sentences with reference questions
"""
import json
import pathlib
import random

ROOT = pathlib.Path(__file__).resolve().parent.parent
DATA = ROOT / "crates/core/data"
FIX = DATA / "fixtures"

COUNTRIES = {
    "Slovakia": "Bratislava", "Czechia": "Prague", "Austria": "Vienna", "Hungary": "Budapest",
    "Poland": "Warsaw", "Germany": "Berlin", "France": "Paris", "Italy": "Rome",
    "Spain": "Madrid", "Portugal": "Lisbon", "Thailand": "Bangkok", "Egypt": "Cairo",
    "Japan": "Tokyo", "China": "Beijing", "India": "New Delhi", "Brazil": "Brasilia",
    "Argentina": "Buenos Aires", "Canada": "Ottawa", "Kenya": "Nairobi", "Norway": "Oslo",
    "Sweden": "Stockholm", "Finland": "Helsinki", "Denmark": "Copenhagen", "Greece": "Athens",
    "Turkey": "Ankara", "Peru": "Lima", "Chile": "Santiago", "Australia": "Canberra",
    "Ireland": "Dublin", "Belgium": "Brussels", "Croatia": "Zagreb", "Slovenia": "Ljubljana",
    "Serbia": "Belgrade", "Romania": "Bucharest", "Bulgaria": "Sofia", "Ukraine": "Kyiv",
    "Vietnam": "Hanoi", "Indonesia": "Jakarta",
}
OTHER_CITIES = {
    "Kosice": "Slovakia", "Brno": "Czechia", "Salzburg": "Austria", "Munich": "Germany",
    "Hamburg": "Germany", "Lyon": "France", "Milan": "Italy", "Barcelona": "Spain",
    "Porto": "Portugal", "Krakow": "Poland", "Osaka": "Japan", "Shanghai": "China",
    "Mumbai": "India", "Toronto": "Canada", "Espoo": "Finland", "Gothenburg": "Sweden",
    "Seoul": "Korea", "Billund": "Denmark", "Poprad": "Slovakia", "Paris": "France",
}
PERSONS = [
    "Andrej Kiska", "Peter Sagan", "Bhumibol Adulyadej", "Marie Curie", "Albert Einstein",
    "Isaac Newton", "Vaclav Havel", "Tomas Masaryk", "Antonin Dvorak", "Franz Kafka",
    "Wolfgang Mozart", "Ludwig Beethoven", "Nikola Tesla", "Charles Darwin", "Galileo Galilei",
    "Johannes Kepler", "Pablo Picasso", "Frida Kahlo", "Jane Austen", "Mark Twain",
    "Ernest Hemingway", "Leo Tolstoy", "William Shakespeare", "Charles Dickens", "Angela Merkel",
    "Nelson Mandela", "Mahatma Gandhi", "Winston Churchill", "Abraham Lincoln", "Napoleon Bonaparte",
    "Simon Bolivar", "Alexander Fleming", "Louis Pasteur", "Gregor Mendel", "Frederic Chopin",
    "Martina Navratilova", "Emil Zatopek", "Jaromir Jagr", "Roger Federer", "Usain Bolt",
    "Eddy Merckx", "Shakira", "Pele", "Zuzana Caputova", "Milan Stefanik",
]
ROLES = ["president", "king", "queen", "prime minister", "chancellor", "leader"]
NATIONALITIES = ["Slovak", "Czech", "Austrian", "Hungarian", "Polish", "German", "French",
                 "Italian", "Spanish", "Swedish", "British", "American", "Russian", "Serbian"]
PROFESSIONS = ["writer", "painter", "composer", "scientist", "physicist", "chemist", "singer",
               "actor", "cyclist", "player", "poet", "inventor"]
SUBJECTS = ["physics", "chemistry", "medicine", "law", "music", "philosophy", "mathematics",
            "literature", "biology", "economics", "engineering", "architecture"]
RIVERS = {
    "Danube": ["Slovakia", "Austria", "Hungary", "Germany", "Serbia", "Romania", "Bulgaria", "Croatia"],
    "Vltava": ["Czechia"], "Elbe": ["Czechia", "Germany"], "Rhine": ["Germany", "France"],
    "Nile": ["Egypt"], "Mekong": ["Thailand", "Vietnam", "China"], "Seine": ["France"],
    "Amazon": ["Brazil", "Peru"], "Tagus": ["Spain", "Portugal"], "Vistula": ["Poland"],
}
PRIZES = ["Nobel Prize", "Pulitzer Prize", "Turing Award", "Grammy Award", "Wimbledon"]
COMPANIES = {"Nokia": "Espoo", "Volvo": "Gothenburg", "Siemens": "Munich", "Sony": "Tokyo",
             "Samsung": "Seoul", "Lego": "Billund", "Skoda": "Brno", "Ikea": "Stockholm"}
BORDERS = [("Slovakia", "Austria"), ("Slovakia", "Hungary"), ("Slovakia", "Poland"),
           ("Slovakia", "Czechia"), ("Slovakia", "Ukraine"), ("Czechia", "Germany"),
           ("Czechia", "Austria"), ("Austria", "Italy"), ("France", "Spain"),
           ("Germany", "Denmark"), ("Norway", "Sweden"), ("Finland", "Sweden"),
           ("Hungary", "Romania"), ("Serbia", "Croatia"), ("Peru", "Chile"),
           ("Greece", "Bulgaria"), ("Thailand", "Vietnam"), ("Portugal", "Spain")]


def write_gazetteer():
    rows = []
    for c in COUNTRIES:
        rows += [(c, "NER", "location"), (c, "GKG", "country"), (c, "SST", "country")]
    rows += [("Korea", "NER", "location"), ("Korea", "GKG", "country"), ("Korea", "SST", "country")]
    for city in list(COUNTRIES.values()) + list(OTHER_CITIES):
        rows += [(city, "NER", "location"), (city, "GKG", "city"), (city, "SST", "city")]
    for p in PERSONS:
        rows += [(p, "NER", "person"), (p, "GKG", "person")]
    for r in ["Europe", "Africa", "Asia"]:
        rows += [(r, "NER", "location"), (r, "GKG", "continent")]
    for r in RIVERS:
        rows += [(r, "NER", "location"), (r, "GKG", "river"), (r, "SST", "object")]
    for p in PRIZES:
        rows += [(p, "GKG", "award")]
    for c in COMPANIES:
        rows += [(c, "NER", "organization"), (c, "GKG", "company")]
    rows += [("Euro", "GKG", "currency"), ("Bora", "NER", "organization"), ("Bora", "GKG", "team")]
    for role in ROLES + ["mayor", "governor", "emperor", "monarch", "ruler"]:
        rows.append((role, "SST", "role"))
    for w in ["capital", "city", "country", "region", "island"]:
        rows.append((w, "SST", "place"))
    for w in ["currency"]:
        rows.append((w, "SST", "artifact"))
    with (DATA / "gazetteer.tsv").open("w", encoding="utf-8") as f:
        f.write("# PHRASE\tLAYER\tLABEL  (capitalized phrases match case-sensitively)\n")
        for r in rows:
            f.write("\t".join(r) + "\n")


def person_templates(rng):
    p = rng.choice(PERSONS)
    c = rng.choice(list(COUNTRIES))
    city = rng.choice(list(COUNTRIES.values()) + list(OTHER_CITIES))
    year = str(rng.randint(1820, 2019))
    role = rng.choice(ROLES)
    prize = rng.choice(PRIZES)
    nat = rng.choice(NATIONALITIES)
    prof = rng.choice(PROFESSIONS)
    subj = rng.choice(SUBJECTS)
    return [
        (f"The {role} of {c} is {p}.", f"Who is the {role} of {c}?", p),
        (f"{p} was the {role} of {c}.", f"Who was the {role} of {c}?", p),
        (f"{p} comes from {c}.", f"Where does {p} come from?", f"from {c}"),
        (f"{p} was born in {city}.", f"Where was {p} born?", city),
        (f"{p} was born in {city}.", f"Who was born in {city}?", p),
        (f"{p} won the {prize} in {year}.", f"When did {p} win the {prize}?", year),
        (f"{p} won the {prize} in {year}.", f"Who won the {prize} in {year}?", p),
        (f"{p} won the {prize} in {year}.", f"What did {p} win in {year}?", f"the {prize}"),
        (f"{p} studied {subj} at the University of {city}.",
         f"What did {p} study at the University of {city}?", subj),
        (f"{p} died in {city} in {year}.", f"Where did {p} die?", city),
        (f"{p} died in {city} in {year}.", f"When did {p} die?", year),
        (f"{p} is a famous {nat} {prof}.", f"Who is a famous {nat} {prof}?", p),
        (f"{p} became the {role} of {c} in {year}.", f"When did {p} become the {role} of {c}?", year),
        (f"{p} became the {role} of {c} in {year}.", f"Who became the {role} of {c} in {year}?", p),
    ]


def place_templates(rng):
    c, cap = rng.choice(list(COUNTRIES.items()))
    city, cc = rng.choice(list(OTHER_CITIES.items()))
    river, rcs = rng.choice(list(RIVERS.items()))
    rc = rng.choice(rcs)
    b1, b2 = rng.choice(BORDERS)
    comp, hq = rng.choice(list(COMPANIES.items()))
    pop = f"{rng.randint(1, 9)},{rng.randint(100, 999)},{rng.randint(100, 999)}"
    return [
        (f"The capital of {c} is {cap}.", f"What is the capital of {c}?", cap),
        (f"The capital of {c} is {cap}.", f"Where is {cap}?", f"in {c}"),
        (f"The capital of {c} is {cap}.", f"Which city is the capital of {c}?", cap),
        (f"{city} is located in {cc}.", f"Where is {city} located?", cc),
        (f"The {river} flows through {rc}.", f"Which river flows through {rc}?", river),
        (f"The {river} flows through {rc}.", f"Which country does the {river} flow through?", rc),
        (f"The population of {cap} is {pop}.", f"What is the population of {cap}?", pop),
        (f"{b1} borders {b2}.", f"Which country borders {b2}?", b1),
        (f"{comp} is based in {hq}.", f"Where is {comp} based?", hq),
    ]


def broken_templates(rng):
    p = rng.choice(PERSONS)
    c, cap = rng.choice(list(COUNTRIES.items()))
    return [
        (f"{p} comes from {c}.", f"Name the home country of {p}.", c),
        (f"The capital of {c} is {cap}.", "Which city hosts the government?", cap),
        (f"{p} was born in {cap}.", "Who was born there?", p),
    ]


def write_corpus():
    rng = random.Random(1729)
    seen = set()
    pairs = []
    while len(pairs) < 1200:
        roll = rng.random()
        if roll < 0.04:
            pool = broken_templates(rng)
        elif roll < 0.55:
            pool = person_templates(rng)
        else:
            pool = place_templates(rng)
        s, q, a = rng.choice(pool)
        if (s, q) in seen:
            continue
        seen.add((s, q))
        pairs.append({"id": f"w{len(pairs):04d}", "sentence": s, "question": q, "answer": a})
    with (FIX / "wiki_pairs.jsonl").open("w", encoding="utf-8") as f:
        for p in pairs:
            f.write(json.dumps(p, ensure_ascii=False) + "\n")


HELDOUT = [
    ("The capital of Norway is Oslo.", "What is the name of the capital city of Norway?"),
    ("The president of Kenya is Mahatma Gandhi.", "Who is the person serving as the president of Kenya?"),
    ("Nikola Tesla was born in Vienna.", "In which city was Nikola Tesla born?"),
    ("Frida Kahlo comes from Peru.", "From which country does Frida Kahlo originally come?"),
    ("Emil Zatopek won the Grammy Award in 1952.", "In which year did Emil Zatopek win the Grammy Award?"),
    ("Brno is located in Czechia.", "In which country is the city of Brno located?"),
    ("The Vistula flows through Poland.", "Which river flows through the country of Poland?"),
    ("Croatia borders Slovenia.", "Which country shares a border with Slovenia?"),
    ("Volvo is based in Gothenburg.", "In which city is the company Volvo based?"),
    ("Jane Austen died in Dublin in 1817.", "In which city did Jane Austen die?"),
    ("Gregor Mendel studied biology at the University of Vienna.",
     "What subject did Gregor Mendel study at the University of Vienna?"),
    ("Angela Merkel became the chancellor of Germany in 2005.",
     "In which year did Angela Merkel become the chancellor of Germany?"),
    ("The capital of Peru is Lima.", "Which city is the capital of the country of Peru?"),
    ("Antonin Dvorak is a famous Czech composer.", "Which person is a famous Czech composer?"),
    ("Bhumibol Adulyadej was the king of Thailand.", "Who was the king of the country of Thailand?"),
]


def write_heldout():
    with (FIX / "heldout.jsonl").open("w", encoding="utf-8") as f:
        for i, (s, r) in enumerate(HELDOUT):
            f.write(json.dumps({"id": f"h{i:02d}", "sentence": s, "reference": r}) + "\n")


if __name__ == "__main__":
    write_gazetteer()
    write_corpus()
    write_heldout()
    print("ok")
