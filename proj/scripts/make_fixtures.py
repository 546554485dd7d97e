#!/usr/bin/env python3
"""Regenerates the synthetic fixture corpora under data/fixtures/.

The fixtures mimic the native dump formats of the public benchmarks (CasRel
JSON for NYT/WebNLG, TACRED JSON) at a few dozen sentences each, together with
entity-linking output and a KB snapshot. Output is deterministic.

    python3 scripts/make_fixtures.py [--out data/fixtures]
"""

import argparse
import hashlib
import json
import os
import random


def kb_id(name):
    return "Q" + str(int(hashlib.sha1(name.encode()).hexdigest()[:8], 16) % 9000000 + 100000)


def dump_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as f:
        for r in records:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")


def dump_json(path, obj):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(obj, f, ensure_ascii=False, indent=1)
        f.write("\n")


# --------------------------------------------------------------------------
# shared entity inventory: surface -> (kb label, instance_of, subclass_of)

ENTITIES = {
    # people
    "Alan Shepard": ("Alan Shepard", ["human", "astronaut"], []),
    "Elliot See": ("Elliot See", ["human"], []),
    "Buzz Aldrin": ("Buzz Aldrin", ["human", "astronaut"], []),
    "Ada Lovelace": ("Ada Lovelace", ["human"], []),
    "Bill Oddie": ("Bill Oddie", ["human"], []),
    "Kate Hardie": ("Kate Hardie", ["human"], []),
    "Marie Curie": ("Marie Curie", ["human"], []),
    "Nikola Tesla": ("Nikola Tesla", ["human"], []),
    "Grace Hopper": ("Grace Hopper", ["human"], []),
    "Alan Turing": ("Alan Turing", ["human"], []),
    "Eric Flint": ("Eric Flint", ["human"], []),
    "Ursula Le Guin": ("Ursula K. Le Guin", ["human"], []),
    "Pierre Curie": ("Pierre Curie", ["human"], []),
    "Irene Joliot": ("Irène Joliot-Curie", ["human"], []),
    # places
    "Hackensack": ("Hackensack, New Jersey", ["city", "big city"], []),
    "Dallas": ("Dallas", ["city", "big city"], []),
    "Glen Ridge": ("Glen Ridge, New Jersey", ["borough"], []),
    "Warsaw": ("Warsaw", ["city", "capital"], []),
    "Smiljan": ("Smiljan", ["village"], []),
    "Boston": ("Boston", ["city"], []),
    "Lyon": ("Lyon", ["city"], []),
    "Turin": ("Turin", ["city"], []),
    "London": ("London", ["city", "capital"], []),
    "Paris": ("Paris", ["city", "capital"], []),
    "Rome": ("Rome", ["city", "capital"], []),
    "United States": ("United States of America", ["sovereign state", "country"], []),
    "Poland": ("Poland", ["sovereign state", "country"], []),
    "Croatia": ("Croatia", ["sovereign state", "country"], []),
    "France": ("France", ["sovereign state", "country"], []),
    "Italy": ("Italy", ["sovereign state", "country"], []),
    "England": ("England", ["country"], []),
    # organizations
    "Princeton University": ("Princeton University", ["university"], []),
    "University of Paris": ("University of Paris", ["university"], []),
    "Harvard University": ("Harvard University", ["university", "private university"], []),
    "Bletchley Park": ("Bletchley Park", ["museum"], []),
    # works
    "The Grantville Gazettes": ("The Grantville Gazette", ["literary work"], []),
    "Ring of Fire": ("1632", ["literary work", "novel"], []),
    "A Wizard of Earthsea": ("A Wizard of Earthsea", ["literary work", "novel"], []),
    "The Tombs of Atuan": ("The Tombs of Atuan", ["literary work", "novel"], []),
    "The Bavarian Crisis": ("1634: The Bavarian Crisis", ["literary work"], []),
}

PEOPLE = [e for e, v in ENTITIES.items() if "human" in v[1]]
CITIES = ["Hackensack", "Dallas", "Glen Ridge", "Warsaw", "Smiljan", "Boston", "Lyon",
          "Turin", "London", "Paris", "Rome"]
COUNTRIES = ["United States", "Poland", "Croatia", "France", "Italy", "England"]
UNIS = ["Princeton University", "University of Paris", "Harvard University"]
WORKS = ["The Grantville Gazettes", "Ring of Fire", "A Wizard of Earthsea",
         "The Tombs of Atuan", "The Bavarian Crisis"]


def snapshot_records(names, extra=()):
    recs = []
    for name in sorted(set(names) | set(extra)):
        label, inst, sub = ENTITIES[name]
        recs.append({"kb_id": kb_id(name), "label": label, "instance_of": inst,
                     "subclass_of": sub})
    recs.sort(key=lambda r: r["kb_id"])
    return recs


def el_for(rng, text, names, example_id):
    mentions = []
    for name in names:
        pos = text.find(name)
        assert pos >= 0, (name, text)
        mentions.append({"surface": name, "start": pos, "end": pos + len(name),
                         "kb_id": kb_id(name), "score": round(rng.uniform(-4.0, -0.1), 3)})
        roll = rng.random()
        if roll < 0.15:
            # weaker competing candidate for the same span, removed by top-1
            mentions.append({"surface": name, "start": pos, "end": pos + len(name),
                             "kb_id": "Q" + str(rng.randint(10, 99999)),
                             "score": round(mentions[-1]["score"] - rng.uniform(0.2, 1.0), 3)})
        elif roll < 0.25:
            # below the linker threshold
            mentions.append({"surface": name, "start": pos, "end": pos + len(name),
                             "kb_id": "Q" + str(rng.randint(10, 99999)),
                             "score": round(rng.uniform(-7.0, -4.6), 3)})
    mentions.sort(key=lambda m: (m["start"], -m["score"]))
    return {"example_id": example_id, "mentions": mentions}


# --------------------------------------------------------------------------
# joint extraction fixtures (CasRel layout)

WEBNLG_REL = [
    ("birthPlace", PEOPLE, CITIES, "{s} was born in {o}"),
    ("nationality", PEOPLE, COUNTRIES, "{s} is a citizen of {o}"),
    ("almaMater", PEOPLE, UNIS, "{s} studied at {o}"),
    ("country", CITIES, COUNTRIES, "{s} lies in {o}"),
    ("capital", COUNTRIES, CITIES, "the capital of {s} is {o}"),
    ("author", WORKS, PEOPLE, "{s} was written by {o}"),
    ("precededBy", WORKS, WORKS, "{s} is the sequel to {o}"),
    ("child", PEOPLE, PEOPLE, "{o} is the child of {s}"),
]

NYT_REL = [
    ("/people/person/place_of_birth", PEOPLE, CITIES, "{s} was born in {o}"),
    ("/people/person/nationality", PEOPLE, COUNTRIES, "{s} holds a passport from {o}"),
    ("/location/location/contains", COUNTRIES, CITIES, "{s} includes the city of {o}"),
    ("/location/country/capital", COUNTRIES, CITIES, "{o} is the seat of government of {s}"),
    ("/people/person/place_lived", PEOPLE, CITIES, "{s} lived for years in {o}"),
    ("/business/person/company", PEOPLE, UNIS, "{s} worked for {o}"),
]

NYT_FILLERS = [
    ("according to reports from {a}", 1),
    ("as noted by observers in {a} and {b}", 2),
    ("said a spokesman in {a}", 1),
]


def make_joint(rng, relations, n_examples, prefix, fillers=None):
    records, els, used, texts = [], [], set(), set()
    sizes = [1, 2, 3, 4]
    while len(records) < n_examples:
        size = sizes[len(records) % 4]
        triples, clauses, names = [], [], []
        tries = 0
        while len(triples) < size and tries < 50:
            tries += 1
            rel, subj_pool, obj_pool, pattern = rng.choice(relations)
            s, o = rng.choice(subj_pool), rng.choice(obj_pool)
            if s == o or [s, rel, o] in triples:
                continue
            triples.append([s, rel, o])
            clauses.append(pattern.format(s=s, o=o))
            names += [s, o]
        if len(triples) < size:
            continue
        text = " , and ".join(clauses)
        text = text[0].upper() + text[1:]
        extra = []
        if fillers:
            pattern, k = rng.choice(fillers)
            pool = [c for c in CITIES + COUNTRIES if c not in names]
            picks = rng.sample(pool, k)
            extra = picks
            text += " , " + pattern.format(a=picks[0], b=picks[-1])
        text += " ."
        if text in texts:
            continue
        # every argument must be findable as-is in the text
        if any(name not in text for name in names):
            continue
        texts.add(text)
        ex_id = f"{prefix}_{len(records)}"
        records.append({"text": text, "triple_list": triples})
        linked = list(dict.fromkeys(names + extra))
        els.append(el_for(rng, text, linked, ex_id))
        used.update(linked)
    return records, els, used


# --------------------------------------------------------------------------
# relation classification fixture (TACRED layout)

TACRED_REL = [
    ("per:city_of_birth", PEOPLE, CITIES, "PERSON", "CITY", "{s} was born in {o}"),
    ("per:employee_of", PEOPLE, UNIS, "PERSON", "ORGANIZATION", "{s} taught at {o}"),
    ("per:countries_of_residence", PEOPLE, COUNTRIES, "PERSON", "COUNTRY", "{s} moved to {o}"),
    ("per:children", PEOPLE, PEOPLE, "PERSON", "PERSON", "{s} raised {o}"),
    ("org:city_of_headquarters", UNIS, CITIES, "ORGANIZATION", "CITY", "{s} is based in {o}"),
]


def tacred_records(rng, n_examples, prefix):
    out, els, used, texts = [], [], set(), set()
    sizes = [1, 2, 3, 4]
    n = 0
    while n < n_examples:
        size = sizes[n % 4]
        clauses, pairs, names, types = [], [], [], {}
        tries = 0
        while len(pairs) < size and tries < 60:
            tries += 1
            rel, sp, op, st, ot, pattern = rng.choice(TACRED_REL)
            s, o = rng.choice(sp), rng.choice(op)
            # each entity appears once per sentence so spans never collide
            if s == o or s in names or o in names:
                continue
            if any(a in b or b in a for a in (s, o) for b in names + [o if a == s else s]
                   if a != b):
                continue
            pairs.append((s, rel, o))
            clauses.append(pattern.format(s=s, o=o))
            names += [s, o]
            types[s], types[o] = st, ot
        if len(pairs) < size:
            continue
        tokens = []
        for i, c in enumerate(clauses):
            if i:
                tokens += [",", "and"]
            tokens += c.split(" ")
        tokens.append(".")
        text = " ".join(tokens)
        if text in texts:
            continue
        texts.add(text)

        def span(name):
            parts = name.split(" ")
            for i in range(len(tokens) - len(parts) + 1):
                if tokens[i:i + len(parts)] == parts:
                    return i, i + len(parts) - 1
            raise AssertionError(name)

        ex_id = f"{prefix}_{n}"
        for k, (s, rel, o) in enumerate(pairs):
            ss, se = span(s)
            os_, oe = span(o)
            out.append({"id": ex_id if k == 0 else f"{ex_id}_{k}", "relation": rel,
                        "token": tokens, "subj_start": ss, "subj_end": se,
                        "obj_start": os_, "obj_end": oe,
                        "subj_type": types[s], "obj_type": types[o]})
        if size >= 2 and rng.random() < 0.3:
            # an unrelated pair inside the same sentence
            s, o = names[0], names[-1]
            ss, se = span(s)
            os_, oe = span(o)
            out.append({"id": f"{ex_id}_x", "relation": "no_relation", "token": tokens,
                        "subj_start": ss, "subj_end": se, "obj_start": os_,
                        "obj_end": oe, "subj_type": types[s], "obj_type": types[o]})
        els.append(el_for(rng, text, list(dict.fromkeys(names)), ex_id))
        used.update(names)
        n += 1
    return out, els, used


# --------------------------------------------------------------------------
# documented error cases

def error_cases(out_dir):
    os.makedirs(out_dir, exist_ok=True)
    case1 = "1634 : The Bavarian crisis is the sequel to The Grantville Gazettes ."
    case2 = ("Through a series of leisurely walks around the island -- from the Battery to "
             "Washington Heights , and from Wall Street to the Harlem River -- Lopate "
             "ruminates on Manhattan 's history , architecture and inhabitants .")
    case3 = ("The two companies were preparing to announce that AIG had agreed to sell "
             "American Life Insurance Co , better known as Alico , for 68 billion dollars "
             "in cash and 87 billion in MetLife equity , the report said .")
    case4 = "Bill Oddie 's daughter is Kate Hardie ."
    case5 = ('the word "song " is used to describe the pattern of regular and predictable '
             'sounds made by some species of whales , notably the humpback whale .')

    def ent(text, surface, etype=None):
        start = text.index(surface)
        e = {"surface": surface, "start": start, "end": start + len(surface)}
        if etype:
            e["type"] = etype
        return e

    corpus = [
        {"id": "webnlg_test_578", "text": case1, "entities": [],
         "triples": [{"subject": "1634 : The Bavarian", "relation": "precededBy",
                      "object": "The Grantville Gazettes"}], "task": "JREE"},
        {"id": "nyt_test_582", "text": case2, "entities": [],
         "triples": [{"subject": "Manhattan", "relation": "contains",
                      "object": "Washington Heights"},
                     {"subject": "Washington Heights", "relation": "neighborhood_of",
                      "object": "Manhattan"}], "task": "JREE"},
        {"id": "tacred_test_1013", "text": case3,
         "entities": [ent(case3, "American Life Insurance Co", "ORGANIZATION"),
                      ent(case3, "Alico", "ORGANIZATION")],
         "triples": [{"subject": "Alico", "relation": "org_alternate_names",
                      "object": "American Life Insurance Co"}], "task": "ETRC"},
        {"id": "webnlg_test_633", "text": case4, "entities": [],
         "triples": [{"subject": "Bill Oddie", "relation": "child",
                      "object": "Kate Hardie"}], "task": "JREE"},
        {"id": "semeval_test_876", "text": case5,
         "entities": [ent(case5, "sounds"), ent(case5, "species")],
         "triples": [{"subject": "sounds", "relation": "Effect_Cause", "object": "species"},
                     {"subject": "species", "relation": "Cause_Effect", "object": "sounds"}],
         "task": "RC"},
    ]
    dump_jsonl(os.path.join(out_dir, "corpus.jsonl"), corpus)
    dump_json(os.path.join(out_dir, "schema.json"), {
        "relations": ["precededBy", "child", "contains", "neighborhood_of",
                      "org_alternate_names", "Cause_Effect", "Effect_Cause",
                      "Product_Producer", "Producer_Product"]})
    generated = [
        {"id": "webnlg_test_578",
         "output": "1634 : The Bavarian crisis precededBy The Grantville Gazettes"},
        {"id": "nyt_test_582",
         "output": "Washington Heights neighborhood_of Manhattan ; Harlem River "
                   "neighborhood_of Manhattan ; Manhattan contains Washington Heights ; "
                   "Manhattan contains Harlem River ; Manhattan contains the Battery;"},
        {"id": "tacred_test_1013",
         "output": "American Life Insurance Co org_alternate_names Alico ;"},
        {"id": "webnlg_test_633", "output": "Bill Oddie daughter Kate Hardie"},
        {"id": "semeval_test_876",
         "output": "species Producer_Product sounds ; sounds Product_Producer species ;"},
    ]
    dump_jsonl(os.path.join(out_dir, "generated.jsonl"), generated)

    def fact(text, surface, kb, label, typ):
        start = text.index(surface)
        return {"surface": surface, "start": start, "end": start + len(surface),
                "kb_id": kb, "score": -1.0, "label": label, "type": typ}

    grounded = [
        {"id": "webnlg_test_578", "facts": [
            fact(case1, "1634 : The Bavarian crisis", "Q4546441",
                 "1634: The Bavarian Crisis", "literary work"),
            fact(case1, "The Grantville Gazettes", "Q7738190",
                 "The Grantville Gazette", "literary work")]},
        {"id": "nyt_test_582", "facts": [
            fact(case2, "the Battery", "Q1636960", "The Battery (Manhattan)", "urban park"),
            fact(case2, "Washington Heights", "Q1070640", "Washington Heights, Manhattan",
                 "neighborhood"),
            fact(case2, "Wall Street", "Q109703", "Wall Street", "street"),
            fact(case2, "Harlem River", "Q1583930", "Harlem River", "strait"),
            fact(case2, "Manhattan", "Q11299", "Manhattan", "borough of New York City")]},
        {"id": "tacred_test_1013", "facts": [
            fact(case3, "American Life Insurance Co", "Q4744410",
                 "American Life Insurance Company", "business"),
            fact(case3, "Alico", "Q4744410", "American Life Insurance Company", "business")]},
        {"id": "webnlg_test_633", "facts": [
            fact(case4, "Bill Oddie", "Q1362386", "Bill Oddie", "human"),
            fact(case4, "Kate Hardie", "Q6375949", "Kate Hardie", "human")]},
        {"id": "semeval_test_876", "facts": []},
    ]
    dump_jsonl(os.path.join(out_dir, "grounded.jsonl"), grounded)


def write_fixture(out_dir, name, records, els, used, relations, native, native_name,
                  extra_entities=()):
    d = os.path.join(out_dir, name)
    os.makedirs(d, exist_ok=True)
    dump_json(os.path.join(d, native_name), records)
    dump_jsonl(os.path.join(d, "el.jsonl"), els)
    dump_jsonl(os.path.join(d, "snapshot.jsonl"), snapshot_records(used, extra_entities))
    dump_json(os.path.join(d, "schema.json"), relations)
    with open(os.path.join(d, "FORMAT"), "w") as f:
        f.write(native + "\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data",
                                                  "fixtures"))
    args = ap.parse_args()
    out = os.path.normpath(args.out)

    rng = random.Random(20221)
    recs, els, used = make_joint(rng, WEBNLG_REL, 64, "test")
    write_fixture(out, "webnlg", recs, els, used,
                  {"relations": [r[0] for r in WEBNLG_REL]}, "webnlg", "test.json")

    rng = random.Random(20222)
    recs, els, used = make_joint(rng, NYT_REL, 60, "test", fillers=NYT_FILLERS)
    write_fixture(out, "nyt", recs, els, used,
                  {"relations": [r[0] for r in NYT_REL]}, "nyt", "test.json")

    rng = random.Random(20223)
    recs, els, used = tacred_records(rng, 56, "test")
    write_fixture(out, "tacred", recs, els, used,
                  {"relations": [r[0] for r in TACRED_REL], "null_relation": "no_relation"},
                  "tacred", "test.json")

    error_cases(os.path.join(out, "error_cases"))


if __name__ == "__main__":
    main()
