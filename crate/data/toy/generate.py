#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Writes the synthetic toy corpus: reviews.jsonl, albums.csv, parses.conllu.

Output is a pure function of SEED. The parses are produced from the same
templates as the review text, so no parser is needed to run the text stage.
"""

import csv
import json
import random
from pathlib import Path

SEED = 20240517
HERE = Path(__file__).resolve().parent

# community -> subgroup -> genres
COMMUNITIES = {
    "extreme": {
        "black": ["Black Metal", "Melodic Black Metal", "Atmospheric Black Metal", "Depressive Black Metal"],
        "death": ["Death Metal", "Brutal Death Metal", "Technical Death Metal", "Grindcore"],
    },
    "folk": {"folk": ["Folk Metal", "Viking Metal", "Pagan Metal", "Celtic Metal", "Medieval Folk"]},
    "power": {"power": ["Power Metal", "Speed Metal", "Symphonic Metal", "Heavy Metal", "Melodic Power Metal"]},
}
FRINGE = ["Drone", "Noise"]

COUNTRIES = {
    "black": ["Norway", "Norway", "Sweden", "Finland", "France"],
    "death": ["United States", "United States", "Sweden", "Poland", "Brazil"],
    "folk": ["Finland", "Norway", "Ireland", "Germany", "Russia"],
    "power": ["Germany", "Germany", "Italy", "Sweden", "Finland"],
}

GENERIC_ADJ = ["great", "good", "amazing"]
VOCAB = {
    "black": (["raw", "cold", "grim"], [("atmosphere", "atmosphere"), ("production", "production"), ("shrieks", "shriek")]),
    "death": (["brutal", "heavy", "guttural"], [("riffs", "riff"), ("vocals", "vocal"), ("drums", "drum")]),
    "folk": (["epic", "pagan", "acoustic"], [("melodies", "melody"), ("flute", "flute"), ("choirs", "choir")]),
    "power": (["catchy", "soaring", "fast"], [("chorus", "chorus"), ("solos", "solo"), ("vocals", "vocal")]),
}


def subgroups():
    for community, subs in COMMUNITIES.items():
        for sub, genres in subs.items():
            yield community, sub, genres


def make_albums(rng):
    albums = []
    band = 0
    for _, sub, genres in subgroups():
        for i, genre in enumerate(genres):
            for k in range(6):
                tags = [genre]
                if k % 3 == 0:
                    tags.append(genres[(i + 1) % len(genres)])
                if k % 2 == 0:
                    band += 1
                albums.append({
                    "album_id": f"a{len(albums) + 1:04d}",
                    "band_id": f"b{band:04d}",
                    "title": f"{genre} Record {k + 1}",
                    "year": str(1990 + rng.randrange(30)),
                    "country": rng.choice(COUNTRIES[sub]) if rng.random() > 0.05 else "",
                    "genres": ";".join(tags),
                    "_sub": sub,
                })
    for genre in FRINGE:
        band += 1
        albums.append({
            "album_id": f"a{len(albums) + 1:04d}",
            "band_id": f"b{band:04d}",
            "title": f"{genre} Record",
            "year": "2001",
            "country": "Japan",
            "genres": genre,
            "_sub": None,
        })
    return albums


def sentence(rng, sub):
    """Tokens as (form, lemma, upos, head, deprel)."""
    adjs, nouns = VOCAB[sub]
    adj = rng.choice(adjs) if rng.random() < 0.7 else rng.choice(GENERIC_ADJ)
    form, lemma = rng.choice(nouns)
    kind = rng.randrange(4)
    if kind == 0:
        return [("This", "this", "DET", 2, "det"), ("album", "album", "NOUN", 3, "nsubj"),
                ("sounds", "sound", "VERB", 0, "ROOT"), (adj, adj, "ADJ", 3, "acomp"),
                (".", ".", "PUNCT", 3, "punct")]
    if kind == 1:
        verb = ("are", "be") if form.endswith("s") else ("is", "be")
        return [("The", "the", "DET", 2, "det"), (form, lemma, "NOUN", 3, "nsubj"),
                (verb[0], verb[1], "AUX", 0, "ROOT"), (adj, adj, "ADJ", 3, "acomp"),
                (".", ".", "PUNCT", 3, "punct")]
    if kind == 2:
        return [("It", "it", "PRON", 2, "nsubj"), ("has", "have", "VERB", 0, "ROOT"),
                (adj, adj, "ADJ", 4, "amod"), (form, lemma, "NOUN", 2, "dobj"),
                (".", ".", "PUNCT", 2, "punct")]
    return [("Highly", "highly", "ADV", 2, "advmod"), ("recommended", "recommend", "VERB", 0, "ROOT"),
            (".", ".", "PUNCT", 2, "punct")]


def text_of(sentences):
    return " ".join(" ".join(t[0] for t in s[:-1]) + "." for s in sentences)


def main():
    rng = random.Random(SEED)
    albums = make_albums(rng)
    by_sub = {}
    for a in albums:
        by_sub.setdefault(a["_sub"], []).append(a)
    all_subs = [s for _, s, _ in subgroups()]

    reviews = []
    parses = []
    users = []
    for u in range(96):
        users.append((f"u{u + 1:03d}", all_subs[u % len(all_subs)]))
    # Two omnivores who rate everything highly.
    users.append(("omnivore1", None))
    users.append(("omnivore2", None))

    for user, home in users:
        if home is None:
            picks = [a for a in albums if int(a["album_id"][1:]) % 4 == 0] + [x for x in albums if x["_sub"] is None]
        else:
            count = rng.randrange(6, 13)
            picks = []
            for _ in range(count):
                r = rng.random()
                if r < 0.8:
                    pool = by_sub[home]
                else:
                    pool = albums[:-len(FRINGE)]
                picks.append(rng.choice(pool))
            if rng.random() < 0.03:
                picks.append(rng.choice(by_sub[None]))
        seen = set()
        for a in picks:
            if a["album_id"] in seen:
                continue
            seen.add(a["album_id"])
            liked = home is None or a["_sub"] == home
            score = rng.randrange(75, 101) if liked else rng.randrange(20, 90)
            sub = a["_sub"] or home or "black"
            sents = [sentence(rng, sub) for _ in range(rng.randrange(1, 4))]
            reviews.append({
                "user_id": user,
                "album_id": a["album_id"],
                "score": score,
                "text": text_of(sents),
                "date": f"20{rng.randrange(5, 20):02d}-{rng.randrange(1, 13):02d}-{rng.randrange(1, 29):02d}",
            })
            parses.append((f"{user}|{a['album_id']}", sents))

    with open(HERE / "albums.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["album_id", "band_id", "title", "year", "country", "genres"])
        for a in albums:
            w.writerow([a["album_id"], a["band_id"], a["title"], a["year"], a["country"], a["genres"]])

    with open(HERE / "reviews.jsonl", "w") as f:
        for r in reviews:
            f.write(json.dumps(r, separators=(",", ":")) + "\n")

    with open(HERE / "parses.conllu", "w") as f:
        f.write("# parser_model = toy-templates 1.0\n\n")
        for key, sents in parses:
            for i, s in enumerate(sents):
                if i == 0:
                    f.write(f"# review_id = {key}\n")
                f.write(f"# text = {text_of([s])}\n")
                for tid, (form, lemma, upos, head, dep) in enumerate(s, start=1):
                    f.write(f"{tid}\t{form}\t{lemma}\t{upos}\t_\t_\t{head}\t{dep}\t_\t_\n")
                f.write("\n")


if __name__ == "__main__":
    main()
