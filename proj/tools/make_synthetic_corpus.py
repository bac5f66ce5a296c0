#!/usr/bin/env python3
"""Writes the bundled synthetic data set under data/.

Stories come from a small tagged template grammar, so every token carries a
lemma, a UPOS tag and an IOB entity label without any external tagger.
Output is a pure function of --seed.

    data/corpus/train.txt         training corpus, one story per line
    data/prompts.txt              writing prompts, one per line
    data/human.jsonl              annotated human records (some short)
    data/resources/embeddings.txt
    data/resources/unigrams.txt   p(w) over the training corpus
    data/resources/concreteness.csv
    data/resources/stopwords.txt
"""

import argparse
import json
import math
import random
from collections import Counter
from pathlib import Path

FIRST_NAMES = """Ada Bram Cora Dane Edda Finn Greta Hale Iris Jonah Kira Lars Mira Nils
Orla Pike Quinn Rhea Soren Tova Ulla Vance Wren Yara Zane Anselm Brielle Cato
Delia Emrys Faye Gideon Hazel Ivo Juno Kestrel Lorne Maren Niamh Osric""".split()

PLACES = """Ashford Brightwater Coldharbor Dunmere Eastwatch Fenwick Glimmerdale Highmoor
Ironvale Juniper Kingsreach Lowmarsh Mistral Northgate Oakhollow Pellbrook
Quarry Ravensworth Saltmarsh Thornfield""".split()

# (word, concreteness rating)
NOUNS = [
    ("house", 4.9), ("door", 4.8), ("window", 4.9), ("table", 4.9), ("chair", 4.9),
    ("river", 4.9), ("forest", 4.8), ("mountain", 4.9), ("road", 4.8), ("bridge", 4.9),
    ("ship", 4.9), ("boat", 4.9), ("sword", 4.9), ("shield", 4.8), ("lamp", 4.9),
    ("candle", 4.9), ("book", 4.9), ("letter", 4.7), ("map", 4.8), ("key", 4.9),
    ("stone", 4.9), ("tree", 5.0), ("flower", 5.0), ("bird", 5.0), ("horse", 5.0),
    ("dog", 4.9), ("cat", 4.9), ("wolf", 4.9), ("dragon", 3.9), ("robot", 4.6),
    ("television", 4.83), ("radio", 4.8), ("phone", 4.9), ("car", 4.9), ("train", 4.9),
    ("city", 4.6), ("village", 4.4), ("castle", 4.8), ("tower", 4.8), ("garden", 4.9),
    ("sea", 4.8), ("sky", 4.5), ("sun", 4.8), ("moon", 4.8), ("star", 4.7),
    ("rain", 4.9), ("snow", 4.9), ("fire", 4.8), ("water", 5.0), ("bread", 5.0),
    ("coin", 4.9), ("ring", 4.9), ("crown", 4.8), ("queen", 4.5), ("king", 4.5),
    ("soldier", 4.7), ("doctor", 4.6), ("teacher", 4.4), ("child", 4.6), ("stranger", 3.6),
    ("darkness", 3.85), ("light", 4.2), ("shadow", 4.1), ("voice", 3.9), ("silence", 2.8),
    ("idea", 1.61), ("truth", 1.5), ("hope", 1.25), ("fear", 1.9), ("memory", 2.0),
    ("dream", 2.1), ("secret", 2.1), ("promise", 1.8), ("plan", 2.1), ("question", 2.0),
    ("answer", 2.1), ("time", 1.9), ("reason", 1.5), ("chance", 1.5), ("war", 3.2),
    ("peace", 1.7), ("justice", 1.5), ("freedom", 1.5), ("courage", 1.6), ("anger", 2.4),
    ("night", 4.0), ("morning", 3.7), ("winter", 4.0), ("summer", 4.0), ("journey", 2.9),
    ("machine", 4.5), ("engine", 4.7), ("computer", 4.8), ("planet", 4.6), ("ocean", 4.9),
    ("island", 4.7), ("cave", 4.9), ("gate", 4.8), ("wall", 4.9), ("field", 4.8),
    ("market", 4.6), ("street", 4.8), ("room", 4.8), ("hall", 4.6), ("kitchen", 4.9),
    ("knife", 4.9), ("rope", 4.9), ("bag", 4.9), ("box", 4.9), ("bottle", 4.9),
    ("painting", 4.8), ("song", 3.7), ("story", 2.9), ("name", 2.9), ("word", 3.0),
    ("world", 3.7), ("heart", 4.5), ("hand", 4.9), ("face", 4.9), ("eye", 4.9),
    ("problem", 1.9), ("danger", 2.5), ("luck", 1.6), ("power", 2.4), ("magic", 2.1),
]

# (lemma, past, third person present, concreteness rating)
VERBS = [
    ("walk", "walked", "walks", 4.3), ("run", "ran", "runs", 4.4), ("see", "saw", "sees", 3.21),
    ("talk", "talked", "talks", 4.07), ("hope", "hoped", "hopes", 1.25), ("find", "found", "finds", 3.0),
    ("open", "opened", "opens", 4.0), ("close", "closed", "closes", 3.8), ("take", "took", "takes", 3.2),
    ("give", "gave", "gives", 3.1), ("hold", "held", "holds", 3.9), ("carry", "carried", "carries", 4.0),
    ("follow", "followed", "follows", 3.0), ("watch", "watched", "watches", 4.0), ("hear", "heard", "hears", 3.7),
    ("build", "built", "builds", 3.9), ("break", "broke", "breaks", 3.9), ("burn", "burned", "burns", 4.2),
    ("climb", "climbed", "climbs", 4.5), ("swim", "swam", "swims", 4.7), ("sing", "sang", "sings", 4.4),
    ("write", "wrote", "writes", 4.2), ("read", "read", "reads", 4.0), ("remember", "remembered", "remembers", 1.9),
    ("forget", "forgot", "forgets", 1.8), ("believe", "believed", "believes", 1.5), ("know", "knew", "knows", 1.7),
    ("want", "wanted", "wants", 1.9), ("fear", "feared", "fears", 2.1), ("love", "loved", "loves", 2.3),
    ("leave", "left", "leaves", 3.0), ("return", "returned", "returns", 2.8), ("search", "searched", "searches", 3.1),
    ("call", "called", "calls", 3.6), ("ask", "asked", "asks", 3.0), ("answer", "answered", "answers", 2.8),
    ("fight", "fought", "fights", 4.1), ("steal", "stole", "steals", 3.6), ("hide", "hid", "hides", 3.4),
    ("wait", "waited", "waits", 2.6), ("fall", "fell", "falls", 4.0), ("rise", "rose", "rises", 3.3),
    ("drink", "drank", "drinks", 4.6), ("eat", "ate", "eats", 4.6), ("sleep", "slept", "sleeps", 4.4),
    ("dream", "dreamed", "dreams", 2.2), ("wonder", "wondered", "wonders", 1.7), ("decide", "decided", "decides", 1.6),
]

ADJECTIVES = """old young dark bright quiet loud cold warm small large ancient strange
broken silver golden red blue green black white heavy empty hidden lost
tired brave gentle cruel wise foolish distant narrow wide sudden secret
wild calm bitter sweet sharp soft pale hollow iron wooden endless""".split()

ADVERBS = """slowly quickly quietly suddenly carefully finally again never always
softly barely still""".split()

DETERMINERS = ["the", "a", "every", "that", "this", "no", "some"]
PREPOSITIONS = ["in", "on", "under", "near", "behind", "across", "through", "into",
                "from", "with", "beyond", "toward"]
PRONOUNS_SUBJ = ["she", "he", "they", "I", "we", "it"]
PRONOUNS_OBJ = ["her", "him", "them", "me", "us", "it"]
CONJ = ["and", "but", "so"]
SCONJ = ["when", "because", "while", "before", "after", "until"]

STOPWORDS = """i me my myself we our ours ourselves you you're you've you'll you'd
your yours yourself yourselves he him his himself she she's her hers herself it
it's its itself they them their theirs themselves what which who whom this that
that'll these those am is are was were be been being have has had having do does
did doing a an the and but if or because as until while of at by for with about
against between into through during before after above below to from up down in
out on off over under again further then once here there when where why how all
any both each few more most other some such no nor not only own same so than too
very s t can will just don don't should should've now d ll m o re ve y ain aren
aren't couldn couldn't didn didn't doesn doesn't hadn hadn't hasn hasn't haven
haven't isn isn't ma mightn mightn't mustn mustn't needn needn't shan shan't
shouldn shouldn't wasn wasn't weren weren't won won't wouldn wouldn't""".split()


class Story:
    """Accumulates tagged tokens and sentence ranges."""

    def __init__(self):
        self.tokens = []  # (surface, lemma, upos, ent)
        self.bounds = []

    def sentence(self, toks):
        start = len(self.tokens)
        self.tokens.extend(toks)
        self.bounds.append([start, len(self.tokens)])


def capitalized(toks):
    first = toks[0]
    return [(first[0][:1].upper() + first[0][1:],) + first[1:]] + toks[1:]


def zipf_pick(rng, items, s=1.0):
    weights = [1.0 / (i + 1) ** s for i in range(len(items))]
    return rng.choices(items, weights=weights, k=1)[0]


class Grammar:
    def __init__(self, rng):
        self.rng = rng
        # Per-run shuffles so Zipf ranks are not alphabetical.
        self.nouns = [n for n, _ in NOUNS]
        self.verbs = list(VERBS)
        self.adjs = list(ADJECTIVES)
        for lst in (self.nouns, self.verbs, self.adjs):
            rng.shuffle(lst)

    def np(self, cast):
        r = self.rng
        roll = r.random()
        if roll < 0.25 and cast["names"]:
            name = r.choice(cast["names"])
            return [(name, name, "PROPN", "B-PER")]
        if roll < 0.35:
            p = r.choice(PRONOUNS_OBJ)
            return [(p, p.lower(), "PRON", "O")]
        det = zipf_pick(r, DETERMINERS, 1.3)
        out = [(det, det, "DET", "O")]
        if r.random() < 0.45:
            adj = zipf_pick(r, self.adjs, 0.9)
            out.append((adj, adj, "ADJ", "O"))
        noun = r.choice(cast["nouns"]) if r.random() < 0.4 else zipf_pick(r, self.nouns, 0.9)
        out.append((noun, noun, "NOUN", "O"))
        return out

    def subject(self, cast):
        r = self.rng
        if r.random() < 0.45:
            name = r.choice(cast["names"])
            return [(name, name, "PROPN", "B-PER")]
        if r.random() < 0.5:
            p = r.choice(PRONOUNS_SUBJ)
            return [(p, p.lower(), "PRON", "O")]
        return self.np(cast)

    def place(self, cast):
        place = self.rng.choice(cast["places"])
        return [(place, place, "PROPN", "B-GPE")]

    def verb(self, tense="past"):
        lemma, past, pres, _ = zipf_pick(self.rng, self.verbs, 0.8)
        return (past if tense == "past" else pres, lemma, "VERB", "O")

    def pp(self, cast):
        prep = zipf_pick(self.rng, PREPOSITIONS, 1.0)
        obj = self.place(cast) if self.rng.random() < 0.3 else self.np(cast)
        return [(prep, prep, "ADP", "O")] + obj

    def clause(self, cast):
        r = self.rng
        toks = self.subject(cast)
        if r.random() < 0.15:
            adv = zipf_pick(r, ADVERBS)
            toks.append((adv, adv, "ADV", "O"))
        toks.append(self.verb())
        if r.random() < 0.75:
            toks += self.np(cast)
        if r.random() < 0.5:
            toks += self.pp(cast)
        return toks

    def sentence(self, cast):
        r = self.rng
        roll = r.random()
        if roll < 0.12:
            # quoted speech: " I want the key , " said Ada .
            inner = capitalized(self.clause(cast))
            name = r.choice(cast["names"])
            return ([('"', '"', "PUNCT", "O")] + inner +
                    [(",", ",", "PUNCT", "O"), ('"', '"', "PUNCT", "O"),
                     ("said", "say", "VERB", "O"), (name, name, "PROPN", "B-PER"),
                     (".", ".", "PUNCT", "O")])
        if roll < 0.25:
            sc = r.choice(SCONJ)
            toks = ([(sc, sc, "SCONJ", "O")] + self.clause(cast) + [(",", ",", "PUNCT", "O")] +
                    self.clause(cast))
        elif roll < 0.4:
            c = r.choice(CONJ)
            toks = self.clause(cast) + [(c, c, "CCONJ", "O")] + self.clause(cast)
        elif roll < 0.47:
            toks = self.subject(cast) + [("was", "be", "AUX", "O")]
            adj = zipf_pick(r, self.adjs, 0.9)
            toks += [(adj, adj, "ADJ", "O")]
        else:
            toks = self.clause(cast)
        end = "!" if r.random() < 0.05 else "?" if r.random() < 0.05 else "."
        return capitalized(toks) + [(end, end, "PUNCT", "O")]

    def cast(self):
        r = self.rng
        return {
            "names": r.sample(FIRST_NAMES, 2),
            "places": r.sample(PLACES, 1),
            "nouns": r.sample(self.nouns, 3),
        }

    def story(self, cast, min_tokens):
        s = Story()
        while len(s.tokens) < min_tokens:
            s.sentence(self.sentence(cast))
        return s

    def prompt(self, cast):
        r = self.rng
        a, b = cast["names"]
        place = cast["places"][0]
        n1, n2, _ = cast["nouns"]
        adj = r.choice(self.adjs)
        templates = [
            [(a, a, "PROPN", "B-PER"), ("finds", "find", "VERB", "O"), ("a", "a", "DET", "O"),
             (adj, adj, "ADJ", "O"), (n1, n1, "NOUN", "O"), ("in", "in", "ADP", "O"),
             (place, place, "PROPN", "B-GPE"), (".", ".", "PUNCT", "O")],
            [("The", "the", "DET", "O"), (n1, n1, "NOUN", "O"), ("of", "of", "ADP", "O"),
             (place, place, "PROPN", "B-GPE"), ("remembers", "remember", "VERB", "O"),
             (b, b, "PROPN", "B-PER"), (".", ".", "PUNCT", "O")],
            [(a, a, "PROPN", "B-PER"), ("and", "and", "CCONJ", "O"), (b, b, "PROPN", "B-PER"),
             ("search", "search", "VERB", "O"), ("for", "for", "ADP", "O"), ("the", "the", "DET", "O"),
             (adj, adj, "ADJ", "O"), (n2, n2, "NOUN", "O"), (".", ".", "PUNCT", "O")],
            [("In", "in", "ADP", "O"), (place, place, "PROPN", "B-GPE"), (",", ",", "PUNCT", "O"),
             ("every", "every", "DET", "O"), (n1, n1, "NOUN", "O"), ("hides", "hide", "VERB", "O"),
             ("a", "a", "DET", "O"), (n2, n2, "NOUN", "O"), (".", ".", "PUNCT", "O")],
        ]
        return r.choice(templates)


def surface(toks):
    return " ".join(t[0] for t in toks)


def annos(toks):
    return [{"t": t[0], "lemma": t[1], "pos": t[2], "ent": t[3]} for t in toks]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data"))
    ap.add_argument("--seed", type=int, default=20180924)
    ap.add_argument("--train-tokens", type=int, default=50000)
    ap.add_argument("--prompts", type=int, default=240)
    ap.add_argument("--human", type=int, default=60)
    ap.add_argument("--dim", type=int, default=32)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    g = Grammar(rng)
    out = Path(args.out)
    (out / "corpus").mkdir(parents=True, exist_ok=True)
    (out / "resources").mkdir(parents=True, exist_ok=True)

    counts = Counter()
    total = 0
    with open(out / "corpus" / "train.txt", "w", encoding="utf-8", newline="\n") as f:
        while total < args.train_tokens:
            s = g.story(g.cast(), rng.randint(80, 220))
            words = [t[0] for t in s.tokens]
            counts.update(words)
            total += len(words)
            f.write(" ".join(words) + "\n")

    with open(out / "prompts.txt", "w", encoding="utf-8", newline="\n") as f:
        seen = set()
        while len(seen) < args.prompts:
            p = surface(g.prompt(g.cast()))
            if p not in seen:
                seen.add(p)
                f.write(p + "\n")

    with open(out / "human.jsonl", "w", encoding="utf-8", newline="\n") as f:
        for i in range(args.human):
            cast = g.cast()
            prompt = g.prompt(cast)
            # every fifth story is too short for the 150-word baseline
            min_len = rng.randint(90, 140) if i % 5 == 4 else rng.randint(170, 260)
            s = g.story(cast, min_len)
            rec = {
                "id": f"human-{i:04d}",
                "model": "human",
                "prompt": surface(prompt),
                "story": surface(s.tokens),
                "tokens": [t[0] for t in s.tokens],
                "sent_bounds": s.bounds,
                "annos": annos(s.tokens),
                "prompt_tokens": [t[0] for t in prompt],
                "prompt_annos": annos(prompt),
            }
            f.write(json.dumps(rec, ensure_ascii=False, separators=(",", ":")) + "\n")

    with open(out / "resources" / "unigrams.txt", "w", encoding="utf-8", newline="\n") as f:
        f.write(f"#total {total}\n")
        for w in sorted(counts):
            f.write(f"{w} {counts[w] / total!r}\n")

    # Word vectors: a shared class direction plus a per-word Gaussian part.
    vocab = sorted(set(counts) | {n for n, _ in NOUNS} | {v[0] for v in VERBS})
    class_dir = {}
    for cls in ("noun", "verb", "adj", "other"):
        class_dir[cls] = [rng.gauss(0, 1) for _ in range(args.dim)]
    noun_set = {n for n, _ in NOUNS}
    verb_set = {form for v in VERBS for form in v[:3]}
    adj_set = set(ADJECTIVES)
    with open(out / "resources" / "embeddings.txt", "w", encoding="utf-8", newline="\n") as f:
        for w in vocab:
            cls = ("noun" if w in noun_set else "verb" if w in verb_set
                   else "adj" if w in adj_set else "other")
            vec = [0.6 * c + rng.gauss(0, 1) for c in class_dir[cls]]
            norm = math.sqrt(sum(x * x for x in vec))
            f.write(w + " " + " ".join(f"{x / norm:.6f}" for x in vec) + "\n")

    with open(out / "resources" / "concreteness.csv", "w", encoding="utf-8", newline="\n") as f:
        f.write("lemma,rating\n")
        rows = {n: c for n, c in NOUNS}
        for lemma, _, _, c in VERBS:
            rows.setdefault(lemma, c)
        for lemma in sorted(rows):
            f.write(f"{lemma},{rows[lemma]}\n")

    with open(out / "resources" / "stopwords.txt", "w", encoding="utf-8", newline="\n") as f:
        for w in STOPWORDS:
            f.write(w + "\n")

    print(f"train tokens {total}, types {len(counts)}, prompts {args.prompts}, human {args.human}")


if __name__ == "__main__":
    main()
