"""Freezes reference Porter stems for the stemmer oracle test.

The vocabulary is the union of the bundled polarity lexicon, the
non-stopword tokens of the synthetic fixture corpus and the classic
per-rule examples of the algorithm. Stems come from NLTK's PorterStemmer
in ORIGINAL_ALGORITHM mode.

    pip install nltk
    python3 scripts/gen_porter_oracle.py
"""
import glob
import json
import re

from nltk.stem.porter import PorterStemmer

CLASSIC = """caresses ponies ties caress cats feed agreed plastered bled motoring sing
conflated troubled sized hopping tanned falling hissing fizzed failing filing happy sky
relational conditional rational valenci hesitanci digitizer conformabli radicalli differentli
vileli analogousli vietnamization predication operator feudalism decisiveness hopefulness
callousness formaliti sensitiviti sensibiliti triplicate formative formalize electriciti
electrical hopeful goodness revival allowance inference airliner gyroscopic adjustable
defensible irritant replacement adjustment dependent adoption homologou communism activate
angulariti homologous effective bowdlerize probate rate cease controll roll generalizations
oscillators running quickly quicker""".split()

stop = set(open("crates/core/assets/stopwords.txt").read().split())
vocab = set(CLASSIC)
for line in open("crates/core/assets/lexicon.tsv"):
    vocab.add(line.split("\t")[0])
for path in glob.glob("crates/cli/tests/fixtures/storefront/*.json"):
    for review in json.load(open(path))["reviews"]:
        for tok in re.split(r"[^0-9a-z]+", review["review"].lower()):
            if tok and tok not in stop and not tok.isdigit():
                vocab.add(tok)

stemmer = PorterStemmer(mode=PorterStemmer.ORIGINAL_ALGORITHM)
with open("crates/core/tests/fixtures/porter_vocabulary.tsv", "w") as f:
    for word in sorted(vocab):
        f.write(f"{word}\t{stemmer.stem(word)}\n")
print(len(vocab))
