#!/usr/bin/env python3
"""Writes the bundled synthetic storefront corpus under fixtures/storefront/.

300 unique reviews in storefront page JSON (most recent first, 50 per page)
plus two repeated ids on a later page. Planted content:
  * 18 spam reviews (ASCII art and repeated words)
  * 30 short and 22 long reviews
  * 230 mid-length reviews: 112 negative in four vocabulary clusters,
    84 positive and 34 neutral
Also writes fixtures/gold.jsonl (the generator's intended label for every
mid-length review) and fixtures/planted_themes.json (ids per negative cluster).

Deterministic: rerunning produces identical files.
"""
import datetime
import json
import os
import random

ROOT = os.path.join(os.path.dirname(__file__), "..", "fixtures")
rng = random.Random(20240611)

THEMES = {
    "toxicity": {
        "subjects": ["voice chat", "the lobby", "public rooms", "the paintball lobby", "random players"],
        "phrases": [
            "full of racist slurs",
            "people shouting racism at strangers",
            "constant harassment from trolls",
            "players spamming slurs in chat",
            "moderators never ban anyone for slurs",
            "racist jokes every single match",
            "i got insulted for my accent",
            "reporting harassment does nothing",
        ],
        "neg": ["racist", "racism", "harassment", "toxic", "hate"],
    },
    "kids": {
        "subjects": ["the kids", "little children", "twelve year olds", "squeaky kids", "young kids"],
        "phrases": [
            "screaming into the mic nonstop",
            "children screaming in every room",
            "kids yelling and screaming all day",
            "parents let their kids run wild",
            "squeaky voices blasting through my headset",
            "kids screaming over the quest",
            "cannot hear teammates over screaming kids",
            "mute button barely helps with children",
        ],
        "neg": ["annoying", "screaming", "obnoxious", "unbearable"],
    },
    "crashes": {
        "subjects": ["the latest update", "my headset", "the client", "the quest build", "loading screen"],
        "phrases": [
            "crashes every ten minutes",
            "freezes then crashes to desktop",
            "buggy mess after the patch",
            "constant glitch with tracking",
            "frame rate drops then crash",
            "broken physics and glitch spam",
            "crash on launch since update",
            "lag spikes then full crash",
        ],
        "neg": ["crash", "buggy", "broken", "glitchy", "unplayable"],
    },
    "money": {
        "subjects": ["the store", "token prices", "cosmetics", "the subscription", "the shop"],
        "phrases": [
            "everything locked behind a paywall",
            "tokens cost way too much money",
            "greedy prices for tiny hats",
            "pay to win subscription perks",
            "microtransactions pushed in every menu",
            "wallet drained for basic outfits",
            "paywall on rooms that used to be free",
            "money grab disguised as a social app",
        ],
        "neg": ["scam", "greedy", "fraud", "ripoff"],
    },
}

POSITIVE = {
    "subjects": ["this game", "the community", "custom rooms", "paintball", "quests", "the creators"],
    "phrases": [
        "so much fun with friends",
        "love building rooms every weekend",
        "great way to meet friendly people",
        "amazing quests and awesome events",
        "wonderful creative tools",
        "best social experience on my headset",
        "paintball is fantastic",
        "the community is friendly and kind",
        "brilliant updates every month",
    ],
}

NEUTRAL = [
    "played it for a couple of hours on a saturday afternoon",
    "it is a social platform with rooms and minigames",
    "installed it on my headset and tried the tutorial",
    "you can make an avatar and walk around the plaza",
    "the game has paintball and some quest modes",
    "downloaded it again after a year away from it",
    "there are many rooms made by other players",
    "i mostly use it to hang out in the park room",
    "it works with controllers and also with motion tracking",
]

FILLERS = ["honestly", "also", "seriously", "lately", "again", "these days", "every night"]


def sentence_from(theme):
    subject = rng.choice(theme["subjects"])
    phrase = rng.choice(theme["phrases"])
    return f"{subject} {phrase}"


def negative_text(name):
    t = THEMES[name]
    parts = [sentence_from(t) for _ in range(rng.randint(2, 3))]
    neg = rng.sample(t["neg"], 2)
    parts.insert(rng.randrange(len(parts) + 1), f"{neg[0]} and {neg[1]}")
    if rng.random() < 0.4:
        parts.append(rng.choice(FILLERS))
    text = ". ".join(parts) + "."
    return text[0].upper() + text[1:]


def positive_text():
    parts = [sentence_from(POSITIVE) for _ in range(rng.randint(2, 3))]
    text = ". ".join(parts) + "!"
    return text[0].upper() + text[1:]


def neutral_text():
    parts = rng.sample(NEUTRAL, 2)
    text = ". ".join(parts) + "."
    return text[0].upper() + text[1:]


def short_text():
    return rng.choice(["fun", "Great game", "bad", "10/10", "meh okay", "love it", "crashes a lot", "not for me"])


def long_text():
    words = []
    while len(words) < 60:
        words += rng.choice([positive_text, neutral_text, lambda: negative_text(rng.choice(list(THEMES)))])().split()
    return " ".join(words[: rng.randint(55, 80)])


def spam_text(i):
    if i % 2 == 0:
        art = [
            "\u2800\u2800\u2800 ______ \u2800\u2800\n|##########|\n|..........|\n \\========/",
            "(\\_/)\n(='.'=)\n(\")_(\") ~~~~~~~~ bunny",
            "#############\n#  10 / 10  #\n#############",
            "░░░░░░░░░░░░░░░░\n▄▀▄▀▄▀▄▀▄▀▄▀▄▀\n░░░░░░░░░░░░░░░░",
            "----------------------- rate: cat -----------------------",
        ]
        return art[(i // 2) % len(art)]
    word = rng.choice(["good", "game", "yes", "rec", "lol"])
    return " ".join([word] * rng.randint(15, 40))


YEARS = list(range(2016, 2024))


def timestamp(year):
    # Spread within the year, away from the boundaries.
    base = int(datetime.datetime(year, 1, 1, tzinfo=datetime.timezone.utc).timestamp())
    return base + rng.randint(3 * 86400, 360 * 86400)


def main():
    reviews = []
    # Negative share rises over the years: weight later years for negatives.
    neg_year_weights = [1, 1, 2, 3, 4, 5, 6, 6]
    pos_year_weights = [6, 6, 5, 4, 3, 2, 2, 1]
    for name in THEMES:
        for _ in range(28):
            y = rng.choices(YEARS, neg_year_weights)[0]
            reviews.append(("neg", name, negative_text(name), False, y))
    for _ in range(84):
        y = rng.choices(YEARS, pos_year_weights)[0]
        reviews.append(("pos", "", positive_text(), True, y))
    for _ in range(34):
        reviews.append(("neu", "", neutral_text(), rng.random() < 0.5, rng.choice(YEARS)))
    for _ in range(30):
        reviews.append(("short", "", short_text(), rng.random() < 0.5, rng.choice(YEARS)))
    for _ in range(22):
        reviews.append(("long", "", long_text(), rng.random() < 0.5, rng.choice(YEARS)))
    for i in range(18):
        reviews.append(("spam", "", spam_text(i), True, rng.choice(YEARS)))
    assert len(reviews) == 300

    rows = []
    for kind, theme, text, up, year in reviews:
        rows.append({"kind": kind, "theme": theme, "text": text, "voted_up": up, "ts": timestamp(year)})
    # Unique timestamps, most recent first.
    seen = set()
    for r in rows:
        while r["ts"] in seen:
            r["ts"] += 1
        seen.add(r["ts"])
    rows.sort(key=lambda r: -r["ts"])
    for i, r in enumerate(rows):
        r["id"] = str(150000000 + i * 7919)

    out = os.path.join(ROOT, "storefront")
    os.makedirs(out, exist_ok=True)
    for f in os.listdir(out):
        os.remove(os.path.join(out, f))
    pages = [rows[i : i + 50] for i in range(0, len(rows), 50)]
    for p, page in enumerate(pages):
        items = page
        if p == 2:
            # Two reviews re-served from the previous page.
            items = pages[1][-2:] + page
        body = {
            "success": 1,
            "query_summary": {"num_reviews": len(items)},
            "reviews": [
                {
                    "recommendationid": r["id"],
                    "language": "english",
                    "review": r["text"],
                    "timestamp_created": r["ts"],
                    "voted_up": r["voted_up"],
                }
                for r in items
            ],
            "cursor": f"AoJ{p + 1:04d}",
        }
        with open(os.path.join(out, f"page_{p:03d}.json"), "w") as fh:
            json.dump(body, fh, indent=1, ensure_ascii=False)
            fh.write("\n")

    label = {"neg": "negative", "pos": "positive", "neu": "neutral"}
    with open(os.path.join(ROOT, "gold.jsonl"), "w") as fh:
        for r in rows:
            if r["kind"] in label:
                fh.write(json.dumps({"review_id": r["id"], "label": label[r["kind"]]}) + "\n")
    with open(os.path.join(ROOT, "planted_themes.json"), "w") as fh:
        planted = {name: [r["id"] for r in rows if r["theme"] == name] for name in THEMES}
        json.dump(planted, fh, indent=1)
        fh.write("\n")


if __name__ == "__main__":
    main()
