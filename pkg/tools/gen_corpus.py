"""Regenerate the packaged sentence corpus (deterministic).

Produces 1000 unique caption-style sentences, ASCII only, one per line.
Run from the repository root:  python3 tools/gen_corpus.py
"""

import random

SUBJECTS = [
    "a black dog", "a white dog", "two dogs", "a brown puppy", "a gray cat",
    "a small kitten", "a young boy", "a little girl", "two children",
    "a man in a red shirt", "a woman in a blue jacket", "an older man",
    "a group of friends", "a cyclist", "a runner", "a street vendor",
    "a musician", "a painter", "a fisherman", "a skier", "a surfer",
    "a climber", "a football player", "a tennis player", "a horse",
    "a flock of birds", "a brown horse", "a toddler", "a hiker",
    "a photographer",
]
VERBS = [
    "is running", "is walking", "is jumping", "is playing", "is resting",
    "is swimming", "is climbing", "is sliding", "is riding", "is standing",
    "is sitting", "is sleeping", "is barking", "is racing", "is waiting",
    "is balancing", "is diving", "is dancing", "is fishing", "is painting",
]
OBJECTS = [
    "with a red ball", "with a yellow frisbee", "with a small toy",
    "with a stick", "with a kite", "with a rope", "with another dog",
    "with a soccer ball", "with an umbrella", "with a camera",
    "with a guitar", "with a bucket", "", "", "",
]
PLACES = [
    "on the beach", "in the park", "near the river", "on a snowy hill",
    "in the garden", "on the sidewalk", "across the field", "in the water",
    "under a tree", "on the playground", "at the market", "on a wooden bridge",
    "in the tall grass", "down the street", "along the shore", "in the snow",
    "on the rocks", "inside the house", "by the fence", "at the station",
]


def build(count: int = 1000, seed: int = 20240601) -> list[str]:
    rng = random.Random(seed)
    seen: set[str] = set()
    lines: list[str] = []
    while len(lines) < count:
        parts = [rng.choice(SUBJECTS), rng.choice(VERBS)]
        obj = rng.choice(OBJECTS)
        if obj:
            parts.append(obj)
        parts.append(rng.choice(PLACES))
        sentence = " ".join(parts)
        sentence = sentence[0].upper() + sentence[1:] + "."
        if sentence in seen:
            continue
        seen.add(sentence)
        lines.append(sentence)
    return lines


if __name__ == "__main__":
    lines = build()
    with open("src/semlink/data/sentences.txt", "w", encoding="ascii", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {len(lines)} sentences")
