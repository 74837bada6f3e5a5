#!/usr/bin/env python3
"""Regenerates the synthetic datasets under data/.

The fixture corpora mirror the published statistics of the evaluation sets
(per-class counts, totals, distinct target entities) with synthetic article
text, so loaders and statistics can be verified without shipping the real
datasets. Deterministic: rerunning produces byte-identical files.
"""

import argparse
import csv
import json
import random
from pathlib import Path

FIRST = [
    "Jordan", "Maya", "Idris", "Lena", "Tomas", "Priya", "Hugo", "Nadia",
    "Felix", "Amara", "Viktor", "Rosa", "Dmitri", "Zoe", "Marcus", "Ines",
    "Ravi", "Clara", "Stefan", "Leila", "Owen", "Bianca", "Karim", "Elsa",
    "Mateo", "Freya", "Anton", "Gita", "Lucas", "Wanda",
]
LAST = [
    "Hale", "Okafor", "Lindqvist", "Moreau", "Petrov", "Sandoval", "Keita",
    "Brandt", "Ferreira", "Novak", "Ishikawa", "Doyle", "Rahmani", "Costa",
    "Weiss", "Banerjee", "Olsen", "Marchetti",
]

FREQ_ENTITIES = ["President Alvarez", "Meridian Bank", "Coastal Airways", "Governor Riley"]
WPAN_ENTITIES = ["India", "Russia", "Israel"]

OPENERS = {
    "Positive": [
        "{e} drew widespread praise this week after a string of results that exceeded expectations.",
        "Supporters of {e} celebrated what analysts called a decisive and well-earned victory.",
        "A new review credits {e} with steering the effort through its most difficult stretch.",
        "Observers described the latest move by {e} as shrewd, timely and broadly beneficial.",
    ],
    "Neutral": [
        "{e} appeared at the annual session, which proceeded without notable incident.",
        "Officials confirmed that {e} will take part in the scheduled talks next month.",
        "The report mentions {e} among several parties involved in the ongoing process.",
        "{e} issued a brief statement outlining the timetable, offering no further comment.",
    ],
    "Negative": [
        "{e} came under sharp criticism after the plan collapsed amid missed deadlines.",
        "Critics accused {e} of mishandling the response and downplaying early warnings.",
        "An inquiry found serious lapses in the conduct of {e}, fueling public anger.",
        "Confidence in {e} slid further as fresh allegations surfaced over the weekend.",
    ],
}

FOLLOW = {
    "Positive": [
        "Colleagues pointed to steady gains and a climate of renewed optimism.",
        "The announcement was met with applause from community groups and investors alike.",
        "Several commentators framed the outcome as a model for others to follow.",
    ],
    "Neutral": [
        "The schedule for the coming quarter remains unchanged, according to the filing.",
        "Attendees reviewed procedural matters before adjourning until the next session.",
        "No decision has been announced, and both sides said discussions continue.",
    ],
    "Negative": [
        "Opposition figures demanded an independent audit and immediate resignations.",
        "The fallout has already cost the initiative two of its largest partners.",
        "Editorials across the region called the episode avoidable and damaging.",
    ],
}

FILLER = [
    "Regional correspondents noted that turnout varied widely between districts.",
    "Budget figures released alongside the statement show a mixed quarterly picture.",
    "The committee is expected to publish its full findings later this year.",
    "Weather delayed several of the week's related events by a day or more.",
    "Separately, trade volumes at the port returned to seasonal norms.",
    "Local broadcasters carried the proceedings live for a second consecutive day.",
]

TITLES = {
    "Positive": "{e} earns plaudits as results land ahead of forecasts",
    "Neutral": "{e} joins scheduled talks as process continues",
    "Negative": "{e} faces mounting criticism after setback",
}


def article(rng: random.Random, entity: str, label: str, mention_follow: bool) -> list[str]:
    """2-4 paragraphs; the first always names the entity."""
    paragraphs = [
        rng.choice(OPENERS[label]).format(e=entity) + " " + rng.choice(FILLER),
    ]
    n_extra = rng.randint(1, 3)
    for i in range(n_extra):
        sentences = [rng.choice(FILLER)]
        if mention_follow and i == n_extra - 1:
            sentences.append(rng.choice(FOLLOW[label]).replace("the initiative", entity))
        else:
            sentences.append(rng.choice(FOLLOW[label]))
        rng.shuffle(sentences)
        paragraphs.append(" ".join(sentences))
    return paragraphs


def label_sequence(rng: random.Random, counts: dict[str, int]) -> list[str]:
    seq = [label for label, n in counts.items() for _ in range(n)]
    rng.shuffle(seq)
    return seq


def write_persent_csv(path: Path, rows: list[dict]) -> None:
    n_para_cols = max(len(r["paragraphs"]) for r in rows)
    fields = ["DOCUMENT_INDEX", "TITLE", "DOCUMENT", "MASKED_DOCUMENT", "TARGET_ENTITY",
              "TRUE_SENTIMENT"] + [f"Paragraph{i}" for i in range(n_para_cols)]
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(fields)
        for r in rows:
            doc = "\n\n".join(r["paragraphs"])
            masked = doc.replace(r["entity"], "[TGT]")
            para_labels = [r["label"]] * len(r["paragraphs"])
            para_labels += [""] * (n_para_cols - len(para_labels))
            writer.writerow([r["index"], r["title"], doc, masked, r["entity"], r["label"],
                             *para_labels])


def make_persent(path: Path, rng: random.Random, counts: dict[str, int],
                 entities: list[str], n_unique: int, prefix: str) -> None:
    labels = label_sequence(rng, counts)
    total = len(labels)
    assert len(entities) >= n_unique
    pool = entities[:n_unique]
    # Every pool entity appears at least once; the remainder reuse the pool.
    assignment = list(pool) + [pool[rng.randrange(n_unique)] for _ in range(total - n_unique)]
    rng.shuffle(assignment)
    seen = set()
    rows = []
    for i, (label, entity) in enumerate(zip(labels, assignment)):
        paragraphs = article(rng, entity, label, mention_follow=rng.random() < 0.5)
        rows.append({
            "index": f"{prefix}-{i:04d}",
            "title": TITLES[label].format(e=entity),
            "entity": entity,
            "label": label,
            "paragraphs": paragraphs,
        })
        seen.add(entity)
    assert len(seen) == n_unique
    write_persent_csv(path, rows)


SCORE_RANGES = {"Positive": (0.6, 1.0), "Neutral": (-0.2, 0.2), "Negative": (-1.0, -0.6)}
GAP_RANGES = [(0.25, 0.55), (-0.55, -0.25)]


def make_wpan(path: Path, rng: random.Random, per_entity_per_class: int,
              n_gap_records: int) -> None:
    records = []
    i = 0
    for entity in WPAN_ENTITIES:
        for label, (lo, hi) in SCORE_RANGES.items():
            for _ in range(per_entity_per_class):
                paras = article(rng, entity, label, mention_follow=True)
                rec = {"id": f"wpan-{i:04d}", "article": "\n\n".join(paras), "entity": entity}
                if rng.random() < 0.25:
                    rec["label"] = label  # label-carrying records skip bucketing
                else:
                    rec["score"] = round(rng.uniform(lo, hi), 3)
                records.append(rec)
                i += 1
    for g in range(n_gap_records):
        lo, hi = GAP_RANGES[g % len(GAP_RANGES)]
        entity = WPAN_ENTITIES[g % len(WPAN_ENTITIES)]
        paras = article(rng, entity, "Neutral", mention_follow=False)
        records.append({
            "id": f"wpan-gap-{g:02d}",
            "article": "\n\n".join(paras),
            "entity": entity,
            "score": round(rng.uniform(lo, hi), 3),
        })
    rng.shuffle(records)
    with path.open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def make_wpan_style_small(path: Path, rng: random.Random, entities: list[str],
                          per_class: int, prefix: str) -> None:
    records = []
    i = 0
    for label in ("Positive", "Neutral", "Negative"):
        for _ in range(per_class):
            entity = entities[i % len(entities)]
            paras = article(rng, entity, label, mention_follow=True)
            records.append({
                "id": f"{prefix}-{i:03d}",
                "article": "\n\n".join(paras),
                "entity": entity,
                "label": label,
            })
            i += 1
    rng.shuffle(records)
    with path.open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


RATIONALE_FORMS = {
    "Positive": "The coverage highlights achievements of {e} and quotes approving voices, "
                "framing {e} favorably throughout.",
    "Neutral": "The article reports on {e} in procedural terms, citing schedules and "
               "statements without evaluative framing.",
    "Negative": "The article foregrounds criticism of {e}, citing failures and angry "
                "reactions, which frames {e} unfavorably.",
}


def make_train(csv_path: Path, rationale_path: Path, rng: random.Random) -> None:
    rows = []
    rationales = {}
    i = 0
    for label in ("Positive", "Neutral", "Negative"):
        for _ in range(4):
            entity = f"{FIRST[i % len(FIRST)]} {LAST[(i * 7) % len(LAST)]}"
            paragraphs = article(rng, entity, label, mention_follow=True)
            index = f"train-{i:03d}"
            rows.append({
                "index": index,
                "title": TITLES[label].format(e=entity),
                "entity": entity,
                "label": label,
                "paragraphs": paragraphs,
            })
            rationales[index] = RATIONALE_FORMS[label].format(e=entity)
            i += 1
    order = list(range(len(rows)))
    rng.shuffle(order)
    rows = [rows[j] for j in order]
    write_persent_csv(csv_path, rows)
    with rationale_path.open("w", encoding="utf-8") as fh:
        json.dump(rationales, fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data")
    args = parser.parse_args()

    fixtures = args.out / "fixtures"
    mock = args.out / "mock"
    fixtures.mkdir(parents=True, exist_ok=True)
    mock.mkdir(parents=True, exist_ok=True)

    person_pool = [f"{f} {l}" for f in FIRST for l in LAST]  # 540 names

    rng = random.Random(20260815)
    make_persent(fixtures / "persent_test_std.csv", rng,
                 {"Positive": 293, "Neutral": 213, "Negative": 73},
                 person_pool, n_unique=426, prefix="std")
    make_persent(fixtures / "persent_test_freq.csv", rng,
                 {"Positive": 368, "Neutral": 320, "Negative": 139},
                 FREQ_ENTITIES, n_unique=4, prefix="freq")
    make_wpan(fixtures / "wpan.jsonl", rng, per_entity_per_class=200, n_gap_records=12)
    make_train(fixtures / "persent_train.csv", fixtures / "rationales.json", rng)
    make_wpan_style_small(fixtures / "mock60.jsonl", rng,
                          ["Harbor Trust", "Alina Vos", "Delta Collective",
                           "Mayor Quinn", "Northfield Lab", "Sana Iqbal"],
                          per_class=20, prefix="m60")
    make_wpan_style_small(fixtures / "live5.jsonl", rng,
                          ["Avon Energy", "Petra Lind"], per_class=2, prefix="live")
    # live5 needs exactly 5 records; trim the sixth deterministically.
    lines = (fixtures / "live5.jsonl").read_text(encoding="utf-8").splitlines(keepends=True)
    (fixtures / "live5.jsonl").write_text("".join(lines[:5]), encoding="utf-8")

    (mock / "mock_a.jsonl").write_text(
        json.dumps({"derive_unscripted": True, "salt": "alpha"}) + "\n", encoding="utf-8")
    (mock / "mock_b.jsonl").write_text(
        json.dumps({"derive_unscripted": True, "salt": "beta"}) + "\n", encoding="utf-8")

    print(f"fixtures written under {args.out}")


if __name__ == "__main__":
    main()
