#!/usr/bin/env python3
"""Writes the shipped knowledge graph, criteria and synthetic dialogue corpus.

Output is deterministic. Silver labels are attached afterwards with
`dxtrust label`.
"""

import argparse
import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent

DISORDERS = {
    "dis_mdd": ("Major Depressive Disorder", ["major depression", "MDD", "clinical depression"]),
    "dis_pdd": ("Persistent Depressive Disorder", ["dysthymia", "PDD", "chronic depression"]),
    "dis_adjustment": ("Adjustment Disorder with Depressed Mood", ["adjustment disorder"]),
    "dis_gad": ("Generalized Anxiety Disorder", ["GAD", "generalized anxiety"]),
}

# id: (canonical name, aliases, patient phrasing)
SYMPTOMS = {
    "sym_depressed_mood": ("depressed mood", ["feeling down", "low mood", "feel depressed"],
                           "I've been feeling down almost every day."),
    "sym_anhedonia": ("anhedonia", ["loss of interest", "lost interest", "no pleasure"],
                      "I've lost interest in the things I used to love."),
    "sym_weight_change": ("weight change", ["weight loss", "weight gain", "appetite change", "poor appetite"],
                          "My appetite is gone and I've noticed some weight loss."),
    "sym_insomnia": ("insomnia", ["can't sleep", "trouble sleeping", "sleep problems"],
                     "I can't sleep through the night anymore."),
    "sym_psychomotor": ("psychomotor changes", ["slowed down", "psychomotor retardation", "psychomotor agitation"],
                        "My family says I seem slowed down lately."),
    "sym_fatigue": ("fatigue", ["tired", "loss of energy", "exhausted"],
                    "I'm exhausted even after resting."),
    "sym_worthlessness": ("worthlessness", ["feel worthless", "excessive guilt", "guilty"],
                          "I feel worthless most of the time."),
    "sym_concentration": ("diminished concentration", ["trouble concentrating", "can't focus", "indecisive"],
                          "I have trouble concentrating at work."),
    "sym_suicidal_ideation": ("suicidal ideation", ["thoughts of death", "suicidal thoughts", "want to die"],
                              "Sometimes I have thoughts of death."),
    "sym_hopelessness": ("hopelessness", ["hopeless", "no hope"],
                         "I feel hopeless about the future."),
    "sym_low_self_esteem": ("low self-esteem", ["poor self-image", "low confidence"],
                            "I've had low self-esteem for as long as I remember."),
    "sym_tearfulness": ("tearfulness", ["tearful", "crying spells", "keep crying"],
                        "I'm tearful and keep crying at small things."),
    "sym_distress": ("marked distress", ["distress", "overwhelmed"],
                     "Since it happened I've been overwhelmed and in real distress."),
    "sym_worry": ("excessive worry", ["worry", "worrying", "anxious"],
                  "I worry constantly about everything, I can't stop worrying."),
    "sym_restlessness": ("restlessness", ["restless", "keyed up", "on edge"],
                         "I feel restless and on edge."),
    "sym_irritability": ("irritability", ["irritable", "short-tempered"],
                         "I get irritable over small things."),
    "sym_muscle_tension": ("muscle tension", ["tense muscles", "tight shoulders"],
                           "My neck and shoulders are full of muscle tension."),
}

EXCLUSIONS = {
    "exc_manic_episode": ("history of manic episode", ["manic episode", "mania", "hypomanic episode"],
                          "A few years ago I had a manic episode and felt unstoppable for a week."),
    "exc_substance": ("substance-induced condition", ["substance use", "drug use", "heavy drinking"],
                      "I'll be honest, there has been heavy drinking and some drug use lately."),
    "exc_psychotic": ("psychotic disorder", ["schizophrenia", "psychosis"], None),
    "exc_bereavement": ("normal bereavement", ["grief", "bereavement"], None),
}

CRITERIA_ENTITIES = {
    "crit_mdd_a": ("five or more symptoms during the same two-week period", "dis_mdd"),
    "crit_mdd_b": ("symptoms cause clinically significant impairment", "dis_mdd"),
    "crit_pdd_a": ("depressed mood for most of the day for at least two years", "dis_pdd"),
    "crit_adj_a": ("emotional symptoms within three months of a stressor", "dis_adjustment"),
    "crit_gad_a": ("excessive worry more days than not for at least six months", "dis_gad"),
}

SPECIFIERS = {
    "spec_severity": ("severity rating", ["mild", "moderate", "severe"]),
    "spec_remission": ("remission status", ["partial remission", "full remission"]),
}

DISORDER_SYMPTOMS = {
    "dis_mdd": ["sym_depressed_mood", "sym_anhedonia", "sym_weight_change", "sym_insomnia", "sym_psychomotor",
                "sym_fatigue", "sym_worthlessness", "sym_concentration", "sym_suicidal_ideation"],
    "dis_pdd": ["sym_depressed_mood", "sym_weight_change", "sym_insomnia", "sym_fatigue", "sym_low_self_esteem",
                "sym_concentration", "sym_hopelessness"],
    "dis_adjustment": ["sym_depressed_mood", "sym_hopelessness", "sym_tearfulness", "sym_distress"],
    "dis_gad": ["sym_worry", "sym_restlessness", "sym_fatigue", "sym_concentration", "sym_irritability",
                "sym_muscle_tension", "sym_insomnia"],
}

DISORDER_EXCLUSIONS = {
    "dis_mdd": ["exc_manic_episode", "exc_substance", "exc_psychotic"],
    "dis_pdd": ["exc_manic_episode", "exc_substance", "exc_psychotic"],
    "dis_adjustment": ["exc_substance", "exc_bereavement"],
    "dis_gad": ["exc_substance"],
}

CRITERIA = [
    {"disorder": "dis_adjustment", "min_symptom_count": 2, "core_symptoms": ["sym_distress"], "min_core_count": 1,
     "exclusions": DISORDER_EXCLUSIONS["dis_adjustment"]},
    {"disorder": "dis_gad", "min_symptom_count": 4, "core_symptoms": ["sym_worry"], "min_core_count": 1,
     "required_duration_days": 180, "exclusions": DISORDER_EXCLUSIONS["dis_gad"]},
    {"disorder": "dis_mdd", "min_symptom_count": 5, "core_symptoms": ["sym_depressed_mood", "sym_anhedonia"],
     "min_core_count": 1, "required_duration_days": 14, "exclusions": DISORDER_EXCLUSIONS["dis_mdd"]},
    {"disorder": "dis_pdd", "min_symptom_count": 3, "core_symptoms": ["sym_depressed_mood"], "min_core_count": 1,
     "required_duration_days": 730, "exclusions": DISORDER_EXCLUSIONS["dis_pdd"]},
]


def kg_records():
    recs = [{"type": "entity", "id": "root_dsm5", "name": "DSM-5 depressive and anxiety disorders", "kind": "Root",
             "aliases": ["DSM-5"]}]
    for i, (name, aliases) in DISORDERS.items():
        recs.append({"type": "entity", "id": i, "name": name, "kind": "Disorder", "aliases": aliases})
    for i, (name, aliases, _) in SYMPTOMS.items():
        recs.append({"type": "entity", "id": i, "name": name, "kind": "Symptom", "aliases": aliases})
    for i, (name, aliases, _) in EXCLUSIONS.items():
        recs.append({"type": "entity", "id": i, "name": name, "kind": "Exclusion", "aliases": aliases})
    for i, (name, _) in CRITERIA_ENTITIES.items():
        recs.append({"type": "entity", "id": i, "name": name, "kind": "Criterion", "aliases": []})
    for i, (name, aliases) in SPECIFIERS.items():
        recs.append({"type": "entity", "id": i, "name": name, "kind": "Specifier", "aliases": aliases})

    def triplet(s, r, o, **extra):
        rec = {"type": "triplet", "subject": s, "relation": r, "object": o, "source": "DSM-5"}
        rec.update(extra)
        return rec

    for d in DISORDERS:
        recs.append(triplet("root_dsm5", "includes_disorder", d))
    for d, syms in DISORDER_SYMPTOMS.items():
        recs.extend(triplet(d, "has_symptom", s) for s in syms)
    for d, excs in DISORDER_EXCLUSIONS.items():
        recs.extend(triplet(d, "has_exclusion", x) for x in excs)
    for c, (_, d) in CRITERIA_ENTITIES.items():
        recs.append(triplet(d, "has_criterion", c))
    for d in ("dis_mdd", "dis_pdd"):
        recs.append(triplet(d, "has_specifier", "spec_severity"))
        recs.append(triplet(d, "has_specifier", "spec_remission"))
    literal = {"type": "triplet", "subject": "dis_mdd", "relation": "has_specifier",
               "object_literal": "with melancholic features", "source": "DSM-5"}
    recs.append(literal)
    recs.append({"type": "triplet", "subject": "dis_pdd", "relation": "has_specifier",
                 "object_literal": "with early onset", "source": "DSM-5"})
    return recs


GENDERS = ["female", "male", "female", "male", "nonbinary"]
AGES = [16, 19, 23, 28, 31, 34, 39, 42, 44, 50, 57, 63, 68, None]


def duration_phrase(days):
    if days is None:
        return None
    if days % 365 == 0:
        n, unit = days // 365, "year"
    elif days % 30 == 0:
        n, unit = days // 30, "month"
    elif days % 7 == 0:
        n, unit = days // 7, "week"
    else:
        n, unit = days, "day"
    return f"It has been going on for about {n} {unit}{'s' if n != 1 else ''}."


# (intended label, symptoms, exclusions, duration_days, count)
def case_plan(rng):
    mdd = DISORDER_SYMPTOMS["dis_mdd"]
    plan = []
    for _ in range(14):
        core = rng.choice([["sym_depressed_mood"], ["sym_anhedonia"], ["sym_depressed_mood", "sym_anhedonia"]])
        rest = [s for s in mdd if s not in core]
        k = rng.randint(5, 8) - len(core)
        plan.append(("dis_mdd", core + rng.sample(rest, k), [], rng.choice([14, 21, 30, 42, 60, 90])))
    for _ in range(6):
        rest = ["sym_low_self_esteem", "sym_hopelessness", "sym_fatigue", "sym_weight_change"]
        plan.append(("dis_pdd", ["sym_depressed_mood"] + rng.sample(rest, rng.randint(2, 3)), [],
                     rng.choice([730, 1095, 1460])))
    for _ in range(5):
        extra = rng.sample(["sym_tearfulness", "sym_hopelessness", "sym_depressed_mood"], rng.randint(1, 2))
        plan.append(("dis_adjustment", ["sym_distress"] + extra, [], rng.choice([10, 21, 45])))
    for _ in range(6):
        rest = ["sym_restlessness", "sym_irritability", "sym_muscle_tension", "sym_fatigue", "sym_insomnia"]
        plan.append(("dis_gad", ["sym_worry"] + rng.sample(rest, rng.randint(3, 5)), [],
                     rng.choice([180, 240, 365])))
    # Below threshold: four non-core depressive symptoms.
    for _ in range(4):
        plan.append(("NoDiagnosis", rng.sample(["sym_fatigue", "sym_insomnia", "sym_concentration",
                                                "sym_weight_change", "sym_psychomotor"], 4), [],
                     rng.choice([14, 30])))
    for _ in range(2):
        syms = ["sym_depressed_mood", "sym_anhedonia", "sym_insomnia", "sym_fatigue", "sym_worthlessness"]
        plan.append(("NoDiagnosis", syms, ["exc_manic_episode"], 30))
    plan.append(("NoDiagnosis", ["sym_depressed_mood", "sym_anhedonia", "sym_fatigue", "sym_insomnia",
                                 "sym_concentration"], ["exc_substance"], 21))
    for _ in range(2):
        plan.append(("NoDiagnosis", [], [], None))
    return plan


OPENERS = ["What brings you in today?", "How have things been for you lately?", "Tell me what has been going on."]
FOLLOWUPS = ["Can you tell me more?", "What else have you noticed?", "How has that affected your days?"]
NEUTRAL = ["Honestly I'm doing fine, work is busy but good.", "I sleep well and I'm enjoying my hobbies.",
           "My doctor just wanted me to have a routine check-in."]


def dialogue(idx, label, syms, excs, days, rng):
    turns = [{"role": "clinician", "text": rng.choice(OPENERS)}]
    if not syms:
        for line in rng.sample(NEUTRAL, 2):
            turns.append({"role": "patient", "text": line})
            turns.append({"role": "clinician", "text": rng.choice(FOLLOWUPS)})
        turns.append({"role": "patient", "text": "Nothing else really, I feel like myself."})
    else:
        order = list(syms)
        rng.shuffle(order)
        for i in range(0, len(order), 2):
            text = " ".join(SYMPTOMS[s][2] for s in order[i:i + 2])
            turns.append({"role": "patient", "text": text})
            turns.append({"role": "clinician", "text": rng.choice(FOLLOWUPS)})
        phrase = duration_phrase(days)
        turns.append({"role": "clinician", "text": "How long has this been going on?"})
        turns.append({"role": "patient", "text": phrase or "I'm not sure how long."})
        for x in excs:
            turns.append({"role": "clinician", "text": "Is there anything in your history I should know about?"})
            turns.append({"role": "patient", "text": EXCLUSIONS[x][2]})
    age = AGES[idx % len(AGES)]
    rec = {"id": f"syn-{idx + 1:03d}", "turns": turns, "gender": GENDERS[idx % len(GENDERS)],
           "gold": {"symptoms": sorted(syms), "exclusions": sorted(excs),
                    "depression_risk": 0 if not syms else (3 if label == "dis_mdd" else 2 if label != "dis_gad" else 1),
                    "suicide_risk": 2 if "sym_suicidal_ideation" in syms else 0}}
    if age is not None:
        rec["age"] = age
    if days is not None:
        rec["gold"]["duration_days"] = days
    return rec


def write_jsonl(path, records):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for r in records:
            f.write(json.dumps(r, ensure_ascii=False, separators=(",", ":")) + "\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=20240611)
    ap.add_argument("--data", type=Path, default=ROOT / "data")
    args = ap.parse_args()
    rng = random.Random(args.seed)
    write_jsonl(args.data / "kg" / "dsm5_depressive.jsonl", kg_records())
    write_jsonl(args.data / "criteria" / "dsm5_criteria.jsonl", CRITERIA)
    plan = case_plan(rng)
    rng.shuffle(plan)
    dialogues = [dialogue(i, *case, rng) for i, case in enumerate(plan)]
    write_jsonl(args.data / "corpus" / "synthetic_unlabeled.jsonl", dialogues)
    write_jsonl(args.data / "corpus" / "intended_labels.jsonl",
                [{"id": d["id"], "label": case[0]} for d, case in zip(dialogues, plan)])


if __name__ == "__main__":
    main()
