#!/usr/bin/env python3
"""Generate the synthetic handwritten-code dataset.

Writes gold programs, OCR fixtures with jittered boxes and OCR-style typos,
rendered PNG pages, the manifest and expected scores for the OCR-only
configurations. Expected scores are computed here with an independent edit
distance so the Rust harness can be checked against them.

Run from this directory: python3 gen_synthetic.py
"""

import json
import random
from pathlib import Path

from PIL import Image, ImageDraw

SEED = 20240214
OUT = Path(__file__).resolve().parent / "synthetic"
PAGE_WIDTH = 1000
INDENT_PX = 80
LEFT = 40
TOP = 60
LINE_PITCH = 60
BOX_HEIGHT = 40
CHAR_PX = 14
JITTER = 3
N_CORRECT = 44
N_TRAINING = 16

# ---------------------------------------------------------------- programs

NAMES = ["total", "count", "value", "result", "score", "acc", "width", "height", "age", "size"]
FUNCS = ["compute", "process", "check", "update", "measure", "build", "find", "show"]
ITEMS = ["numbers", "values", "scores", "items", "ages", "marks"]


def template_sum(r):
    v, xs, f = r.choice(NAMES), r.choice(ITEMS), r.choice(FUNCS)
    n = r.randint(3, 9)
    return f"""def {f}_{v}({xs}):
    {v} = 0
    for x in {xs}:
        {v} = {v} + x
    return {v}

{xs} = [{", ".join(str(r.randint(1, 50)) for _ in range(n))}]
print({f}_{v}({xs}))"""


def template_grade(r):
    s = r.choice(["score", "mark", "points"])
    a, b = sorted(r.sample(range(50, 95), 2))
    return f"""{s} = int(input("Enter {s}: "))
if {s} >= {b}:
    print("A")
elif {s} >= {a}:
    print("B")
else:
    print("C")"""


def template_while(r):
    v = r.choice(NAMES)
    k = r.randint(2, 6)
    return f"""{v} = {r.randint(20, 90)}
steps = 0
while {v} > 1:
    {v} = {v} // {k}
    steps += 1
print("steps:", steps)"""


def template_nested(r):
    n, m = r.randint(2, 5), r.randint(2, 5)
    c = r.choice(["*", "#", "o", "+"])
    return f"""for row in range({n}):
    line = ""
    for col in range({m}):
        if (row + col) % 2 == 0:
            line = line + "{c}"
        else:
            line = line + " "
    print(line)"""


def template_max(r):
    xs, f = r.choice(ITEMS), r.choice(FUNCS)
    return f"""def {f}_largest({xs}):
    best = {xs}[0]
    for x in {xs}:
        if x > best:
            best = x
    return best

print({f}_largest([{", ".join(str(r.randint(1, 99)) for _ in range(r.randint(3, 7)))}]))"""


def template_class(r):
    cls = r.choice(["Counter", "Account", "Timer", "Player"])
    attr = r.choice(NAMES)
    return f"""class {cls}:
    def __init__(self):
        self.{attr} = 0

    def add(self, amount):
        self.{attr} += amount
        return self.{attr}

obj = {cls}()
obj.add({r.randint(1, 9)})
print(obj.{attr})"""


def template_dict(r):
    words = r.sample(["apple", "pear", "fig", "plum", "kiwi", "lime", "date"], 4)
    return f"""words = [{", ".join(repr(w) for w in words)}]
lengths = {{}}
for w in words:
    lengths[w] = len(w)
for key in lengths:
    print(key, lengths[key])"""


def template_fizz(r):
    a, b = r.choice([(3, 5), (2, 7), (4, 6)])
    n = r.randint(10, 30)
    return f"""for i in range(1, {n}):
    if i % {a * b} == 0:
        print("FizzBuzz")
    elif i % {a} == 0:
        print("Fizz")
    elif i % {b} == 0:
        print("Buzz")
    else:
        print(i)"""


def template_try(r):
    v = r.choice(NAMES)
    return f"""def safe_divide(a, b):
    try:
        {v} = a / b
    except ZeroDivisionError:
        print("cannot divide by zero")
        {v} = None
    return {v}

print(safe_divide({r.randint(10, 99)}, {r.randint(0, 5)}))"""


def template_list(r):
    xs = r.choice(ITEMS)
    t = r.randint(10, 60)
    return f"""{xs} = [{", ".join(str(r.randint(1, 99)) for _ in range(r.randint(4, 8)))}]
big = []
for x in {xs}:
    if x > {t}:
        big.append(x)
print(len(big), "above {t}")"""


def template_factorial(r):
    f = r.choice(["fact", "factorial", "prod_to"])
    return f"""def {f}(n):
    if n <= 1:
        return 1
    return n * {f}(n - 1)

for k in range({r.randint(3, 8)}):
    print(k, {f}(k))"""


TEMPLATES = [
    template_sum, template_grade, template_while, template_nested, template_max, template_class,
    template_dict, template_fizz, template_try, template_list, template_factorial,
]

# (gold, buggy_snippet, fixed_snippet, category, description)
LOGICAL = [
    ("""def is_odd(number):
    if number / 2 != 0:
        return True
    return False

print(is_odd(7))""", "number / 2", "number % 2", "arithmetic", "division used instead of modulo"),
    ("""total = 0
for i in range(1, 10):
    total = total + i
print("sum of 1 to 10 is", total)""", "range(1, 10)", "range(1, 11)", "fence_post", "loop stops one short of 10"),
    ("""def average(values):
    total = 0
    for v in values:
        total = total + v
    return total / len(values) + 1

print(average([2, 4, 6]))""", "total / len(values) + 1", "total / len(values)", "arithmetic", "spurious + 1 in the mean"),
    ("""n = 5
while n > 0:
    print(n)
    n = n + 1
print("liftoff")""", "n = n + 1", "n = n - 1", "control_flow", "counter moves the wrong way"),
    ("""def find(items, target):
    for i in range(len(items)):
        if items[i] == target:
            return i
        return -1

print(find([3, 8, 1], 1))""", "        return -1", "    return -1", "scope", "early return inside the loop"),
    ("""age = int(input("age: "))
if age > 18:
    print("adult")
else:
    print("minor")""", "age > 18", "age >= 18", "fence_post", "18 counted as minor"),
    ("""def area(width, height):
    return width + height

print(area(3, 4))""", "width + height", "width * height", "arithmetic", "sum instead of product"),
    ("""scores = [70, 85, 90]
best = 0
for s in scores:
    if s < best:
        best = s
print(best)""", "s < best", "s > best", "control_flow", "comparison reversed"),
    ("""count = 0
for word in ["a", "bb", "ccc"]:
    count = len(word)
print(count)""", "count = len(word)", "count = count + len(word)", "other", "overwrites instead of accumulating"),
    ("""def countdown(k):
    for i in range(k, 0):
        print(i)

countdown(3)""", "range(k, 0)", "range(k, 0, -1)", "fence_post", "missing negative step"),
    ("""def total_price(prices):
    for p in prices:
        total = 0
        total = total + p
    return total

print(total_price([1, 2, 3]))""", """    for p in prices:
        total = 0""", """    total = 0
    for p in prices:""", "scope", "accumulator reset inside the loop"),
]

# ---------------------------------------------------------------- OCR noise

LOOKALIKE = {"l": "1", "O": "0", "o": "0", "e": "c", "i": "l", "s": "5", "t": "f", "a": "o", "m": "rn", "n": "h",
             "g": "q", "r": "n", "u": "v", "(": "[", ")": "]", ":": ";", "=": "-"}


def ocr_noise(line, r):
    chars = list(line)
    out = []
    i = 0
    while i < len(chars):
        c = chars[i]
        roll = r.random()
        if roll < 0.035 and c in LOOKALIKE:
            out.append(LOOKALIKE[c])
        elif roll < 0.045 and c != " ":
            pass  # dropped
        elif roll < 0.05 and c == " ":
            pass  # merged words
        else:
            out.append(c)
        i += 1
    text = "".join(out).strip()
    return text if text else line.strip()


# ---------------------------------------------------------------- oracle

def levenshtein(a, b):
    """Plain full-matrix edit distance."""
    rows, cols = len(a) + 1, len(b) + 1
    d = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        d[i][0] = i
    for j in range(cols):
        d[0][j] = j
    for i in range(1, rows):
        for j in range(1, cols):
            d[i][j] = min(d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] != b[j - 1]))
    return d[-1][-1]


def l_norm(gold, pred):
    return levenshtein(gold, pred) / len(gold) * 100.0


def aggregate(values):
    n = len(values)
    mean = sum(values) / n
    if n < 2:
        return mean, None
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, (var ** 0.5) / (n ** 0.5)


# ---------------------------------------------------------------- rendering

def layout(gold, r):
    """One OCR line per non-blank gold line, with jittered boxes."""
    lines = []
    slot = 0
    for raw in gold.split("\n"):
        slot += 1
        if not raw.strip():
            continue
        level = (len(raw) - len(raw.lstrip(" "))) // 4
        text = ocr_noise(raw.strip(), r)
        x = LEFT + level * INDENT_PX + r.randint(-JITTER, JITTER)
        y = TOP + slot * LINE_PITCH + r.randint(-JITTER, JITTER)
        h = BOX_HEIGHT + r.randint(-JITTER, JITTER)
        w = max(CHAR_PX * len(raw.strip()), CHAR_PX)
        lines.append({"level": level, "text": text, "box": {"x_min": x, "y_min": y, "x_max": x + w, "y_max": y + h}})
    height = TOP + (slot + 2) * LINE_PITCH
    return lines, height


def draw_page(gold, lines, height, path):
    img = Image.new("L", (PAGE_WIDTH, height), 255)
    d = ImageDraw.Draw(img)
    gold_lines = [l for l in gold.split("\n") if l.strip()]
    for src, line in zip(gold_lines, lines):
        b = line["box"]
        d.text((b["x_min"], b["y_min"] + 12), src.strip(), fill=0)
    img.save(path, optimize=True)


def main():
    r = random.Random(SEED)
    for sub in ["gold", "ocr", "images"]:
        (OUT / sub).mkdir(parents=True, exist_ok=True)

    programs = []
    for i in range(N_CORRECT):
        programs.append((f"c{i + 1:03d}", TEMPLATES[i % len(TEMPLATES)](r), None))
    for i, (gold, buggy, fixed, cat, desc) in enumerate(LOGICAL):
        programs.append((f"l{i + 1:03d}", gold, {"description": desc, "buggy_snippet": buggy,
                                                 "fixed_snippet": fixed, "category": cat}))
    training = set(r.sample([p[0] for p in programs], N_TRAINING))

    entries = []
    flat, indented = {}, {}
    for pid, gold, ann in programs:
        assert ann is None or ann["buggy_snippet"] in gold, pid
        (OUT / "gold" / f"{pid}.py").write_text(gold + "\n")
        lines, height = layout(gold, r)
        doc = {
            "image_width": float(PAGE_WIDTH),
            "image_height": float(height),
            "provider_id": "synthetic",
            "lines": [{"text": l["text"], "box": {k: float(v) for k, v in l["box"].items()}} for l in lines],
        }
        (OUT / "ocr" / f"{pid}.json").write_text(json.dumps(doc, indent=2) + "\n")
        draw_page(gold, lines, height, OUT / "images" / f"{pid}.png")

        # perfect indentation recovery, no correction
        indented[pid] = l_norm(gold, "\n".join("    " * l["level"] + l["text"] for l in lines))
        flat[pid] = l_norm(gold, "\n".join(l["text"] for l in lines))

        entry = {"program_id": pid, "image_path": f"images/{pid}.png", "gold_path": f"gold/{pid}.py",
                 "split": "logical_error" if ann else "correct", "heldout": pid not in training}
        if ann:
            entry["annotation"] = ann
        entries.append(entry)

    (OUT / "manifest.json").write_text(json.dumps({"entries": entries}, indent=2) + "\n")

    def summary(scores, ids):
        vals = [scores[p] for p in sorted(ids)]
        mean, se = aggregate(vals)
        return {"n": len(vals), "mean": mean, "std_error": se, "per_program": {p: scores[p] for p in sorted(ids)}}

    all_ids = [p for p, _, _ in programs]
    heldout_ids = [p for p in all_ids if p not in training]
    expected = {
        "flat": {"all": summary(flat, all_ids), "heldout": summary(flat, heldout_ids)},
        "indented": {"all": summary(indented, all_ids), "heldout": summary(indented, heldout_ids)},
    }
    (OUT / "expected_scores.json").write_text(json.dumps(expected, indent=2) + "\n")
    print(f"{len(entries)} entries, {len(heldout_ids)} heldout; "
          f"flat {expected['flat']['all']['mean']:.2f}%, indented {expected['indented']['all']['mean']:.2f}%")


if __name__ == "__main__":
    main()
