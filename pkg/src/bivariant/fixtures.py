"""Deterministic generators for the bundled category documents.

``finite_sets_document(n)`` builds the skeletal category of finite sets of
sizes 0..n with every function, a pullback table for every cospan whose
apex fits, disjoint-union coproducts, a fibered category of integer weight
functions, and a carrier side table.  ``fs4`` is the case n = 4.
``diamond_document()`` is the four-element lattice bot <= x, y <= top.
"""

from __future__ import annotations

import itertools
import json

LETTERS = "abcdefghijklmnopqrstuvwxyz"
WEIGHT_VALUES = (3, 5)


def _table_id(m: int, n: int, table: str) -> str:
    return f"f{m}{n}_{table}"


def _weight_token(values) -> str:
    return "w" + "".join(str(v) for v in values)


def finite_sets_document(max_size: int = 4, weights=WEIGHT_VALUES) -> dict:
    if not 0 <= max_size <= 9:
        raise ValueError("max_size must be between 0 and 9")
    sizes = range(max_size + 1)
    carrier = {n: LETTERS[:n] for n in sizes}

    # morphisms ordered by (source size, target size, value table)
    tables = {}
    morphisms = []
    for m in sizes:
        for n in sizes:
            for table in itertools.product(carrier[n], repeat=m):
                t = "".join(table)
                mid = _table_id(m, n, t)
                tables[mid] = (m, n, t)
                morphisms.append(mid)
    lookup = {v: k for k, v in tables.items()}

    def compose(f, g):
        m, _, tf = tables[f]
        _, k, tg = tables[g]
        return lookup[(m, k, "".join(tg[LETTERS.index(c)] for c in tf))]

    by_src = {n: [f for f in morphisms if tables[f][0] == n] for n in sizes}
    compose_rows = []
    for f in morphisms:
        n = tables[f][1]
        for g in by_src[n]:
            compose_rows.append([f, g, compose(f, g)])

    identities = {str(n): _table_id(n, n, carrier[n]) for n in sizes}

    order = {mid: i for i, mid in enumerate(morphisms)}
    into = {n: [f for f in morphisms if tables[f][1] == n] for n in sizes}
    pullbacks = []
    for z in sizes:
        for left in into[z]:
            for right in into[z]:
                if order[left] > order[right]:
                    continue
                mx, _, tl = tables[left]
                my, _, tr = tables[right]
                pairs = [(i, j) for i in range(mx) for j in range(my) if tl[i] == tr[j]]
                k = len(pairs)
                if k > max_size:
                    continue
                pl = lookup[(k, mx, "".join(LETTERS[i] for i, _ in pairs))]
                pr = lookup[(k, my, "".join(LETTERS[j] for _, j in pairs))]
                pullbacks.append([left, right, str(k), pl, pr])

    coproducts = []
    for m in sizes:
        for n in sizes:
            if m + n <= max_size:
                coproducts.append({
                    "left": str(m), "right": str(n), "object": str(m + n),
                    "inj_left": _table_id(m, m + n, LETTERS[:m]),
                    "inj_right": _table_id(n, m + n, LETTERS[m:m + n]),
                })

    labels, label_values = {}, {}
    for n in sizes:
        toks = []
        for vals in itertools.product(weights, repeat=n):
            tok = _weight_token(vals)
            toks.append(tok)
            label_values[tok] = list(vals)
        labels[str(n)] = toks
    pull = {}
    for f in morphisms:
        m, n, t = tables[f]
        if f == identities[str(m)]:
            continue
        entry = {}
        for tok in labels[str(n)]:
            vals = label_values[tok]
            entry[tok] = _weight_token(vals[LETTERS.index(c)] for c in t)
        pull[f] = entry

    aliases = {}
    for n in sizes:
        aliases[f"id_{n}"] = identities[str(n)]
        aliases[f"empty_{n}"] = _table_id(0, n, "")
        if n >= 1:
            aliases[f"bang_{n}"] = _table_id(n, 1, "a" * n)
    if max_size >= 2:
        aliases.update({
            "swap": "f22_ba", "const_a": "f22_aa", "const_b": "f22_bb",
            "one_to_a": "f12_a", "one_to_b": "f12_b", "h_1a": "f12_a", "h_1b": "f12_b",
        })

    return {
        "name": f"fs{max_size}",
        "objects": [{"id": str(n), "size": n} for n in sizes],
        "morphisms": [[mid, str(tables[mid][0]), str(tables[mid][1])] for mid in morphisms],
        "identities": identities,
        "final_object": "1" if max_size >= 1 else "0",
        "confined": "all",
        "specialized": "all",
        "squares": "all-fiber",
        "aliases": aliases,
        "coproducts": coproducts,
        "fibered": {"labels": labels, "pull": pull},
        "carriers": {
            "sets": {str(n): list(carrier[n]) for n in sizes},
            "maps": {mid: list(tables[mid][2]) for mid in morphisms},
            "label_values": label_values,
        },
        "compose": compose_rows,
        "pullbacks": pullbacks,
    }


DIAMOND_ORDER = {
    "bot": {"bot", "x", "y", "top"},
    "x": {"x", "top"},
    "y": {"y", "top"},
    "top": {"top"},
}


def _leq(a, b):
    return b in DIAMOND_ORDER[a]


def _meet(a, b):
    if _leq(a, b):
        return a
    if _leq(b, a):
        return b
    return "bot"


def diamond_document() -> dict:
    objs = ["bot", "x", "y", "top"]

    def mid(a, b):
        return f"id_{a}" if a == b else f"{a}_{b}"

    morphisms = [[f"id_{o}", o, o] for o in objs]
    morphisms += [[mid(a, b), a, b] for a in objs for b in objs if a != b and _leq(a, b)]
    compose_rows = []
    for a in objs:
        for b in objs:
            for c in objs:
                if _leq(a, b) and _leq(b, c):
                    compose_rows.append([mid(a, b), mid(b, c), mid(a, c)])
    pullbacks = []
    for c in objs:
        below = [a for a in objs if _leq(a, c)]
        for a in below:
            for b in below:
                p = _meet(a, b)
                pullbacks.append([mid(a, c), mid(b, c), p, mid(p, a), mid(p, b)])
    labels = {o: [f"w_{z}" for z in objs if _leq(z, o)] for o in objs}
    pull = {}
    for a, b in itertools.product(objs, repeat=2):
        if a != b and _leq(a, b):
            pull[mid(a, b)] = {f"w_{z}": f"w_{_meet(z, a)}" for z in objs if _leq(z, b)}
    return {
        "name": "diamond",
        "objects": [{"id": o} for o in objs],
        "morphisms": [{"id": m, "src": s, "dst": d} for m, s, d in morphisms],
        "identities": {o: f"id_{o}" for o in objs},
        "final_object": "top",
        "confined": "all",
        "specialized": "all",
        "squares": "all-fiber",
        "fibered": {"labels": labels, "pull": pull},
        "compose": [{"first": f, "then": g, "equals": h} for f, g, h in compose_rows],
        "pullbacks": [dict(zip(("left", "right", "apex", "proj_left", "proj_right"), row))
                      for row in pullbacks],
    }


def dump_document(doc: dict) -> str:
    """JSON text with one table row per line so large fixtures stay diffable."""
    row_keys = ("objects", "morphisms", "compose", "pullbacks", "coproducts")
    parts = []
    for key, value in doc.items():
        if key in row_keys:
            rows = ",\n    ".join(json.dumps(r, ensure_ascii=False, separators=(", ", ": "))
                                  for r in value)
            body = f"[\n    {rows}\n  ]" if value else "[]"
        elif key == "fibered" or key == "carriers":
            inner = ",\n    ".join(f"{json.dumps(k)}: {json.dumps(v, sort_keys=False)}"
                                   for k, v in value.items())
            body = "{\n    " + inner + "\n  }"
        else:
            body = json.dumps(value, ensure_ascii=False)
        parts.append(f"  {json.dumps(key)}: {body}")
    return "{\n" + ",\n".join(parts) + "\n}\n"


GENERATORS = {
    "fs4": lambda: finite_sets_document(4),
    "fs3": lambda: finite_sets_document(3),
    "fs2": lambda: finite_sets_document(2),
    "diamond": diamond_document,
}


def generate(name: str) -> str:
    try:
        build = GENERATORS[name]
    except KeyError:
        raise ValueError(f"unknown fixture {name!r}; choose from {sorted(GENERATORS)}") from None
    return dump_document(build())
