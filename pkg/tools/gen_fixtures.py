#!/usr/bin/env python3
"""Regenerate the committed fixture graphs under src/trident/corpus/graphs/.

Deterministic: every random draw is seeded, so re-running reproduces the
committed files byte for byte.
"""

import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "trident" / "corpus" / "graphs"


def write(name: str, lines: list[str]) -> None:
    path = OUT / name
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {path} ({len(lines)} lines)")


def path_graph(n: int, weights: list[int]) -> list[str]:
    assert len(weights) == n - 1
    return [f"{i} {i + 1} {w}" for i, w in enumerate(weights)]


def cycle(n: int) -> list[str]:
    return [f"{i} {(i + 1) % n} 1" for i in range(n)]


def complete(n: int) -> list[str]:
    return [f"{u} {v} 1" for u in range(n) for v in range(u + 1, n)]


def star(leaves: int) -> list[str]:
    return [f"0 {i} 1" for i in range(1, leaves + 1)]


def random_digraph(n: int, m: int, seed: int, wlo: int, whi: int) -> list[str]:
    rng = random.Random(seed)
    seen = set()
    lines = []
    while len(lines) < m:
        u = rng.randrange(n)
        v = rng.randrange(n)
        if u == v or (u, v) in seen:
            continue
        seen.add((u, v))
        lines.append(f"{u} {v} {rng.randint(wlo, whi)}")
    return lines


def random_undirected(n: int, m: int, seed: int) -> list[str]:
    rng = random.Random(seed)
    seen = set()
    lines = []
    while len(lines) < m:
        u = rng.randrange(n)
        v = rng.randrange(n)
        if u == v:
            continue
        a, b = min(u, v), max(u, v)
        if (a, b) in seen:
            continue
        seen.add((a, b))
        lines.append(f"{a} {b} 1")
    return lines


def grid(rows: int, cols: int, seed: int, wlo: int, whi: int) -> list[str]:
    rng = random.Random(seed)
    lines = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                lines.append(f"{v} {v + 1} {rng.randint(wlo, whi)}")
            if r + 1 < rows:
                lines.append(f"{v} {v + cols} {rng.randint(wlo, whi)}")
    return lines


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    write("path3.txt", path_graph(3, [4, 3]))
    write("path10.txt", path_graph(10, [2, 7, 1, 5, 3, 8, 4, 6, 9]))
    write("cycle3.txt", cycle(3))
    write("cycle4.txt", cycle(4))
    write("cycle10.txt", cycle(10))
    write("star13.txt", star(3))
    write("k3.txt", complete(3))
    write("k4.txt", complete(4))
    write("k5.txt", complete(5))
    write("isolated4.txt", ["# vertex 0 has no edges", "1 2 5", "2 3 2", "1 3 9"])
    write("rand200_a.txt", random_digraph(200, 1500, seed=7, wlo=1, whi=100))
    write("rand200_b.txt", random_digraph(200, 1500, seed=8, wlo=1, whi=100))
    write("rand50_u.txt", random_undirected(50, 200, seed=11))
    write("grid5x5.txt", grid(5, 5, seed=13, wlo=1, whi=10))


if __name__ == "__main__":
    main()
