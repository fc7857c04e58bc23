"""Convert the college football GML file into semicom's TSV inputs.

    python python/gml_to_tsv.py football.gml data/football

writes football.edges.tsv and football.labels.tsv (1-based ids in file
order). Conference value 5 (the independents) is written as "-" so those
teams count as unlabeled.
"""

import argparse
from pathlib import Path

import networkx as nx


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("gml")
    ap.add_argument("out_dir")
    ap.add_argument("--unlabeled-value", type=int, default=5)
    args = ap.parse_args()

    g = nx.read_gml(args.gml, label="id")
    nodes = list(g.nodes)
    index = {v: i + 1 for i, v in enumerate(nodes)}
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    with open(out / "football.edges.tsv", "w") as f:
        f.write(f"# nodes {len(nodes)}\n")
        pairs = {tuple(sorted((index[u], index[v]))) for u, v in g.edges if u != v}
        for u, v in sorted(pairs):
            f.write(f"{u}\t{v}\n")

    with open(out / "football.labels.tsv", "w") as f:
        for v in nodes:
            value = g.nodes[v]["value"]
            label = "-" if value == args.unlabeled_value else str(value)
            f.write(f"{index[v]}\t{label}\n")
    print(f"{len(nodes)} nodes, {len(pairs)} edges -> {out}")


if __name__ == "__main__":
    main()
