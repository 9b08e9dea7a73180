#!/usr/bin/env python3
"""Write a small demo dataset and embedding table for trying the CLI."""

import argparse

from pairrank.synthetic import token_dataset_lines, toy_embedding_lines


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-data", default="demo_data.jsonl")
    parser.add_argument("--out-embeddings", default="demo_embeddings.txt")
    parser.add_argument("--n", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    with open(args.out_data, "w", encoding="utf-8") as f:
        f.write("\n".join(token_dataset_lines(
            args.n, seed=args.seed, splits=["cz", "de", "es", "fr"], with_external=True)) + "\n")
    with open(args.out_embeddings, "w", encoding="utf-8") as f:
        f.write("\n".join(toy_embedding_lines(30, dim=5, seed=args.seed)) + "\n")
    print(f"wrote {args.out_data} and {args.out_embeddings}")


if __name__ == "__main__":
    main()
