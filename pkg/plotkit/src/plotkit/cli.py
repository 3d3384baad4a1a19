"""plotkit CLI: scaling and threshold figure generation."""

from __future__ import annotations

import argparse
import sys

from .plots import PlotSpec, plot_scaling, plot_threshold


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotkit", description="Figures from switchsim CSV outputs"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    scaling = sub.add_parser("scaling", help="queue-size scaling curves")
    scaling.add_argument("--in", dest="input", required=True)
    scaling.add_argument("--out", dest="output", required=True)
    scaling.add_argument("--x", dest="x_axis", choices=("n", "inv-gap"), default="n")
    scaling.add_argument("--scale", choices=("log", "linear"), default="log")

    threshold = sub.add_parser("threshold", help="factor-threshold success curve")
    threshold.add_argument("--in", dest="input", required=True)
    threshold.add_argument("--out", dest="output", required=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "scaling":
        spec = PlotSpec(
            input_path=args.input,
            kind="scaling",
            output_path=args.output,
            x_axis=args.x_axis,
            scale=args.scale,
        )
        plot_scaling(spec)
    else:
        spec = PlotSpec(input_path=args.input, kind="threshold", output_path=args.output)
        plot_threshold(spec)
    return 0


if __name__ == "__main__":
    sys.exit(main())
