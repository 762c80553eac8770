"""Command-line interface: ``vcglab solve|mechanism|probe|repro``.

Exit codes: 0 success, 1 domain or validation error, 2 repro mismatch,
3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from importlib import resources

from .core import (
    InstanceError,
    MatchingInstance,
    SingleMindedInstance,
    buyer_label,
    format_rational,
    instance_from_doc,
    rational_from_json,
    rational_to_json,
)
from .pricing import BudgetExceeded as PricingBudgetExceeded
from .pricing import TypeDistribution, distribution_from_doc, max_posted_revenue
from .probe import (
    MECHANISMS,
    BudgetExceeded,
    GridSpec,
    MechanismMismatch,
    default_workers,
    mechanism_revenue,
    search,
)
from .vcg import run_vcg
from .walrasian import max_walrasian, min_walrasian
from .welfare import max_welfare

EXIT_OK, EXIT_DOMAIN, EXIT_MISMATCH, EXIT_BUDGET = 0, 1, 2, 3

DISPLAY = {
    "vcg": "VCG",
    "min-walrasian": "min-Walrasian",
    "max-walrasian": "max-Walrasian",
    "posted-price": "posted-price",
}


def load_document(path: str):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InstanceError("", f"malformed JSON: {exc}") from None
    except OSError as exc:
        raise InstanceError("", str(exc)) from None
    if isinstance(doc, dict) and doc.get("type") == "distribution":
        return distribution_from_doc(doc)
    return instance_from_doc(doc)


def _allocation_doc(inst, allocation):
    if isinstance(inst, MatchingInstance):
        return [{"buyer": i + 1, "item": j + 1} for i, j in allocation.pairs]
    return {"winners": [b + 1 for b in sorted(allocation.winners)]}


def _allocation_text(inst, allocation) -> str:
    if isinstance(inst, MatchingInstance):
        parts = [f"{buyer_label(i)}→{j + 1}" for i, j in allocation.pairs]
    else:
        parts = [
            f"{buyer_label(b)}→{{{','.join(str(j + 1) for j in sorted(inst.bids[b].items))}}}"
            for b in sorted(allocation.winners)
        ]
    return ", ".join(parts)


def _prices_text(prices) -> str:
    return "(" + ", ".join(format_rational(p) for p in prices) + ")"


def _emit(args, doc, text):
    if args.format == "json":
        print(json.dumps(doc, separators=(",", ":")))
    else:
        print(text)


def cmd_solve(args) -> int:
    inst = load_document(args.instance)
    if isinstance(inst, TypeDistribution):
        raise MechanismMismatch("solve needs a matching or single-minded instance")
    result = max_welfare(inst)
    alloc = _allocation_text(inst, result.allocation)
    text = f"welfare {result.best_value}" + (f"; {alloc}" if alloc else "")
    _emit(args, {"welfare": result.best_value, "allocation": _allocation_doc(inst, result.allocation)}, text)
    return EXIT_OK


def cmd_mechanism(args) -> int:
    inst = load_document(args.instance)
    mech = args.mechanism
    if mech == "posted-price":
        if not isinstance(inst, TypeDistribution):
            raise MechanismMismatch("posted-price requires a distribution document")
        res = max_posted_revenue(inst)
        choices = ["none" if c is None else str(c + 1) for c in res.per_type_choice]
        doc = {
            "mechanism": mech,
            "prices": [rational_to_json(p) for p in res.prices],
            "choices": [None if c is None else c + 1 for c in res.per_type_choice],
            "revenue": rational_to_json(res.expected_revenue),
        }
        text = (
            f"prices {_prices_text(res.prices)}\n"
            f"choices {', '.join(choices)}\n"
            f"expected revenue {format_rational(res.expected_revenue)}"
        )
        _emit(args, doc, text)
        return EXIT_OK
    if isinstance(inst, TypeDistribution):
        raise MechanismMismatch(f"{mech} cannot run on a distribution document")
    if mech == "vcg":
        out = run_vcg(inst)
        doc = {
            "mechanism": mech,
            "allocation": _allocation_doc(inst, out.allocation),
            "payments": [rational_to_json(p) for p in out.payments],
            "revenue": rational_to_json(out.revenue),
        }
        pays = ", ".join(f"{buyer_label(i)} {format_rational(p)}" for i, p in enumerate(out.payments))
        text = (
            f"allocation {_allocation_text(inst, out.allocation)}\n"
            f"payments {pays}\n"
            f"revenue {format_rational(out.revenue)}"
        )
        _emit(args, doc, text)
        return EXIT_OK
    if isinstance(inst, SingleMindedInstance):
        raise MechanismMismatch(f"{mech} requires a matching instance")
    prices, matching = (min_walrasian if mech == "min-walrasian" else max_walrasian)(inst)
    doc = {
        "mechanism": mech,
        "allocation": _allocation_doc(inst, matching),
        "prices": [rational_to_json(p) for p in prices],
        "revenue": rational_to_json(prices.total),
    }
    text = (
        f"allocation {_allocation_text(inst, matching)}\n"
        f"prices {_prices_text(prices)}\n"
        f"revenue {format_rational(prices.total)}"
    )
    _emit(args, doc, text)
    return EXIT_OK


def _parse_random(tokens):
    fields = {}
    for tok in tokens:
        for part in filter(None, tok.split(",")):
            key, sep, val = part.partition("=")
            if not sep or key not in ("seed", "trials"):
                raise ValueError(f"bad --random field {part!r}; expected seed=INT trials=INT")
            fields[key] = int(val)
    return fields.get("seed", 0), fields.get("trials", 1000)


def cmd_probe(args) -> int:
    space = GridSpec.parse(args.grid)
    kwargs = {"budget": args.budget, "workers": args.workers or default_workers()}
    if args.random is not None:
        seed, trials = _parse_random(args.random)
        witnesses = search(space, args.mechanism, mode="random", seed=seed, trials=trials, **kwargs)
    else:
        witnesses = search(space, args.mechanism, **kwargs)
    for w in witnesses:
        if args.format == "table":
            p = w.perturbation
            target = "bundle" if p.target is None else f"item {p.target + 1}"
            print(
                f"{json.dumps(w.to_doc()['instance'], separators=(',', ':'))}  "
                f"{buyer_label(p.buyer)} {target} +{p.delta}  "
                f"{format_rational(w.revenue_before)} → {format_rational(w.revenue_after)}"
            )
        else:
            print(w.to_json())
    print(f"{len(witnesses)} witnesses", file=sys.stderr)
    return EXIT_OK


def load_repro_cases() -> list[dict]:
    text = resources.files("vcglab").joinpath("data/repro_cases.json").read_text()
    return json.loads(text)["cases"]


def _case_revenue(doc, mechanism) -> Fraction:
    if mechanism == "posted-price":
        return max_posted_revenue(distribution_from_doc(doc)).expected_revenue
    return mechanism_revenue(instance_from_doc(doc), mechanism)


def run_repro(case_id: str = "all") -> list[dict]:
    """Recompute every expected revenue pair of the selected fixture cases."""
    cases = load_repro_cases()
    if case_id != "all":
        cases = [c for c in cases if c["id"] == case_id]
        if not cases:
            raise ValueError(f"unknown repro case {case_id!r}")
    rows = []
    for case in cases:
        for mech, exp in case["expected"].items():
            want = (rational_from_json(exp["before"]), rational_from_json(exp["after"]))
            got = (_case_revenue(case["before"], mech), _case_revenue(case["after"], mech))
            rows.append({"case": case["id"], "mechanism": mech, "expected": want, "got": got, "ok": got == want})
    return rows


def cmd_repro(args) -> int:
    rows = run_repro(args.case)
    ok = all(r["ok"] for r in rows)
    if args.format == "json":
        print(json.dumps(
            [
                {
                    "case": r["case"],
                    "mechanism": r["mechanism"],
                    "expected": [rational_to_json(x) for x in r["expected"]],
                    "got": [rational_to_json(x) for x in r["got"]],
                    "pass": r["ok"],
                }
                for r in rows
            ],
            separators=(",", ":"),
        ))
    else:
        for r in rows:
            before, after = (format_rational(x) for x in r["got"])
            verdict = "PASS" if r["ok"] else "FAIL"
            line = f"{r['case']} {DISPLAY[r['mechanism']]} revenue: {before} → {after} {verdict}"
            if r["ok"] and r["got"][1] >= r["got"][0]:
                line += " (monotone)"
            print(line)
    for r in rows:
        if not r["ok"]:
            want = " → ".join(format_rational(x) for x in r["expected"])
            got = " → ".join(format_rational(x) for x in r["got"])
            print(f"{r['case']} {r['mechanism']}: expected {want}, got {got}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vcglab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def fmt(p, default="table"):
        p.add_argument("--format", choices=("json", "table"), default=default)

    p = sub.add_parser("solve", help="welfare-maximizing allocation")
    p.add_argument("instance")
    fmt(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("mechanism", help="run a mechanism and report payments or prices")
    p.add_argument("instance")
    p.add_argument("--mechanism", choices=MECHANISMS + ("posted-price",), default="vcg")
    fmt(p)
    p.set_defaults(func=cmd_mechanism)

    p = sub.add_parser("probe", help="search a grid for revenue-decrease witnesses (JSON lines)")
    p.add_argument("--grid", default="n=2,m=2,vmax=2,dmax=2", help='e.g. "n=2,m=2,vmax=2,dmax=2"')
    p.add_argument("--random", nargs="*", metavar="KEY=INT", help="random mode: seed=INT trials=INT")
    p.add_argument("--mechanism", choices=MECHANISMS, default="vcg")
    p.add_argument("--budget", type=int, default=10_000_000)
    p.add_argument("--workers", type=int, default=0, help="default: $VCGLAB_WORKERS or CPU count")
    fmt(p, default="json")
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("repro", help="recompute the published examples and compare")
    p.add_argument("case", nargs="?", default="all")
    fmt(p)
    p.set_defaults(func=cmd_repro)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (BudgetExceeded, PricingBudgetExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InstanceError, MechanismMismatch, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
