"""Command-line front door: simulate/train, encode+compile, validate, query, serve.

Every artifact-producing command writes a run manifest next to its main output
(seed, arguments, content hashes) so runs are reproducible and auditable.
Exit codes: 0 ok, 1 usage, 2 data error, 3 validation failure.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

from . import __version__
from .compiler import NnfFormatError, export_nnf, import_nnf
from .logic import check_decomposability, check_determinism, check_smoothness
from .qlearn import (
    TrainConfig,
    load_policy,
    policy_fn,
    save_policy,
    save_rewards_csv,
    train,
)
from .query import (
    Theory,
    ZeroCountEvidence,
    action_likelihood,
    format_percent,
    probability,
    state_likelihood,
)
from .tlc import IntersectionConfig, collect_traces, pressure_policy
from .traces import detect_policy_conflicts, read_traces, write_traces

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_VALIDATION = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class DataError(ValueError):
    pass


def _sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(out: Path, command: str, args: dict, artifacts: list[Path]) -> Path:
    manifest = {
        "tool_version": __version__,
        "command": command,
        "created": datetime.now(timezone.utc).isoformat(),
        "arguments": {k: str(v) for k, v in args.items() if v is not None},
        "artifacts": {str(p): _sha256(p) for p in artifacts if Path(p).exists()},
    }
    path = Path(out).with_name(Path(out).stem + ".manifest.json")
    path.write_text(json.dumps(manifest, indent=2) + "\n")
    return path


def parse_evidence(text: str) -> dict[str, bool]:
    """Grammar: comma-separated name=0|1 tokens; actions via "action=<label>"."""
    evidence: dict[str, bool] = {}
    if not text:
        return evidence
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        if "=" not in token:
            raise DataError(f"bad evidence token {token!r} (expected name=0|1)")
        name, _, value = token.rpartition("=")
        name, value = name.strip(), value.strip()
        if name == "action":
            # pseudo-variable: condition the labelled action indicator true
            evidence[f"action={value}"] = True
            continue
        if value not in ("0", "1"):
            raise DataError(f"evidence value for {name!r} must be 0 or 1, got {value!r}")
        if name in evidence:
            raise DataError(f"variable {name!r} assigned twice")
        evidence[name] = value == "1"
    return evidence


# --- subcommands ---------------------------------------------------------------


def cmd_demo(args) -> int:
    """Write the bundled car-key demo traces (the worked two-variable example)."""
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    data = resources.files("policylens.data")
    for name in ("carkey.jsonl", "carkey.schema.json"):
        (out / name).write_text((data / name).read_text())
    print(json.dumps({"traces": str(out / "carkey.jsonl")}))
    return EXIT_OK


def cmd_simulate(args) -> int:
    env = IntersectionConfig()
    if args.policy == "heuristic":
        policy = pressure_policy(args.depth)
    else:
        policy = policy_fn(load_policy(Path(args.policy)))
    traces, run_summary = collect_traces(
        env, policy, depth=args.depth, episodes=args.episodes, seed=args.seed
    )
    out = Path(args.out)
    write_traces(traces, out)
    conflicts = detect_policy_conflicts(traces)
    rewards = run_summary["episode_rewards"]
    summary = {
        "observations": len(traces),
        "distinct": len(traces.distinct()),
        "episodes": args.episodes,
        "total_reward": run_summary["total_reward"],
        "mean_episode_reward": run_summary["total_reward"] / len(rewards),
        "vehicles_entered": run_summary["vehicles_entered"],
        "vehicles_departed": run_summary["vehicles_departed"],
        "mean_wait_seconds": run_summary["mean_wait_seconds"],
        "policy_conflicts": len(conflicts),
    }
    if conflicts:
        print(
            f"warning: {len(conflicts)} states observed with multiple actions "
            "(deterministic-policy assumption violated)",
            file=sys.stderr,
        )
    write_manifest(out, "simulate", vars(args), [out, out.with_name(out.stem + ".schema.json")])
    print(json.dumps(summary))
    return EXIT_OK


def cmd_train(args) -> int:
    cfg = TrainConfig(episodes=args.episodes, depth=args.depth)
    result = train(cfg, seed=args.seed)
    out = Path(args.out)
    save_policy(result.policy, out)
    rewards_path = (
        Path(args.rewards) if args.rewards else out.with_name(out.stem + ".rewards.csv")
    )
    save_rewards_csv(result.episode_rewards, rewards_path)
    write_manifest(out, "train", vars(args), [out, rewards_path])
    print(
        json.dumps(
            {
                "policy": str(out),
                "rewards": str(rewards_path),
                "states": len(result.policy),
                "first_episode_reward": result.episode_rewards[0],
                "last_episode_reward": result.episode_rewards[-1],
            }
        )
    )
    return EXIT_OK


def cmd_compile(args) -> int:
    traces = read_traces(Path(args.traces))
    if not traces.observations:
        raise DataError(f"{args.traces} contains no observations")
    theory, stats = Theory.from_traces(traces)
    out = Path(args.out)
    theory.save(out)
    artifacts = [out, out.with_name(out.stem + ".schema.json")]
    if args.stats:
        stats_path = out.with_name(out.stem + ".stats.json")
        payload = stats.as_dict()
        payload["model_count"] = str(theory.model_count())
        payload["distinct_observations"] = len(traces.distinct())
        stats_path.write_text(json.dumps(payload, indent=2) + "\n")
        artifacts.append(stats_path)
    write_manifest(out, "compile", vars(args), artifacts)
    print(
        json.dumps(
            {
                "theory": str(out),
                "nodes": stats.node_count,
                "edges": stats.edge_count,
                "model_count": str(theory.model_count()),
            }
        )
    )
    return EXIT_OK


def cmd_query(args) -> int:
    theory = Theory.load(Path(args.theory))
    evidence = parse_evidence(args.evidence or "")
    target = args.target
    try:
        if target == "actions":
            result = action_likelihood(theory, evidence)
        elif target == "state":
            action_ev = [n for n in evidence if n.startswith("action=")]
            if len(action_ev) != 1:
                raise DataError(
                    "state target needs evidence conditioning exactly one action"
                )
            state_ev = {n: v for n, v in evidence.items() if not n.startswith("action=")}
            result = state_likelihood(theory, action_ev[0].split("=", 1)[1], state_ev)
        elif target.startswith("var:"):
            name = target[4:]
            p = probability(theory.dag, name, evidence)
            from .query import QueryResult

            result = QueryResult(evidence, 0, {name: p})
        else:
            raise DataError(f"unknown target {target!r}")
    except ZeroCountEvidence:
        print(json.dumps({"no_supporting_observations": True, "evidence": evidence}))
        return EXIT_OK
    payload = result.as_dict()
    print(json.dumps(payload))
    if args.pretty:
        width = max(len(n) for n in result.likelihoods)
        for name, p in result.likelihoods.items():
            bar = "#" * round(40 * p)
            print(f"{name:<{width}}  {format_percent(p):>8}  {bar}", file=sys.stderr)
    return EXIT_OK


def cmd_validate(args) -> int:
    path = Path(args.theory)
    try:
        theory = Theory.load(path)
    except NnfFormatError as exc:
        print(json.dumps({"ok": False, "error": str(exc)}))
        return EXIT_VALIDATION
    dag = theory.dag
    checks = {
        "decomposability": check_decomposability(dag),
        "determinism": check_determinism(dag),
        "smoothness_of_or_nodes": check_smoothness(dag),
    }
    round_trip = export_nnf(import_nnf(export_nnf(dag))) == export_nnf(dag)
    report = {
        "ok": all(bool(r) for r in checks.values()) and round_trip,
        "nodes": dag.node_count,
        "edges": dag.edge_count,
        "model_count": str(theory.model_count()),
        "round_trip_identical": round_trip,
        "checks": {
            name: ({"ok": True} if r else {"ok": False, "violation": str(r.violation)})
            for name, r in checks.items()
        },
    }
    print(json.dumps(report, indent=2))
    return EXIT_OK if report["ok"] else EXIT_VALIDATION


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(Path(args.theories), node_cap=args.node_cap, ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="policylens", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("demo", help="write the bundled car-key demo traces")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(fn=cmd_demo)

    p = sub.add_parser("simulate", help="run traffic episodes under a policy")
    p.add_argument("--episodes", type=int, default=100)
    p.add_argument("--depth", type=int, default=1, help="observed cells per movement")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="traces JSONL path")
    p.add_argument(
        "--policy",
        default="heuristic",
        help='policy JSON path, or "heuristic" for the built-in pressure rule',
    )
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("train", help="train a tabular Q-learning controller")
    p.add_argument("--episodes", type=int, default=100)
    p.add_argument("--depth", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="policy JSON path")
    p.add_argument("--rewards", help="reward series CSV path (default: <out>.rewards.csv)")
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("compile", help="encode traces and compile to d-DNNF")
    p.add_argument("--traces", required=True)
    p.add_argument("--out", required=True, help="theory NNF path")
    p.add_argument("--stats", action="store_true", help="also write <out>.stats.json")
    p.set_defaults(fn=cmd_compile)

    p = sub.add_parser("query", help="likelihood queries over a compiled theory")
    p.add_argument("--theory", required=True)
    p.add_argument(
        "--evidence",
        default="",
        help='comma-separated name=0|1 tokens; "action=<label>" conditions an action',
    )
    p.add_argument(
        "--target",
        default="actions",
        help='"actions", "state", or "var:<name>"',
    )
    p.add_argument("--pretty", action="store_true", help="human table on stderr")
    p.set_defaults(fn=cmd_query)

    p = sub.add_parser("validate", help="check d-DNNF properties and round-trip")
    p.add_argument("--theory", required=True)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("serve", help="serve theories over HTTP for the explorer UI")
    p.add_argument("--theories", required=True, help="directory of .nnf + sidecars")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--node-cap", type=int, default=2000)
    p.add_argument("--ui", help="built explorer-ui directory to mount at /ui")
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except NnfFormatError as exc:
        print(f"policylens: invalid theory: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ValueError, OSError) as exc:
        # TraceError, DataError, QueryError, DimacsError, LogicError and
        # friends are all ValueErrors: bad inputs, not crashes
        print(f"policylens: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
