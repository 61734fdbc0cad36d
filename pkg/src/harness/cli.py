from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Optional

from pydantic import ValidationError

from config.settings import Settings, load_settings
from decentral_apm.errors import ApmError, ConfigError
from decentral_apm.models import parse_config
from harness.experiment import build_instance, compare_algorithms, run_experiment, summarize
from harness.metrics import push_metrics
from storage.network_store import NetworkStore
from storage.problem_store import ProblemStore

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2

DEFAULT_COMPARE = {
    "least_squares": ["apm-c", "apm", "extra", "dngd"],
    "lasso": ["apm"],
    "hinge": ["apm"],
}

# flags whose dest is an ExperimentConfig field
_CONFIG_FIELDS = (
    "problem", "N", "n", "m", "mu", "lam", "p", "seed", "max_retries",
    "algorithm", "schedule", "K", "beta0", "inner_divisor", "theory_mode",
    "tuned", "beta0_scale", "eta_scale", "prefer_prox", "step_scale",
    "metric_every", "reference_iters", "record_wall_time",
)


def _add_instance_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON experiment config; flags override its fields")
    p.add_argument("--problem", choices=["least_squares", "lasso", "hinge"])
    p.add_argument("--N", type=int, help="total sample count")
    p.add_argument("--n", type=int, help="dimension")
    p.add_argument("--m", type=int, help="agent count")
    p.add_argument("--mu", type=float)
    p.add_argument("--lam", type=float, help="l1 weight of the lasso problem")
    p.add_argument("--p", type=float, help="Erdos-Renyi edge probability")
    p.add_argument("--seed", type=int)
    p.add_argument("--max-retries", dest="max_retries", type=int)
    p.add_argument("--reference-iters", dest="reference_iters", type=int)


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--schedule", choices=["sc", "nsc", "thm3", "cor1"])
    p.add_argument("--K", type=int, help="outer iterations")
    p.add_argument("--beta0", type=float)
    p.add_argument("--inner-divisor", dest="inner_divisor", type=float)
    p.add_argument("--theory-mode", dest="theory_mode", action="store_const", const=True)
    p.add_argument("--theoretical", dest="tuned", action="store_const", const=False,
                   help="APM: theoretical beta0 and step instead of the tuned ones")
    p.add_argument("--beta0-scale", dest="beta0_scale", type=float)
    p.add_argument("--eta-scale", dest="eta_scale", type=float)
    p.add_argument("--sliding", dest="prefer_prox", action="store_const", const=False,
                   help="APM: use the sliding inner loop even when a prox is available")
    p.add_argument("--step-scale", dest="step_scale", type=float, help="baselines: step = step_scale / L")
    p.add_argument("--metric-every", dest="metric_every", type=int)
    p.add_argument("--no-wall-time", dest="record_wall_time", action="store_const", const=False)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="decentral_apm", description="Decentralized penalty method simulator")
    parser.add_argument("--log-level", dest="log_level")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate and store a graph and a problem instance")
    _add_instance_flags(gen)
    gen.add_argument("--out", required=True, help="directory for network.json and problem.json")

    run = sub.add_parser("run", help="run one algorithm and write its trace")
    _add_instance_flags(run)
    _add_run_flags(run)
    run.add_argument("--alg", dest="algorithm", choices=["apm-c", "apm", "extra", "dngd"])
    run.add_argument("--out", help="trace CSV path")

    compare = sub.add_parser("compare", help="run several algorithms on one instance")
    _add_instance_flags(compare)
    _add_run_flags(compare)
    compare.add_argument("--algs", help="comma-separated algorithm list")
    compare.add_argument("--out", help="directory for one CSV per algorithm")
    compare.add_argument("--workers", type=int, default=1)
    return parser


def _load_config_file(path: str) -> dict[str, Any]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise OSError(e.errno, f"cannot read config {path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise ConfigError([f"{path}: {e}"]) from e
    if not isinstance(data, dict):
        raise ConfigError([f"{path}: expected a JSON object"])
    return data


def config_from_args(args: argparse.Namespace) -> dict[str, Any]:
    data: dict[str, Any] = _load_config_file(args.config) if args.config else {}
    for name in _CONFIG_FIELDS:
        value = getattr(args, name, None)
        if value is not None:
            data[name] = value
    return data


def _with_default_algorithm(data: dict[str, Any]) -> dict[str, Any]:
    # hinge and lasso only validate with the nonsmooth method
    if data.get("problem") in ("hinge", "lasso"):
        data.setdefault("algorithm", "apm")
    return data


def _cmd_gen(args: argparse.Namespace, settings: Settings) -> int:
    data = _with_default_algorithm(config_from_args(args))
    cfg = parse_config(data)
    instance = build_instance(cfg, settings)
    out_dir = Path(args.out)
    NetworkStore(str(out_dir / "network.json")).save(instance.network, instance.W)
    ProblemStore(str(out_dir / "problem.json")).save(instance.problem, instance.reference)
    print(f"network: m={cfg.m} edges={len(instance.network.edges)} gap={instance.W.gap:.6f} -> {out_dir / 'network.json'}")
    print(f"problem: {cfg.problem} f*={instance.reference.f_star:.12g} -> {out_dir / 'problem.json'}")
    return EXIT_OK


def _cmd_run(args: argparse.Namespace, settings: Settings) -> int:
    data = _with_default_algorithm(config_from_args(args))
    if args.out:
        data["out"] = args.out
    trace = run_experiment(data, settings)
    print(summarize(trace))
    if args.out:
        print(f"trace -> {args.out}")
    return EXIT_OK


def _cmd_compare(args: argparse.Namespace, settings: Settings) -> int:
    data = _with_default_algorithm(config_from_args(args))
    base = parse_config(data)
    algorithms = [a.strip() for a in args.algs.split(",") if a.strip()] if args.algs else DEFAULT_COMPARE[base.problem]
    traces = compare_algorithms(base, algorithms, args.out or settings.out_dir, workers=args.workers, settings=settings)
    for trace in traces.values():
        print(summarize(trace))
    return EXIT_OK


COMMANDS = {"gen": _cmd_gen, "run": _cmd_run, "compare": _cmd_compare}


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    settings = load_settings()
    logging.basicConfig(
        level=(args.log_level or settings.log_level).upper(),
        format="%(asctime)s [%(levelname)s] %(message)s",
    )

    try:
        code = COMMANDS[args.command](args, settings)
    except (ConfigError, ValidationError) as e:
        logger.error("%s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (ApmError, OSError, ValueError) as e:
        logger.error("%s failed: %s", args.command, e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE

    push_metrics(settings.prometheus_push_url)
    return code


if __name__ == "__main__":
    sys.exit(main())
