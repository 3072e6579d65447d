"""Command-line entry point: python -m app.cli <command> ...

Exit codes: 0 success, 1 bad input, 2 a verdict or script expectation failed.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from pydantic import ValidationError

from app.config import settings
from app.core import reports
from app.core.estimation import parse_history
from app.core.generators import sweep_theorem
from app.core.lite import enumeration_attack
from app.core.security import canonical_json
from app.core.simulation import run_script
from app.models.darkdao import SelectionPolicy
from app.models.metrics import ClusteringKind, EntropyKind
from app.models.scenario import Outcome
from app.schemas.darkdao import DarkDaoScript
from app.schemas.scenario import RunConfig, ScenarioIn
from app.schemas.transform import transform_adapter
from app.utils.exceptions import VBELabException
from app.utils.log import configure_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VERDICT = 2


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting with status 2"""

    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _load_json(path: str):
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def _load_scenario(path: str, config: RunConfig):
    document = ScenarioIn(**_load_json(path))
    s = document.to_scenario()
    if config.q is not None:
        s = s.replace(q=config.q)
    return s


def _load_transform(path: str):
    return transform_adapter.validate_python(_load_json(path)).to_transformation()


def _config(args) -> RunConfig:
    return RunConfig(
        seed=args.seed if args.seed is not None else settings.default_seed,
        epsilon=getattr(args, "epsilon", None),
        q=getattr(args, "q", None),
        entropy=getattr(args, "entropy", EntropyKind.MIN.value),
        clustering=getattr(args, "clustering", ClusteringKind.EPSILON_TOC.value),
        output=args.output,
    )


def _emit(report: dict, config: RunConfig) -> None:
    document = {"config": config.model_dump(mode="json"), "result": report}
    text = json.dumps(document, sort_keys=True, indent=2) + "\n"
    if config.output:
        Path(config.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# Commands

def cmd_vbe_compute(args) -> int:
    config = _config(args)
    s = _load_scenario(args.scenario, config)
    _emit(reports.vbe_report(s, config.clustering_spec(), config.entropy_spec()), config)
    return EXIT_OK


def cmd_vbe_estimate(args) -> int:
    config = _config(args)
    history = parse_history(Path(args.votes).read_bytes(), Path(args.balances).read_bytes())
    _emit(reports.estimate_report(history, config.entropy_spec()), config)
    return EXIT_OK


def cmd_vbe_example(args) -> int:
    config = _config(args)
    _emit(reports.whale_report(args.whale_share), config)
    return EXIT_OK


def cmd_transform_apply(args) -> int:
    config = _config(args)
    s = _load_scenario(args.scenario, config)
    _emit(reports.transform_report(s, _load_transform(args.transform)), config)
    return EXIT_OK


def cmd_theorems_check(args) -> int:
    config = _config(args)
    s = _load_scenario(args.scenario, config)
    report, failed = reports.theorem_report(s, _load_transform(args.transform), args.theorem)
    _emit(report, config)
    return EXIT_VERDICT if failed else EXIT_OK


def cmd_theorems_sweep(args) -> int:
    config = _config(args)
    report = sweep_theorem(args.theorem, args.count, config.seed)
    _emit(report, config)
    return EXIT_OK if report["passed"] else EXIT_VERDICT


def cmd_bribery_scale(args) -> int:
    config = _config(args)
    _emit(reports.scale_report(_load_scenario(args.scenario, config)), config)
    return EXIT_OK


def cmd_bribery_flip_cost(args) -> int:
    config = _config(args)
    _emit(reports.flip_cost_report(args.utility, args.desired, args.epsilon or 0.0), config)
    return EXIT_OK


def cmd_bribery_pivotal(args) -> int:
    config = _config(args)
    acceptance = None
    if args.accept is not None:
        acceptance = [flag.strip() in ("1", "true", "yes") for flag in args.accept.split(",")]
    report = reports.pivotal_report(args.n, args.utility, args.epsilon, acceptance)
    _emit(report, config)
    dominance = report.get("dominance")
    return EXIT_VERDICT if dominance and not dominance["dominant"] else EXIT_OK


def cmd_bribery_qv(args) -> int:
    config = _config(args)
    report = reports.qv_report(_load_scenario(args.scenario, config), args.desired)
    _emit(report, config)
    corollary = report["corollary"]
    failed = not report["theorem"]["holds"] or corollary["weak_held"] is False
    return EXIT_VERDICT if failed else EXIT_OK


def cmd_bribery_sybil(args) -> int:
    config = _config(args)
    _emit(reports.sybil_amplification_report(args.whale_tokens, args.accounts), config)
    return EXIT_OK


def cmd_darkdao_run(args) -> int:
    config = _config(args)
    script = DarkDaoScript(**_load_json(args.script))
    report, public, confidential = run_script(script, config.seed)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "public.jsonl").write_text("".join(canonical_json(e) + "\n" for e in public), encoding="utf-8")
    (out_dir / "confidential.jsonl").write_text(
        "".join(canonical_json(e) + "\n" for e in confidential), encoding="utf-8"
    )
    _emit(reports.jsonable(report), config)
    return EXIT_OK if report["passed"] else EXIT_VERDICT


def cmd_darkdao_enumerate(args) -> int:
    config = _config(args)
    report = enumeration_attack(
        SelectionPolicy(args.policy), args.budget, args.victims, args.lockup, seed=config.seed
    )
    _emit(report.to_dict(), config)
    return EXIT_OK


def build_parser() -> Parser:
    parser = Parser(prog="vbe-lab", description="Voting-bloc entropy and Dark DAO laboratory")
    common = Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--output", default=None, help="write the JSON report here instead of stdout")

    metric = Parser(add_help=False)
    metric.add_argument("--entropy", choices=[k.value for k in EntropyKind], default=EntropyKind.MIN.value)
    metric.add_argument(
        "--clustering", choices=[k.value for k in ClusteringKind], default=ClusteringKind.EPSILON_TOC.value
    )
    metric.add_argument("--epsilon", type=float, default=None)
    metric.add_argument("--q", type=float, default=None)

    groups = parser.add_subparsers(dest="group", required=True, parser_class=Parser)

    vbe = groups.add_parser("vbe").add_subparsers(dest="command", required=True, parser_class=Parser)
    p = vbe.add_parser("compute", parents=[common, metric])
    p.add_argument("--scenario", required=True)
    p.set_defaults(handler=cmd_vbe_compute)
    p = vbe.add_parser("estimate", parents=[common])
    p.add_argument("--votes", required=True)
    p.add_argument("--balances", required=True)
    p.add_argument(
        "--entropy", choices=[EntropyKind.MIN.value, EntropyKind.SHANNON.value, EntropyKind.MAX.value],
        default=EntropyKind.MIN.value,
    )
    p.set_defaults(handler=cmd_vbe_estimate)
    p = vbe.add_parser("example", parents=[common])
    p.add_argument("--whale-share", type=float, default=0.126)
    p.set_defaults(handler=cmd_vbe_example)

    transform = groups.add_parser("transform").add_subparsers(dest="command", required=True, parser_class=Parser)
    p = transform.add_parser("apply", parents=[common])
    p.add_argument("--scenario", required=True)
    p.add_argument("--transform", required=True)
    p.set_defaults(handler=cmd_transform_apply)

    theorems = groups.add_parser("theorems").add_subparsers(dest="command", required=True, parser_class=Parser)
    p = theorems.add_parser("check", parents=[common])
    p.add_argument("--scenario", required=True)
    p.add_argument("--transform", required=True)
    p.add_argument("--theorem", required=True)
    p.set_defaults(handler=cmd_theorems_check)
    p = theorems.add_parser("sweep", parents=[common])
    p.add_argument("--theorem", required=True)
    p.add_argument("--count", type=int, default=1000)
    p.set_defaults(handler=cmd_theorems_sweep)

    bribe = groups.add_parser("bribery").add_subparsers(dest="command", required=True, parser_class=Parser)
    p = bribe.add_parser("scale", parents=[common])
    p.add_argument("--scenario", required=True)
    p.set_defaults(handler=cmd_bribery_scale)
    p = bribe.add_parser("flip-cost", parents=[common])
    p.add_argument("--utility", type=float, required=True)
    p.add_argument("--desired", choices=[o.value for o in Outcome], default=Outcome.TRUE.value)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.set_defaults(handler=cmd_bribery_flip_cost)
    p = bribe.add_parser("pivotal", parents=[common])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--utility", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--accept", default=None, help="comma-separated acceptance flags, one per voter")
    p.set_defaults(handler=cmd_bribery_pivotal)
    p = bribe.add_parser("qv", parents=[common])
    p.add_argument("--scenario", required=True)
    p.add_argument("--desired", choices=[o.value for o in Outcome], default=Outcome.TRUE.value)
    p.set_defaults(handler=cmd_bribery_qv)
    p = bribe.add_parser("sybil-amplification", parents=[common])
    p.add_argument("--whale-tokens", type=float, required=True)
    p.add_argument("--accounts", type=int, required=True)
    p.set_defaults(handler=cmd_bribery_sybil)

    darkdao = groups.add_parser("darkdao").add_subparsers(dest="command", required=True, parser_class=Parser)
    p = darkdao.add_parser("run", parents=[common])
    p.add_argument("script")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(handler=cmd_darkdao_run)
    p = darkdao.add_parser("enumerate", parents=[common])
    p.add_argument("--policy", choices=[x.value for x in SelectionPolicy], default=SelectionPolicy.LIFO.value)
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--victims", type=int, required=True)
    p.add_argument("--lockup", type=int, default=0)
    p.set_defaults(handler=cmd_darkdao_enumerate)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    configure_logging(settings.log_level)
    try:
        args = build_parser().parse_args(argv)
        return args.handler(args)
    except UsageError as e:
        sys.stderr.write(f"{e}\n")
        return EXIT_INPUT
    except VBELabException as e:
        sys.stderr.write(f"error [{e.code}]: {e.message}\n")
        return EXIT_INPUT
    except ValidationError as e:
        sys.stderr.write(f"error [invalid-input]: {e}\n")
        return EXIT_INPUT
    except (OSError, json.JSONDecodeError) as e:
        sys.stderr.write(f"error [io]: {e}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
