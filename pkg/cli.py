"""
유한 semiring, profinite 공간 위의 측도, Stone 쌍대성을 검사하는 명령행 도구.

사용 예:
  # semiring 공리 검사 (위반 시 종료코드 1, 보고서에 반례 포함)
  python3 cli.py semiring check data/broken_z2.json
  python3 cli.py semiring check trop_trunc:2 --format json
  python3 cli.py semiring builtins

  # 공간과 측도
  python3 cli.py space validate cantor --depth 6
  python3 cli.py measure eval data/measure_trop.json --clopen '{"level": 2, "cells": ["01", "11"]}'
  python3 cli.py measure pushforward data/measure_trop.json --map data/map_shift.json
  python3 cli.py measure witness data/witness_request.json

  # 멱등 semiring: 밀도 함수와 왕복 검사
  python3 cli.py density compute data/measure_trop.json --point '{"bits": "01", "tail": 1}'
  python3 cli.py roundtrip check --semiring trop_trunc:2 --space cantor --depth 5 --cases 1000 --seed 7

  # 유한 Stone 쌍대성, monad 법칙, 전체 속성 검사
  python3 cli.py duality report --size 2 --semiring bool2
  python3 cli.py monad laws --semiring zmod:3 --max-base 2
  python3 cli.py props run --suite galois --suite vietoris

종료코드:
  0  모든 검사 통과
  1  검사한 성질이 실패 (보고서에 witness)
  2  사용법 오류, descriptor 오류
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import Any, Callable, Dict, Optional, Sequence, Type, TypeVar

from pydantic import BaseModel, ValidationError

from config import load_settings
from descriptors import (
    ClopenDescriptor,
    ContinuousMapDescriptor,
    PointDescriptor,
    SemimoduleDescriptor,
    WitnessRequest,
    load_json,
    load_measure,
    resolve_semiring,
    resolve_space,
)
from errors import DescriptorError, ProfsemError
from idempotent_density import density, density_preimage, eval_pointwise
from measures import Unsatisfiable, check_compatibility, density_witness, eval_measure, integrate, pushforward
from oracles import SUITES, SuiteParams, roundtrip_checks, run_suites
from profinite_space import least_point, validate_map, validate_system
from reports import CheckResult, Report, emit_report
from semiring import BUILTIN_NAMES, builtin, natural_order, validate_semimodule, validate_semiring
from semiring_monad import check_algebra_laws, check_monad_laws
from stone_duality import bijection_report

logger = logging.getLogger(__name__)

M = TypeVar("M", bound=BaseModel)


def _add_common_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--depth", type=int, default=None, help="검사 깊이 (기본: PROFSEM_DEPTH)")
    parser.add_argument("--cases", type=int, default=None, help="seed 기반 케이스 수 (기본: PROFSEM_CASES)")
    parser.add_argument("--seed", type=int, default=None, help="난수 seed (기본: PROFSEM_SEED)")
    parser.add_argument("--budget", type=int, default=None, help="전수 열거 상한 (기본: PROFSEM_BUDGET)")
    parser.add_argument("--format", choices=["text", "json"], default="text", help="보고서 형식")
    parser.add_argument("--log-level", default=None, help="로그 레벨 (기본: PROFSEM_LOG_LEVEL)")
    parser.add_argument("--sampled", action="store_true", help="밀도 witness 목록을 전수 대신 --cases개 표본으로 검사")


def _non_negative(value: str) -> int:
    n = int(value)
    if n < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="profsem",
        description="Finite semirings, measures on profinite spaces and their finite-stage checks.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    groups = parser.add_subparsers(dest="group", required=True)

    semiring_p = groups.add_parser("semiring", help="semiring 공리 검사와 builtin 목록")
    semiring_sub = semiring_p.add_subparsers(dest="command", required=True)
    check_p = semiring_sub.add_parser("check", help="descriptor 또는 builtin 이름의 공리 검사")
    check_p.add_argument("semiring", help="descriptor 경로 또는 builtin (예: zmod:3)")
    check_p.add_argument("--module", default=None, help="함께 검사할 semimodule descriptor")
    _add_common_args(check_p)
    builtins_p = semiring_sub.add_parser("builtins", help="builtin semiring 검사")
    builtins_p.add_argument("--max-param", type=int, default=4, help="매개변수 상한 (기본 4)")
    _add_common_args(builtins_p)

    space_p = groups.add_parser("space", help="profinite 공간 검사")
    space_sub = space_p.add_subparsers(dest="command", required=True)
    validate_p = space_sub.add_parser("validate", help="전이 사상의 전사성 검사")
    validate_p.add_argument("space", help="descriptor 경로 또는 cantor | nat_infty | finite:k | depth_product:k1,k2")
    validate_p.add_argument("--map", default=None, help="함께 검사할 연속사상 descriptor")
    _add_common_args(validate_p)

    measure_p = groups.add_parser("measure", help="측도 계산")
    measure_sub = measure_p.add_subparsers(dest="command", required=True)
    eval_p = measure_sub.add_parser("eval", help="clopen 위의 값")
    eval_p.add_argument("measure", help="measure descriptor 경로")
    eval_p.add_argument("--clopen", action="append", default=[], help="clopen JSON 또는 경로 (반복 가능)")
    eval_p.add_argument("--stages", action="store_true", help="깊이까지의 stage 값 포함")
    _add_common_args(eval_p)
    push_p = measure_sub.add_parser("pushforward", help="연속사상을 따른 pushforward")
    push_p.add_argument("measure", help="measure descriptor 경로")
    push_p.add_argument("--map", required=True, help="연속사상 descriptor (JSON 또는 경로)")
    _add_common_args(push_p)
    witness_p = measure_sub.add_parser("witness", help="subbasic 제약을 만족하는 유한 지지 함수")
    witness_p.add_argument("request", help="witness request descriptor 경로")
    _add_common_args(witness_p)

    density_p = groups.add_parser("density", help="멱등 semiring 측도의 밀도 함수")
    density_sub = density_p.add_subparsers(dest="command", required=True)
    compute_p = density_sub.add_parser("compute", help="점별 밀도 값")
    compute_p.add_argument("measure", help="measure descriptor 경로")
    compute_p.add_argument("--point", action="append", default=[], help="point JSON 또는 경로 (반복 가능)")
    compute_p.add_argument("--down-set", default=None, help="역상을 계산할 down-set (예: 0,1)")
    _add_common_args(compute_p)

    roundtrip_p = groups.add_parser("roundtrip", help="측도와 밀도 함수의 왕복")
    roundtrip_sub = roundtrip_p.add_subparsers(dest="command", required=True)
    rt_check_p = roundtrip_sub.add_parser("check", help="seed 기반 왕복 검사")
    rt_check_p.add_argument("--semiring", required=True, help="멱등 semiring (예: trop_trunc:2)")
    rt_check_p.add_argument("--space", default="cantor", help="공간 (기본 cantor)")
    _add_common_args(rt_check_p)

    duality_p = groups.add_parser("duality", help="유한 Stone 쌍대성")
    duality_sub = duality_p.add_subparsers(dest="command", required=True)
    report_p = duality_sub.add_parser("report", help="atom과 S^X의 전단사 검사")
    report_p.add_argument("--size", type=_non_negative, required=True, help="이산 공간 X의 크기")
    report_p.add_argument("--semiring", required=True, help="semiring (예: bool2)")
    _add_common_args(report_p)

    monad_p = groups.add_parser("monad", help="semiring monad")
    monad_sub = monad_p.add_subparsers(dest="command", required=True)
    laws_p = monad_sub.add_parser("laws", help="단위, 결합, 자연성 법칙")
    laws_p.add_argument("--semiring", required=True, help="semiring (예: zmod:3)")
    laws_p.add_argument("--max-base", type=_non_negative, default=2, help="기저 집합 크기 상한 (기본 2)")
    laws_p.add_argument("--module", default=None, help="algebra 법칙을 검사할 semimodule descriptor")
    _add_common_args(laws_p)

    props_p = groups.add_parser("props", help="속성 검사 묶음")
    props_sub = props_p.add_subparsers(dest="command", required=True)
    run_p = props_sub.add_parser("run", help="이름으로 suite 실행 (기본: 전체)")
    run_p.add_argument("--suite", action="append", choices=sorted(SUITES), default=None, help="suite 이름 (반복 가능)")
    _add_common_args(run_p)
    return parser


def _inline_or_file(text: str, model: Type[M]) -> M:
    """A JSON literal, or a path to a JSON file."""
    if os.path.isfile(text):
        return load_json(text, model)
    try:
        return model.model_validate(json.loads(text))
    except json.JSONDecodeError as exc:
        raise DescriptorError(f"neither a file nor JSON: {exc.msg}", location=text) from exc
    except ValidationError as exc:
        first = exc.errors()[0]
        raise DescriptorError(first["msg"], location=".".join(str(p) for p in first["loc"]) or text) from exc


def _params(args: argparse.Namespace) -> SuiteParams:
    return SuiteParams.from_settings(
        depth=args.depth,
        cases=args.cases,
        seed=args.seed,
        budget=args.budget,
        exhaustive=not args.sampled,
        progress=sys.stderr.isatty(),
    )


def cmd_semiring_check(args: argparse.Namespace, params: SuiteParams) -> Report:
    s = resolve_semiring(args.semiring)
    report = Report("semiring check", meta={"semiring": s.label, "size": s.size})
    validation = validate_semiring(s)
    report.add(CheckResult.from_validation("axioms", validation))
    if validation.passed and s.is_idempotent:
        report.meta["natural_order"] = natural_order(s).to_dict()
    if args.module:
        module = load_json(args.module, SemimoduleDescriptor).build(os.path.dirname(args.module))
        report.add(CheckResult.from_validation(f"module:{module.label}", validate_semimodule(module)))
    return report


def cmd_semiring_builtins(args: argparse.Namespace, params: SuiteParams) -> Report:
    report = Report("semiring builtins", meta={"names": list(BUILTIN_NAMES)})
    # zmod(1) collapses 0 and 1
    first = {"zmod": 2, "trop_trunc": 1, "nat_sat": 1}
    instances = [builtin("bool2")]
    instances += [builtin(name, p) for name in BUILTIN_NAMES[1:] for p in range(first[name], first[name] + args.max_param)]
    for s in instances:
        check = CheckResult.from_validation(s.label, validate_semiring(s), size=s.size, idempotent=s.is_idempotent)
        report.add(check)
    return report


def cmd_space_validate(args: argparse.Namespace, params: SuiteParams) -> Report:
    space = resolve_space(args.space)
    depth = min(params.depth, space.certified_depth)
    report = Report("space validate", meta={"space": space.label, "depth": depth})
    report.meta["level_sizes"] = [space.level_size(n) for n in range(depth + 1)]
    report.add(CheckResult.from_validation("inverse_system", validate_system(space, depth)))
    if args.map:
        h = _inline_or_file(args.map, ContinuousMapDescriptor).build(space)
        report.add(CheckResult.from_validation(f"map:{h.label}", validate_map(h, depth)))
    return report


def cmd_measure_eval(args: argparse.Namespace, params: SuiteParams) -> Report:
    m = load_measure(args.measure)
    depth = min(params.depth, m.certified_depth)
    report = Report("measure eval", meta={"measure": repr(m), "depth": depth})
    bad = check_compatibility(m, depth)
    report.add(CheckResult("compatible", "fail" if bad else "pass", {"depth": depth}, bad))
    for text in args.clopen:
        b = _inline_or_file(text, ClopenDescriptor).build(m.space)
        value = eval_measure(m, b)
        report.add(CheckResult(f"eval:{b.level}:{','.join(b.names())}", "pass", {"level": b.level, "cells": b.names(), "value": m.semiring.name(value)}))
    if args.stages:
        report.meta["stages"] = {str(n): m.stage_dict(n) for n in range(depth + 1)}
    return report


def cmd_measure_pushforward(args: argparse.Namespace, params: SuiteParams) -> Report:
    m = load_measure(args.measure)
    h = _inline_or_file(args.map, ContinuousMapDescriptor).build(m.space)
    pushed = pushforward(m, h)
    depth = min(params.depth, pushed.certified_depth)
    report = Report("measure pushforward", meta={"map": repr(h), "depth": depth})
    report.add(CheckResult.from_validation(f"map:{h.label}", validate_map(h, depth)))
    bad = check_compatibility(pushed, depth)
    details: Dict[str, Any] = {"provenance": pushed.provenance, "stages": {str(n): pushed.stage_dict(n) for n in range(depth + 1)}}
    report.add(CheckResult("pushforward", "fail" if bad else "pass", details, bad))
    return report


def cmd_measure_witness(args: argparse.Namespace, params: SuiteParams) -> Report:
    request = load_json(args.request, WitnessRequest)
    space, s, constraints = request.build(os.path.dirname(args.request))
    report = Report("measure witness", meta={"space": space.label, "semiring": s.label, "constraints": len(constraints)})
    found = density_witness(constraints, space, s, budget=params.budget)
    if isinstance(found, Unsatisfiable):
        report.add(CheckResult("satisfiable", "fail", found.to_dict(), found.to_dict()))
        return report
    values = [s.name(eval_measure(integrate(found), c.clopen)) for c in constraints]
    report.add(CheckResult("satisfiable", "pass", {**found.to_dict(), "values": values}))
    return report


def cmd_density_compute(args: argparse.Namespace, params: SuiteParams) -> Report:
    m = load_measure(args.measure)
    f = density(m)
    depth = min(params.depth, f.certified_depth)
    s, space = f.semiring, f.space
    report = Report("density compute", meta={"measure": repr(m), "depth": depth, "exact": f.exact})
    cells = {}
    for c in range(space.level_size(depth)):
        value = eval_pointwise(f, least_point(space, depth, c), f.certified_depth)
        cells[space.cell_name(depth, c)] = s.name(value.value)
    report.add(CheckResult("least_threads", "pass", {"level": depth, "values": cells}))
    for text in args.point:
        p = _inline_or_file(text, PointDescriptor).build(space)
        value = eval_pointwise(f, p, f.certified_depth)
        report.add(CheckResult(f"point:{p.describe()}", "pass", {"value": s.name(value.value), "flag": value.flag, "level": value.level}))
    if args.down_set is not None:
        members = [s.index(v.strip()) for v in args.down_set.split(",") if v.strip()]
        pre = density_preimage(f, members, depth)
        report.add(CheckResult("preimage", "pass", {"down_set": s.names(members), "level": pre.level, "cells": pre.names()}))
    return report


def cmd_roundtrip_check(args: argparse.Namespace, params: SuiteParams) -> Report:
    s = resolve_semiring(args.semiring)
    space = resolve_space(args.space)
    natural_order(s)  # not idempotent -> NotIdempotentError before any case runs
    report = Report("roundtrip check", meta={"semiring": s.label, "space": space.label, "depth": params.depth, "cases": params.cases, "seed": params.seed})
    report.extend(roundtrip_checks(s, space, params))
    return report


def cmd_duality_report(args: argparse.Namespace, params: SuiteParams) -> Report:
    s = resolve_semiring(args.semiring)
    result = bijection_report(args.size, s, budget=params.budget, samples=params.cases, seed=params.seed)
    report = Report("duality report", meta={"points": args.size, "semiring": s.label, **result.to_dict()})
    check = CheckResult.from_validation("bijection", result)
    if result.partial and check.status == "pass":
        check.status = "partial"
    report.add(check)
    return report


def cmd_monad_laws(args: argparse.Namespace, params: SuiteParams) -> Report:
    s = resolve_semiring(args.semiring)
    report = Report("monad laws", meta={"semiring": s.label, "max_base_size": args.max_base})
    report.extend(check_monad_laws(s, args.max_base, budget=params.budget, samples=params.cases, seed=params.seed))
    if args.module:
        module = load_json(args.module, SemimoduleDescriptor).build(os.path.dirname(args.module))
        report.extend(check_algebra_laws(module, budget=params.budget, samples=params.cases, seed=params.seed))
    return report


def cmd_props_run(args: argparse.Namespace, params: SuiteParams) -> Report:
    names = args.suite or list(SUITES)
    report = Report("props run", meta={"suites": names, "depth": params.depth, "cases": params.cases, "seed": params.seed})
    report.extend(run_suites(names, params))
    return report


COMMANDS: Dict[tuple[str, str], Callable[[argparse.Namespace, SuiteParams], Report]] = {
    ("semiring", "check"): cmd_semiring_check,
    ("semiring", "builtins"): cmd_semiring_builtins,
    ("space", "validate"): cmd_space_validate,
    ("measure", "eval"): cmd_measure_eval,
    ("measure", "pushforward"): cmd_measure_pushforward,
    ("measure", "witness"): cmd_measure_witness,
    ("density", "compute"): cmd_density_compute,
    ("roundtrip", "check"): cmd_roundtrip_check,
    ("duality", "report"): cmd_duality_report,
    ("monad", "laws"): cmd_monad_laws,
    ("props", "run"): cmd_props_run,
}


def main(argv: Optional[Sequence[str]] = None, stdout: Any = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    settings = load_settings()
    level = (args.log_level or settings.log_level).upper()
    if not isinstance(logging.getLevelName(level), int):
        level = "WARNING"
    logging.basicConfig(
        level=level,
        format="[%(levelname)s] %(name)s: %(message)s",
        stream=sys.stderr,
    )
    stream = stdout or sys.stdout
    if args.depth is not None and args.depth < 0:
        print("[error] --depth must be >= 0", file=sys.stderr)
        return 2

    try:
        params = _params(args)
        report = COMMANDS[(args.group, args.command)](args, params)
    except DescriptorError as exc:
        print(f"[error] descriptor: {exc}", file=sys.stderr)
        return 2
    except ProfsemError as exc:
        print(f"[error] {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2

    emit_report(report, args.format, stream)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
