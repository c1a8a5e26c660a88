# Copyright © 2025 The linsys developers

"""
Command line interface.

::

    linsys closure-check triple.json
    linsys test --model model.json --data data.csv --method screening
    linsys test --design goff --n 5000 --value 0.62 --seed 3
    linsys invert --design goff --n 5000 --grid 0.40:0.85:0.005 --refine
    linsys simulate --design cox --H 10 --n 2000 --reps 1000 --grid -1:1:0.1
    linsys plot curve.csv --design cox --out curve.svg

Exit codes: 0 success (member of the closure, no rejection), 3 rejection,
4 not a member of the closure, 64 usage error, 65 data error, 70 numerical
failure.
"""

from dataclasses import dataclass
from dataclasses import fields
from typing import Optional
from typing import Tuple
import argparse
import json
import logging
import math
import os
import sys

import numpy as np
import pandas as pd

from . import _meta
from ._random import derive_seed
from .closure import Triple
from .closure import member_closure
from .confidence import SeedPolicy
from .confidence import invert_ci
from .designs import DesignKind
from .designs import DesignSpec
from .designs import identified_set
from .direction import CnRegime
from .direction import Method
from .direction import MethodChoice
from .exceptions import ModelSpecError
from .exceptions import NumericalError
from .exceptions import ReplicationError
from .moments import SIGMA_FLOOR
from .moments import MomentModel
from .plotting import plot_rejection_curve
from .simulation import RejectionCurve
from .simulation import monte_carlo
from .split_test import SplitSampleTest
from .split_test import TestOptions

__all__ = [
    "EX_OK",
    "EX_REJECT",
    "EX_NONMEMBER",
    "EX_USAGE",
    "EX_DATAERR",
    "EX_SOFTWARE",
    "RunConfig",
    "parse_grid",
    "build_parser",
    "cmd_closure_check",
    "cmd_test",
    "cmd_invert",
    "cmd_simulate",
    "cmd_plot",
    "main",
]

logger = logging.getLogger(__name__)

EX_OK = 0
EX_REJECT = 3
EX_NONMEMBER = 4
EX_USAGE = 64
EX_DATAERR = 65
EX_SOFTWARE = 70

COMMANDS = ("closure-check", "test", "invert", "simulate", "plot")
_GRID_OPTIONS = ("--grid",)


class _ArgumentParser(argparse.ArgumentParser):
    """argparse parser that exits with 64 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, "{0}: error: {1}\n".format(self.prog, message))


def parse_grid(text) -> Tuple[float, ...]:
    """Parse ``lo:hi:step`` (both ends included) or a comma-separated list.

    >>> from linsys.cli import parse_grid
    >>> len(parse_grid("-1:1:0.1"))
    21
    >>> parse_grid("0.5, 0.6")
    (0.5, 0.6)
    """
    _text = str(text).strip()
    try:
        if ":" in _text:
            _lo, _hi, _step = (float(_s) for _s in _text.split(":"))
            if not _step > 0:
                raise argparse.ArgumentTypeError(
                    "grid step must be positive, cannot be {0}".format(_step)
                )
            if _hi < _lo:
                raise argparse.ArgumentTypeError(
                    "grid end {0} is below its start {1}".format(_hi, _lo)
                )
            _count = int(math.floor((_hi - _lo) / _step + 1e-9)) + 1
            _grid = np.round(_lo + _step * np.arange(_count), 12)
        else:
            _grid = [float(_s) for _s in _text.split(",") if _s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            "grid must be lo:hi:step or a comma-separated list, cannot be "
            "{0!r}".format(_text)
        ) from None
    if len(_grid) == 0:
        raise argparse.ArgumentTypeError("grid is empty")
    return tuple(float(_v) for _v in _grid)


def _normalize_argv(argv):
    # "--grid -1:1:0.1" would otherwise be read as an option
    _out = []
    _i = 0
    while _i < len(argv):
        _token = argv[_i]
        if _token in _GRID_OPTIONS and _i + 1 < len(argv):
            _out.append("{0}={1}".format(_token, argv[_i + 1]))
            _i += 2
            continue
        _out.append(_token)
        _i += 1
    return _out


@dataclass(frozen=True)
class RunConfig:
    """Validated settings of one command line invocation.

    Built from the parsed arguments by :meth:`from_namespace`; invalid
    settings raise :class:`ValueError`, reported as a usage error.
    """

    # pylint: disable=too-many-instance-attributes

    command: str
    method: Optional[str] = None
    j_star: Optional[int] = None
    alpha: float = 0.05
    seed: int = 0
    splits: int = 1
    sigma_floor: float = SIGMA_FLOOR
    cn_regime: str = "high"
    rank_tau: float = 0.0
    out: Optional[str] = None
    fmt: Optional[str] = None
    verbose: int = 0
    triple: Optional[str] = None
    model: Optional[str] = None
    data: Optional[str] = None
    design: Optional[str] = None
    H: Optional[int] = None
    n: Optional[int] = None
    value: Optional[float] = None
    reps: Optional[int] = None
    grid: Optional[Tuple[float, ...]] = None
    refine: bool = False
    seed_policy: str = "shared"
    jobs: int = -1
    curve: Optional[str] = None
    title: Optional[str] = None

    def __post_init__(self):
        self._check_params()

    @classmethod
    def from_namespace(cls, namespace):
        _known = {_f.name for _f in fields(cls)}
        return cls(
            **{
                _k: _v
                for _k, _v in vars(namespace).items()
                if _k in _known and _v is not None
            }
        )

    def _check_params(self):
        """Check validity of settings, raising errors if they are invalid."""
        if self.command not in COMMANDS:
            raise ValueError(
                "command must be one of {0}, cannot be {1}".format(
                    COMMANDS, self.command
                )
            )
        if not 0.0 < self.alpha < 0.5:
            raise ValueError(
                "alpha must be in (0, 0.5), cannot be {0}".format(self.alpha)
            )
        if self.splits < 1:
            raise ValueError(
                "splits must be a positive integer, cannot be {0}".format(self.splits)
            )
        if self.seed < 0:
            raise ValueError(
                "seed must be non-negative, cannot be {0}".format(self.seed)
            )
        if not self.sigma_floor > 0:
            raise ValueError(
                "sigma floor must be positive, cannot be {0}".format(self.sigma_floor)
            )
        if self.rank_tau < 0:
            raise ValueError(
                "rank tau must be non-negative, cannot be {0}".format(self.rank_tau)
            )
        if self.fmt not in (None, "json", "csv"):
            raise ValueError(
                "format must be json or csv, cannot be {0}".format(self.fmt)
            )
        if self.fmt == "csv" and self.command in ("closure-check", "test"):
            raise ValueError("{0} only writes json".format(self.command))
        if self.j_star is not None and self.method != "screening":
            raise ValueError("--jstar only applies to the screening method")

        for _path in (self.triple, self.model, self.data, self.curve):
            if _path is not None and _path != "-" and not os.path.isfile(_path):
                raise ValueError("cannot read {0}".format(_path))
        if self.out is not None:
            _dir = os.path.dirname(os.path.abspath(self.out))
            if not os.path.isdir(_dir):
                raise ValueError("cannot write {0}".format(self.out))

        if self.command in ("test", "invert"):
            if self.design is None and (self.model is None or self.data is None):
                raise ValueError(
                    "{0} needs --design or both --model and --data".format(self.command)
                )
            if self.design is not None and self.model is not None:
                raise ValueError("--design and --model are mutually exclusive")
        if self.command in ("simulate", "invert") and self.grid is None:
            raise ValueError("{0} needs --grid".format(self.command))
        if self.command == "simulate":
            if self.design is None or self.n is None or self.reps is None:
                raise ValueError("simulate needs --design, --n and --reps")
            if self.splits != 1:
                raise ValueError("simulate runs a single split per replication")
        if self.command == "invert" and self.splits != 1:
            raise ValueError("invert runs a single split per grid value")
        if self.command == "test" and self.design is not None:
            if self.n is None or self.value is None:
                raise ValueError("test --design needs --n and --value")
        if self.design is not None and self.command != "plot" and self.n is None:
            raise ValueError("--design needs --n")
        if self.command == "plot" and self.out is None:
            raise ValueError("plot needs --out")

    def method_choice(self, kind=None) -> MethodChoice:
        _kind = Method(kind or self.method or "direct")
        return MethodChoice(
            kind=_kind,
            j_star=self.j_star if _kind is Method.SCREENING else None,
            cn_regime=CnRegime(self.cn_regime),
        )

    def options(self) -> TestOptions:
        return TestOptions(sigma_floor=self.sigma_floor, rank_tau=self.rank_tau)


def _read_text(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as _fh:
        return _fh.read()


def _read_json(path):
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as _err:
        raise ModelSpecError(
            "{0}:{1}:{2}: malformed JSON: {3}".format(
                path, _err.lineno, _err.colno, _err.msg
            )
        ) from None


def _read_data(path):
    try:
        return pd.read_csv(sys.stdin if path == "-" else path)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as _err:
        raise ModelSpecError("{0}: {1}".format(path, _err)) from None


def _emit(config, text):
    if config.out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
        return
    with open(config.out, "w", encoding="utf-8") as _fh:
        _fh.write(text)
    logger.info("wrote %s", config.out)


def _data_and_model(config):
    """Observations and model of ``test``/``invert`` plus the split seed."""
    if config.design is None:
        _model = MomentModel.from_dict(_read_json(config.model))
        if config.value is not None:
            _model = _model.with_null_value(config.value)
        return _read_data(config.data), _model, config.seed
    _value = config.value if config.value is not None else config.grid[0]
    _data, _model = DesignSpec(
        kind=config.design,
        n=config.n,
        hypothesized_value=_value,
        seed=config.seed,
        H=config.H,
    ).generate()
    # data and split draw from separate streams
    return _data, _model, derive_seed(config.seed, 1)


def cmd_closure_check(config) -> int:
    """Print the :class:`linsys.closure.MembershipReport` of a triple JSON."""
    _triple = Triple.from_dict(_read_json(config.triple))
    _report = member_closure(_triple)
    _emit(config, json.dumps(_report.to_dict(), indent=2))
    return EX_OK if _report.in_closure else EX_NONMEMBER


def cmd_test(config) -> int:
    """Run :class:`linsys.split_test.SplitSampleTest` and print the outcome."""
    _data, _model, _seed = _data_and_model(config)
    _choice = config.method_choice()
    _test = SplitSampleTest(
        model=_model,
        method=_choice.kind.value,
        j_star=_choice.j_star,
        alpha=config.alpha,
        seed=_seed,
        n_splits=config.splits,
        sigma_floor=config.sigma_floor,
        rank_tau=config.rank_tau,
        cn_regime=config.cn_regime,
    ).fit(_data)
    _emit(config, _test.outcome_.to_json())
    return EX_REJECT if _test.reject_ else EX_OK


def cmd_invert(config) -> int:
    """Print the confidence set over ``--grid``."""
    _data, _model, _seed = _data_and_model(config)
    _cs = invert_ci(
        _model,
        _data,
        grid=config.grid,
        method=config.method_choice(),
        alpha=config.alpha,
        seed=_seed,
        seed_policy=SeedPolicy(config.seed_policy),
        options=config.options(),
        refine=config.refine,
        n_jobs=config.jobs,
    )
    if config.fmt == "csv":
        _emit(config, _cs.to_frame().to_csv(index=False))
    else:
        _emit(config, _cs.to_json())
    return EX_OK


def cmd_simulate(config) -> int:
    """Write the rejection curve of a built-in design."""
    if config.method is None:
        _methods = (config.method_choice("direct"), config.method_choice("screening"))
    else:
        _methods = (config.method_choice(),)
    _curve = monte_carlo(
        DesignKind(config.design),
        grid=config.grid,
        reps=config.reps,
        n=config.n,
        methods=_methods,
        alpha=config.alpha,
        base_seed=config.seed,
        H=config.H,
        options=config.options(),
        n_jobs=config.jobs,
    )
    if config.fmt == "json":
        _emit(config, json.dumps(_curve.to_dict(), indent=2))
    else:
        _emit(config, _curve.to_csv())
    return EX_OK


def cmd_plot(config) -> int:
    """Render a rejection curve CSV to SVG."""
    _curve = RejectionCurve.from_csv(
        sys.stdin if config.curve == "-" else config.curve
    )
    plot_rejection_curve(
        _curve,
        path=config.out,
        identified_set=None if config.design is None else identified_set(config.design),
        alpha=config.alpha,
        title=config.title,
    )
    return EX_OK


_HANDLERS = {
    "closure-check": cmd_closure_check,
    "test": cmd_test,
    "invert": cmd_invert,
    "simulate": cmd_simulate,
    "plot": cmd_plot,
}


def build_parser():
    """The ``linsys`` argument parser."""
    _common = argparse.ArgumentParser(add_help=False)
    _common.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="INFO logging, -vv for DEBUG",
    )
    _common.add_argument("--out", help="output path (default: stdout)")
    _common.add_argument("--format", dest="fmt", choices=("json", "csv"))

    _testing = argparse.ArgumentParser(add_help=False)
    _testing.add_argument("--method", choices=[_m.value for _m in Method])
    _testing.add_argument(
        "--jstar",
        dest="j_star",
        type=int,
        help="column kept by the screening method (default: d1 + 1)",
    )
    _testing.add_argument("--alpha", type=float, default=0.05)
    _testing.add_argument("--seed", type=int, default=0)
    _testing.add_argument("--splits", type=int, default=1)
    _testing.add_argument(
        "--sigma-floor", dest="sigma_floor", type=float, default=SIGMA_FLOOR
    )
    _testing.add_argument(
        "--cn",
        dest="cn_regime",
        choices=[_r.value for _r in CnRegime],
        default="high",
    )
    _testing.add_argument("--rank-tau", dest="rank_tau", type=float, default=0.0)

    _designs = [_k.value for _k in DesignKind]

    _parser = _ArgumentParser(
        prog="linsys",
        description="Test whether an estimated linear system has a solution "
        "with non-negative components.",
    )
    _parser.add_argument(
        "--version", action="version", version="%(prog)s " + _meta.__version__
    )
    _sub = _parser.add_subparsers(dest="command", metavar="command")
    _sub.required = True

    _closure = _sub.add_parser(
        "closure-check",
        parents=[_common],
        help="membership of a known triple in the closure",
    )
    _closure.add_argument("triple", help="triple JSON ({a0, a1, beta}), - for stdin")

    for _name, _help in (
        ("test", "run the sample-splitting test"),
        ("invert", "confidence set by test inversion"),
    ):
        _p = _sub.add_parser(_name, parents=[_common, _testing], help=_help)
        _p.add_argument("--model", help="moment model JSON")
        _p.add_argument("--data", help="observations CSV with named columns")
        _p.add_argument("--design", choices=_designs)
        _p.add_argument("--H", dest="H", type=int)
        _p.add_argument("--n", type=int)
        _p.add_argument("--value", type=float, help="hypothesized value")
    _invert = _sub.choices["invert"]
    _invert.add_argument("--grid", type=parse_grid)
    _invert.add_argument("--refine", action="store_true")
    _invert.add_argument(
        "--seed-policy",
        dest="seed_policy",
        choices=[_s.value for _s in SeedPolicy],
        default="shared",
    )
    _invert.add_argument("--jobs", type=int, default=-1)

    _simulate = _sub.add_parser(
        "simulate",
        parents=[_common, _testing],
        help="Monte Carlo rejection curve of a built-in design",
    )
    _simulate.add_argument("--design", choices=_designs)
    _simulate.add_argument("--H", dest="H", type=int)
    _simulate.add_argument("--n", type=int)
    _simulate.add_argument("--reps", type=int)
    _simulate.add_argument("--grid", type=parse_grid)
    _simulate.add_argument("--jobs", type=int, default=-1)

    _plot = _sub.add_parser("plot", parents=[_common], help="SVG of a rejection curve")
    _plot.add_argument("curve", help="rejection curve CSV, - for stdin")
    _plot.add_argument("--design", choices=_designs, help="shade its identified set")
    _plot.add_argument("--alpha", type=float, default=0.05)
    _plot.add_argument("--title")
    return _parser


def _configure_logging(verbose):
    if _meta.DEBUG or verbose >= 2:
        _level = logging.DEBUG
    elif verbose == 1:
        _level = logging.INFO
    else:
        _level = logging.WARNING
    logging.basicConfig(
        level=_level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr
    )


def _fail(code, message):
    print("linsys: error: {0}".format(message), file=sys.stderr)
    return code


def main(argv=None) -> int:
    """Entry point of the ``linsys`` command; returns the exit code."""
    _argv = _normalize_argv(sys.argv[1:] if argv is None else list(argv))
    _parser = build_parser()
    _args = _parser.parse_args(_argv)
    _configure_logging(_args.verbose)

    try:
        _config = RunConfig.from_namespace(_args)
    except ValueError as _err:
        _parser.print_usage(sys.stderr)
        return _fail(EX_USAGE, _err)

    try:
        return _HANDLERS[_config.command](_config)
    except ModelSpecError as _err:
        return _fail(EX_DATAERR, _err)
    except OSError as _err:
        return _fail(EX_DATAERR, _err)
    except (NumericalError, ReplicationError) as _err:
        return _fail(EX_SOFTWARE, _err)
    except ValueError as _err:
        return _fail(EX_USAGE, _err)
