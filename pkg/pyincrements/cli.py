"""
This module provides the command-line entry point. Each subcommand is
a :py:class:`Command` subclass whose options are gathered from the
``ArgumentParser`` objects assigned to its class attributes, the same
way for every command:

::

  pyincrements simulate --model arch1 --alpha 0.2 --omega 0.5 --n 100000 --out a.csv
  pyincrements diagnose --input a.csv --window 1000 --out diagnostics.json
  pyincrements fit --input a.csv --model garch11 --lags 1,2
  pyincrements falsify --input a.csv --window 1000 --lags 1,2,4 --plots plots/

Exit codes are those of :py:mod:`pyincrements.status`. Diagnostics go
to standard error; reports and series go to ``--out`` or standard
output.
"""

import logging
import os
import sys
from argparse import ArgumentParser, ArgumentTypeError, RawDescriptionHelpFormatter
from copy import copy
from dataclasses import dataclass
from typing import Optional

from six import with_metaclass

from . import falsify, model_fit
from .binspec import DEFAULT_BINS, BinSpec
from .data_io import read_levels_csv, write_levels_csv
from .errors import PyIncrementsError, UsageError
from .generators import (DEFAULT_SEED, MODELS, Noise, NoiseSpec, gen_arch1, gen_fbm,
                         gen_garch11, gen_scaled_wiener, gen_wiener, params_dict)
from .plot_data import PlotDataset, emit_plot_data, format_number
from .report import Report, write_report
from .series_core import PriceSeries, detrend, ensemble_split, increments, log_returns
from .status import STATUSES, SUCCESS, USAGE_ERROR, status_for_exception

log = logging.getLogger(__name__)

PROG = "pyincrements"
FIT_MODELS = (model_fit.ARCH1, model_fit.GARCH11)

# model -> (generator, {flag: parameter field})
_GENERATORS = {
    "wiener": (gen_wiener, {"sigma": "sigma1_sq"}),
    "arch1": (gen_arch1, {"alpha": "alpha", "omega": "omega"}),
    "garch11": (gen_garch11, {"alpha": "alpha", "omega": "omega", "zeta": "zeta"}),
    "fbm": (gen_fbm, {"hurst": "hurst", "sigma": "sigma_sq"}),
    "scaled-wiener": (gen_scaled_wiener, {"hurst": "hurst", "sigma": "sigma_sq"}),
}
_REQUIRED = {"arch1": ("alpha", "omega"), "garch11": ("alpha", "omega", "zeta"),
             "fbm": ("hurst",), "scaled-wiener": ("hurst",)}
_PARAM_FLAGS = ("alpha", "omega", "zeta", "sigma", "hurst")


class CommandParser(ArgumentParser):
    """An ``ArgumentParser`` that raises :py:class:`UsageError` instead of exiting."""

    def error(self, message):
        raise UsageError(message)


def check_lags(value):
    """Parses a comma-separated list of positive lags such as ``1,2,4,8``."""
    try:
        lags = tuple(int(part) for part in value.split(","))
    except ValueError:
        raise ArgumentTypeError("lags must be comma-separated integers, not %r" % value)
    if not lags or min(lags) < 1:
        raise ArgumentTypeError("lags must be positive, not %r" % value)
    return tuple(sorted(set(lags)))


def check_positive_int(value):
    try:
        number = int(value)
    except ValueError:
        raise ArgumentTypeError("expected a positive integer, not %r" % value)
    if number < 1:
        raise ArgumentTypeError("expected a positive integer, not %r" % value)
    return number


def check_significance(value):
    try:
        number = float(value)
    except ValueError:
        raise ArgumentTypeError("significance must be a number, not %r" % value)
    if not 0 < number < 1:
        raise ArgumentTypeError("significance must lie in (0, 1), not %r" % value)
    return number


def check_bins(value):
    try:
        return BinSpec(value)
    except UsageError as e:
        raise ArgumentTypeError(str(e))


@dataclass(frozen=True)
class RunConfig(object):
    """
    Everything one invocation needs, validated before any work starts.
    Model parameters are already a parameter record, so their
    invariants hold.
    """
    command: str
    model: Optional[str] = None
    params: object = None
    input: Optional[str] = None
    n: Optional[int] = None
    step: float = 1.0
    seed: int = DEFAULT_SEED
    noise: Optional[NoiseSpec] = None
    lags: tuple = falsify.DEFAULT_LAGS
    window_steps: Optional[int] = None
    significance: float = falsify.DEFAULT_SIGNIFICANCE
    bins: Optional[BinSpec] = None
    optimizer: Optional[model_fit.OptimizerConfig] = None
    out: Optional[str] = None
    plots: Optional[str] = None

    @property
    def emit_plot_data(self):
        return self.plots is not None

    def to_plain(self):
        out = {"command": self.command}
        if self.params is not None:
            out["params"] = params_dict(self.params)
        elif self.model is not None:
            out["model"] = self.model
        for name in ("n", "step", "seed", "window_steps"):
            if getattr(self, name) is not None:
                out[name] = getattr(self, name)
        if self.noise is not None:
            out["noise"] = self.noise.distribution.value
        if self.input is not None:
            out["lags"] = self.lags
            if self.window_steps is not None:
                out["significance"] = self.significance
            if self.bins is not None:
                out["bins"] = str(self.bins)
        if self.optimizer is not None:
            out["optimizer"] = self.optimizer
        out["emit_plot_data"] = self.emit_plot_data
        return out


def _model_params(model, options):
    flags = _GENERATORS[model][1]
    for flag in _REQUIRED.get(model, ()):
        if getattr(options, flag, None) is None:
            raise UsageError("--%s is required for model %s" % (flag, model))
    for flag in _PARAM_FLAGS:
        if flag not in flags and getattr(options, flag, None) is not None:
            log.warning("--%s has no meaning for model %s and is ignored", flag, model)
    kwargs = {}
    for flag, name in flags.items():
        value = getattr(options, flag, None)
        if value is None:
            continue
        # --sigma is a scale; the records hold the variance
        kwargs[name] = value * value if flag == "sigma" else value
    return MODELS[model](**kwargs)


def _check_paths(options):
    plots = getattr(options, "plots", None)
    if plots is not None and os.path.exists(plots) and not os.path.isdir(plots):
        raise UsageError("--plots must name a directory, %s is a file" % plots)
    out = getattr(options, "out", None)
    if out is not None and os.path.isdir(out):
        raise UsageError("--out must name a file, %s is a directory" % out)


class CommandMeta(type):
    """
    We use a metaclass to create the commands in order to gather the
    command line arguments each of them accepts.
    """

    def __new__(cls, name, bases, attrs=None):
        attrs = attrs if attrs else {}

        # Move every parser into the parents list, inheriting those of
        # the bases after our own.
        parents = []
        for key, val in copy(attrs).items():
            if isinstance(val, ArgumentParser):
                parents.append(val)
                del attrs[key]
        for base in bases:
            if hasattr(base, "_parents"):
                parents.extend(getattr(base, "_parents"))

        attrs["_parents"] = parents
        attrs["_option_parser"] = CommandParser(prog="%s %s" % (PROG, attrs.get("name")),
                                                parents=parents)
        return super(CommandMeta, cls).__new__(cls, name, bases, attrs)


def _model_parser(choices, required=True):
    parser = CommandParser(add_help=False)
    parser.add_argument("--model", choices=choices, required=required)
    return parser


def _data_parser(bins=True):
    parser = CommandParser(add_help=False)
    parser.add_argument("--input", required=True, help="time,price or time,level CSV file")
    parser.add_argument("--lags", type=check_lags, default=falsify.DEFAULT_LAGS)
    if bins:
        parser.add_argument("--bins", type=check_bins, default=BinSpec(DEFAULT_BINS))
    return parser


def _window_parser():
    parser = CommandParser(add_help=False)
    parser.add_argument("--window", type=check_positive_int, required=True,
                        help="samples per ensemble member")
    parser.add_argument("--significance", type=check_significance,
                        default=falsify.DEFAULT_SIGNIFICANCE)
    parser.add_argument("--plots", help="directory for plot data")
    return parser


class Command(with_metaclass(CommandMeta, object)):
    """
    Encapsulates a single subcommand. Instantiating parses the options;
    :py:func:`run` does the work.
    """

    name = None
    help = ""

    parser = CommandParser(add_help=False)
    parser.add_argument("-v", "--verbosity", action="count", default=0)
    parser.add_argument("--out", help="output file (default: standard output)")

    _options = None

    def __init__(self, args=None, options=None):
        """
        Sets up a command from ``args`` (parsed with this command's own
        options) or from an already parsed ``options`` namespace.
        """
        self.args = args
        self._options = options

    @property
    def options(self):
        if self._options is None:
            self._options = self._option_parser.parse_args(self.args)
        return self._options

    def configure(self):
        """Validates the options into a :py:class:`RunConfig`."""
        raise NotImplementedError("This method must be implemented by the command.")

    def run(self):
        """
        Runs the command and returns its :py:class:`~pyincrements.report.Report`,
        or ``None`` for commands whose output is not a report.
        """
        raise NotImplementedError("This method must be implemented by the command.")

    def execute(self):
        report = self.run()
        if report is None:
            return
        config = self.config
        if config.out is None:
            sys.stdout.write(str(report))
        else:
            write_report(report, config.out)
        if config.emit_plot_data:
            emit_plot_data(report.plot_datasets, config.plots)

    @property
    def config(self):
        if getattr(self, "_config", None) is None:
            _check_paths(self.options)
            self._config = self.configure()
        return self._config

    def load_levels(self):
        """Reads ``--input``, converting prices to log-return levels."""
        series = read_levels_csv(self.config.input)
        if isinstance(series, PriceSeries):
            series = log_returns(series)
        return series

    def new_report(self, series):
        prov = series.provenance
        source = {"kind": "file", "path": prov.path, "sha256": prov.digest, "rows": prov.rows,
                  "step": series.step}
        return Report(input=source, config=self.config.to_plain())


class SimulateCommand(Command):
    name = "simulate"
    help = "generate a level series and write it as time,level CSV"

    model_options = _model_parser(sorted(_GENERATORS))
    params = CommandParser(add_help=False)
    params.add_argument("--alpha", type=float)
    params.add_argument("--omega", type=float)
    params.add_argument("--zeta", type=float)
    params.add_argument("--sigma", type=float, help="scale; the variance rate is sigma**2")
    params.add_argument("--hurst", type=float)
    params.add_argument("--noise", choices=[n.value for n in Noise], default="gaussian")
    size = CommandParser(add_help=False)
    size.add_argument("--n", type=check_positive_int, required=True, help="number of steps")
    size.add_argument("--step", type=float, default=1.0)
    size.add_argument("--seed", type=int, default=DEFAULT_SEED)

    def configure(self):
        o = self.options
        if o.seed < 0:
            raise UsageError("--seed must be non-negative, got %d" % o.seed)
        if not o.step > 0:
            raise UsageError("--step must be positive, got %r" % o.step)
        noise = NoiseSpec(o.noise) if o.model in ("arch1", "garch11") else None
        return RunConfig(self.name, model=o.model, params=_model_params(o.model, o), n=o.n,
                         step=o.step, seed=o.seed, noise=noise, out=o.out)

    def run(self):
        config = self.config
        generator = _GENERATORS[config.model][0]
        kwargs = {"seed": config.seed, "step": config.step}
        if config.noise is not None:
            kwargs["noise"] = config.noise
        levels = generator(config.params, config.n, **kwargs)
        log.info("simulated %d steps of %s (seed %d)", config.n, config.model, config.seed)
        if config.out is None:
            _write_levels_stdout(levels)
        else:
            write_levels_csv(levels, config.out)
        return None


def _write_levels_stdout(levels):
    sys.stdout.write("time,level\n")
    for k, value in enumerate(levels.values):
        sys.stdout.write("%s,%s\n" % (format_number(levels.origin_time + levels.step * k),
                                      format_number(value)))


class DiagnoseCommand(Command):
    name = "diagnose"
    help = "measure increment properties of an ensemble split from one series"

    data = _data_parser()
    window = _window_parser()

    def configure(self):
        o = self.options
        return RunConfig(self.name, input=o.input, lags=o.lags, window_steps=o.window,
                         significance=o.significance, bins=o.bins, out=o.out, plots=o.plots)

    def run(self):
        config = self.config
        series = self.load_levels()
        levels = series if series.detrended else detrend(series)
        ens = ensemble_split(levels, config.window_steps)
        diagnostics = falsify.diagnostics_report(ens, config.lags, config.significance,
                                                 config.bins)
        report = self.new_report(series)
        report.update("verdicts", diagnostics.verdicts)
        report.update("estimates", diagnostics.estimates())
        report.update("decisions_metadata", {
            "detrending_method": falsify.DETRENDING_METHOD,
            "member_count": ens.member_count,
            "discarded_samples": ens.discarded,
            "split_note": falsify.SPLIT_NOTE,
            "pass_level": falsify.PASS_LEVEL,
        })
        for dataset in diagnostics.plot_datasets():
            report.add_plot_data(dataset)
        return report


class FitCommand(Command):
    name = "fit"
    help = "fit ARCH(1) or GARCH(1,1) per lag to the increments of one series"

    model_options = _model_parser(FIT_MODELS)
    data = _data_parser(bins=False)
    optimizer = CommandParser(add_help=False)
    optimizer.add_argument("--starts", type=check_positive_int, default=5)
    optimizer.add_argument("--max-iter", dest="max_iter", type=int, default=2000)

    def configure(self):
        o = self.options
        optimizer = None
        if o.model == model_fit.GARCH11:
            optimizer = model_fit.OptimizerConfig(starts=o.starts, max_iterations=o.max_iter)
        return RunConfig(self.name, model=o.model, input=o.input, lags=o.lags,
                         optimizer=optimizer, out=o.out)

    def run(self):
        config = self.config
        series = self.load_levels()
        levels = series if series.detrended else detrend(series)
        report = self.new_report(series)

        fits = {}
        for lag in config.lags:
            incs = increments(levels, lag, overlapping=False)
            if config.model == model_fit.ARCH1:
                fits[lag] = model_fit.fit_arch1(incs)
            else:
                fits[lag] = model_fit.fit_garch11(incs, config.optimizer)

        report.update("estimates", {"fits": {str(lag): fit for lag, fit in fits.items()},
                                    "msf_profile": {str(lag): fit.unconditional_msf
                                                    for lag, fit in fits.items()}})
        if config.model == model_fit.GARCH11:
            report.set("verdicts", "garch_white_noise", {
                str(lag): falsify.garch_white_noise_check(fit) for lag, fit in fits.items()})
            report.set("decisions_metadata", "likelihood_note", model_fit.QML_NOTE)
        else:
            report.set("decisions_metadata", "fit_note", falsify.FIT_NOTE)
        report.set("verdicts", "converged",
                   {str(lag): fit.converged for lag, fit in fits.items()})
        report.add_plot_data(PlotDataset(
            "fits", ("lag", "alpha", "omega", "unconditional_msf", "loss"),
            [(lag, fit.estimates["alpha"], fit.estimates["omega"], fit.unconditional_msf,
              fit.loss) for lag, fit in fits.items()],
            "per-lag fitted parameters"))
        return report


class FalsifyCommand(Command):
    name = "falsify"
    help = "run the full falsification pipeline on one series"

    data = _data_parser()
    window = _window_parser()

    def configure(self):
        o = self.options
        return RunConfig(self.name, input=o.input, lags=o.lags, window_steps=o.window,
                         significance=o.significance, bins=o.bins, out=o.out, plots=o.plots)

    def run(self):
        config = self.config
        series = self.load_levels()
        result = falsify.falsification_report(series, config.window_steps, config.lags,
                                              config.significance, config.bins)
        report = self.new_report(series)
        verdicts = dict(result.verdicts)
        verdicts["white_noise_fit_check"] = result.white_noise
        verdicts["consistency_verdict"] = result.consistency_verdict
        report.update("verdicts", verdicts)
        report.set("verdicts", "narrative", result.narrative)
        report.update("estimates", result.estimates())
        report.update("decisions_metadata", result.metadata)
        for dataset in result.plot_datasets():
            report.add_plot_data(dataset)
        return report


COMMANDS = {cls.name: cls for cls in (SimulateCommand, DiagnoseCommand, FitCommand,
                                      FalsifyCommand)}


def build_parser():
    epilog = "exit status:\n" + "\n".join("  %d  %s" % (s.exit_code, s.description)
                                          for s in STATUSES)
    parser = CommandParser(prog=PROG, description="Increment-based volatility diagnostics.",
                           epilog=epilog, formatter_class=RawDescriptionHelpFormatter)
    subparsers = parser.add_subparsers(dest="command", metavar="command")
    subparsers.required = True
    for name, cls in COMMANDS.items():
        subparsers.add_parser(name, help=cls.help, parents=cls._parents)
    return parser


def configure_logging(verbosity):
    """Sends log records to standard error: WARNING, then INFO at -v, DEBUG at -vv."""
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity or 0, logging.DEBUG)
    logging.basicConfig(stream=sys.stderr, level=level,
                        format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger().setLevel(level)


def main(argv=None):
    """
    Runs one command and returns its exit code: 0 on success, 1 for
    usage errors, 2 for data errors and 3 for numerical failures.
    """
    try:
        options = build_parser().parse_args(argv)
    except UsageError as e:
        sys.stderr.write("%s: error: %s\n" % (PROG, e))
        return USAGE_ERROR.exit_code
    except SystemExit as e:
        # --help
        return e.code or 0

    configure_logging(options.verbosity)
    command = COMMANDS[options.command](options=options)
    try:
        command.execute()
    except PyIncrementsError as e:
        sys.stderr.write("%s: error: %s\n" % (PROG, e))
        return status_for_exception(e).exit_code
    return SUCCESS.exit_code


def run():
    sys.exit(main())
