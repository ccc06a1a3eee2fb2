"""Suite runner: random ensembles or fixtures in, deterministic reports out.

A suite draws tensors from streams keyed by (seed, suite, n, trial), checks
each closed form against the exact moment oracle (plus Monte Carlo when
requested), and collects the results into a report whose JSON/CSV rendering
is byte-identical across reruns with the same configuration.  Cases may be
evaluated in parallel (capped by the CURVLAB_THREADS environment variable);
ordering and random streams are per-case, so the report does not depend on
scheduling.

The bisectional suite has adjudication semantics: its squared-average cases
carry both closed-form variants plus an `oracle_match` verdict, and the suite
as a whole never fails the run.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import __version__
from .curvature import (
    CurvatureTensor,
    constant_hsc,
    hsc_batch,
    kahler_from_sym2,
    random_hermitian_curvature,
    random_kahler_curvature,
    tensor_from_json_dict,
    tensor_to_json_dict,
    wedge_rank_one,
)
from .identities import (
    NEAR_ZERO,
    adjudicate_bisectional,
    bisectional_mean,
    compare,
    l2_hsc_hermitian,
    l2_hsc_kahler,
    mean_hsc_hermitian,
    mean_hsc_kahler,
    zero_hsc_consequences,
)
from .linalg import complex_gaussian
from .sphere import (
    exact_expectation_B_mean,
    exact_expectation_H,
    exact_expectation_H2,
    exact_projection_residual,
    mc_expectation,
    mc_projection_residual,
    moment_matrix,
)
from .symgroup import TRACE_WORDS, projector_sym, trace_table_closed, trace_table_oracle

SUITES = (
    "projection",
    "kahler-mean",
    "kahler-l2",
    "hermitian-mean",
    "hermitian-l2",
    "bisectional",
    "zero-hsc",
    "trace-table",
)

MAX_DIMENSION = 6

FIXTURE_KINDS = ("constant-hsc", "diagonal", "wedge", "random-kahler", "random-hermitian")


@dataclass(frozen=True)
class SuiteConfig:
    """Everything a run needs; identical configs produce identical reports."""

    suite: str = "all"
    n_list: tuple = (1, 2, 3)
    trials: int = 20
    mc_samples: int = 0
    seed: int = 42
    rel_tol: float = 1e-10
    format: str = "json"
    output: str = "-"
    fixture: str | None = None

    def validate(self) -> "SuiteConfig":
        if self.suite != "all" and self.suite not in SUITES:
            raise ValueError(f"unknown suite {self.suite!r}; expected one of {('all',) + SUITES}")
        n_list = tuple(sorted(set(int(n) for n in self.n_list)))
        if not n_list:
            raise ValueError("need at least one dimension")
        if any(n < 1 or n > MAX_DIMENSION for n in n_list):
            raise ValueError(f"dimensions must lie in [1, {MAX_DIMENSION}]")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.mc_samples < 0 or self.mc_samples == 1:
            raise ValueError("mc-samples must be 0 (skip MC) or >= 2")
        if self.rel_tol < 0:
            raise ValueError("rel-tol must be nonnegative")
        if self.format not in ("json", "csv"):
            raise ValueError(f"format must be json or csv, got {self.format!r}")
        return replace(self, n_list=n_list, trials=int(self.trials))


def thread_cap() -> int:
    """Worker cap from CURVLAB_THREADS; 0 or unset means sequential."""
    raw = os.environ.get("CURVLAB_THREADS", "").strip()
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"CURVLAB_THREADS must be an integer, got {raw!r}") from exc
    return max(value, 1)


# ---------------------------------------------------------------------------
# per-case random streams

def _case_seed(config: SuiteConfig, suite: str, n: int, trial: int, lane: int) -> list[int]:
    return [config.seed, SUITES.index(suite), n, trial, lane]


def _case_rng(config: SuiteConfig, suite: str, n: int, trial: int, lane: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(_case_seed(config, suite, n, trial, lane)))


def _draw_tensor(config: SuiteConfig, suite: str, n: int, trial: int, fixture) -> CurvatureTensor:
    if fixture is not None:
        return fixture
    rng = _case_rng(config, suite, n, trial, 0)
    if suite in ("kahler-mean", "kahler-l2", "bisectional"):
        return random_kahler_curvature(n, rng)
    if suite == "zero-hsc":
        g = complex_gaussian(rng, (n, n))
        return wedge_rank_one(n, (g - g.T) / 2)
    return random_hermitian_curvature(n, rng)


def _require_kahler_fixture(tensor: CurvatureTensor, suite: str) -> None:
    if not tensor.is_kahler():
        raise ValueError(f"suite {suite!r} needs a swap-symmetric tensor; the fixture is not")


# ---------------------------------------------------------------------------
# case builders (one list of case dicts per (suite, n, trial))

def _case_dict(suite: str, n: int, trial: int, name: str, result, mc) -> dict:
    return {
        "suite": suite,
        "n": n,
        "trial": trial,
        "name": name,
        "closed_form": result.closed_form,
        "exact_oracle": result.exact_oracle,
        "mc": mc,
        "rel_diff": result.rel_diff,
        "pass": result.passed,
    }


def _mc_dict(est) -> dict:
    return {"mean": est.mean, "std_error": est.std_error, "samples": est.samples}


def _mc_of_hsc(config, suite, n, trial, tensor, power: int):
    if config.mc_samples == 0:
        return None
    f = tensor.endomorphism()

    def integrand(points):
        w = np.einsum("si,sk->sik", points, points).reshape(len(points), -1)
        vals = np.einsum("sa,ab,sb->s", w, f, w.conj()).real
        return vals**power if power != 1 else vals

    est = mc_expectation(integrand, n, config.mc_samples, _case_seed(config, suite, n, trial, 1))
    return _mc_dict(est)


def _projection_cases(config: SuiteConfig, n: int, trial: int, fixture) -> list[dict]:
    cases = []
    for d in (1, 2, 3, 4):
        target = projector_sym(n, d) / math.comb(n + d - 1, d)
        target_norm = float(np.linalg.norm(target))
        oracle_norm = float(np.linalg.norm(moment_matrix(n, d)))
        residual = exact_projection_residual(n, d)
        rel = residual / target_norm
        passed = residual <= NEAR_ZERO if target_norm <= NEAR_ZERO else rel <= config.rel_tol
        mc = None
        if config.mc_samples:
            mc_res = mc_projection_residual(n, d, config.mc_samples, _case_seed(config, "projection", n, trial, 1 + d))
            mc = {"mean": mc_res, "std_error": 0.0, "samples": config.mc_samples}
        cases.append(
            {
                "suite": "projection",
                "n": n,
                "trial": trial,
                "name": f"projection-d{d}",
                "closed_form": target_norm,
                "exact_oracle": oracle_norm,
                "mc": mc,
                "rel_diff": rel,
                "pass": bool(passed),
            }
        )
    return cases


def _mean_cases(config, suite, n, trial, fixture, kahler: bool) -> list[dict]:
    tensor = _draw_tensor(config, suite, n, trial, fixture)
    if kahler:
        _require_kahler_fixture(tensor, suite)
        closed = mean_hsc_kahler(tensor)
    else:
        closed = mean_hsc_hermitian(tensor)
    oracle = exact_expectation_H(tensor)
    result = compare("mean-hsc", closed, oracle, config.rel_tol)
    mc = _mc_of_hsc(config, suite, n, trial, tensor, power=1)
    return [_case_dict(suite, n, trial, "mean-hsc", result, mc)]


def _l2_cases(config, suite, n, trial, fixture, kahler: bool) -> list[dict]:
    tensor = _draw_tensor(config, suite, n, trial, fixture)
    if kahler:
        _require_kahler_fixture(tensor, suite)
        closed = l2_hsc_kahler(tensor)
    else:
        closed = l2_hsc_hermitian(tensor)
    oracle = exact_expectation_H2(tensor)
    result = compare("l2-hsc", closed, oracle, config.rel_tol)
    mc = _mc_of_hsc(config, suite, n, trial, tensor, power=2)
    return [_case_dict(suite, n, trial, "l2-hsc", result, mc)]


def _bisectional_cases(config, n, trial, fixture) -> list[dict]:
    suite = "bisectional"
    tensor = _draw_tensor(config, suite, n, trial, fixture)
    _require_kahler_fixture(tensor, suite)
    rng = _case_rng(config, suite, n, trial, 2)
    eta = complex_gaussian(rng, (n,))
    eta /= np.linalg.norm(eta)

    mean_closed = bisectional_mean(tensor, eta)
    mean_oracle = exact_expectation_B_mean(tensor, eta)
    mean_result = compare("bisectional-mean", mean_closed, mean_oracle, config.rel_tol)
    mean_mc = None
    if config.mc_samples:
        arr = tensor.array

        def integrand(points):
            return np.einsum("ijkl,si,sj,k,l->s", arr, points, points.conj(), eta, eta.conj()).real

        est = mc_expectation(integrand, n, config.mc_samples, _case_seed(config, suite, n, trial, 1))
        mean_mc = _mc_dict(est)

    adj = adjudicate_bisectional(tensor, config.rel_tol)
    l2_mc = None
    if config.mc_samples:
        arr = tensor.array

        def integrand2(points):
            u, v = points[:, 0, :], points[:, 1, :]
            vals = np.einsum("ijkl,si,sj,sk,sl->s", arr, u, u.conj(), v, v.conj()).real
            return vals**2

        est = mc_expectation(integrand2, n, config.mc_samples, _case_seed(config, suite, n, trial, 3), spheres=2)
        l2_mc = _mc_dict(est)
    rel_paper = compare("", adj.paper, adj.oracle, config.rel_tol).rel_diff
    rel_derived = compare("", adj.derived, adj.oracle, config.rel_tol).rel_diff
    l2_case = {
        "suite": suite,
        "n": n,
        "trial": trial,
        "name": "bisectional-l2",
        "closed_form_paper": adj.paper,
        "closed_form_derived": adj.derived,
        "exact_oracle": adj.oracle,
        "oracle_match": adj.match,
        "mc": l2_mc,
        "rel_diff": min(rel_paper, rel_derived),
        "pass": adj.match != "neither",
    }
    return [_case_dict(suite, n, trial, "bisectional-mean", mean_result, mean_mc), l2_case]


def _zero_hsc_cases(config, n, trial, fixture) -> list[dict]:
    suite = "zero-hsc"
    tensor = _draw_tensor(config, suite, n, trial, fixture)
    rng = _case_rng(config, suite, n, trial, 2)
    dirs = complex_gaussian(rng, (100, n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    max_h = float(np.abs(hsc_batch(tensor, dirs)).max())
    checks = zero_hsc_consequences(tensor)
    cases = []
    for name, residual in (
        ("hsc-sampled", max_h),
        ("scalar-sum", checks.residuals["scalar_sum"]),
        ("ricci-sum", checks.residuals["ricci_sum"]),
        ("sym-block", checks.residuals["sym_block"]),
    ):
        result = compare(name, 0.0, residual, config.rel_tol)
        cases.append(_case_dict(suite, n, trial, name, result, None))
    return cases


def _trace_table_cases(config, n, trial, fixture) -> list[dict]:
    suite = "trace-table"
    tensor = _draw_tensor(config, suite, n, trial, fixture)
    f = tensor.endomorphism()
    closed = trace_table_closed(f)
    oracle = trace_table_oracle(f)
    cases = []
    for word in TRACE_WORDS:
        c, o = closed[word], oracle[word]
        abs_diff = abs(c - o)
        scale = max(abs(c), abs(o))
        if scale <= NEAR_ZERO:
            rel, passed = abs_diff, abs_diff <= NEAR_ZERO
        else:
            rel, passed = abs_diff / scale, abs_diff / scale <= config.rel_tol
        cases.append(
            {
                "suite": suite,
                "n": n,
                "trial": trial,
                "name": f"trace-{word}",
                "closed_form": c.real,
                "exact_oracle": o.real,
                "mc": None,
                "rel_diff": rel,
                "pass": bool(passed),
            }
        )
    return cases


def _eval_spec(config: SuiteConfig, suite: str, n: int, trial: int, fixture) -> list[dict]:
    if suite == "projection":
        return _projection_cases(config, n, trial, fixture)
    if suite == "kahler-mean":
        return _mean_cases(config, suite, n, trial, fixture, kahler=True)
    if suite == "kahler-l2":
        return _l2_cases(config, suite, n, trial, fixture, kahler=True)
    if suite == "hermitian-mean":
        return _mean_cases(config, suite, n, trial, fixture, kahler=False)
    if suite == "hermitian-l2":
        return _l2_cases(config, suite, n, trial, fixture, kahler=False)
    if suite == "bisectional":
        return _bisectional_cases(config, n, trial, fixture)
    if suite == "zero-hsc":
        return _zero_hsc_cases(config, n, trial, fixture)
    if suite == "trace-table":
        return _trace_table_cases(config, n, trial, fixture)
    raise ValueError(f"unknown suite {suite!r}")


# ---------------------------------------------------------------------------
# report

@dataclass(frozen=True)
class VerificationReport:
    config: SuiteConfig
    cases: list
    summary: dict
    version: str = __version__
    wall_time: float = 0.0  # informational only; never serialized

    def exit_code(self) -> int:
        """0 iff all gating cases pass; the bisectional suite never gates."""
        if self.config.suite == "bisectional":
            return 0
        failures = sum(
            1
            for case in self.cases
            if not case["pass"] and not (case["suite"] == "bisectional" and case["name"] == "bisectional-l2")
        )
        return 0 if failures == 0 else 1

    def to_json(self) -> str:
        body = {
            "config": _config_echo(self.config),
            "cases": self.cases,
            "summary": self.summary,
            "version": self.version,
        }
        return _dumps(body) + "\n"

    def to_csv(self) -> str:
        return _cases_csv(self.cases)


def _config_echo(config: SuiteConfig) -> dict:
    return {
        "suite": config.suite,
        "n": list(config.n_list),
        "trials": config.trials,
        "mc_samples": config.mc_samples,
        "seed": config.seed,
        "rel_tol": config.rel_tol,
        "format": config.format,
        "fixture": config.fixture,
    }


def run_suite(config: SuiteConfig) -> VerificationReport:
    """Evaluate every case of the configured suite(s) and assemble the report."""
    start = time.perf_counter()
    config = config.validate()
    fixture = None
    if config.fixture is not None:
        with open(config.fixture, "r", encoding="utf-8") as fh:
            fixture = tensor_from_json_dict(json.load(fh))
        if fixture.n > MAX_DIMENSION:
            raise ValueError(f"fixture dimension {fixture.n} exceeds the cap {MAX_DIMENSION}")

    suites = SUITES if config.suite == "all" else (config.suite,)
    n_list = (fixture.n,) if fixture is not None else config.n_list
    trials = 1 if fixture is not None else config.trials
    specs = []
    for suite in suites:
        suite_trials = 1 if suite == "projection" else trials
        for n in n_list:
            for trial in range(suite_trials):
                specs.append((suite, n, trial))

    def evaluate(spec):
        suite, n, trial = spec
        return _eval_spec(config, suite, n, trial, fixture)

    workers = thread_cap()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(evaluate, specs))
    else:
        chunks = [evaluate(spec) for spec in specs]

    cases = [case for chunk in chunks for case in chunk]
    passes = sum(1 for case in cases if case["pass"])
    summary = {
        "cases": len(cases),
        "passes": passes,
        "failures": len(cases) - passes,
        "worst_rel_diff": max((case["rel_diff"] for case in cases), default=0.0),
    }
    return VerificationReport(
        config=config,
        cases=cases,
        summary=summary,
        wall_time=time.perf_counter() - start,
    )


# ---------------------------------------------------------------------------
# fixtures

def _diag_sym2_form(n: int, diag_values) -> np.ndarray:
    """Form on the symmetric square that is diag_values[i] on e_i (.) e_i and 0 elsewhere."""
    size = n * (n + 1) // 2
    h = np.zeros((size, size))
    pos = 0
    for i in range(n):
        for j in range(i, n):
            if i == j:
                h[pos, pos] = diag_values[i]
            pos += 1
    return h


def emit_fixture(kind: str, n: int, params: dict, seed: int) -> dict:
    """Build a named tensor fixture and return its JSON-ready dict."""
    if kind not in FIXTURE_KINDS:
        raise ValueError(f"unknown fixture kind {kind!r}; expected one of {FIXTURE_KINDS}")
    if n < 1 or n > MAX_DIMENSION:
        raise ValueError(f"dimension must lie in [1, {MAX_DIMENSION}]")
    params = dict(params)

    if kind == "constant-hsc":
        c = float(params.pop("c", 1.0))
        tensor = constant_hsc(n, c)
    elif kind == "diagonal":
        if "diag" in params:
            values = [float(x) for x in str(params.pop("diag")).split(",")]
            if len(values) != n:
                raise ValueError(f"diag needs {n} comma-separated values")
        elif n == 2:
            values = [float(params.pop("a", 1.0)), float(params.pop("b", 2.0))]
        else:
            raise ValueError("diagonal fixture needs diag=v0,v1,... for n != 2")
        tensor = kahler_from_sym2(n, _diag_sym2_form(n, values))
    elif kind == "wedge":
        rng = np.random.default_rng(seed)
        g = complex_gaussian(rng, (n, n))
        tensor = wedge_rank_one(n, (g - g.T) / 2)
    elif kind == "random-kahler":
        tensor = random_kahler_curvature(n, seed)
    else:
        tensor = random_hermitian_curvature(n, seed)

    if params:
        raise ValueError(f"unused parameters for kind {kind!r}: {sorted(params)}")
    return tensor_to_json_dict(tensor)


# ---------------------------------------------------------------------------
# deterministic serialization

def format_float(x: float) -> str:
    """17 significant digits: enough to round-trip any double, bit for bit."""
    return format(float(x), ".17g")


def _dumps(value) -> str:
    parts: list[str] = []
    _emit(value, parts)
    return "".join(parts)


def _emit(value, parts: list) -> None:
    if value is None:
        parts.append("null")
    elif value is True:
        parts.append("true")
    elif value is False:
        parts.append("false")
    elif isinstance(value, str):
        parts.append(json.dumps(value))
    elif isinstance(value, (int, np.integer)):
        parts.append(str(int(value)))
    elif isinstance(value, (float, np.floating)):
        parts.append(format_float(value))
    elif isinstance(value, dict):
        parts.append("{")
        for pos, (key, item) in enumerate(value.items()):
            if pos:
                parts.append(",")
            parts.append(json.dumps(str(key)))
            parts.append(":")
            _emit(item, parts)
        parts.append("}")
    elif isinstance(value, (list, tuple)):
        parts.append("[")
        for pos, item in enumerate(value):
            if pos:
                parts.append(",")
            _emit(item, parts)
        parts.append("]")
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")


_CSV_COLUMNS = (
    "suite",
    "n",
    "trial",
    "name",
    "closed_form",
    "exact_oracle",
    "closed_form_paper",
    "closed_form_derived",
    "oracle_match",
    "mc_mean",
    "mc_std_error",
    "mc_samples",
    "rel_diff",
    "pass",
)


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    return str(value)


def _cases_csv(cases: list) -> str:
    lines = [",".join(_CSV_COLUMNS)]
    for case in cases:
        mc = case.get("mc")
        row = {
            **{k: case.get(k) for k in _CSV_COLUMNS},
            "mc_mean": mc["mean"] if mc else None,
            "mc_std_error": mc["std_error"] if mc else None,
            "mc_samples": mc["samples"] if mc else None,
        }
        lines.append(",".join(_csv_cell(row[col]) for col in _CSV_COLUMNS))
    return "\n".join(lines) + "\n"
