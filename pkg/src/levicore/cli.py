"""Batch front end: ``levicore run <task-file>...``.

A task file is line oriented.  Blank lines and ``#`` comments are ignored,
and a trailing backslash joins a line with the next one.  Statements::

    ring x, y, z                     variables (commas or spaces)
    involution z:zbar, w:wbar        optional conjugate pairs for the ring
    complex-ring 2                   z1, zbar1, z2, zbar2
    poly NAME = <polynomial>
    ideal NAME = <poly>, <poly>, ...
    module NAME = <1-form>, <1-form>, ...
    jacobian NAME = <poly>, ...      module of the differentials dF_i
    rigid NAME h = <poly>            r = (z_{n+1} + zbar_{n+1})/2 + h
    rigid NAME F = <poly>, ...       same with h = sum F_i * bar(F_i)
    germ NAME = <poly>               a hermitian defining function
    option KEY = VALUE
    task KIND NAME

KIND is one of support, derive, core, kohn, levi-rigid, check-theorem, gb.
Names of earlier ``poly`` objects may appear inside polynomial expressions.
Options: max_steps, product_depth, depth, hints, expect, hermitian,
budget_pairs, budget_degree, out.

Exit status: 0 computed (whatever the verdict), 2 input error, 3 budget
exceeded (the partial trace is still written).
"""

from __future__ import annotations

import argparse
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from .distcore import (
    core_iterate,
    derived_module,
    jacobian_module,
    support_ideal,
    SATURATION,
)
from .forms import FormModule, _split_top_level, parse_form
from .groebner import Budget, BudgetExceeded, Ideal, budget, variety_equal
from .kohn import DefiningGerm, build_rigid, check_core_containment, kohn_run, levi_module
from .polycalc import ParseError, Polynomial, Ring
from .traceio import dumps, emit_trace, header, ring_to_dict, text_of, trace_to_dict

__all__ = ["TaskError", "TaskFile", "parse_task", "run_task", "emit_trace", "main", "TASK_KINDS"]

EXIT_OK, EXIT_INPUT, EXIT_BUDGET = 0, 2, 3

TASK_KINDS = ("support", "derive", "core", "kohn", "levi-rigid", "check-theorem", "gb")
_TARGET = {
    "support": "module",
    "derive": "module",
    "core": "module",
    "kohn": "germ",
    "levi-rigid": "germ",
    "check-theorem": "germ",
    "gb": "ideal",
}
_INT_OPTIONS = ("max_steps", "product_depth", "depth", "budget_pairs", "budget_degree")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
ENV_PAIRS = "LEVICORE_BUDGET_PAIRS"
ENV_DEGREE = "LEVICORE_BUDGET_DEGREE"


class TaskError(ValueError):
    """Invalid task file; carries the 1-based line and column when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None, path: str = "<task>"):
        self.message = message
        self.line = line
        self.column = column
        self.path = path
        where = path
        if line is not None:
            where += f":{line}"
            if column is not None:
                where += f":{column}"
        super().__init__(f"{where}: {message}")


@dataclass
class TaskFile:
    path: str
    ring: Ring
    objects: dict
    kinds: dict
    task: str
    target: str
    options: dict = field(default_factory=dict)
    option_lines: dict = field(default_factory=dict)


# ----------------------------------------------------------------------
# parsing


def _logical_lines(text: str):
    buf, start = "", None
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if start is None:
            start = no
        if line.endswith("\\"):
            buf += line[:-1] + " "
            continue
        buf += line
        if buf.strip():
            yield start, buf
        buf, start = "", None
    if buf.strip():
        yield start, buf


def _parse_error_message(exc: ParseError) -> str:
    return str(exc).rsplit(" at position", 1)[0]


class _Parser:
    def __init__(self, path: str):
        self.path = path
        self.ring: Ring | None = None
        self.ring_line = None
        self.objects: dict = {}
        self.kinds: dict = {}
        self.polys: dict[str, Polynomial] = {}
        self.task = None
        self.options: dict = {}
        self.option_lines: dict = {}

    def error(self, msg, line, col=None):
        return TaskError(msg, line, col, self.path)

    # expressions -------------------------------------------------------

    def _need_ring(self, line):
        if self.ring is None:
            raise self.error("no ring declared before this line", line, 1)
        return self.ring

    def poly(self, text: str, line: int, col: int) -> Polynomial:
        ring = self._need_ring(line)
        names = [n for n in self.polys if re.search(rf"\b{re.escape(n)}\b", text)]
        big = ring.extend(names) if names else ring
        try:
            p = big.parse(text)
        except ParseError as exc:
            lead = len(text) - len(text.lstrip())
            raise self.error(_parse_error_message(exc), line, col + lead + exc.position) from None
        if not names:
            return p
        return _compose(p, ring, [self.polys[n] for n in names])

    def poly_list(self, text: str, line: int, col: int) -> list[Polynomial]:
        out, offset = [], 0
        for piece in _split_top_level(text):
            at = text.index(piece, offset)
            offset = at + len(piece)
            out.append(self.poly(piece, line, col + at))
        if not out:
            raise self.error("expected at least one polynomial", line, col)
        return out

    # statements --------------------------------------------------------

    def define(self, name: str, kind: str, value, line: int, col: int):
        if not _NAME.match(name):
            raise self.error(f"invalid name {name!r}", line, col)
        if name in self.objects:
            raise self.error(f"{name!r} is already defined", line, col)
        if self.ring is not None and name in self.ring.variables:
            raise self.error(f"{name!r} is a ring variable", line, col)
        self.objects[name] = value
        self.kinds[name] = kind

    def statement(self, no: int, line: str):
        m = re.match(r"\s*(\S+)\s*", line)
        kw = m.group(1)
        rest = line[m.end():]
        col = m.end() + 1  # 1-based column of ``rest``
        handler = getattr(self, "st_" + kw.replace("-", "_"), None)
        if handler is None:
            raise self.error(f"unknown statement {kw!r}", no, m.start(1) + 1)
        handler(rest, no, col)

    def _assignment(self, rest, no, col):
        m = re.match(r"(\S+)\s*=\s*", rest)
        if not m:
            raise self.error("expected NAME = ...", no, col)
        return m.group(1), rest[m.end():], col + m.end()

    def st_ring(self, rest, no, col):
        if self.ring is not None:
            raise self.error("ring declared twice", no, 1)
        names = [s for s in re.split(r"[,\s]+", rest.strip()) if s]
        if not names:
            raise self.error("ring declares no variables", no, col)
        for n in names:
            if not _NAME.match(n):
                raise self.error(f"invalid variable name {n!r}", no, col + rest.index(n))
        try:
            self.ring = Ring(tuple(names))
        except ValueError as exc:
            raise self.error(str(exc), no, col) from None
        self.ring_line = no

    def st_involution(self, rest, no, col):
        if self.ring is None or self.ring_line is None:
            raise self.error("involution must follow a ring declaration", no, 1)
        if self.objects:
            raise self.error("involution must come before any object", no, 1)
        if self.ring.involution is not None:
            raise self.error("involution declared twice", no, 1)
        pairs = []
        for item in [s for s in re.split(r"[,\s]+", rest.strip()) if s]:
            a, sep, b = item.partition(":")
            if not sep or not a or not b:
                raise self.error(f"expected a pair z:zbar, got {item!r}", no, col + rest.index(item))
            pairs.append((a, b))
        if not pairs:
            raise self.error("involution lists no pairs", no, col)
        try:
            self.ring = Ring(self.ring.variables, tuple(pairs))
        except ValueError as exc:
            raise self.error(str(exc), no, col) from None

    def st_complex_ring(self, rest, no, col):
        if self.ring is not None:
            raise self.error("ring declared twice", no, 1)
        parts = rest.split()
        if not parts or not parts[0].isdigit() or int(parts[0]) < 1 or len(parts) > 2:
            raise self.error("expected complex-ring N [stem] with N >= 1", no, col)
        stem = parts[1] if len(parts) == 2 else "z"
        if not _NAME.match(stem):
            raise self.error(f"invalid stem {stem!r}", no, col)
        self.ring = Ring.complex(int(parts[0]), stem)
        self.ring_line = None

    def st_poly(self, rest, no, col):
        name, expr, c = self._assignment(rest, no, col)
        p = self.poly(expr, no, c)
        self.define(name, "poly", p, no, col)
        self.polys[name] = p

    def st_ideal(self, rest, no, col):
        name, expr, c = self._assignment(rest, no, col)
        gens = self.poly_list(expr, no, c)
        self.define(name, "ideal", Ideal(self.ring, gens), no, col)

    def st_module(self, rest, no, col):
        name, expr, c = self._assignment(rest, no, col)
        ring = self._need_ring(no)
        forms, offset = [], 0
        for piece in _split_top_level(expr):
            at = expr.index(piece, offset)
            offset = at + len(piece)
            try:
                forms.append(parse_form(piece, ring))
            except ParseError as exc:
                raise self.error(_parse_error_message(exc), no, c + at + exc.position) from None
            except ValueError as exc:
                raise self.error(str(exc), no, c + at) from None
        if not forms and expr.strip() != "0":
            raise self.error("expected at least one 1-form (or 0)", no, c)
        self.define(name, "module", FormModule(ring, forms), no, col)

    def st_jacobian(self, rest, no, col):
        name, expr, c = self._assignment(rest, no, col)
        F = self.poly_list(expr, no, c)
        self.define(name, "module", jacobian_module(F), no, col)

    def st_rigid(self, rest, no, col):
        m = re.match(r"(\S+)\s+([hF])\s*=\s*", rest)
        if not m:
            raise self.error("expected rigid NAME h = ... or rigid NAME F = ...", no, col)
        ring = self._need_ring(no)
        if not ring.is_complexified:
            raise self.error("rigid domains need a complexified ring (use complex-ring N)", no, 1)
        c = col + m.end()
        expr = rest[m.end():]
        try:
            if m.group(2) == "h":
                g = build_rigid(self.poly(expr, no, c))
            else:
                F = self.poly_list(expr, no, c)
                anti = set(_anti_names(ring))
                h = ring.zero()
                for f in F:
                    if anti & set(f.variables_used()):
                        raise self.error(f"F component {f} is not holomorphic", no, c)
                    h = h + f * f.bar()
                g = build_rigid(h, F)
        except ValueError as exc:
            if isinstance(exc, TaskError):
                raise
            raise self.error(str(exc), no, c) from None
        self.define(m.group(1), "germ", g, no, col)

    def st_germ(self, rest, no, col):
        name, expr, c = self._assignment(rest, no, col)
        ring = self._need_ring(no)
        r = self.poly(expr, no, c)
        try:
            g = DefiningGerm(ring, r)
        except ValueError as exc:
            raise self.error(str(exc), no, c) from None
        self.define(name, "germ", g, no, col)

    def st_option(self, rest, no, col):
        key, value, c = self._assignment(rest, no, col)
        value = value.strip()
        if key in self.options:
            raise self.error(f"option {key!r} given twice", no, col)
        if key in _INT_OPTIONS:
            if not re.fullmatch(r"\d+", value):
                raise self.error(f"option {key} expects a non-negative integer, got {value!r}", no, c)
            v = int(value)
            if key == "product_depth" and v not in (1, 2):
                raise self.error("product_depth must be 1 or 2", no, c)
            if key.startswith("budget_") and v < 1:
                raise self.error(f"{key} must be positive", no, c)
        elif key in ("hints", "expect"):
            v = self.poly_list(value, no, c)
        elif key == "hermitian":
            if value not in ("true", "false"):
                raise self.error("option hermitian expects true or false", no, c)
            v = value == "true"
        elif key == "out":
            if not value:
                raise self.error("option out needs a path", no, c)
            v = value
        else:
            raise self.error(f"unknown option {key!r}", no, col)
        self.options[key] = v
        self.option_lines[key] = no

    def st_task(self, rest, no, col):
        if self.task is not None:
            raise self.error("exactly one task per file; a task was already given", no, 1)
        parts = rest.split()
        if len(parts) != 2:
            raise self.error("expected task KIND NAME", no, col)
        kind, name = parts
        if kind not in TASK_KINDS:
            raise self.error(f"unknown task kind {kind!r}; expected one of {', '.join(TASK_KINDS)}", no, col)
        if name not in self.objects:
            raise self.error(f"{name!r} is not defined", no, col + rest.index(name, len(kind)))
        want = _TARGET[kind]
        if self.kinds[name] != want:
            raise self.error(f"task {kind} needs a {want}, but {name!r} is a {self.kinds[name]}", no, col)
        self.task = (kind, name, no)


def _anti_names(ring: Ring):
    return [ring.variables[i] for i in ring.antiholomorphic]


def _compose(p: Polynomial, ring: Ring, values: list[Polynomial]) -> Polynomial:
    """Substitute ``values`` for the trailing variables of p's ring."""
    n = ring.nvars
    out = ring.zero()
    for e, c in p.terms.items():
        t = Polynomial(ring, {e[:n]: c})
        for v, k in zip(values, e[n:]):
            if k:
                t = t * v**k
        out = out + t
    return out


def parse_task(text: str, path: str = "<task>") -> TaskFile:
    """Parse and validate a task file; raises :class:`TaskError` with a position."""
    P = _Parser(path)
    for no, line in _logical_lines(text):
        P.statement(no, line)
    if P.ring is None:
        raise TaskError("no ring declared", None, None, path)
    if P.task is None:
        raise TaskError("no task given", None, None, path)
    kind, target, no = P.task
    if kind == "check-theorem" and P.options.get("depth", 2) < 0:
        raise TaskError("depth must be non-negative", P.option_lines.get("depth"), None, path)
    return TaskFile(path, P.ring, P.objects, P.kinds, kind, target, P.options, P.option_lines)


# ----------------------------------------------------------------------
# running


def _env_int(name: str) -> int | None:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return None
    if not raw.isdigit() or int(raw) < 1:
        raise TaskError(f"environment variable {name} must be a positive integer, got {raw!r}")
    return int(raw)


def resolve_budget(task: TaskFile, pairs: int | None = None, degree: int | None = None) -> Budget:
    """Flag, then task-file option, then environment, then default."""
    b = Budget()
    env_p, env_d = _env_int(ENV_PAIRS), _env_int(ENV_DEGREE)
    p = pairs if pairs is not None else task.options.get("budget_pairs", env_p)
    d = degree if degree is not None else task.options.get("budget_degree", env_d)
    return replace(b, max_pairs=p or b.max_pairs, max_degree=d or b.max_degree)


def _support_doc(task: TaskFile, R: FormModule) -> tuple[dict, str]:
    S = support_ideal(R)
    T = support_ideal(R, SATURATION)
    doc = {
        "kind": "support",
        "ring": ring_to_dict(R.ring),
        "module": R.strings(),
        "support": {"generators": [str(g) for g in S.generators], "provenance": S.provenance},
        "saturation": {"generators": [str(g) for g in T.generators], "provenance": T.provenance},
        "agree": variety_equal(S.ideal, T.ideal),
    }
    sup = ", ".join(doc["support"]["generators"]) or "0"
    lines = [f"support ({sup}) [minors]", f"saturation support ({', '.join(doc['saturation']['generators']) or '0'})"]
    lines.append(f"minors and saturation supports {'agree' if doc['agree'] else 'DISAGREE'}")
    if "expect" in task.options:
        E = Ideal(R.ring, task.options["expect"])
        eq = variety_equal(S.ideal, E)
        doc["expect"] = {"generators": [str(g) for g in E.generators], "variety_equal": eq}
        lines.append(f"support variety-equal to ({', '.join(doc['expect']['generators'])}): {'yes' if eq else 'NO'}")
    return doc, "\n".join(lines) + "\n"


def _derive_doc(task: TaskFile, R: FormModule) -> tuple[dict, str]:
    S = support_ideal(R)
    D, status = derived_module(R, task.options.get("hints"), task.options.get("hermitian", False))
    doc = {
        "kind": "derive",
        "ring": ring_to_dict(R.ring),
        "module": R.strings(),
        "support": {"generators": [str(g) for g in S.generators], "provenance": S.provenance},
        "derived": D.strings(),
        "status": status,
    }
    lines = [f"support ({', '.join(doc['support']['generators']) or '0'})", f"radical status {status}", "derived module:"]
    lines += [f"  {g}" for g in doc["derived"]]
    return doc, "\n".join(lines) + "\n"


def _gb_doc(task: TaskFile, I: Ideal) -> tuple[dict, str]:
    G = I.gb()
    doc = {
        "kind": "gb",
        "ring": ring_to_dict(I.ring),
        "generators": [str(g) for g in I.generators],
        "order": "degrevlex",
        "basis": [str(g) for g in G],
    }
    return doc, "reduced basis (degrevlex):\n" + "".join(f"  {g}\n" for g in doc["basis"])


def _compute(task: TaskFile, max_steps: int | None):
    """Return the trace or result document for the task."""
    obj = task.objects[task.target]
    opts = task.options
    steps = max_steps if max_steps is not None else opts.get("max_steps")
    kind = task.task
    if kind == "support":
        return _support_doc(task, obj)
    if kind == "derive":
        return _derive_doc(task, obj)
    if kind == "gb":
        return _gb_doc(task, obj)
    if kind == "core":
        return core_iterate(
            obj,
            max_steps=32 if steps is None else steps,
            radical_hints=opts.get("hints"),
            hermitian=opts.get("hermitian", False),
        )
    if kind == "kohn":
        return kohn_run(obj, max_steps=16 if steps is None else steps, product_depth=opts.get("product_depth", 1))
    if kind == "levi-rigid":
        return core_iterate(
            levi_module(obj),
            max_steps=32 if steps is None else steps,
            radical_hints=opts.get("hints"),
            hermitian=True,
            squares=obj.squares,
        )
    if kind == "check-theorem":
        return check_core_containment(obj, opts.get("depth", 2), opts.get("product_depth", 1))
    raise AssertionError(kind)


def _task_meta(task: TaskFile) -> dict:
    opts = {}
    for k, v in sorted(task.options.items()):
        opts[k] = [str(p) for p in v] if isinstance(v, list) else v
    return {"file": Path(task.path).name, "task": task.task, "target": task.target, "options": opts}


@dataclass
class RunResult:
    path: str
    code: int
    summary: str
    json_path: str | None = None
    text_path: str | None = None


def _out_dir(task: TaskFile | None, out: str | None, path: Path) -> Path:
    if out is not None:
        return Path(out)
    if task is not None and "out" in task.options:
        p = Path(task.options["out"])
        return p if p.is_absolute() else path.parent / p
    return Path.cwd()


def run_task(
    path: str | os.PathLike,
    out: str | None = None,
    max_steps: int | None = None,
    budget_pairs: int | None = None,
    budget_degree: int | None = None,
    timestamp: str | None = None,
) -> RunResult:
    """Run one task file, writing ``<stem>.json`` and ``<stem>.txt``; never raises for bad input."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        return RunResult(str(path), EXIT_INPUT, f"{path}: cannot read task file: {exc}\n")
    try:
        task = parse_task(text, str(path))
        b = resolve_budget(task, budget_pairs, budget_degree)
    except TaskError as exc:
        if exc.path == "<task>":
            exc = TaskError(exc.message, exc.line, exc.column, str(path))
        return RunResult(str(path), EXIT_INPUT, f"error: {exc}\n")
    outdir = _out_dir(task, out, path)
    code = EXIT_OK
    try:
        with budget(b):
            result = _compute(task, max_steps)
        if isinstance(result, tuple):
            doc, summary = result
            doc["header"] = header(timestamp)
        else:
            doc = trace_to_dict(result, timestamp)
            summary = text_of(doc)
    except BudgetExceeded as exc:
        code = EXIT_BUDGET
        partial = getattr(exc, "partial", None)
        if partial is not None:
            doc = trace_to_dict(partial, timestamp)
            step = len(doc.get("steps", ()))
            summary = text_of(doc)
        else:
            doc = {"kind": "error", "header": header(timestamp)}
            step = None
            summary = ""
        doc["partial"] = True
        doc["error"] = {"type": "budget", "message": str(exc), "line": None, "column": None, "step": step}
        where = f" at step {step}" if step is not None else ""
        summary += f"budget exceeded{where}: {exc}\n"
    doc["task"] = _task_meta(task)
    head = f"{path.name}: {task.task} {task.target}\n"
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        jp, tp = outdir / f"{path.stem}.json", outdir / f"{path.stem}.txt"
        jp.write_text(dumps(doc), encoding="utf-8")
        tp.write_text(head + summary, encoding="utf-8")
    except OSError as exc:
        return RunResult(str(path), EXIT_INPUT, f"error: cannot write output to {outdir}: {exc}\n")
    return RunResult(str(path), code, head + summary, str(jp), str(tp))


def _run_one(args):
    return run_task(*args)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="levicore", description="Cores of polynomial distributions and Kohn's algorithm.")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run task files")
    run.add_argument("tasks", nargs="+", metavar="task-file")
    run.add_argument("--out", help="directory for <stem>.json and <stem>.txt (default: task option out, else cwd)")
    run.add_argument("--jobs", type=int, default=1, help="run independent task files in parallel")
    run.add_argument("--max-steps", type=int, help="override the iteration cap")
    run.add_argument("--budget-pairs", type=int, help=f"S-pair budget (env {ENV_PAIRS})")
    run.add_argument("--budget-degree", type=int, help=f"degree budget (env {ENV_DEGREE})")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    for flag in ("jobs", "max_steps", "budget_pairs", "budget_degree"):
        v = getattr(args, flag)
        if v is not None and v < (0 if flag == "max_steps" else 1):
            print(f"error: --{flag.replace('_', '-')} must be positive", file=sys.stderr)
            return EXIT_INPUT
    jobs = [(t, args.out, args.max_steps, args.budget_pairs, args.budget_degree) for t in args.tasks]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    for r in results:
        stream = sys.stdout if r.code != EXIT_INPUT else sys.stderr
        stream.write(r.summary)
    return max(r.code for r in results)


if __name__ == "__main__":
    sys.exit(main())
